"""Configuration types, unit system and grid definitions.

Everything here is an immutable value object.  A run is described by a
:class:`SimConfig`, which is only ever produced by :func:`validate` (or the
config-file loader built on top of it), so downstream code can assume the
invariants hold.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class InvalidConfig(ValueError):
    """Raised when a configuration violates one or more invariants.

    ``errors`` is a list of ``(field_name, message)`` pairs, one per violated
    invariant, in the order they were checked.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{name}: {msg}" for name, msg in self.errors))

    @property
    def fields(self):
        return [name for name, _ in self.errors]


class PhaseMode(enum.Enum):
    PAPER = "paper-verbatim"
    QM = "qm-exact"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"paper": cls.PAPER, "paper-verbatim": cls.PAPER,
                   "qm": cls.QM, "qm-exact": cls.QM}
        try:
            return aliases[key]
        except KeyError:
            raise InvalidConfig([("phase_mode", f"unknown phase mode {value!r}")]) from None


@dataclass(frozen=True)
class PhysicalParams:
    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0


@dataclass(frozen=True)
class SlitConfig:
    """One Gaussian channel: slit center, drift velocity, initial width, extra phase."""

    x0: float
    v: float = 0.0
    sigma0: float = 1.0
    dphi: float = 0.0


@dataclass(frozen=True)
class GridSpec:
    x_min: float = -15.0
    x_max: float = 15.0
    nx: int = 1501
    t_min: float = 0.0
    t_max: float = 16.0
    nt: int = 801

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def t(self):
        return np.linspace(self.t_min, self.t_max, self.nt)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dt(self):
        if self.nt < 2:
            return 0.0
        return (self.t_max - self.t_min) / (self.nt - 1)

    def refined(self, factor=2):
        """Grid with every spacing divided by ``factor`` over the same extent."""
        return GridSpec(self.x_min, self.x_max, factor * (self.nx - 1) + 1,
                        self.t_min, self.t_max, factor * (self.nt - 1) + 1)


@dataclass(frozen=True)
class SimConfig:
    params: PhysicalParams = field(default_factory=PhysicalParams)
    slits: tuple = ()
    grid: GridSpec = field(default_factory=GridSpec)
    mode: PhaseMode = PhaseMode.PAPER

    @property
    def slit1(self):
        return self.slits[0]

    @property
    def slit2(self):
        return self.slits[1] if len(self.slits) > 1 else None

    def replace(self, **changes):
        """Return a re-validated copy with some top-level fields swapped."""
        kw = dict(params=self.params, slits=self.slits, grid=self.grid, mode=self.mode)
        kw.update(changes)
        return validate(kw["params"], kw["slits"], kw["grid"], kw["mode"])

    def to_text(self):
        """Serialize to the ``key = value`` config format (round-trips via :func:`parse_config`)."""
        lines = [f"hbar = {self.params.hbar!r}", f"mass = {self.params.mass!r}",
                 f"omega = {self.params.omega!r}"]
        for i, s in enumerate(self.slits, start=1):
            for name in ("x0", "v", "sigma0", "dphi"):
                lines.append(f"slit{i}.{name} = {getattr(s, name)!r}")
        g = self.grid
        for name in ("x_min", "x_max", "nx", "t_min", "t_max", "nt"):
            lines.append(f"grid.{name} = {getattr(g, name)!r}")
        lines.append(f"phase_mode = {self.mode.value}")
        return "\n".join(lines) + "\n"

    def digest(self):
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


def compute_u0(params, sigma0):
    """Initial osmotic velocity scale hbar / (2 m sigma0)."""
    if not _is_real(sigma0) or not sigma0 > 0:
        raise InvalidConfig([("sigma0", f"must be > 0, got {sigma0!r}")])
    return params.hbar / (2.0 * params.mass * sigma0)


def _is_real(value):
    return isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool)


def _check_positive(errors, name, value):
    if not _is_real(value) or not math.isfinite(value):
        errors.append((name, f"must be a finite number, got {value!r}"))
    elif value <= 0:
        errors.append((name, f"must be > 0, got {value!r}"))


def _check_finite(errors, name, value):
    if not _is_real(value) or not math.isfinite(value):
        errors.append((name, f"must be a finite number, got {value!r}"))


def _check_count(errors, name, value, minimum):
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        errors.append((name, f"must be an integer, got {value!r}"))
    elif value < minimum:
        errors.append((name, f"must be >= {minimum}, got {value!r}"))


def validate(params=None, slits=(), grid=None, mode=PhaseMode.PAPER):
    """Check every invariant and return a :class:`SimConfig`.

    All violations are collected before raising, so a single
    :class:`InvalidConfig` names every offending field.
    """
    errors = []
    params = PhysicalParams() if params is None else params
    grid = GridSpec() if grid is None else grid

    if not isinstance(params, PhysicalParams):
        errors.append(("params", "must be a PhysicalParams"))
    else:
        for name in ("hbar", "mass", "omega"):
            _check_positive(errors, name, getattr(params, name))

    try:
        slits = tuple(slits)
    except TypeError:
        errors.append(("slits", "must be a sequence of SlitConfig"))
        slits = ()
    if not 1 <= len(slits) <= 2:
        errors.append(("slits", f"need 1 or 2 slits, got {len(slits)}"))
    for i, s in enumerate(slits[:2], start=1):
        if not isinstance(s, SlitConfig):
            errors.append((f"slit{i}", "must be a SlitConfig"))
            continue
        _check_finite(errors, f"slit{i}.x0", s.x0)
        _check_finite(errors, f"slit{i}.v", s.v)
        _check_positive(errors, f"slit{i}.sigma0", s.sigma0)
        _check_finite(errors, f"slit{i}.dphi", s.dphi)

    if not isinstance(grid, GridSpec):
        errors.append(("grid", "must be a GridSpec"))
    else:
        for name in ("x_min", "x_max", "t_min", "t_max"):
            _check_finite(errors, f"grid.{name}", getattr(grid, name))
        _check_count(errors, "grid.nx", grid.nx, 2)
        _check_count(errors, "grid.nt", grid.nt, 1)
        names = {n for n, _ in errors}
        if not names & {"grid.x_min", "grid.x_max"} and not grid.x_min < grid.x_max:
            errors.append(("grid.x_max", "x_min must be < x_max"))
        if not names & {"grid.t_min", "grid.t_max"}:
            if not grid.t_min <= grid.t_max:
                errors.append(("grid.t_max", "t_min must be <= t_max"))
            elif grid.t_min < 0:
                errors.append(("grid.t_min", "must be >= 0"))

    try:
        mode = PhaseMode.parse(mode)
    except InvalidConfig as exc:
        errors.extend(exc.errors)

    if errors:
        raise InvalidConfig(errors)
    return SimConfig(params=params, slits=slits, grid=grid, mode=mode)


# --- config file -----------------------------------------------------------

_SLIT_KEYS = ("x0", "v", "sigma0", "dphi")
_GRID_KEYS = ("x_min", "x_max", "nx", "t_min", "t_max", "nt")


def _parse_number(text):
    """Float literal, or a multiple of pi such as ``pi``, ``-pi/2``, ``0.5*pi``."""
    text = text.strip().replace(" ", "")
    if "pi" not in text:
        return float(text)
    num, slash, div = text.partition("/")
    if not num.endswith("pi"):
        raise ValueError(text)
    coef = num[:-2].rstrip("*")
    coef = float(coef + "1") if coef in ("", "+", "-") else float(coef)
    return coef * math.pi / (float(div) if slash else 1.0)


def _parse_int(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


def parse_config(text, source="<string>"):
    """Parse ``key = value`` lines into a validated :class:`SimConfig`.

    Unknown or duplicated keys and unparsable values are errors; the file is
    rejected as a whole rather than partially applied.
    """
    errors = []
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append((f"line {lineno}", f"expected 'key = value' in {source}"))
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if key in values:
            errors.append((key, f"duplicate key (line {lineno})"))
            continue
        values[key] = (lineno, value)

    known = {"hbar", "mass", "omega", "phase_mode"}
    known |= {f"slit{i}.{k}" for i in (1, 2) for k in _SLIT_KEYS}
    known |= {f"grid.{k}" for k in _GRID_KEYS}
    for key, (lineno, _) in values.items():
        if key not in known:
            errors.append((key, f"unknown key (line {lineno})"))

    def get(key, default, conv=_parse_number):
        if key not in values:
            return default
        lineno, value = values[key]
        try:
            return conv(value)
        except ValueError:
            errors.append((key, f"cannot parse {value!r} (line {lineno})"))
            return default

    params = PhysicalParams(hbar=get("hbar", 1.0), mass=get("mass", 1.0), omega=get("omega", 1.0))
    slits = []
    for i in (1, 2):
        present = [k for k in _SLIT_KEYS if f"slit{i}.{k}" in values]
        if not present:
            continue
        if f"slit{i}.x0" not in values:
            errors.append((f"slit{i}.x0", "required when slit is given"))
        slits.append(SlitConfig(x0=get(f"slit{i}.x0", 0.0), v=get(f"slit{i}.v", 0.0),
                                sigma0=get(f"slit{i}.sigma0", 1.0), dphi=get(f"slit{i}.dphi", 0.0)))
    if len(slits) == 1 and "slit2.x0" in values and "slit1.x0" not in values:
        errors.append(("slit1", "slit2 given without slit1"))
    d = GridSpec()
    grid = GridSpec(x_min=get("grid.x_min", d.x_min), x_max=get("grid.x_max", d.x_max),
                    nx=get("grid.nx", d.nx, _parse_int), t_min=get("grid.t_min", d.t_min),
                    t_max=get("grid.t_max", d.t_max), nt=get("grid.nt", d.nt, _parse_int))
    mode = values.get("phase_mode", (0, PhaseMode.PAPER.value))[1]

    if errors:
        raise InvalidConfig(errors)
    return validate(params, slits, grid, mode)


def load_config(path):
    path = Path(path)
    return parse_config(path.read_text(), source=str(path))


def canonical_config(dphi=0.0, v=0.5, mode=PhaseMode.PAPER, grid=None):
    """Symmetric two-slit setup used as a stand-in for the double-slit figures.

    The source figures carry no numeric parameters; these values are a
    reconstruction: slits at -5 and +5, sigma0 = 1, speeds +/-v, and the
    extra phase ``dphi`` applied to slit 1.
    """
    slits = (SlitConfig(x0=-5.0, v=v, sigma0=1.0, dphi=dphi),
             SlitConfig(x0=5.0, v=-v, sigma0=1.0))
    return validate(PhysicalParams(), slits, grid or GridSpec(), mode)
