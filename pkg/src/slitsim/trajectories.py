"""Averaged trajectories along the effective velocity field J / P.

Seeds are equal-mass quantiles of the initial density, and each trajectory
is integrated with fixed-step RK4.  Steps whose stages land on
near-vanishing density are subdivided; see :func:`integrate`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .interference import total_current, total_density, velocity_field
from .model import InvalidConfig, PhaseMode

NODE_DENSITY = 1e-9
MAX_HALVINGS = 20
STEP_TOL = 1e-7


class GridTooSmall(InvalidConfig):
    pass


class NodeCollision(RuntimeError):
    def __init__(self, traj_id, t):
        self.traj_id = traj_id
        self.t = t
        super().__init__(f"trajectory {traj_id} ran into a density node near t={t!r} "
                         f"(step halved {MAX_HALVINGS} times)")


@dataclass(frozen=True)
class TrajectorySet:
    seeds: np.ndarray
    times: np.ndarray
    positions: np.ndarray  # shape (n_seeds, n_times)
    step: float
    metadata: dict = field(default_factory=dict)

    @property
    def paths(self):
        return [np.column_stack([self.times, row]) for row in self.positions]

    def __len__(self):
        return len(self.seeds)


@dataclass(frozen=True)
class CrossingReport:
    ok: bool
    time: float | None = None
    pair: tuple | None = None
    gap: float | None = None

    def __str__(self):
        if self.ok:
            return "OK"
        i, j = self.pair
        return f"FAIL: trajectories {i} and {j} out of order at t={self.time!r} (gap {self.gap!r})"


def _cdf_table(x, p):
    cells = 0.5 * (p[1:] + p[:-1]) * np.diff(x)
    return np.concatenate([[0.0], np.cumsum(cells)])


def _cdf_at(x, p, table, q):
    """Trapezoid CDF extended inside a cell by integrating the linear interpolant."""
    i = int(np.clip(np.searchsorted(x, q, side="right") - 1, 0, len(x) - 2))
    h = q - x[i]
    slope = (p[i + 1] - p[i]) / (x[i + 1] - x[i])
    return table[i] + p[i] * h + 0.5 * slope * h * h


def _truncation_loss(config, mode, mass):
    """Fraction of the initial mass lying outside the grid."""
    g = config.grid
    t0 = g.t_min
    reach = [(s.x0 + s.v * t0, 12.0 * s.sigma0) for s in config.slits]
    lo = min([g.x_min] + [c - r for c, r in reach])
    hi = max([g.x_max] + [c + r for c, r in reach])
    dx = g.dx
    n_lo = int(np.ceil((g.x_min - lo) / dx))
    n_hi = int(np.ceil((hi - g.x_max) / dx))
    xe = g.x_min + dx * np.arange(-n_lo, g.nx + n_hi)
    pe = total_density(config.slit1, config.slit2, config.params, xe, t0, mode)
    full = _cdf_table(xe, pe)[-1]
    return (full - mass) / full


def seed_positions(config, n, mode=None):
    """n positions carrying equal shares of the initial mass: CDF(q_k) = (k - 1/2)/n.

    Raises :class:`GridTooSmall` when more than 1e-6 of the initial mass
    falls outside the grid.
    """
    if n < 1:
        raise InvalidConfig([("seeds", f"need at least one seed, got {n}")])
    mode = config.mode if mode is None else mode
    x = config.grid.x
    p = total_density(config.slit1, config.slit2, config.params, x, config.grid.t_min, mode)
    table = _cdf_table(x, p)
    mass = table[-1]
    loss = _truncation_loss(config, mode, mass)
    if loss > 1e-6:
        raise GridTooSmall([("grid", f"grid misses a fraction {loss:.3g} of the initial mass (limit 1e-6)")])
    seeds = np.empty(n)
    for k in range(n):
        target = (k + 0.5) / n * mass
        lo, hi = x[0], x[-1]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if _cdf_at(x, p, table, mid) < target:
                lo = mid
            else:
                hi = mid
        seeds[k] = 0.5 * (lo + hi)
    return seeds


def initial_cdf(config, q, mode=None):
    """Normalized trapezoid CDF of the initial density at the points ``q``."""
    mode = config.mode if mode is None else mode
    x = config.grid.x
    p = total_density(config.slit1, config.slit2, config.params, x, config.grid.t_min, mode)
    table = _cdf_table(x, p)
    return np.array([_cdf_at(x, p, table, qi) for qi in np.atleast_1d(q)]) / table[-1]


def _rk4(config, mode, x, t, h):
    def f(xs, ts):
        return velocity_field(config, xs, ts, mode)

    k1, p1 = f(x, t)
    k2, p2 = f(x + 0.5 * h * k1, t + 0.5 * h)
    k3, p3 = f(x + 0.5 * h * k2, t + 0.5 * h)
    k4, p4 = f(x + h * k3, t + h)
    out = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return out, np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))


def _rk4_step(config, mode, x, t, h, ids, depth):
    out, pmin = _rk4(config, mode, x, t, h)
    bad = pmin < NODE_DENSITY
    if depth >= MAX_HALVINGS:
        if bad.any():
            raise NodeCollision(int(ids[bad][0]), float(t))
        return out
    # step doubling: the two-half-step result doubles as the error estimate
    half, _ = _rk4(config, mode, x, t, 0.5 * h)
    fine, _ = _rk4(config, mode, half, t + 0.5 * h, 0.5 * h)
    bad |= np.abs(fine - out) > STEP_TOL
    good = ~bad
    out[good] = fine[good]
    if bad.any():
        half = _rk4_step(config, mode, x[bad], t, 0.5 * h, ids[bad], depth + 1)
        out[bad] = _rk4_step(config, mode, half, t + 0.5 * h, 0.5 * h, ids[bad], depth + 1)
    return out


def integrate(config, seeds, mode=None):
    """RK4 on dx/dt = v_eff(x, t), recorded at every grid time.

    The base step is the grid time spacing.  A step is redone as two half
    steps, recursively and at most 20 levels deep, when any stage sees total
    density below 1e-9 or when one step and two half steps disagree by more
    than ``STEP_TOL``.  The next step starts from the full size again.  Running
    out of halvings is an error only at a density node.
    """
    mode = config.mode if mode is None else PhaseMode.parse(mode)
    seeds = np.asarray(seeds, dtype=float)
    if seeds.ndim != 1 or np.any(np.diff(seeds) <= 0):
        raise InvalidConfig([("seeds", "seed positions must be strictly ascending")])
    times = config.grid.t
    h = config.grid.dt
    ids = np.arange(1, len(seeds) + 1)
    positions = np.empty((len(seeds), len(times)))
    positions[:, 0] = seeds
    x = seeds.copy()
    for i in range(1, len(times)):
        x = _rk4_step(config, mode, x, times[i - 1], h, ids, 0)
        positions[:, i] = x
    return TrajectorySet(seeds=seeds, times=times, positions=positions, step=h,
                         metadata={"config_hash": config.digest(), "mode": mode.value})


def no_crossing_check(ts):
    """Report whether every recorded time keeps the trajectories in seed order."""
    if len(ts) < 2:
        return CrossingReport(ok=True)
    gaps = np.diff(ts.positions, axis=0)  # (n-1, n_times)
    bad = gaps <= 0
    if not bad.any():
        return CrossingReport(ok=True)
    ti = int(np.argmax(bad.any(axis=0)))
    k = int(np.argmax(bad[:, ti]))
    return CrossingReport(ok=False, time=float(ts.times[ti]), pair=(k + 1, k + 2),
                          gap=float(gaps[k, ti]))


def current_at(config, x_probe, mode=None):
    """J_tot(x_probe, t) at every grid time."""
    mode = config.mode if mode is None else mode
    return total_current(config.slit1, config.slit2, config.params,
                         float(x_probe), config.grid.t, mode).total


def reversal_time(config, x_probe, mode=None):
    """First time the total current at ``x_probe`` changes sign, or None.

    Exact zeros are skipped; the crossing is located by linear interpolation
    between the two grid times that bracket it.
    """
    g = config.grid
    if not g.x_min <= x_probe <= g.x_max:
        raise InvalidConfig([("probe", f"x_probe={x_probe!r} outside the grid")])
    times = g.t
    j = current_at(config, x_probe, mode)
    nz = np.flatnonzero(j != 0.0)
    for a, b in zip(nz[:-1], nz[1:]):
        if np.sign(j[a]) != np.sign(j[b]):
            return float(times[a] + (times[b] - times[a]) * j[a] / (j[a] - j[b]))
    return None
