"""Two-channel superposition and the four-term probability current.

The total density is ``P1 + P2 + 2 sqrt(P1 P2) cos(phi12)`` and the total
current splits into two convective channel terms, a convective interference
term, and the osmotic cross-channel ("entangling") term
``sqrt(P1 P2) (u1 - u2) sin(phi12)``.  Both density and current are divided
by the number of channels so that well separated packets integrate to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import wavepacket as wp
from .model import InvalidConfig, PhaseMode, compute_u0

NODE_EPS = 1e-12


@dataclass(frozen=True)
class CurrentDecomposition:
    term_conv_1: np.ndarray
    term_conv_2: np.ndarray
    term_interf_conv: np.ndarray
    term_entangling: np.ndarray
    total: np.ndarray


@dataclass(frozen=True)
class FieldFrame:
    t: float
    x: np.ndarray
    p_tot: np.ndarray
    j: CurrentDecomposition
    phi12: np.ndarray
    v_eff: np.ndarray


@dataclass(frozen=True)
class FieldHistory:
    """Fields on the full (t, x) grid; every array has shape (nt, nx)."""

    t: np.ndarray
    x: np.ndarray
    p_tot: np.ndarray
    j: CurrentDecomposition
    phi12: np.ndarray
    v_eff: np.ndarray

    def frame(self, i):
        j = CurrentDecomposition(*(getattr(self.j, f)[i] for f in _TERMS))
        return FieldFrame(float(self.t[i]), self.x, self.p_tot[i], j, self.phi12[i], self.v_eff[i])


_TERMS = ("term_conv_1", "term_conv_2", "term_interf_conv", "term_entangling", "total")


@dataclass(frozen=True)
class ContinuityReport:
    residual: float
    scale: float
    dx: float
    dt: float

    @property
    def relative(self):
        return self.residual / self.scale if self.scale > 0 else 0.0


def n_channels(slit2):
    return 1 if slit2 is None else 2


def phase_difference(slit1, slit2, params, x, t, mode=PhaseMode.PAPER):
    """phi2 - phi1 in radians (zero everywhere for a single slit)."""
    mode = PhaseMode.parse(mode)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if slit2 is None:
        return np.zeros(np.broadcast(x, t).shape)
    if mode is PhaseMode.QM:
        return wp.channel_phase(slit2, params, x, t, mode) - wp.channel_phase(slit1, params, x, t, mode)
    if slit1.sigma0 != slit2.sigma0:
        raise InvalidConfig([("slit2.sigma0", "paper-verbatim phase needs equal sigma0 for both slits")])
    m, hbar = params.mass, params.hbar
    u0 = compute_u0(params, slit1.sigma0)
    s2 = wp.sigma_t(slit1.sigma0, u0, t) ** 2
    quad = (x - slit2.x0 - slit2.v * t) ** 2 - (x - slit1.x0 - slit1.v * t) ** 2
    return (m * (slit2.v - slit1.v) * x + 0.5 * m * u0**2 * quad * t / s2) / hbar \
        + (slit2.dphi - slit1.dphi)


def _superpose(slit1, slit2, params, x, t, mode):
    c1 = wp.channel_fields(slit1, params, x, t, mode)
    phi12 = phase_difference(slit1, slit2, params, x, t, mode)
    norm = n_channels(slit2)
    if slit2 is None:
        p_tot = c1.p / norm
        zero = np.zeros_like(p_tot)
        j = CurrentDecomposition(c1.p * c1.v_conv / norm, zero, zero, zero, c1.p * c1.v_conv / norm)
        return p_tot, j, phi12
    c2 = wp.channel_fields(slit2, params, x, t, mode)
    root = np.sqrt(c1.p * c2.p)
    # P1 + P2 + 2 sqrt(P1 P2) cos(phi12), rearranged to stay accurate near nodes
    p_tot = ((np.sqrt(c1.p) - np.sqrt(c2.p)) ** 2 + 4.0 * root * np.cos(0.5 * phi12) ** 2) / norm
    conv1 = c1.p * c1.v_conv / norm
    conv2 = c2.p * c2.v_conv / norm
    interf = root * (c1.v_conv + c2.v_conv) * np.cos(phi12) / norm
    ent = root * (c1.u_osm - c2.u_osm) * np.sin(phi12) / norm
    return p_tot, CurrentDecomposition(conv1, conv2, interf, ent, conv1 + conv2 + interf + ent), phi12


def total_density(slit1, slit2, params, x, t, mode=PhaseMode.PAPER):
    return _superpose(slit1, slit2, params, x, t, mode)[0]


def total_current(slit1, slit2, params, x, t, mode=PhaseMode.PAPER):
    return _superpose(slit1, slit2, params, x, t, mode)[1]


def effective_velocity(decomp, p_tot):
    """Current over density, set to 0 where the density is at or below NODE_EPS."""
    p_tot = np.asarray(p_tot, dtype=float)
    total = np.asarray(decomp.total, dtype=float)
    ok = p_tot > NODE_EPS
    return np.where(ok, total / np.where(ok, p_tot, 1.0), 0.0)


def velocity_field(config, x, t, mode=None):
    """Effective velocity and total density at arbitrary points (used by the integrator)."""
    mode = config.mode if mode is None else mode
    p_tot, j, _ = _superpose(config.slit1, config.slit2, config.params, x, t, mode)
    return effective_velocity(j, p_tot), p_tot


def entangling_fraction(frame):
    """L1 norm of the entangling term over the L1 norm of the total current.

    Returns 0.0 for a frame without any current.
    """
    if np.size(frame.x) == 0:
        raise ValueError("empty frame")
    ent = math.fsum(np.abs(np.asarray(frame.j.term_entangling)).tolist())
    tot = math.fsum(np.abs(np.asarray(frame.j.total)).tolist())
    return ent / tot if tot > 0 else 0.0


def heat_flow_difference(slit1, slit2, params, x, t):
    """Gradient of the heat difference Q2 - Q1, i.e. -2 omega m (u2 - u1)."""
    u1 = wp.osmotic_velocity(slit1, params, x, t)
    u2 = wp.osmotic_velocity(slit2, params, x, t)
    return -2.0 * params.omega * params.mass * (u2 - u1)


def evaluate_frame(config, t, mode=None):
    mode = config.mode if mode is None else PhaseMode.parse(mode)
    x = config.grid.x
    p_tot, j, phi12 = _superpose(config.slit1, config.slit2, config.params, x, float(t), mode)
    return FieldFrame(float(t), x, p_tot, j, phi12, effective_velocity(j, p_tot))


def evaluate_history(config, mode=None, grid=None):
    """All fields on every (t, x) point of ``grid`` (defaults to the config grid)."""
    mode = config.mode if mode is None else PhaseMode.parse(mode)
    grid = config.grid if grid is None else grid
    t, x = grid.t, grid.x
    p_tot, j, phi12 = _superpose(config.slit1, config.slit2, config.params,
                                 x[None, :], t[:, None], mode)
    phi12 = np.broadcast_to(phi12, p_tot.shape)
    return FieldHistory(t, x, p_tot, j, phi12, effective_velocity(j, p_tot))


def continuity_residual(config, mode=None, grid=None):
    """max |dP/dt + dJ/dx| over interior points, by central differences.

    ``scale`` is max |dP/dt| over the same points, so ``relative`` is the
    dimensionless residual.
    """
    grid = config.grid if grid is None else grid
    if grid.nx < 3 or grid.nt < 3:
        raise InvalidConfig([("grid", "continuity check needs nx >= 3 and nt >= 3")])
    h = evaluate_history(config, mode, grid)
    residual, scale = residual_from_fields(h.p_tot, h.j.total, grid.dx, grid.dt)
    return ContinuityReport(residual=residual, scale=scale, dx=grid.dx, dt=grid.dt)


def residual_from_fields(p, j, dx, dt):
    """(max |dP/dt + dJ/dx|, max |dP/dt|) for (nt, nx) arrays on a uniform grid."""
    dpdt = (p[2:, 1:-1] - p[:-2, 1:-1]) / (2.0 * dt)
    djdx = (j[1:-1, 2:] - j[1:-1, :-2]) / (2.0 * dx)
    return float(np.max(np.abs(dpdt + djdx))), float(np.max(np.abs(dpdt)))
