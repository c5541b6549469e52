"""Per-channel Gaussian fields.

A channel is a freely spreading Gaussian starting at ``slit.x0`` with
standard deviation ``slit.sigma0`` and drifting at ``slit.v``.  All functions
broadcast over numpy arrays of ``x`` and ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import PhaseMode, compute_u0


@dataclass(frozen=True)
class ChannelFieldSample:
    p: np.ndarray
    v_conv: np.ndarray
    u_osm: np.ndarray
    phase: np.ndarray


def sigma_t(sigma0, u0, t):
    """Width of the spreading packet, sqrt(sigma0**2 + u0**2 t**2)."""
    return np.sqrt(sigma0**2 + (u0 * np.asarray(t, dtype=float)) ** 2)


def center(slit, t):
    return slit.x0 + slit.v * np.asarray(t, dtype=float)


def _width2(slit, params, t):
    u0 = compute_u0(params, slit.sigma0)
    return u0, slit.sigma0**2 + (u0 * np.asarray(t, dtype=float)) ** 2


def density(slit, params, x, t):
    _, s2 = _width2(slit, params, t)
    xi = np.asarray(x, dtype=float) - center(slit, t)
    return np.exp(-xi**2 / (2.0 * s2)) / np.sqrt(2.0 * np.pi * s2)


def convective_velocity(slit, params, x, t):
    """Drift plus the spreading flow (x - center) u0**2 t / sigma(t)**2."""
    u0, s2 = _width2(slit, params, t)
    t = np.asarray(t, dtype=float)
    xi = np.asarray(x, dtype=float) - center(slit, t)
    return slit.v + xi * u0**2 * t / s2


def osmotic_velocity(slit, params, x, t):
    """-(hbar/2m) d/dx ln P for the channel density; zero at the packet center."""
    u0, s2 = _width2(slit, params, t)
    xi = np.asarray(x, dtype=float) - center(slit, t)
    return u0 * slit.sigma0 * xi / s2


def channel_phase(slit, params, x, t, mode=PhaseMode.PAPER):
    """Phase of one channel in radians, including the extra shift ``slit.dphi``.

    ``qm-exact`` keeps the kinetic-energy term -m v**2 t / 2 and the
    -arctan(u0 t / sigma0) / 2 term of the free packet.  ``paper-verbatim``
    drops both; they only enter phase differences when the two channels have
    different speeds (or widths).
    """
    mode = PhaseMode.parse(mode)
    u0, s2 = _width2(slit, params, t)
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    xi = x - center(slit, t)
    m, hbar = params.mass, params.hbar
    spread = m * u0**2 * t * xi**2 / (2.0 * s2)
    if mode is PhaseMode.QM:
        return (m * slit.v * (x - slit.v * t / 2.0) + spread) / hbar \
            - 0.5 * np.arctan(u0 * t / slit.sigma0) + slit.dphi
    return (m * slit.v * x + spread) / hbar + slit.dphi


def channel_fields(slit, params, x, t, mode=PhaseMode.PAPER):
    return ChannelFieldSample(
        p=density(slit, params, x, t),
        v_conv=convective_velocity(slit, params, x, t),
        u_osm=osmotic_velocity(slit, params, x, t),
        phase=channel_phase(slit, params, x, t, mode),
    )
