"""Free-particle Gaussian wave packets in the standard complex form.

This module is the independent reference: it shares the configuration types
with the classical model but none of its formulas.
"""

from __future__ import annotations

import numpy as np

NODE_EPS = 1e-12


def _packet_parts(slit, params, x, t):
    hbar, m = params.hbar, params.mass
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    s0 = slit.sigma0
    # complex width sigma0 * (1 + i hbar t / (2 m sigma0**2))
    sbar = s0 * (1.0 + 1j * hbar * t / (2.0 * m * s0**2))
    xi = x - slit.x0 - slit.v * t
    k = m * slit.v / hbar
    amp = (2.0 * np.pi * s0**2) ** -0.25 * np.sqrt(s0 / sbar)
    psi = amp * np.exp(-xi**2 / (4.0 * s0 * sbar) + 1j * k * (x - slit.v * t / 2.0) + 1j * slit.dphi)
    dlog = -xi / (2.0 * s0 * sbar) + 1j * k
    return psi, dlog


def packet(slit, params, x, t):
    """psi(x, t) for one slit, carrying the extra phase exp(i dphi)."""
    return _packet_parts(slit, params, x, t)[0]


def packet_dx(slit, params, x, t):
    """Closed-form d psi / dx."""
    psi, dlog = _packet_parts(slit, params, x, t)
    return psi * dlog


def _superposition(slit1, slit2, params, x, t):
    psi, dpsi = _packet_parts(slit1, params, x, t)
    dpsi = psi * dpsi
    if slit2 is None:
        return psi, dpsi, 1
    psi2, dlog2 = _packet_parts(slit2, params, x, t)
    return psi + psi2, dpsi + psi2 * dlog2, 2


def superposition_density(slit1, slit2, params, x, t):
    psi, _, norm = _superposition(slit1, slit2, params, x, t)
    return (psi.real**2 + psi.imag**2) / norm


def quantum_current(slit1, slit2, params, x, t):
    """(hbar/m) Im(conj(psi) dpsi/dx), divided by the channel count."""
    psi, dpsi, norm = _superposition(slit1, slit2, params, x, t)
    return params.hbar / params.mass * np.imag(np.conj(psi) * dpsi) / norm


def bohm_velocity(slit1, slit2, params, x, t):
    psi, dpsi, norm = _superposition(slit1, slit2, params, x, t)
    rho = (psi.real**2 + psi.imag**2) / norm
    j = params.hbar / params.mass * np.imag(np.conj(psi) * dpsi) / norm
    ok = rho > NODE_EPS
    return np.where(ok, j / np.where(ok, rho, 1.0), 0.0)
