"""Cross-check of the classical fields against the wave-packet reference."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import interference
from ..model import PhaseMode
from . import packets

DENSITY_FLOOR = 1e-12
VELOCITY_FLOOR = 1e-6


@dataclass(frozen=True)
class FieldComparison:
    """Worst relative errors over all sampled frames and where they occur.

    Density errors are pointwise relative (where density > 1e-12); current
    errors are relative to the frame's max |J|; velocity errors are relative
    to the frame's max |v| over points with density > 1e-6.
    """

    density: float
    current: float
    velocity: float
    where: dict = field(default_factory=dict)

    def passed(self, tol=1e-9):
        return max(self.density, self.current, self.velocity) < tol


def _worst(err, x, t, current):
    i = int(np.argmax(err))
    if err[i] > current[0]:
        return float(err[i]), (float(t), float(x[i]))
    return current


def compare_fields(config, t_samples=None, mode=None):
    mode = config.mode if mode is None else PhaseMode.parse(mode)
    if t_samples is None:
        t_samples = config.grid.t
    s1, s2, params = config.slit1, config.slit2, config.params
    worst = {"density": (0.0, None), "current": (0.0, None), "velocity": (0.0, None)}
    for t in np.atleast_1d(np.asarray(t_samples, dtype=float)):
        frame = interference.evaluate_frame(config, t, mode)
        x = frame.x
        rho = packets.superposition_density(s1, s2, params, x, t)
        jq = packets.quantum_current(s1, s2, params, x, t)
        vq = packets.bohm_velocity(s1, s2, params, x, t)

        mask = rho > DENSITY_FLOOR
        err = np.where(mask, np.abs(frame.p_tot - rho) / np.where(mask, rho, 1.0), 0.0)
        worst["density"] = _worst(err, x, t, worst["density"])

        jmax = np.max(np.abs(jq))
        if jmax > 0:
            worst["current"] = _worst(np.abs(frame.j.total - jq) / jmax, x, t, worst["current"])

        vmask = rho > VELOCITY_FLOOR
        vmax = np.max(np.abs(np.where(vmask, vq, 0.0)))
        if vmax > 0:
            err = np.where(vmask, np.abs(frame.v_eff - vq), 0.0) / vmax
            worst["velocity"] = _worst(err, x, t, worst["velocity"])
    return FieldComparison(density=worst["density"][0], current=worst["current"][0],
                           velocity=worst["velocity"][0],
                           where={k: v[1] for k, v in worst.items()})
