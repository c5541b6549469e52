"""Two-particle ("double double-slit") interferometry bookkeeping.

Beams are one-dimensional: wavenumbers are signed scalars along the common
axis.  Conditional detector probabilities use the equal-amplitude
normalization N**2 R_L**2 R_R**2 = 1/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import InvalidConfig

LEFT = ("D1", "D2", "D5")
RIGHT = ("D3", "D4", "D6")
WHICH_WAY = ("D5", "D6")

# Only (D2,D4), (D2,D3) and the which-way pairs are stated outcomes; (D1,D4)
# and (D1,D3) follow from beam-splitter complementarity.
PHASE_OFFSETS = {
    frozenset({"D2", "D4"}): 0.0,
    frozenset({"D2", "D3"}): math.pi,
    frozenset({"D1", "D4"}): math.pi,
    frozenset({"D1", "D3"}): 0.0,
}
INFERRED_PAIRS = (frozenset({"D1", "D4"}), frozenset({"D1", "D3"}))
WHICH_WAY_PHASE = math.pi / 2


@dataclass(frozen=True)
class BeamSetup:
    k1: float
    k2: float
    k1p: float
    k2p: float
    dk: float = 0.0
    Phi1: float = 0.0
    Phi2: float = 0.0
    RL: float = 1.0
    RR: float = 1.0
    RLp: float = 1.0
    RRp: float = 1.0
    N: float = 1.0

    def __post_init__(self):
        errors = []
        for name in ("k1", "k2", "k1p", "k2p", "dk", "Phi1", "Phi2", "RL", "RR", "RLp", "RRp", "N"):
            if not math.isfinite(getattr(self, name)):
                errors.append((name, "must be finite"))
        if errors:
            raise InvalidConfig(errors)
        for name in ("RL", "RR", "RLp", "RRp"):
            if getattr(self, name) < 0:
                errors.append((name, "amplitudes must be >= 0"))
        if self.N <= 0:
            errors.append(("N", "must be > 0"))
        k, kp = abs(self.k1 + self.k2), abs(self.k1p + self.k2p + self.dk)
        if not math.isclose(k, kp, rel_tol=1e-12, abs_tol=1e-12):
            errors.append(("dk", f"momentum balance violated: |k| = {k!r}, |k'| = {kp!r}"))
        if errors:
            raise InvalidConfig(errors)


@dataclass(frozen=True)
class ChannelMomenta:
    """Channel weights with their summed wavenumbers."""

    weight: float
    k: float
    weight_p: float
    k_p: float

    @property
    def weighted_total(self):
        return self.weight * self.k + self.weight_p * self.k_p


@dataclass(frozen=True)
class DetectorPair:
    left: str
    right: str
    phase_offset: float
    which_way: bool


def detector_pair(a, b):
    """Build the pair for the conditional probability P(a | b).

    Any pair involving D5 or D6 is a which-way measurement; all other pairs
    need one detector from {D1, D2} and one from {D3, D4}.
    """
    known = set(LEFT) | set(RIGHT)
    for d in (a, b):
        if d not in known:
            raise InvalidConfig([("detector", f"unknown detector {d!r}")])
    if a == b:
        raise InvalidConfig([("detector", f"pair needs two different detectors, got {a!r} twice")])
    if a in WHICH_WAY or b in WHICH_WAY:
        return DetectorPair(a, b, WHICH_WAY_PHASE, True)
    try:
        offset = PHASE_OFFSETS[frozenset({a, b})]
    except KeyError:
        raise InvalidConfig([("detector", f"{a} and {b} sit on the same side")]) from None
    return DetectorPair(a, b, offset, False)


def total_average_momentum(setup, x1=0.0, x2=0.0):
    # amplitudes are position independent in this setup, so x1, x2 only fix the point
    return ChannelMomenta(weight=setup.RL * setup.RR, k=setup.k1 + setup.k2,
                          weight_p=setup.RLp * setup.RRp,
                          k_p=setup.k1p + setup.k2p + setup.dk)


def correlated_intensity(setup, r):
    """N**2 [RL**2 RR**2 + RL'**2 RR'**2 + 2 RL RR RL' RR' cos((k - k') r)], r = x1 + x2."""
    mom = total_average_momentum(setup)
    a, b = mom.weight, mom.weight_p
    r = np.asarray(r, dtype=float)
    return setup.N**2 * (a * a + b * b + 2.0 * a * b * np.cos((mom.k - mom.k_p) * r))


def conditional_probability(pair, Phi1, Phi2):
    if pair.which_way:
        return 0.25 * (2.0 + 2.0 * math.cos(WHICH_WAY_PHASE))
    return 0.25 * (2.0 + 2.0 * math.cos(Phi1 - Phi2 + pair.phase_offset))


def phi_scan(pair, n_points):
    """Rows of (phi, probability) on a uniform grid phi in [0, 2 pi], with Phi2 = 0."""
    if n_points < 2:
        raise InvalidConfig([("n_points", "need at least 2 points")])
    phis = np.linspace(0.0, 2.0 * math.pi, n_points)
    return np.array([(phi, conditional_probability(pair, phi, 0.0)) for phi in phis])
