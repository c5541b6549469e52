import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import argrelextrema

from slitsim import interference as it
from slitsim import wavepacket as wp
from slitsim.model import GridSpec, InvalidConfig, PhaseMode, PhysicalParams, SlitConfig, canonical_config
from slitsim.oracle import quantum_current, superposition_density

P = PhysicalParams()


def wrap(a):
    return np.angle(np.exp(1j * np.asarray(a)))


def test_phase_difference_symmetric_center(symmetric_slits):
    s1, s2 = symmetric_slits
    t = np.linspace(0, 16, 33)
    for mode in PhaseMode:
        assert np.all(it.phase_difference(s1, s2, P, 0.0, t, mode) == 0.0)


def test_phase_difference_shift(symmetric_slits):
    s1, s2 = symmetric_slits
    s1 = SlitConfig(s1.x0, s1.v, s1.sigma0, dphi=math.pi)
    assert it.phase_difference(s1, s2, P, 0.0, 3.0) == -math.pi


def test_phase_difference_modes_and_oracle():
    s1, s2 = SlitConfig(-5, 0.5, 1.0), SlitConfig(5, -0.5, 1.0)
    paper = it.phase_difference(s1, s2, P, 1.0, 4.0, PhaseMode.PAPER)
    qm = it.phase_difference(s1, s2, P, 1.0, 4.0, PhaseMode.QM)
    from slitsim.oracle import packet
    oracle = np.angle(packet(s2, P, 1.0, 4.0)) - np.angle(packet(s1, P, 1.0, 4.0))
    assert abs(wrap(paper - qm)) < 1e-12
    assert abs(wrap(paper - oracle)) < 1e-12


def test_verbatim_mode_needs_equal_widths():
    with pytest.raises(InvalidConfig):
        it.phase_difference(SlitConfig(-5, 0.5, 1.0), SlitConfig(5, -0.5, 2.0), P, 0.0, 1.0)
    # qm-exact handles unequal widths
    it.phase_difference(SlitConfig(-5, 0.5, 1.0), SlitConfig(5, -0.5, 2.0), P, 0.0, 1.0, PhaseMode.QM)


@settings(max_examples=200)
@given(v=st.floats(-2, 2), flip=st.booleans(), x01=st.floats(-10, 0), x02=st.floats(0, 10),
       sigma0=st.floats(0.3, 3), d1=st.floats(-4, 4), d2=st.floats(-4, 4),
       x=st.floats(-15, 15), t=st.floats(0, 20))
def test_modes_agree_when_speeds_match(v, flip, x01, x02, sigma0, d1, d2, x, t):
    s1 = SlitConfig(x01, v, sigma0, d1)
    s2 = SlitConfig(x02, -v if flip else v, sigma0, d2)
    a = it.phase_difference(s1, s2, P, x, t, PhaseMode.PAPER)
    b = it.phase_difference(s1, s2, P, x, t, PhaseMode.QM)
    assert abs(wrap(a - b)) < 1e-12


def test_total_density_extremes():
    # two identical channels: constructive, then destructive via a pi shift
    s = SlitConfig(0.0, 0.0, 1.0)
    p = wp.density(s, P, 0.3, 2.0)
    assert it.total_density(s, s, P, 0.3, 2.0) == pytest.approx(2 * p, rel=1e-15)
    s_pi = SlitConfig(0.0, 0.0, 1.0, dphi=math.pi)
    assert it.total_density(s, s_pi, P, 0.3, 2.0) == pytest.approx(0.0, abs=1e-30)


def test_total_density_matches_oracle(canonical):
    x = canonical.grid.x
    for t in (0.0, 3.3, 7.5, 10.0, 16.0):
        ours = it.total_density(canonical.slit1, canonical.slit2, P, x, t)
        ref = superposition_density(canonical.slit1, canonical.slit2, P, x, t)
        mask = ref > 1e-12
        assert np.max(np.abs(ours - ref)[mask] / ref[mask]) < 1e-9


def test_total_current_symmetric_center(canonical):
    t = canonical.grid.t
    j = it.total_current(canonical.slit1, canonical.slit2, P, 0.0, t)
    assert np.all(j.total == 0.0)


def test_total_current_single_slit():
    s = SlitConfig(-2.0, 0.4, 1.0)
    x = np.linspace(-8, 8, 81)
    j = it.total_current(s, None, P, x, 3.0)
    expected = wp.density(s, P, x, 3.0) * wp.convective_velocity(s, P, x, 3.0)
    np.testing.assert_array_equal(j.total, expected)
    for term in (j.term_conv_2, j.term_interf_conv, j.term_entangling):
        assert np.all(term == 0.0)


def test_total_current_matches_oracle(canonical):
    x = canonical.grid.x
    for t in (0.5, 4.0, 9.0, 12.25):
        j = it.total_current(canonical.slit1, canonical.slit2, P, x, t).total
        ref = quantum_current(canonical.slit1, canonical.slit2, P, x, t)
        assert np.max(np.abs(j - ref)) < 1e-9 * np.max(np.abs(ref))


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0, 4), st.floats(0, 16))
def test_decomposition_closure(v1, v2, dphi, t):
    s1, s2 = SlitConfig(-5, v1, 1.0, dphi), SlitConfig(5, v2, 1.0)
    x = np.linspace(-15, 15, 61)
    j = it.total_current(s1, s2, P, x, t, PhaseMode.QM)
    parts = j.term_conv_1 + j.term_conv_2 + j.term_interf_conv + j.term_entangling
    scale = np.abs(j.term_conv_1) + np.abs(j.term_conv_2) + np.abs(j.term_interf_conv) + np.abs(j.term_entangling)
    assert np.all(np.abs(j.total - parts) <= 1e-12 * np.maximum(scale, 1e-300))


@pytest.mark.parametrize("dphi", [0.0, math.pi])
def test_antisymmetry(dphi):
    cfg = canonical_config(dphi=dphi, grid=GridSpec(nx=301, nt=81))
    h = it.evaluate_history(cfg)
    pmax = np.max(h.p_tot)
    jmax = np.max(np.abs(h.j.total))
    assert np.max(np.abs(h.p_tot - h.p_tot[:, ::-1])) <= 1e-12 * pmax
    assert np.max(np.abs(h.j.total + h.j.total[:, ::-1])) <= 1e-12 * jmax


def fringe_center(cfg, t):
    f = it.evaluate_frame(cfg, t)
    mid = len(f.x) // 2
    assert f.x[mid] == 0.0
    return f.p_tot[mid - 1], f.p_tot[mid], f.p_tot[mid + 1]


def test_fringe_inversion_after_overlap():
    plain, shifted = canonical_config(), canonical_config(dphi=math.pi)
    for t in np.arange(4.0, 16.01, 1.0):
        left, c, right = fringe_center(plain, t)
        assert c > left and c > right
        left, c, right = fringe_center(shifted, t)
        assert c < left and c < right


def test_effective_velocity_examples():
    s = SlitConfig(-2.0, 0.4, 1.0)
    p = it.total_density(s, None, P, -2.0 + 0.4 * 3, 3.0)
    j = it.total_current(s, None, P, -2.0 + 0.4 * 3, 3.0)
    assert it.effective_velocity(j, p) == pytest.approx(0.4, rel=1e-15)
    zero = it.CurrentDecomposition(*([np.array([1.0])] * 5))
    assert it.effective_velocity(zero, np.array([0.0]))[0] == 0.0


def test_effective_velocity_matches_bohm(canonical):
    from slitsim.oracle import bohm_velocity
    x = canonical.grid.x
    for t in (2.0, 8.0, 14.0):
        f = it.evaluate_frame(canonical, t)
        vq = bohm_velocity(canonical.slit1, canonical.slit2, P, x, t)
        mask = f.p_tot > 1e-6
        rel = np.abs(f.v_eff - vq)[mask] / np.maximum(np.abs(vq[mask]), 1e-300)
        # pointwise relative, away from the exact zeros of the velocity
        keep = np.abs(vq[mask]) > 1e-6
        assert np.max(rel[keep]) < 1e-7


def test_entangling_fraction_single_slit():
    cfg = canonical_config().replace(slits=(SlitConfig(-5, 0.5),))
    assert it.entangling_fraction(it.evaluate_frame(cfg, 5.0)) == 0.0


def test_entangling_fraction_static_slits_includes_spreading():
    # with v1 = v2 = 0 the channel terms still carry the spreading flow, so the
    # fraction is the entangling L1 norm over the full quantum current
    cfg = canonical_config(v=0.0)
    s1, s2 = cfg.slits
    for t in (4.0, 10.0):
        f = it.evaluate_frame(cfg, t)
        spread = wp.density(s1, P, f.x, t) * wp.convective_velocity(s1, P, f.x, t) / 2
        np.testing.assert_allclose(f.j.term_conv_1, spread, rtol=1e-15)
        jq = quantum_current(s1, s2, P, f.x, t)
        expected = np.sum(np.abs(f.j.term_entangling)) / np.sum(np.abs(jq))
        assert it.entangling_fraction(f) == pytest.approx(expected, rel=1e-9)
        assert 0.0 < it.entangling_fraction(f) < 1.0


def test_entangling_fraction_t0_is_zero_sum_safe():
    f = it.evaluate_frame(canonical_config(v=0.0), 0.0)
    assert np.all(f.j.total == 0.0)
    assert it.entangling_fraction(f) == 0.0


def test_heat_flow_identical_slits():
    s = SlitConfig(1.0, 0.2, 1.0)
    assert np.all(it.heat_flow_difference(s, s, P, np.linspace(-3, 3, 7), 2.0) == 0.0)


def test_heat_flow_symmetric_center(symmetric_slits):
    s1, s2 = symmetric_slits
    t = 3.0
    u1 = wp.osmotic_velocity(s1, P, 0.0, t)
    u2 = wp.osmotic_velocity(s2, P, 0.0, t)
    value = it.heat_flow_difference(s1, s2, P, 0.0, t)
    assert value == -2.0 * P.omega * P.mass * (u2 - u1)
    assert value != 0.0


@pytest.mark.parametrize("omega", [1.0, 2.5])
def test_entangling_term_is_heat_flow(symmetric_slits, omega):
    params = PhysicalParams(omega=omega)
    s1, s2 = symmetric_slits
    x = np.linspace(-15, 15, 301)
    for t in (1.0, 6.0, 12.0):
        j = it.total_current(s1, s2, params, x, t)
        phi = it.phase_difference(s1, s2, params, x, t)
        root = np.sqrt(wp.density(s1, params, x, t) * wp.density(s2, params, x, t))
        grad_q = it.heat_flow_difference(s1, s2, params, x, t)
        restated = root * grad_q * np.sin(phi) / (2 * omega * params.mass) / 2  # two-channel norm
        assert np.max(np.abs(j.term_entangling - restated)) <= 1e-12 * np.max(np.abs(j.term_entangling))


def test_evaluate_frame_t0(canonical):
    f = it.evaluate_frame(canonical, 0.0)
    peaks = argrelextrema(f.p_tot, np.greater)[0]
    np.testing.assert_allclose(f.x[peaks], [-5.0, 5.0], atol=1e-12)
    # channels start 10 sigma0 apart, so the overlap amplitude is ~exp(-12.5)
    ent = np.max(np.abs(f.j.term_entangling))
    assert ent < 1e-4 * np.max(np.abs(f.j.total))
    assert ent < math.exp(-12.5) * 5.0


def test_evaluate_frame_fringe_count_matches_oracle(canonical):
    for t in (6.0, 8.0, 12.0):
        f = it.evaluate_frame(canonical, t)
        ref = superposition_density(canonical.slit1, canonical.slit2, P, f.x, t)
        central = np.abs(f.x) <= 10
        ours = argrelextrema(f.p_tot[central], np.greater)[0]
        theirs = argrelextrema(ref[central], np.greater)[0]
        assert len(ours) == len(theirs) >= 3
        np.testing.assert_array_equal(ours, theirs)


def test_evaluate_frame_minimal_grid():
    cfg = canonical_config(grid=GridSpec(nx=2, nt=1))
    f = it.evaluate_frame(cfg, 1.0)
    assert len(f.x) == len(f.p_tot) == len(f.v_eff) == 2


def test_evaluate_history_rows_match_frames(canonical):
    cfg = canonical_config(grid=GridSpec(nx=101, nt=9))
    h = it.evaluate_history(cfg)
    for i in (0, 4, 8):
        f = it.evaluate_frame(cfg, h.t[i])
        np.testing.assert_array_equal(h.frame(i).p_tot, f.p_tot)
        np.testing.assert_array_equal(h.frame(i).j.total, f.j.total)


def test_continuity_static_packet():
    # sigma0 = 3 gives u0 = 1/6, a slowly spreading resting packet
    cfg = canonical_config().replace(slits=(SlitConfig(0.0, 0.0, 3.0),))
    assert it.continuity_residual(cfg).residual < 1e-6


def test_continuity_second_order(canonical):
    coarse = it.continuity_residual(canonical, grid=GridSpec(nx=751, nt=401))
    fine = it.continuity_residual(canonical, grid=GridSpec(nx=751, nt=401).refined())
    assert coarse.residual / fine.residual == pytest.approx(4.0, rel=0.3)


def test_continuity_zero_fields():
    p = np.full((5, 7), 0.3)
    j = np.zeros((5, 7))
    assert it.residual_from_fields(p, j, 0.1, 0.1) == (0.0, 0.0)


def test_continuity_needs_three_points(canonical):
    with pytest.raises(InvalidConfig):
        it.continuity_residual(canonical, grid=GridSpec(nx=2, nt=5))
