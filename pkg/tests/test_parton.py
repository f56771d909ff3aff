"""Leading-order production coefficients, discriminants, boundaries and
channel mixing."""

import math
from fractions import Fraction

import numpy as np
import pytest

from ttspin.errors import ZeroLuminosity
from ttspin.kinematics import PhasePoint, PhysicsConfig, rotate_correlations_to_beam
from ttspin.parton import (
    Channel,
    coefficient_arrays,
    coefficients,
    concurrence_point,
    critical_betas,
    delta_of_coefficients,
    delta_point,
    limiting_state,
    mix_point,
    state_at_point,
)
from ttspin.states import concurrence_wootters, is_entangled_ppt, is_physical, unpolarized

CFG = PhysicsConfig()


def pp(beta, cos_theta):
    return PhasePoint.from_beta(beta, cos_theta, CFG)


def test_channel_parsing():
    assert Channel.parse("qq") is Channel.QQBAR
    assert Channel.parse("qqbar") is Channel.QQBAR
    assert Channel.parse("GG") is Channel.GG
    with pytest.raises(ValueError):
        Channel.parse("ee")


def test_gg_coefficients_frozen_point():
    """beta = 0.9, cos = 0, against an exact-rational re-derivation."""
    pc = coefficients(Channel.GG, pp(0.9, 0.0))
    expected = {
        "a": Fraction(45773, 960000),
        "kk": Fraction(10927, 960000),
        "rr": Fraction(32473, 960000),
        "nn": Fraction(-24227, 960000),
    }
    assert abs(pc.a_tilde - float(expected["a"])) < 1e-15
    assert abs(pc.c_tilde[0, 0] - float(expected["kk"])) < 1e-15
    assert abs(pc.c_tilde[1, 1] - float(expected["rr"])) < 1e-15
    assert abs(pc.c_tilde[2, 2] - float(expected["nn"])) < 1e-15
    assert pc.c_tilde[0, 1] == 0.0  # sin(2 Theta) = 0 here


def test_qq_coefficients_frozen_point():
    """beta = 0.6, cos = 0.3, against an exact-rational re-derivation."""
    pc = coefficients(Channel.QQBAR, pp(0.6, 0.3))
    assert abs(pc.a_tilde - float(Fraction(4181, 45000))) < 1e-15
    assert abs(pc.c_tilde[1, 1] - float(Fraction(3731, 45000))) < 1e-15
    assert abs(pc.c_tilde[2, 2] - float(Fraction(-91, 5000))) < 1e-15
    assert abs(pc.c_tilde[0, 0] - float(Fraction(141, 5000))) < 1e-15
    assert abs(pc.c_tilde[0, 1] - float(Fraction(2, 75)) * math.sqrt(91) / 10) < 1e-15


def test_lo_structure_invariants():
    rng = np.random.default_rng(8)
    for _ in range(200):
        point = pp(rng.uniform(0, 0.999), rng.uniform(-0.999, 0.999))
        for channel in Channel:
            pc = coefficients(channel, point)
            assert np.all(pc.b_tilde_plus == 0.0) and np.all(pc.b_tilde_minus == 0.0)
            assert pc.c_tilde[2, 0] == pc.c_tilde[2, 1] == 0.0  # n-axis uncorrelated
            np.testing.assert_allclose(pc.c_tilde, pc.c_tilde.T, atol=1e-16)
            assert is_physical(pc.normalized_state(), tol=1e-10)


def test_gg_threshold_is_singlet():
    state = state_at_point(Channel.GG, pp(0.0, 0.42))
    np.testing.assert_allclose(state.c, -np.eye(3), atol=1e-15)
    assert abs(concurrence_wootters(state) - 1.0) < 1e-10
    assert delta_point(Channel.GG, pp(0.0, 0.42)) == 2.0


def test_qq_threshold_separable_aligned():
    point = pp(0.0, 0.3)
    state = state_at_point(Channel.QQBAR, point)
    beam = rotate_correlations_to_beam(state.c, 0.3)
    np.testing.assert_allclose(beam, np.diag([0.0, 0.0, 1.0]), atol=1e-14)
    assert concurrence_wootters(unpolarized(beam)) < 1e-12
    assert not is_entangled_ppt(state)


def test_gg_high_energy_transverse_is_triplet():
    state = state_at_point(Channel.GG, pp(1 - 1e-12, 0.0))
    np.testing.assert_allclose(state.c, np.diag([1.0, 1.0, -1.0]), atol=1e-9)


def test_delta_closed_forms_match_coefficient_route():
    betas = np.linspace(0.0, 0.999, 50)
    cosines = np.linspace(-0.99, 0.99, 50)
    worst = 0.0
    for beta in betas:
        for cos_theta in cosines:
            point = pp(beta, cos_theta)
            for channel in Channel:
                closed = delta_point(channel, point)
                from_coeffs = delta_of_coefficients(coefficients(channel, point))
                worst = max(worst, abs(closed - from_coeffs))
    assert worst < 1e-10


def test_delta_gg_examples():
    assert delta_point(Channel.GG, pp(0.0, 0.7)) == 2.0
    assert abs(delta_point(Channel.GG, pp(0.5, 0.0)) - 2.0 / 11.0) < 1e-15


def test_delta_gg_branch_continuity():
    # both printed forms coincide where the branch condition saturates
    for s2 in (0.5, 0.8, 1.0):
        beta = 1.0 / math.sqrt(1.0 + s2)
        cos_theta = math.sqrt(1.0 - s2)
        below = delta_point(Channel.GG, pp(beta - 1e-9, cos_theta))
        above = delta_point(Channel.GG, pp(beta + 1e-9, cos_theta))
        assert abs(below - above) < 1e-7


def test_delta_qq_properties():
    # vanishes only on the beam axis or at threshold, positive elsewhere
    assert delta_point(Channel.QQBAR, pp(0.5, 1.0)) == 0.0
    assert delta_point(Channel.QQBAR, pp(0.0, 0.3)) == 0.0
    assert delta_point(Channel.QQBAR, pp(0.5, 0.5)) > 0.0
    # transverse high-energy limit: same maximally entangled state as gg
    assert abs(delta_point(Channel.QQBAR, pp(1 - 1e-12, 0.0)) - 2.0) < 1e-9
    assert abs(concurrence_point(Channel.QQBAR, pp(1 - 1e-12, 0.0)) - 1.0) < 1e-9


def test_concurrence_point_matches_wootters():
    rng = np.random.default_rng(12)
    for _ in range(60):
        point = pp(rng.uniform(0, 0.995), rng.uniform(-0.99, 0.99))
        for channel in Channel:
            closed = concurrence_point(channel, point)
            full = concurrence_wootters(state_at_point(channel, point))
            assert abs(closed - full) < 1e-10


def test_critical_betas_transverse_values():
    b1, b2 = critical_betas(math.pi / 2)
    assert abs(b1 - math.sqrt((2.0 - math.sqrt(2.0)) / 2.0)) < 1e-15
    assert abs(b2 - 2.0 ** (-0.25)) < 1e-15


def test_critical_betas_bracket_sign_changes():
    for theta in (0.4, math.pi / 2, 2.0):
        cos_theta = math.cos(theta)
        b1, b2 = critical_betas(theta)
        assert delta_point(Channel.GG, pp(b1 - 1e-6, cos_theta)) > 0
        assert delta_point(Channel.GG, pp(b1 + 1e-6, cos_theta)) < 0
        assert delta_point(Channel.GG, pp(b2 - 1e-6, cos_theta)) < 0
        assert delta_point(Channel.GG, pp(b2 + 1e-6, cos_theta)) > 0


def test_gg_concurrence_zero_exactly_on_band():
    for theta in np.linspace(0.15, math.pi - 0.15, 20):
        cos_theta = math.cos(theta)
        b1, b2 = critical_betas(theta)
        for beta in np.linspace(b1 + 1e-5, b2 - 1e-5, 7):
            assert concurrence_point(Channel.GG, pp(beta, cos_theta)) == 0.0
        for beta in (b1 * 0.9, min(b2 + (1 - b2) * 0.5, 0.9999)):
            assert concurrence_point(Channel.GG, pp(beta, cos_theta)) > 0.0


def test_critical_betas_close_on_axis():
    b1, b2 = critical_betas(1e-6)
    assert b1 > 1.0 - 1e-5 and b2 > 1.0 - 1e-5


def test_mirror_symmetry():
    for theta in (0.3, 0.9, 1.4):
        np.testing.assert_allclose(critical_betas(theta), critical_betas(math.pi - theta), atol=1e-14)
        for beta in (0.2, 0.7):
            for channel in Channel:
                a = delta_point(channel, pp(beta, math.cos(theta)))
                b = delta_point(channel, pp(beta, math.cos(math.pi - theta)))
                assert abs(a - b) < 1e-14


def test_limiting_states():
    singlet = limiting_state("gg_singlet")
    assert abs(concurrence_wootters(singlet) - 1.0) < 1e-10
    triplet = limiting_state("gg_triplet")
    assert abs(concurrence_wootters(triplet) - 1.0) < 1e-10
    np.testing.assert_array_equal(triplet.c, np.diag([1.0, 1.0, -1.0]))
    threshold = limiting_state("qq_threshold")
    assert concurrence_wootters(threshold) == 0.0
    assert threshold.c[2, 2] == 1.0 and threshold.basis_label == "beam"
    with pytest.raises(ValueError):
        limiting_state("nope")


def test_mix_point_pure_gluon():
    point = pp(0.4, 0.2)
    mixed, w_qq, w_gg = mix_point(point, 0.0, 3.7)
    assert (w_qq, w_gg) == (0.0, 1.0)
    np.testing.assert_allclose(mixed.c, state_at_point(Channel.GG, point).c, atol=1e-15)


def test_mix_point_threshold_weights():
    _, w_qq, w_gg = mix_point(pp(0.0, 0.5), 1.0, 1.0)
    assert abs(w_gg - 21.0 / 85.0) < 1e-15  # (7/192) / (7/192 + 1/9)
    assert abs(w_qq + w_gg - 1.0) < 1e-15


def test_mix_point_rescaling_invariance():
    point = pp(0.6, -0.4)
    _, w_qq, w_gg = mix_point(point, 2.0, 5.0)
    _, w_qq2, w_gg2 = mix_point(point, 2.0e7, 5.0e7)
    assert abs(w_qq - w_qq2) < 1e-14 and abs(w_gg - w_gg2) < 1e-14


def test_mix_point_zero_luminosity():
    with pytest.raises(ZeroLuminosity):
        mix_point(pp(0.4, 0.2), 0.0, 0.0)


def test_mixture_concurrence_convexity():
    rng = np.random.default_rng(19)
    for _ in range(40):
        point = pp(rng.uniform(0, 0.99), rng.uniform(-0.99, 0.99))
        l_qq, l_gg = rng.uniform(0.1, 2.0, 2)
        mixed, w_qq, w_gg = mix_point(point, l_qq, l_gg)
        bound = w_qq * concurrence_point(Channel.QQBAR, point) + w_gg * concurrence_point(
            Channel.GG, point
        )
        assert concurrence_wootters(mixed) <= bound + 1e-10


def test_coefficient_arrays_match_scalar():
    rng = np.random.default_rng(21)
    betas = rng.uniform(0, 0.999, 30)
    cosines = rng.uniform(-1, 1, 30)
    for channel in Channel:
        a, c_kk, c_rr, c_nn, c_kr = coefficient_arrays(channel, betas, cosines)
        for i in range(30):
            pc = coefficients(channel, pp(betas[i], cosines[i]))
            assert abs(a[i] - pc.a_tilde) < 1e-15
            assert abs(c_kk[i] - pc.c_tilde[0, 0]) < 1e-15
            assert abs(c_rr[i] - pc.c_tilde[1, 1]) < 1e-15
            assert abs(c_nn[i] - pc.c_tilde[2, 2]) < 1e-15
            assert abs(c_kr[i] - pc.c_tilde[0, 1]) < 1e-15
