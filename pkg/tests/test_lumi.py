"""Luminosity table ingestion, interpolation, weights and the mass
probability density."""

import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from ttspin import angular, lumi
from ttspin.errors import (
    EmptyWindow,
    NegativeLuminosity,
    NonMonotonicGrid,
    OutOfRange,
    ParseError,
    ZeroLuminosity,
)
from ttspin.kinematics import PhysicsConfig, beta_of_mass
from ttspin.lumi import LuminosityTable
from ttspin.parton import Channel

CFG = PhysicsConfig()


@pytest.fixture(scope="module")
def table():
    return lumi.load_table(lumi.bundled_table_path())


def write_table(tmp_path, body, header="# sqrt_s=13000 source=test\n"):
    path = tmp_path / "table.csv"
    path.write_text(header + body)
    return path


def test_bundled_fixture_loads(table):
    assert table.sqrt_s == 13000.0
    assert table.source == "analytic-lo-parametrization-v1"
    assert len(table.m) > 100
    assert table.m_min <= 2 * CFG.m_t
    assert np.all(np.diff(table.m) > 0)
    assert np.all(table.l_qq >= 0) and np.all(table.l_gg >= 0)


def test_empty_file_raises(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(ParseError):
        lumi.load_table(path)


def test_missing_header_raises(tmp_path):
    path = tmp_path / "nohdr.csv"
    path.write_text("346,1.0,2.0\n400,0.5,1.0\n")
    with pytest.raises(ParseError):
        lumi.load_table(path)


def test_bad_row_raises_with_line_number(tmp_path):
    path = write_table(tmp_path, "346,1.0,2.0\n400,oops,1.0\n")
    with pytest.raises(ParseError) as err:
        lumi.load_table(path)
    assert err.value.line == 3


def test_wrong_column_count(tmp_path):
    path = write_table(tmp_path, "346,1.0\n")
    with pytest.raises(ParseError):
        lumi.load_table(path)


def test_negative_and_nan_rejected(tmp_path):
    with pytest.raises(NegativeLuminosity):
        lumi.load_table(write_table(tmp_path, "346,1.0,2.0\n400,-0.5,1.0\n"))
    with pytest.raises(NegativeLuminosity):
        lumi.load_table(write_table(tmp_path, "346,1.0,2.0\n400,nan,1.0\n"))


def test_non_monotonic_rejected(tmp_path):
    path = write_table(tmp_path, "346,1.0,2.0\n345,0.5,1.0\n")
    with pytest.raises(NonMonotonicGrid):
        lumi.load_table(path)


def test_single_row_rejected(tmp_path):
    path = write_table(tmp_path, "346,1.0,2.0\n")
    with pytest.raises(ParseError):
        lumi.load_table(path)


def test_two_row_table_linear_interpolation(tmp_path):
    path = write_table(tmp_path, "346,1.0,4.0\n746,3.0,2.0\n")
    t = lumi.load_table(path)
    assert lumi.interpolate(t, 346.0) == (1.0, 4.0)
    assert lumi.interpolate(t, 746.0) == (3.0, 2.0)
    assert lumi.interpolate(t, 546.0) == (2.0, 3.0)  # midpoint -> arithmetic mean


def test_interpolation_exact_on_nodes(table):
    for idx in (0, 10, len(table.m) - 1):
        got = lumi.interpolate(table, float(table.m[idx]))
        assert got == (table.l_qq[idx], table.l_gg[idx])


def test_interpolation_out_of_range(table):
    with pytest.raises(OutOfRange):
        lumi.interpolate(table, table.m_min - 5.0)
    with pytest.raises(OutOfRange):
        lumi.interpolate(table, table.m_max + 5.0)


def test_weights_limits_and_homogeneity(table):
    assert lumi.weights_averaged(table, 400.0, 0.0, 1.0) == (0.0, 1.0)
    t2 = LuminosityTable(table.m, table.l_qq * 7.5, table.l_gg * 7.5, "scaled", table.sqrt_s)
    w1 = lumi.weights_averaged(table, 500.0, 0.1, 0.06)
    w2 = lumi.weights_averaged(t2, 500.0, 0.1, 0.06)
    assert abs(w1[0] - w2[0]) < 1e-14
    assert abs(sum(w1) - 1.0) < 1e-14


def test_weights_equal_products(tmp_path):
    path = write_table(tmp_path, "346,2.0,1.0\n746,2.0,1.0\n")
    t = lumi.load_table(path)
    w = lumi.weights_averaged(t, 500.0, 1.0, 2.0)  # L*A equal for both channels
    assert abs(w[0] - 0.5) < 1e-14 and abs(w[1] - 0.5) < 1e-14


def test_weights_zero_luminosity(tmp_path):
    path = write_table(tmp_path, "346,0.0,0.0\n746,0.0,0.0\n")
    t = lumi.load_table(path)
    with pytest.raises(ZeroLuminosity):
        lumi.weights_averaged(t, 500.0, 1.0, 1.0)


def test_gluon_dominance_at_400(table):
    beta = beta_of_mass(400.0, CFG)
    a_qq = angular.averaged_coefficients(Channel.QQBAR, beta).a_tilde_avg
    a_gg = angular.averaged_coefficients(Channel.GG, beta).a_tilde_avg
    _, w_gg = lumi.weights_averaged(table, 400.0, a_qq, a_gg)
    assert w_gg >= 0.8


def test_mass_density_normalization(table):
    dist = lumi.mass_probability_density(table, (CFG.threshold, 1000.0), CFG)
    from ttspin._quadrature import window_integral

    norm = float(
        window_integral(
            lambda m: np.array([dist.pdf(x) for x in np.atleast_1d(m)]),
            CFG.threshold,
            1000.0,
            CFG.threshold,
            table.m,
        )
    )
    assert abs(norm - 1.0) < 1e-8
    # independent adaptive quadrature (kink-limited, looser tolerance)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        indep = quad(
            lambda u: 2 * u * dist.pdf(CFG.threshold + u * u),
            0.0,
            math.sqrt(1000.0 - CFG.threshold),
            epsrel=1e-9,
            limit=500,
        )[0]
    assert abs(indep - 1.0) < 1e-6


def test_mass_density_vanishes_at_threshold(table):
    dist = lumi.mass_probability_density(table, (CFG.threshold, 800.0), CFG)
    assert dist.pdf(CFG.threshold) == 0.0
    assert dist.pdf(CFG.threshold - 1.0) == 0.0  # outside the window
    assert dist.pdf(400.0) > 0.0


def test_sigma_monotone_in_upper_cut(table):
    sigmas = [
        lumi.mass_probability_density(table, (CFG.threshold, m), CFG).sigma
        for m in (400.0, 500.0, 700.0, 1200.0)
    ]
    assert np.all(np.diff(sigmas) > 0)


def test_mass_density_window_errors(table):
    with pytest.raises(EmptyWindow):
        lumi.mass_probability_density(table, (500.0, 400.0), CFG)
    with pytest.raises(EmptyWindow):
        lumi.mass_probability_density(table, (200.0, 340.0), CFG)  # entirely below threshold
    with pytest.raises(OutOfRange):
        lumi.mass_probability_density(table, (CFG.threshold, table.m_max + 100.0), CFG)


def test_density_shape_invariant_under_scaling(table):
    t2 = LuminosityTable(table.m, 3.0 * table.l_qq, 3.0 * table.l_gg, "scaled", table.sqrt_s)
    d1 = lumi.mass_probability_density(table, (CFG.threshold, 900.0), CFG)
    d2 = lumi.mass_probability_density(t2, (CFG.threshold, 900.0), CFG)
    assert abs(d2.sigma - 3.0 * d1.sigma) < 1e-9 * d2.sigma
    for m in (360.0, 450.0, 700.0):
        assert abs(d1.pdf(m) - d2.pdf(m)) < 1e-12 * d1.pdf(m)


def test_gg_only_mode(table):
    full = lumi.mass_probability_density(table, (CFG.threshold, 700.0), CFG)
    gg = lumi.mass_probability_density(table, (CFG.threshold, 700.0), CFG, gg_only=True)
    assert gg.sigma < full.sigma
    assert lumi.dsigma_dm(table, 500.0, CFG, gg_only=True) < lumi.dsigma_dm(table, 500.0, CFG)
