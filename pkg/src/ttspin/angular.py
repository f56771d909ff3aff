"""Closed-form angular averages of the production coefficients, an
independent quadrature oracle, and the averaged-state discriminants.

After averaging over all top directions the spin-correlation matrix is
diagonal in the beam basis with C_xx = C_yy = C_perp and C_zz = C_z, so
a channel at fixed beta is described by three unnormalized numbers
(a, c_perp, c_z).  The closed forms contain atanh(beta)/beta factors
that are finite but indeterminate at beta = 0; series fallbacks keep
every expression accurate through threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NoSignChange, QuadratureNoConvergence
from .kinematics import PhasePoint, PhysicsConfig, helicity_to_beam_matrix, mass_of_beta
from .parton import Channel, coefficients

_CFG_MASS_ONLY = PhysicsConfig()  # mass bookkeeping for oracle phase points


def atanh_over(x: float) -> float:
    """atanh(x)/x, series-expanded below 1e-3 where the ratio is 0/0-prone."""
    if abs(x) < 1e-3:
        x2 = x * x
        return 1.0 + x2 / 3.0 + x2 * x2 / 5.0 + x2 * x2 * x2 / 7.0
    return math.atanh(x) / x


def atanh_residual(x: float) -> float:
    """(atanh(x)/x - 1)/x^2; the subtraction cancels catastrophically at
    small x, so the exact Taylor coefficients 1/(2k+3) are used there."""
    if abs(x) < 1e-2:
        x2 = x * x
        return 1.0 / 3.0 + x2 / 5.0 + x2 * x2 / 7.0 + x2 * x2 * x2 / 9.0 + x2**4 / 11.0
    return (math.atanh(x) / x - 1.0) / (x * x)


def k_integral(n: int, m: int, x: float) -> float:
    """K_{n,m}(x) = integral of z^(2n)/(1-z^2)^m over z in [-x, x].

    Evaluated by the two recurrences
      K_{n,m} = K_{n-1,m} - K_{n-1,m-1}
      K_{0,m} = [2x/(1-x^2)^(m-1) + (2m-3) K_{0,m-1}] / (2(m-1))
    seeded with K_{n,0} = 2 x^(2n+1)/(2n+1) and K_{0,1} = 2 atanh(x).
    """
    if n < 0 or m < 0:
        raise ValueError("n and m must be non-negative")
    if not 0.0 <= x < 1.0:
        raise ValueError("x must lie in [0, 1)")
    # First row: K_{0, j} for j = 0..m.
    row = [2.0 * x]
    if m >= 1:
        row.append(2.0 * math.atanh(x))
    for j in range(2, m + 1):
        row.append((2.0 * x / (1.0 - x * x) ** (j - 1) + (2 * j - 3) * row[j - 1]) / (2 * (j - 1)))
    # Walk down in n; each step consumes the column to its left.
    for i in range(1, n + 1):
        prev = row
        base = 2.0 * x ** (2 * i + 1) / (2 * i + 1)  # K_{i, 0}
        row = [base] + [prev[j] - prev[j - 1] for j in range(1, m + 1)]
    return row[m]


@dataclass(frozen=True)
class AveragedCoefficients:
    """Unnormalized direction-averaged coefficients of one channel."""

    a_tilde_avg: float
    c_perp_tilde: float
    c_z_tilde: float
    channel: Channel
    beta: float

    @property
    def c_perp(self) -> float:
        return self.c_perp_tilde / self.a_tilde_avg

    @property
    def c_z(self) -> float:
        return self.c_z_tilde / self.a_tilde_avg


def _f_threshold(beta: float) -> float:
    """f = (1 - sqrt(1-b^2))^2 / 2, in the cancellation-free form
    b^4 / (2 (1 + sqrt(1-b^2))^2)."""
    root = math.sqrt(1.0 - beta * beta)
    return beta**4 / (2.0 * (1.0 + root) ** 2)


def _g_bracket(beta: float) -> float:
    """49 - 149/3 b^2 + 24/5 b^4 - (49 - 66 b^2 + 17 b^4) atanh(b)/b.

    Has a triple zero at beta = 0 (leading term 8/15 b^6); below 0.2 the
    exact Taylor coefficients -(49/(2k+1) - 66/(2k-1) + 17/(2k-3)) of
    b^(2k) are summed instead of the cancelling closed form.
    """
    if beta < 0.2:
        b2 = beta * beta
        total = 0.0
        power = b2**3
        for k in range(3, 14):
            coef = -(49.0 / (2 * k + 1) - 66.0 / (2 * k - 1) + 17.0 / (2 * k - 3))
            total += coef * power
            power *= b2
        return total
    t = atanh_over(beta)
    b2 = beta * beta
    return 49.0 - 149.0 / 3.0 * b2 + 24.0 / 5.0 * b2 * b2 - (49.0 - 66.0 * b2 + 17.0 * b2 * b2) * t


def _g_correction(beta: float) -> float:
    """g = f/(96 b^4) * bracket = bracket / (192 (1 + sqrt(1-b^2))^2)."""
    root = math.sqrt(1.0 - beta * beta)
    return _g_bracket(beta) / (192.0 * (1.0 + root) ** 2)


def averaged_coefficients(channel: Channel, beta: float) -> AveragedCoefficients:
    """Closed-form direction average of the production coefficients.

    All three outputs are unnormalized; divide by a_tilde_avg for the
    physical C_perp, C_z (the printed closed forms mix conventions, the
    normalization here is fixed against the quadrature oracle).
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must lie in [0, 1)")
    b2 = beta * beta
    if channel is Channel.QQBAR:
        f = _f_threshold(beta)
        a = (1.0 - b2 / 3.0) / 9.0
        c_perp = 2.0 / 135.0 * f
        c_z = (1.0 - b2 / 3.0 - 4.0 / 15.0 * f) / 9.0
    else:
        t = atanh_over(beta)
        g = _g_correction(beta)
        b4 = b2 * b2
        a = (-59.0 + 31.0 * b2 + (66.0 - 36.0 * b2 + 2.0 * b4) * t) / 192.0
        c_perp = (1.0 - b2) * (9.0 - 16.0 * t) / 192.0 + g
        c_z = (-109.0 + 49.0 * b2 + (102.0 - 72.0 * b2 + 2.0 * b4) * t) / 192.0 - 2.0 * g
    return AveragedCoefficients(a, c_perp, c_z, channel, beta)


def averaged_helicity_correlations(channel: Channel, beta: float) -> tuple[float, float, float]:
    """Direction-averaged unnormalized helicity correlations (rr, nn, kk).

    The averaged helicity matrix is diagonal: the kr entry integrates to
    zero.  The trace equals 2 c_perp + c_z of the beam-basis average.
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must lie in [0, 1)")
    b2 = beta * beta
    if channel is Channel.QQBAR:
        return (2.0 - b2) / 27.0, -b2 / 27.0, (1.0 + b2) / 27.0
    t = atanh_over(beta)
    u = atanh_residual(beta)
    b4 = b2 * b2
    c_rr = -(87.0 - 31.0 * b2 + 66.0 * u - (102.0 - 38.0 * b2 + 2.0 * b4) * t) / 192.0
    c_nn = -(41.0 - 31.0 * b2 - (34.0 - 36.0 * b2 + 2.0 * b4) * t) / 192.0
    c_kk = -(-37.0 + 31.0 * b2 - 66.0 * u + (66.0 - 34.0 * b2 + 2.0 * b4) * t) / 192.0
    return c_rr, c_nn, c_kk


_POLE_GUARD = 1e-9


def _beam_average_integrands(channel: Channel, beta: float, cos_theta: float):
    """(a, c_perp, c_z) integrand values at one polar node.

    The azimuthal average is done analytically: for A = R0 C R0^T the
    average over rotations about the beam is diag((A00+A11)/2, same, A22).
    """
    pp = PhasePoint(mass_of_beta(beta, _CFG_MASS_ONLY), cos_theta, beta)
    pc = coefficients(channel, pp)
    rot = helicity_to_beam_matrix(cos_theta)
    a_beam = rot @ pc.c_tilde @ rot.T
    return pc.a_tilde, (a_beam[0, 0] + a_beam[1, 1]) / 2.0, a_beam[2, 2]


def numeric_average_oracle(channel: Channel, beta: float, tol: float = 1e-9) -> AveragedCoefficients:
    """Direction average by adaptive polar quadrature; independent of the
    closed forms above (it consumes only the pointwise coefficients).

    Raises
    ------
    QuadratureNoConvergence
        If any component integral fails to reach ``tol``.
    """
    results = []
    for idx in range(3):
        val, err = integrate.quad(
            lambda c, i=idx: _beam_average_integrands(channel, beta, c)[i],
            -1.0 + _POLE_GUARD,
            1.0 - _POLE_GUARD,
            epsabs=tol * 1e-3,
            epsrel=tol * 0.1,
            limit=400,
        )
        if err > tol * max(1.0, abs(val)):
            raise QuadratureNoConvergence(
                f"component {idx}: error estimate {err:.2e} above tolerance"
            )
        results.append(val / 2.0)  # (1/2) integral over d(cos) = solid-angle average
    return AveragedCoefficients(results[0], results[1], results[2], channel, beta)


def beam_average_grid(channel: Channel, beta: float, n_theta: int = 400, n_phi: int = 64) -> np.ndarray:
    """Full 3x3 direction-averaged correlation matrix on a fixed
    Gauss-Legendre (cos Theta) x uniform (phi) grid, azimuth included
    numerically.  Used to verify that off-diagonal beam entries vanish.
    """
    nodes, weights = np.polynomial.legendre.leggauss(n_theta)
    nodes = nodes * (1.0 - _POLE_GUARD)
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    total = np.zeros((3, 3))
    for c, w in zip(nodes, weights):
        pp = PhasePoint(mass_of_beta(beta, _CFG_MASS_ONLY), c, beta)
        pc = coefficients(channel, pp)
        for phi in phis:
            rot = helicity_to_beam_matrix(c, phi)
            total += w * (rot @ pc.c_tilde @ rot.T)
    return total / (2.0 * n_phi)


def _atanh_over_arr(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    small = np.abs(x) < 1e-3
    xs2 = x[small] ** 2
    out[small] = 1.0 + xs2 / 3.0 + xs2**2 / 5.0 + xs2**3 / 7.0
    xl = x[~small]
    out[~small] = np.arctanh(xl) / xl
    return out


def _atanh_residual_arr(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    small = np.abs(x) < 1e-2
    xs2 = x[small] ** 2
    out[small] = 1.0 / 3.0 + xs2 / 5.0 + xs2**2 / 7.0 + xs2**3 / 9.0 + xs2**4 / 11.0
    xl = x[~small]
    out[~small] = (np.arctanh(xl) / xl - 1.0) / (xl * xl)
    return out


def _g_correction_arr(beta: np.ndarray) -> np.ndarray:
    bracket = np.empty_like(beta)
    small = beta < 0.2
    b2s = beta[small] ** 2
    total = np.zeros_like(b2s)
    power = b2s**3
    for k in range(3, 14):
        coef = -(49.0 / (2 * k + 1) - 66.0 / (2 * k - 1) + 17.0 / (2 * k - 3))
        total += coef * power
        power = power * b2s
    bracket[small] = total
    bl = beta[~small]
    b2 = bl * bl
    t = np.arctanh(bl) / bl
    bracket[~small] = (
        49.0 - 149.0 / 3.0 * b2 + 24.0 / 5.0 * b2 * b2 - (49.0 - 66.0 * b2 + 17.0 * b2 * b2) * t
    )
    root = np.sqrt(1.0 - beta * beta)
    return bracket / (192.0 * (1.0 + root) ** 2)


def averaged_arrays(channel: Channel, beta) -> np.ndarray:
    """Vectorized unnormalized direction averages, stacked as rows
    (a, c_perp, c_z, c_rr, c_nn, c_kk) x len(beta); same formulas as the
    scalar functions, for quadrature-node evaluation."""
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    b2 = beta * beta
    if channel is Channel.QQBAR:
        root = np.sqrt(1.0 - b2)
        f = beta**4 / (2.0 * (1.0 + root) ** 2)
        a = (1.0 - b2 / 3.0) / 9.0
        c_perp = 2.0 / 135.0 * f
        c_z = (1.0 - b2 / 3.0 - 4.0 / 15.0 * f) / 9.0
        c_rr = (2.0 - b2) / 27.0
        c_nn = -b2 / 27.0
        c_kk = (1.0 + b2) / 27.0
    else:
        t = _atanh_over_arr(beta)
        u = _atanh_residual_arr(beta)
        g = _g_correction_arr(beta)
        b4 = b2 * b2
        a = (-59.0 + 31.0 * b2 + (66.0 - 36.0 * b2 + 2.0 * b4) * t) / 192.0
        c_perp = (1.0 - b2) * (9.0 - 16.0 * t) / 192.0 + g
        c_z = (-109.0 + 49.0 * b2 + (102.0 - 72.0 * b2 + 2.0 * b4) * t) / 192.0 - 2.0 * g
        c_rr = -(87.0 - 31.0 * b2 + 66.0 * u - (102.0 - 38.0 * b2 + 2.0 * b4) * t) / 192.0
        c_nn = -(41.0 - 31.0 * b2 - (34.0 - 36.0 * b2 + 2.0 * b4) * t) / 192.0
        c_kk = -(-37.0 + 31.0 * b2 - 66.0 * u + (66.0 - 34.0 * b2 + 2.0 * b4) * t) / 192.0
    return np.vstack([a, c_perp, c_z, c_rr, c_nn, c_kk])


def delta_avg(channel: Channel, beta: float) -> float:
    """Axial discriminant of the direction-averaged state,
    -C_z + 2|C_perp| - 1 with normalized coefficients."""
    avg = averaged_coefficients(channel, beta)
    return -avg.c_z + 2.0 * abs(avg.c_perp) - 1.0


def delta_qq_closed_form(beta: float) -> float:
    """Printed closed form of the qqbar averaged discriminant; negative
    for all beta, i.e. the averaged qqbar state is always separable."""
    b2 = beta * beta
    return (-2.0 + 2.0 * b2 / 3.0 + 4.0 / 15.0 * (1.0 - math.sqrt(1.0 - b2)) ** 2) / (1.0 - b2 / 3.0)


def delta_gg_trace_form(beta: float) -> float:
    """Printed -tr C - 1 form of the gg averaged discriminant; equals
    delta_avg only while C_perp < 0 (below the sign crossover near 0.97)."""
    b2 = beta * beta
    b4 = b2 * b2
    t = atanh_over(beta)
    num = 150.0 - 62.0 * b2 - (136.0 - 76.0 * b2 + 4.0 * b4) * t
    den = -59.0 + 31.0 * b2 + (66.0 - 36.0 * b2 + 2.0 * b4) * t
    return num / den


def critical_beta_gg(tol: float = 1e-6) -> float:
    """Velocity at which the direction-averaged gg state stops being
    entangled, by bisection on [0.3, 0.9] (delta is monotone there)."""
    lo, hi = 0.3, 0.9
    f_lo = delta_avg(Channel.GG, lo)
    f_hi = delta_avg(Channel.GG, hi)
    if f_lo * f_hi > 0.0:
        raise NoSignChange("delta_avg(gg) does not change sign on [0.3, 0.9]")
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if delta_avg(Channel.GG, mid) * f_lo > 0.0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def critical_mass_gg(cfg: PhysicsConfig, tol: float = 1e-6) -> float:
    """Invariant mass corresponding to critical_beta_gg()."""
    return mass_of_beta(critical_beta_gg(tol), cfg)
