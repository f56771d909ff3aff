"""Leading-order production spin density matrices for the two partonic
channels, pointwise entanglement discriminants and channel mixing.

Correlation matrices are stored in the helicity basis with axis order
(k, r, n); at this order the n axis is uncorrelated with the other two
and the single-spin polarizations vanish, so a channel is described by
five numbers: A, C_kk, C_nn, C_rr and C_kr.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroLuminosity
from .kinematics import PhasePoint
from .states import TwoQubitState, unpolarized

F_Q = 1.0 / 18.0


class Channel(enum.Enum):
    """Initial partonic state; exhaustive at leading order."""

    QQBAR = "qqbar"
    GG = "gg"

    @classmethod
    def parse(cls, name: str) -> "Channel":
        key = name.strip().lower()
        if key in ("qq", "qqbar", "qq~", "qbarq"):
            return cls.QQBAR
        if key == "gg":
            return cls.GG
        raise ValueError(f"unknown channel {name!r}")


@dataclass(frozen=True)
class ProductionCoefficients:
    """Unnormalized coefficients of a production spin density matrix.

    ``c_tilde`` is the symmetric 3x3 helicity-basis matrix (axis order
    k, r, n); polarizations are identically zero at this order but kept
    as fields so the normalized-state construction is uniform.
    """

    a_tilde: float
    c_tilde: np.ndarray
    b_tilde_plus: np.ndarray
    b_tilde_minus: np.ndarray
    channel: Channel

    def normalized_state(self) -> TwoQubitState:
        """The physical spin state rho = R / (4 A), as Bloch coefficients."""
        return TwoQubitState(
            self.b_tilde_plus / self.a_tilde,
            self.b_tilde_minus / self.a_tilde,
            self.c_tilde / self.a_tilde,
            basis_label="helicity",
        )


def gluon_flux_factor(beta: float, cos_theta: float) -> float:
    """F_g = (7 + 9 b^2 c^2) / (192 (1 - b^2 c^2)^2); finite for beta < 1."""
    bc2 = (beta * cos_theta) ** 2
    return (7.0 + 9.0 * bc2) / (192.0 * (1.0 - bc2) ** 2)


def coefficients(channel: Channel, pp: PhasePoint) -> ProductionCoefficients:
    """Exact LO production coefficients at one phase-space point."""
    beta, c = pp.beta, pp.cos_theta
    s2 = 1.0 - c * c
    b2 = beta * beta
    b4 = b2 * b2
    sin2theta = 2.0 * c * math.sqrt(max(s2, 0.0))  # sin(2 Theta)
    if channel is Channel.QQBAR:
        a = F_Q * (2.0 - b2 * s2)
        c_rr = F_Q * (2.0 - b2) * s2
        c_nn = -F_Q * b2 * s2
        c_kk = F_Q * (2.0 * c * c + b2 * s2)
        c_kr = F_Q * math.sqrt(1.0 - b2) * sin2theta
    else:
        fg = gluon_flux_factor(beta, c)
        quartic = 1.0 + s2 * s2
        a = fg * (1.0 + 2.0 * b2 * s2 - b4 * quartic)
        c_rr = -fg * (1.0 - b2 * (2.0 - b2) * quartic)
        c_nn = -fg * (1.0 - 2.0 * b2 + b4 * quartic)
        c_kk = -fg * (1.0 - b2 * sin2theta**2 / 2.0 - b4 * quartic)
        c_kr = fg * math.sqrt(1.0 - b2) * b2 * sin2theta * s2
    c_mat = np.array([[c_kk, c_kr, 0.0], [c_kr, c_rr, 0.0], [0.0, 0.0, c_nn]])
    return ProductionCoefficients(a, c_mat, np.zeros(3), np.zeros(3), channel)


def state_at_point(channel: Channel, pp: PhasePoint) -> TwoQubitState:
    """Normalized helicity-basis spin state of one channel at one point."""
    return coefficients(channel, pp).normalized_state()


def coefficient_arrays(channel: Channel, beta, cos_theta):
    """Vectorized LO coefficients (a, c_kk, c_rr, c_nn, c_kr) under numpy
    broadcasting of ``beta`` and ``cos_theta``; same formulas as
    :func:`coefficients`, for grid scans and event sampling."""
    beta = np.asarray(beta, dtype=float)
    c = np.asarray(cos_theta, dtype=float)
    s2 = 1.0 - c * c
    b2 = beta * beta
    b4 = b2 * b2
    sin2theta = 2.0 * c * np.sqrt(np.clip(s2, 0.0, None))
    if channel is Channel.QQBAR:
        a = F_Q * (2.0 - b2 * s2)
        c_rr = F_Q * (2.0 - b2) * s2
        c_nn = -F_Q * b2 * s2
        c_kk = F_Q * (2.0 * c * c + b2 * s2)
        c_kr = F_Q * np.sqrt(1.0 - b2) * sin2theta
    else:
        bc2 = b2 * c * c
        fg = (7.0 + 9.0 * bc2) / (192.0 * (1.0 - bc2) ** 2)
        quartic = 1.0 + s2 * s2
        a = fg * (1.0 + 2.0 * b2 * s2 - b4 * quartic)
        c_rr = -fg * (1.0 - b2 * (2.0 - b2) * quartic)
        c_nn = -fg * (1.0 - 2.0 * b2 + b4 * quartic)
        c_kk = -fg * (1.0 - b2 * sin2theta**2 / 2.0 - b4 * quartic)
        c_kr = fg * np.sqrt(1.0 - b2) * b2 * sin2theta * s2
    return a, c_kk, c_rr, c_nn, c_kr


def delta_of_coefficients(pc: ProductionCoefficients) -> float:
    """Discriminant -C_nn + |C_kk + C_rr| - 1 from normalized entries."""
    c = pc.c_tilde / pc.a_tilde
    return -c[2, 2] + abs(c[0, 0] + c[1, 1]) - 1.0


def delta_point(channel: Channel, pp: PhasePoint) -> float:
    """Closed-form pointwise discriminant; positive iff entangled.

    The gg expression switches branch at b^2 (1 + sin^2 Theta) = 1,
    where both forms coincide.
    """
    beta, c = pp.beta, pp.cos_theta
    s2 = 1.0 - c * c
    b2 = beta * beta
    if channel is Channel.QQBAR:
        return 2.0 * b2 * s2 / (2.0 - b2 * s2)
    quartic = 1.0 + s2 * s2
    den = 1.0 + 2.0 * b2 * s2 - b2 * b2 * quartic
    if b2 * (1.0 + s2) < 1.0:
        num = 2.0 - 4.0 * b2 * (1.0 + s2) + 2.0 * b2 * b2 * quartic
    else:
        num = 2.0 * b2 * b2 * quartic - 2.0
    return num / den


def concurrence_point(channel: Channel, pp: PhasePoint) -> float:
    """Pointwise concurrence max(delta, 0)/2."""
    return max(delta_point(channel, pp), 0.0) / 2.0


def critical_betas(theta: float) -> tuple[float, float]:
    """Lower and upper critical velocities of the gg separability band.

    Between beta_c1(Theta) and beta_c2(Theta) the gg state is separable;
    outside, entangled.  Symmetric under Theta -> pi - Theta.
    """
    if not 0.0 < theta < math.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    s = math.sin(theta)
    s2 = s * s
    quartic = 1.0 + s2 * s2
    beta_c1 = math.sqrt((1.0 + s2 - math.sqrt(2.0) * s) / quartic)
    beta_c2 = quartic ** (-0.25)
    return beta_c1, beta_c2


def limiting_state(which: str) -> TwoQubitState:
    """Fixture states of the production limits.

    gg_singlet:   threshold gluon fusion, C = -I (any basis), concurrence 1.
    gg_triplet:   high-energy transverse limit, C = diag(+1, +1, -1) with
                  the n axis last, concurrence 1.
    qq_threshold: spins aligned along the beam, C = diag(0, 0, 1) in the
                  beam basis; correlated but separable.
    """
    if which == "gg_singlet":
        return unpolarized(-np.eye(3), basis_label="helicity")
    if which == "gg_triplet":
        return unpolarized(np.diag([1.0, 1.0, -1.0]), basis_label="helicity")
    if which == "qq_threshold":
        return unpolarized(np.diag([0.0, 0.0, 1.0]), basis_label="beam")
    raise ValueError(f"unknown limiting state {which!r}")


def mix_point(pp: PhasePoint, l_qq: float, l_gg: float) -> tuple[TwoQubitState, float, float]:
    """Convex mixture of the two channel states at one phase-space point.

    Weights are w_I = L_I A_I / sum_J L_J A_J; invariant under common
    rescaling of the luminosities.
    """
    if l_qq < 0.0 or l_gg < 0.0:
        raise ValueError("luminosities must be non-negative")
    pc_qq = coefficients(Channel.QQBAR, pp)
    pc_gg = coefficients(Channel.GG, pp)
    prod_qq = l_qq * pc_qq.a_tilde
    prod_gg = l_gg * pc_gg.a_tilde
    total = prod_qq + prod_gg
    if total <= 0.0:
        raise ZeroLuminosity("both weighted channel products vanish")
    w_qq = prod_qq / total
    w_gg = prod_gg / total
    c_mix = w_qq * (pc_qq.c_tilde / pc_qq.a_tilde) + w_gg * (pc_gg.c_tilde / pc_gg.a_tilde)
    return unpolarized(c_mix, basis_label="helicity"), w_qq, w_gg
