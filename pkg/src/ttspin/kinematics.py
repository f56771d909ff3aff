"""Kinematic conversions and basis geometry for pair production.

Works directly in the center-of-mass variables (invariant mass M, top
velocity beta, production angle Theta).  The beam basis is the fixed
frame {x, y, z} with z along the proton beam; the helicity basis
{k, r, n} is the event-dependent triad built from the top direction k
and the beam axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BelowThreshold, DegenerateAtPole, ParseError

# hbar^2 c^2 in pb GeV^2: converts a natural-units GeV^-2 cross-section to pb.
HBARC2_PB = 0.3894e9

_SIN_POLE = 1e-12


@dataclass(frozen=True)
class PhysicsConfig:
    """Global physics constants.

    m_t defaults to 173 GeV; experiments often use 172.5, hence it is
    configurable.  All entries must be strictly positive.
    """

    m_t: float = 173.0
    alpha_s: float = 0.118
    sqrt_s: float = 13000.0

    def __post_init__(self):
        for name in ("m_t", "alpha_s", "sqrt_s"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def threshold(self) -> float:
        """Minimum pair invariant mass 2*m_t."""
        return 2.0 * self.m_t

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "PhysicsConfig":
        """Load from a key=value file (keys: m_t, alpha_s, sqrt_s).

        Lines starting with '#' and blank lines are skipped; ':' is
        accepted as separator too.  ``overrides`` (e.g. CLI flags) win
        over file values.
        """
        values: dict[str, float] = {}
        with open(path, encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                sep = "=" if "=" in line else (":" if ":" in line else None)
                if sep is None:
                    raise ParseError(f"expected key=value, got {line!r}", line=lineno)
                key, _, val = line.partition(sep)
                key = key.strip()
                if key not in ("m_t", "alpha_s", "sqrt_s"):
                    raise ParseError(f"unknown config key {key!r}", line=lineno)
                try:
                    values[key] = float(val)
                except ValueError as exc:
                    raise ParseError(f"bad value for {key}: {val.strip()!r}", line=lineno) from exc
        if overrides:
            values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def beta_of_mass(m: float, cfg: PhysicsConfig) -> float:
    """Top velocity beta = sqrt(1 - 4 m_t^2 / M^2) in the c.m. frame.

    Raises BelowThreshold for M < 2 m_t; M = 2 m_t gives exactly 0.
    """
    if m < cfg.threshold:
        raise BelowThreshold(f"M = {m} GeV below threshold {cfg.threshold} GeV")
    return math.sqrt(max(1.0 - (cfg.threshold / m) ** 2, 0.0))


def mass_of_beta(beta: float, cfg: PhysicsConfig) -> float:
    """Inverse of beta_of_mass: M = 2 m_t / sqrt(1 - beta^2)."""
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must lie in [0, 1), got {beta}")
    return cfg.threshold / math.sqrt(1.0 - beta * beta)


@dataclass(frozen=True)
class PhasePoint:
    """One production configuration (M_ttbar, cos Theta) with derived beta."""

    m_ttbar: float
    cos_theta: float
    beta: float

    def __post_init__(self):
        if not -1.0 <= self.cos_theta <= 1.0:
            raise ValueError(f"cos_theta must lie in [-1, 1], got {self.cos_theta}")

    @classmethod
    def from_mass(cls, m_ttbar: float, cos_theta: float, cfg: PhysicsConfig) -> "PhasePoint":
        return cls(m_ttbar, cos_theta, beta_of_mass(m_ttbar, cfg))

    @classmethod
    def from_beta(cls, beta: float, cos_theta: float, cfg: PhysicsConfig) -> "PhasePoint":
        return cls(mass_of_beta(beta, cfg), cos_theta, beta)

    @property
    def sin_theta(self) -> float:
        return math.sqrt(max(1.0 - self.cos_theta**2, 0.0))


def helicity_basis(cos_theta: float, phi: float = 0.0):
    """Helicity triad (k, r, n) in beam coordinates.

    k points along the top direction, r = (p - cos(Theta) k)/sin(Theta)
    lies in the plane spanned by k and the beam axis p = z, and
    n = r x k completes the triad; the ordered set (k, n, r) is
    right-handed.  ``phi`` is the azimuth of the top direction about the
    beam (irrelevant for basis-internal quantities, needed when
    expressing results in beam coordinates).

    Raises
    ------
    DegenerateAtPole
        When sin(Theta) < 1e-12: r is undefined on the beam axis and the
        caller must fall back to the axis limit states.
    """
    if not -1.0 <= cos_theta <= 1.0:
        raise ValueError(f"cos_theta must lie in [-1, 1], got {cos_theta}")
    sin_theta = math.sqrt(max(1.0 - cos_theta**2, 0.0))
    if sin_theta < _SIN_POLE:
        raise DegenerateAtPole("helicity basis undefined on the beam axis")
    cp, sp = math.cos(phi), math.sin(phi)
    k = np.array([sin_theta * cp, sin_theta * sp, cos_theta])
    r = np.array([-cos_theta * cp, -cos_theta * sp, sin_theta])
    n = np.array([-sp, cp, 0.0])  # r x k
    return k, r, n


def helicity_to_beam_matrix(cos_theta: float, phi: float = 0.0) -> np.ndarray:
    """Rotation matrix whose columns are (k, r, n) in beam coordinates."""
    k, r, n = helicity_basis(cos_theta, phi)
    return np.column_stack([k, r, n])


def rotate_correlations_to_beam(c_hel: np.ndarray, cos_theta: float, phi: float = 0.0) -> np.ndarray:
    """Re-express a helicity-basis correlation matrix in the beam basis.

    With R's columns the helicity vectors in beam coordinates this is
    C_beam = R C_hel R^T; the trace and eigenvalue multiset of a
    symmetric C are preserved exactly.
    """
    rot = helicity_to_beam_matrix(cos_theta, phi)
    return rot @ np.asarray(c_hel, dtype=float) @ rot.T


def differential_cross_section(a_tilde: float, pp: PhasePoint, cfg: PhysicsConfig) -> float:
    """d(sigma)/dOmega/dM in pb/GeV/sr from the scalar coefficient a_tilde.

    a_tilde carries whatever luminosity weighting the caller applied
    (pass L * A for a weighted channel, A alone for unit luminosity).
    """
    if a_tilde < 0.0:
        raise ValueError("a_tilde must be non-negative")
    return cfg.alpha_s**2 * pp.beta / pp.m_ttbar**2 * a_tilde * HBARC2_PB
