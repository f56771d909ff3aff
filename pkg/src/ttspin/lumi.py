"""Parton-luminosity tables: ingestion, interpolation, channel weights
and the normalized mass probability density.

Tables are data, not physics: the package never evaluates parton
distributions itself.  Only ratios between the two channel columns and
the mass shape matter for spin observables; the absolute scale sets the
cross-section normalization.

CSV format (see the bundled fixture):
    # sqrt_s=<GeV> source=<string>
    # M_GeV,L_qqbar,L_gg
    346.0,1.23e-05,4.56e-04
    ...
Comment lines start with '#'; the first must carry sqrt_s and source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ._quadrature import window_integral
from .errors import (
    EmptyWindow,
    NegativeLuminosity,
    NonMonotonicGrid,
    OutOfRange,
    ParseError,
    ZeroLuminosity,
)
from .kinematics import HBARC2_PB, PhysicsConfig, beta_of_mass
from . import angular
from .parton import Channel

_EDGE_SLACK = 1e-9  # relative slack when checking grid bounds


@dataclass(frozen=True)
class LuminosityTable:
    """Tabulated channel luminosities on a strictly increasing mass grid."""

    m: np.ndarray
    l_qq: np.ndarray
    l_gg: np.ndarray
    source: str
    sqrt_s: float

    @property
    def m_min(self) -> float:
        return float(self.m[0])

    @property
    def m_max(self) -> float:
        return float(self.m[-1])

    def covers(self, lo: float, hi: float) -> bool:
        slack = _EDGE_SLACK * self.m_max
        return lo >= self.m_min - slack and hi <= self.m_max + slack


def bundled_table_path() -> str:
    """Filesystem path of the bundled 13 TeV fixture table."""
    return str(resources.files("ttspin").joinpath("data/lumi_13tev.csv"))


def load_table(path) -> LuminosityTable:
    """Parse and validate a luminosity CSV.

    Raises ParseError (with line number) on malformed content,
    NonMonotonicGrid if masses do not increase strictly, and
    NegativeLuminosity on negative or NaN values.
    """
    sqrt_s = None
    source = "unknown"
    rows: list[tuple[float, float, float]] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line.lstrip("#").split():
                    key, _, val = token.partition("=")
                    if key == "sqrt_s" and val:
                        try:
                            sqrt_s = float(val)
                        except ValueError as exc:
                            raise ParseError(f"bad sqrt_s value {val!r}", line=lineno) from exc
                    elif key == "source" and val:
                        source = val
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ParseError(f"expected 3 comma-separated values, got {len(parts)}", line=lineno)
            try:
                m, l_qq, l_gg = (float(p) for p in parts)
            except ValueError as exc:
                raise ParseError(f"non-numeric entry in {line!r}", line=lineno) from exc
            if math.isnan(m) or math.isnan(l_qq) or math.isnan(l_gg):
                raise NegativeLuminosity(f"line {lineno}: NaN entry")
            if l_qq < 0.0 or l_gg < 0.0:
                raise NegativeLuminosity(f"line {lineno}: negative luminosity")
            rows.append((m, l_qq, l_gg))
    if len(rows) < 2:
        raise ParseError("table needs at least 2 data rows")
    if sqrt_s is None:
        raise ParseError("missing '# sqrt_s=<GeV> ...' header line")
    arr = np.array(rows)
    if not np.all(np.diff(arr[:, 0]) > 0.0):
        raise NonMonotonicGrid("mass grid must be strictly increasing")
    return LuminosityTable(arr[:, 0], arr[:, 1], arr[:, 2], source, sqrt_s)


def interpolate(table: LuminosityTable, m: float) -> tuple[float, float]:
    """Per-channel linear interpolation in M; exact at the nodes.

    Linear interpolation preserves positivity of the tabulated data,
    which higher-order schemes do not guarantee.
    """
    slack = _EDGE_SLACK * table.m_max
    if m < table.m_min - slack or m > table.m_max + slack:
        raise OutOfRange(f"M = {m} GeV outside table range [{table.m_min}, {table.m_max}]")
    m = min(max(m, table.m_min), table.m_max)
    return (
        float(np.interp(m, table.m, table.l_qq)),
        float(np.interp(m, table.m, table.l_gg)),
    )


def weights_averaged(
    table: LuminosityTable, m: float, a_qq_avg: float, a_gg_avg: float
) -> tuple[float, float]:
    """Channel probabilities w_I = L_I A_I / sum_J L_J A_J after the
    angular average; homogeneous of degree zero in the luminosities."""
    if a_qq_avg < 0.0 or a_gg_avg < 0.0:
        raise ValueError("averaged coefficients must be non-negative")
    l_qq, l_gg = interpolate(table, m)
    prod_qq = l_qq * a_qq_avg
    prod_gg = l_gg * a_gg_avg
    total = prod_qq + prod_gg
    if total <= 0.0:
        raise ZeroLuminosity(f"weighted luminosity vanishes at M = {m} GeV")
    return prod_qq / total, prod_gg / total


def _dsigma_dm_arr(table: LuminosityTable, m: np.ndarray, cfg: PhysicsConfig, gg_only: bool) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    beta = np.sqrt(np.clip(1.0 - (cfg.threshold / m) ** 2, 0.0, None))
    l_gg = np.interp(m, table.m, table.l_gg)
    total = l_gg * angular.averaged_arrays(Channel.GG, beta)[0]
    if not gg_only:
        l_qq = np.interp(m, table.m, table.l_qq)
        total = total + l_qq * angular.averaged_arrays(Channel.QQBAR, beta)[0]
    return 4.0 * math.pi * cfg.alpha_s**2 * beta / m**2 * total * HBARC2_PB


def dsigma_dm(table: LuminosityTable, m: float, cfg: PhysicsConfig, gg_only: bool = False) -> float:
    """Angle-integrated differential cross-section d(sigma)/dM in pb/GeV."""
    beta_of_mass(m, cfg)  # threshold check
    if not table.covers(m, m):
        raise OutOfRange(f"M = {m} GeV outside table range [{table.m_min}, {table.m_max}]")
    return float(_dsigma_dm_arr(table, np.array([m]), cfg, gg_only)[0])


@dataclass(frozen=True)
class MassDistribution:
    """Normalized probability density p(M) over a mass window, plus the
    window cross-section sigma (pb) used for the normalization."""

    table: LuminosityTable
    cfg: PhysicsConfig
    m_min: float
    m_max: float
    gg_only: bool
    sigma: float

    def dsigma_dm(self, m: float) -> float:
        return dsigma_dm(self.table, m, self.cfg, self.gg_only)

    def pdf(self, m: float) -> float:
        if m < self.m_min or m > self.m_max:
            return 0.0
        return self.dsigma_dm(m) / self.sigma

    __call__ = pdf


def mass_probability_density(
    table: LuminosityTable,
    window: tuple[float, float],
    cfg: PhysicsConfig,
    gg_only: bool = False,
) -> MassDistribution:
    """Build p(M) = (1/sigma) d(sigma)/dM over a mass window.

    Raises EmptyWindow for a non-positive window width and OutOfRange
    when the window is not covered by the table (the lower edge is also
    clamped to threshold, where the density vanishes with beta).
    """
    m_lo, m_hi = window
    m_lo = max(m_lo, cfg.threshold)
    if m_hi <= m_lo:
        raise EmptyWindow(f"window [{m_lo}, {m_hi}] GeV has no width above threshold")
    if not table.covers(m_lo, m_hi):
        raise OutOfRange(
            f"window [{m_lo}, {m_hi}] not covered by table [{table.m_min}, {table.m_max}]"
        )
    sigma = float(
        window_integral(
            lambda m: _dsigma_dm_arr(table, m, cfg, gg_only),
            m_lo,
            m_hi,
            cfg.threshold,
            breakpoints=table.m,
        )
    )
    if sigma <= 0.0:
        raise ZeroLuminosity("window cross-section vanishes")
    return MassDistribution(table, cfg, m_lo, m_hi, gg_only, sigma)
