"""Mass-window integration: the total quantum state of all pairs whose
invariant mass falls in [M_min, M_max], its correlations, discriminants
and the window cross-section.

The windowed state is the cross-section-weighted mixture of the
direction-averaged states, so every observable is a ratio of two mass
integrals sharing the weight beta/M^2 * sum_I L_I(M) X_I(beta).  One
vector-valued adaptive quadrature evaluates all of them consistently.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import angular
from ._quadrature import window_integral
from .errors import EmptyWindow, NoSignChange, OutOfRange
from .kinematics import HBARC2_PB, PhysicsConfig
from .lumi import LuminosityTable
from .parton import Channel
from .states import TwoQubitState, delta_axial, unpolarized

WINDOW_CSV_HEADER = "ttspin window v1"


@dataclass(frozen=True)
class WindowMoments:
    """Cross-section-weighted averages over one mass window.

    All correlation entries are normalized (physical); ``sigma`` is the
    window cross-section in pb.
    """

    m_min: float
    m_max: float
    sigma: float
    c_perp: float
    c_z: float
    c_rr: float
    c_nn: float
    c_kk: float

    @property
    def delta(self) -> float:
        return delta_axial(self.c_perp, self.c_z)

    @property
    def d_observable(self) -> float:
        """D = tr C / 3 = (2 C_perp + C_z) / 3."""
        return (2.0 * self.c_perp + self.c_z) / 3.0

    @property
    def concurrence(self) -> float:
        return max(self.delta, 0.0) / 2.0

    def state(self) -> TwoQubitState:
        return unpolarized(np.diag([self.c_perp, self.c_perp, self.c_z]), basis_label="beam")


def _weighted_components(table: LuminosityTable, m: np.ndarray, cfg: PhysicsConfig, gg_only: bool):
    """Integrand matrix (n, 6): weight beta/M^2 times the luminosity-summed
    (a, c_perp, c_z, c_rr, c_nn, c_kk) at each mass node."""
    m = np.asarray(m, dtype=float)
    beta = np.sqrt(np.clip(1.0 - (cfg.threshold / m) ** 2, 0.0, None))
    l_gg = np.interp(m, table.m, table.l_gg)
    total = l_gg * angular.averaged_arrays(Channel.GG, beta)
    if not gg_only:
        l_qq = np.interp(m, table.m, table.l_qq)
        total = total + l_qq * angular.averaged_arrays(Channel.QQBAR, beta)
    return (beta / m**2 * total).T


def window_moments(
    m_max: float,
    table: LuminosityTable,
    cfg: PhysicsConfig,
    m_min: float | None = None,
    gg_only: bool = False,
    rtol: float = 1e-9,
) -> WindowMoments:
    """Integrate the direction-averaged states over a mass window.

    The lower edge defaults to threshold.  Quadrature runs in
    u = sqrt(M - 2 m_t) so the beta ~ sqrt(M - 2 m_t) rise at threshold
    is absorbed into a smooth integrand.
    """
    lo = cfg.threshold if m_min is None else max(m_min, cfg.threshold)
    if m_max <= lo:
        raise EmptyWindow(f"window [{lo}, {m_max}] GeV has no width above threshold")
    if not table.covers(lo, m_max):
        raise OutOfRange(
            f"window [{lo}, {m_max}] not covered by table [{table.m_min}, {table.m_max}]"
        )
    vec = window_integral(
        lambda m: _weighted_components(table, m, cfg, gg_only),
        lo,
        m_max,
        cfg.threshold,
        breakpoints=table.m,
        rtol=rtol,
    )
    den = vec[0]
    if den <= 0.0:
        raise EmptyWindow("window cross-section vanishes")
    sigma = 4.0 * math.pi * cfg.alpha_s**2 * den * HBARC2_PB
    c = vec[1:] / den
    return WindowMoments(lo, m_max, sigma, c[0], c[1], c[2], c[3], c[4])


def integrate_state(
    m_max: float,
    table: LuminosityTable,
    cfg: PhysicsConfig,
    m_min: float | None = None,
    gg_only: bool = False,
) -> TwoQubitState:
    """Total quantum state of the window [2 m_t, M_max] (beam basis)."""
    return window_moments(m_max, table, cfg, m_min=m_min, gg_only=gg_only).state()


@dataclass
class WindowSeries:
    """Windowed observables on a grid of upper mass cuts, with enough
    provenance to reproduce the run."""

    m_max: np.ndarray
    sigma: np.ndarray
    c_perp: np.ndarray
    c_z: np.ndarray
    d: np.ndarray
    c_rr: np.ndarray
    c_nn: np.ndarray
    c_kk: np.ndarray
    concurrence: np.ndarray
    provenance: dict = field(default_factory=dict)

    _COLUMNS = ("m_max", "sigma_pb", "c_perp", "c_z", "d", "c_rr", "c_nn", "c_kk", "concurrence")

    def _rows(self):
        return zip(
            self.m_max, self.sigma, self.c_perp, self.c_z, self.d,
            self.c_rr, self.c_nn, self.c_kk, self.concurrence,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {WINDOW_CSV_HEADER}\n")
        for key in sorted(self.provenance):
            buf.write(f"# {key}={self.provenance[key]}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self._COLUMNS)
        for row in self._rows():
            writer.writerow([f"{v:.10g}" for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {"schema": WINDOW_CSV_HEADER, "provenance": self.provenance}
        payload.update({k: np.asarray(getattr(self, k if k != "sigma_pb" else "sigma")).tolist()
                        for k in ("m_max", "sigma_pb", "c_perp", "c_z", "d",
                                  "c_rr", "c_nn", "c_kk", "concurrence")})
        return json.dumps(payload, indent=1)


def window_series(
    m_grid,
    table: LuminosityTable,
    cfg: PhysicsConfig,
    gg_only: bool = False,
    provenance: dict | None = None,
) -> WindowSeries:
    """Evaluate window_moments over a grid of upper cuts."""
    m_grid = np.asarray(m_grid, dtype=float)
    moments = [window_moments(m, table, cfg, gg_only=gg_only) for m in m_grid]
    meta = {
        "table_source": table.source,
        "sqrt_s": table.sqrt_s,
        "m_t": cfg.m_t,
        "alpha_s": cfg.alpha_s,
        "gg_only": gg_only,
    }
    if provenance:
        meta.update(provenance)
    return WindowSeries(
        m_max=m_grid,
        sigma=np.array([w.sigma for w in moments]),
        c_perp=np.array([w.c_perp for w in moments]),
        c_z=np.array([w.c_z for w in moments]),
        d=np.array([w.d_observable for w in moments]),
        c_rr=np.array([w.c_rr for w in moments]),
        c_nn=np.array([w.c_nn for w in moments]),
        c_kk=np.array([w.c_kk for w in moments]),
        concurrence=np.array([w.concurrence for w in moments]),
        provenance=meta,
    )


def critical_mass_total(
    table: LuminosityTable,
    cfg: PhysicsConfig,
    gg_only: bool = False,
    tol: float = 0.1,
) -> float:
    """Upper cut at which the windowed state stops being entangled.

    Bisection on delta of the windowed state between just above
    threshold (entangled, gluon-singlet dominated) and the table end.

    Raises NoSignChange when delta keeps one sign over the whole range,
    e.g. for a table that ends before the separability point.
    """
    lo = cfg.threshold + 1.0
    hi = table.m_max
    f_lo = window_moments(lo, table, cfg, gg_only=gg_only).delta
    f_hi = window_moments(hi, table, cfg, gg_only=gg_only).delta
    if f_lo * f_hi > 0.0:
        raise NoSignChange(
            f"windowed delta has no sign change on [{lo:.1f}, {hi:.1f}] GeV "
            f"(delta = {f_lo:+.3f} .. {f_hi:+.3f})"
        )
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if window_moments(mid, table, cfg, gg_only=gg_only).delta * f_lo > 0.0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0
