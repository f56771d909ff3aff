"""Dilepton pseudo-experiments and the tomography protocol.

Event generation draws production kinematics from the differential
cross-section and lepton directions from the spin state of each event,
both by rejection sampling.  Estimators invert the first and second
moments of the dilepton angular distribution

    (1/sigma) dsigma/dO+ dO- = (1 + B+.q+ - B-.q- - q+.C.q-) / (4 pi)^2

into the Bloch coefficients of the total quantum state in the window,
exactly the quantities the mass-window integrals predict.  All
randomness flows through one explicitly seeded generator.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import EnvelopeFailure, InsufficientEvents
from .kinematics import PhysicsConfig, beta_of_mass
from .lumi import LuminosityTable
from .parton import Channel, coefficient_arrays
from .states import TwoQubitState, bloch_from_density, unpolarized

EVENTS_CSV_HEADER = "ttspin events v1"
EVENTS_MAGIC = b"TTEV0001"
_MIN_ACCEPTANCE = 1e-4


@dataclass(frozen=True)
class DileptonEvent:
    """One pseudo-event: production kinematics plus the antilepton (q+)
    and lepton (q-) unit directions in the parent rest frames, in beam
    coordinates."""

    m_ttbar: float
    cos_theta: float
    q_plus: np.ndarray
    q_minus: np.ndarray


class EventSample:
    """Column store of dilepton events; behaves like a sequence of
    DileptonEvent and serializes to CSV or a compact binary."""

    def __init__(self, m_ttbar, cos_theta, q_plus, q_minus):
        self.m_ttbar = np.asarray(m_ttbar, dtype=float)
        self.cos_theta = np.asarray(cos_theta, dtype=float)
        self.q_plus = np.asarray(q_plus, dtype=float).reshape(-1, 3)
        self.q_minus = np.asarray(q_minus, dtype=float).reshape(-1, 3)
        n = len(self.m_ttbar)
        if not (len(self.cos_theta) == len(self.q_plus) == len(self.q_minus) == n):
            raise ValueError("mismatched column lengths")

    def __len__(self) -> int:
        return len(self.m_ttbar)

    def __getitem__(self, i: int) -> DileptonEvent:
        return DileptonEvent(
            float(self.m_ttbar[i]), float(self.cos_theta[i]), self.q_plus[i], self.q_minus[i]
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def cos_phi(self) -> np.ndarray:
        """Opening-angle cosine between the two lepton directions."""
        return np.einsum("ni,ni->n", self.q_plus, self.q_minus)

    # -- serialization ------------------------------------------------

    def _matrix(self) -> np.ndarray:
        return np.column_stack([self.m_ttbar, self.cos_theta, self.q_plus, self.q_minus])

    def to_csv(self, path) -> None:
        header = f"# {EVENTS_CSV_HEADER}\nM,cos_theta,qpx,qpy,qpz,qmx,qmy,qmz"
        np.savetxt(path, self._matrix(), delimiter=",", header=header, comments="", fmt="%.17g")

    @classmethod
    def from_csv(cls, path) -> "EventSample":
        data = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
        if data.shape[1] != 8:
            raise ValueError(f"expected 8 columns, got {data.shape[1]}")
        return cls(data[:, 0], data[:, 1], data[:, 2:5], data[:, 5:8])

    def to_binary(self, path) -> None:
        """16-byte header (magic 'TTEV0001' + little-endian uint64 count)
        followed by 8 little-endian float64 per event."""
        with open(path, "wb") as handle:
            handle.write(EVENTS_MAGIC)
            handle.write(struct.pack("<Q", len(self)))
            handle.write(self._matrix().astype("<f8").tobytes())

    @classmethod
    def from_binary(cls, path) -> "EventSample":
        with open(path, "rb") as handle:
            magic = handle.read(8)
            if magic != EVENTS_MAGIC:
                raise ValueError(f"bad magic {magic!r}")
            (count,) = struct.unpack("<Q", handle.read(8))
            data = np.frombuffer(handle.read(), dtype="<f8").reshape(count, 8)
        return cls(data[:, 0], data[:, 1], data[:, 2:5], data[:, 5:8])


def _uniform_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    vec = rng.normal(size=(n, 3))
    return vec / np.linalg.norm(vec, axis=1, keepdims=True)


def _sample_lepton_pairs(b_plus, b_minus, c_beam, rng: np.random.Generator):
    """Draw (q+, q-) for each event from its spin state by rejection.

    The density weight w = 1 + B+.q+ - B-.q- - q+.C.q- is bounded by
    1 + |B+| + |B-| + 3 (entrywise bound on the correlation term), which
    keeps acceptance above 1/6 for any physical state.
    """
    n = len(c_beam)
    envelope = 1.0 + np.linalg.norm(b_plus, axis=-1) + np.linalg.norm(b_minus, axis=-1) + 3.0
    q_plus = np.zeros((n, 3))
    q_minus = np.zeros((n, 3))
    todo = np.arange(n)
    while todo.size:
        qp = _uniform_sphere(rng, todo.size)
        qm = _uniform_sphere(rng, todo.size)
        w = (
            1.0
            + np.einsum("ni,ni->n", np.broadcast_to(b_plus, (n, 3))[todo], qp)
            - np.einsum("ni,ni->n", np.broadcast_to(b_minus, (n, 3))[todo], qm)
            - np.einsum("ni,nij,nj->n", qp, c_beam[todo], qm)
        )
        env = envelope[todo] if envelope.ndim else np.full(todo.size, envelope)
        if np.any(w > env * (1.0 + 1e-12)):
            raise EnvelopeFailure("lepton density exceeded its envelope")
        accept = rng.uniform(size=todo.size) * env < w
        hit = todo[accept]
        q_plus[hit] = qp[accept]
        q_minus[hit] = qm[accept]
        todo = todo[~accept]
    return q_plus, q_minus


def _beam_rotations(cos_theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """(n, 3, 3) rotations with columns (k, r, n) in beam coordinates."""
    st = np.sqrt(np.clip(1.0 - cos_theta**2, 0.0, None))
    cp, sp = np.cos(phi), np.sin(phi)
    rot = np.empty((len(cos_theta), 3, 3))
    rot[:, 0, 0] = st * cp
    rot[:, 1, 0] = st * sp
    rot[:, 2, 0] = cos_theta
    rot[:, 0, 1] = -cos_theta * cp
    rot[:, 1, 1] = -cos_theta * sp
    rot[:, 2, 1] = st
    rot[:, 0, 2] = -sp
    rot[:, 1, 2] = cp
    rot[:, 2, 2] = 0.0
    return rot


def _mixed_correlations(m, cos_theta, table, cfg, gg_only):
    """Per-event normalized helicity C matrices of the luminosity-mixed
    state, plus the weighted a-coefficient (the sampling density core)."""
    beta = np.array([beta_of_mass(v, cfg) for v in np.atleast_1d(m)])
    l_qq = np.interp(m, table.m, table.l_qq)
    l_gg = np.interp(m, table.m, table.l_gg)
    if gg_only:
        l_qq = np.zeros_like(l_gg)
    a_mix = np.zeros_like(beta)
    entries = {"kk": 0.0, "rr": 0.0, "nn": 0.0, "kr": 0.0}
    for lum, channel in ((l_qq, Channel.QQBAR), (l_gg, Channel.GG)):
        a, c_kk, c_rr, c_nn, c_kr = coefficient_arrays(channel, beta, cos_theta)
        a_mix = a_mix + lum * a
        entries["kk"] = entries["kk"] + lum * c_kk
        entries["rr"] = entries["rr"] + lum * c_rr
        entries["nn"] = entries["nn"] + lum * c_nn
        entries["kr"] = entries["kr"] + lum * c_kr
    safe = np.where(a_mix > 0.0, a_mix, 1.0)  # zero-density points never get accepted
    c_hel = np.zeros((len(beta), 3, 3))
    c_hel[:, 0, 0] = entries["kk"] / safe
    c_hel[:, 1, 1] = entries["rr"] / safe
    c_hel[:, 2, 2] = entries["nn"] / safe
    c_hel[:, 0, 1] = c_hel[:, 1, 0] = entries["kr"] / safe
    density = beta / np.asarray(m) ** 2 * a_mix
    return c_hel, density


def sample_events(
    n: int,
    window: tuple[float, float],
    table: LuminosityTable,
    cfg: PhysicsConfig,
    seed: int,
    gg_only: bool = False,
) -> EventSample:
    """Generate ``n`` dilepton pseudo-events in a mass window.

    (M, cos Theta) follow the differential cross-section by rejection
    against a gridded constant envelope; the lepton directions follow
    the spin state of each accepted configuration, rotated to beam
    coordinates at a uniform azimuth.  Deterministic given ``seed``.

    Raises
    ------
    EnvelopeFailure
        If the precomputed envelope is violated or acceptance collapses
        below 1e-4 (misconfigured window/table).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    m_lo = max(window[0], cfg.threshold)
    m_hi = window[1]
    if m_hi <= m_lo:
        raise EnvelopeFailure(f"empty sampling window [{m_lo}, {m_hi}]")
    if not table.covers(m_lo, m_hi):
        raise EnvelopeFailure("sampling window not covered by the table")
    rng = np.random.default_rng(seed)

    grid_m = np.linspace(m_lo, m_hi, 512)
    grid_c = np.linspace(-1.0, 1.0, 257)
    mm, cc = np.meshgrid(grid_m, grid_c, indexing="ij")
    _, dens = _mixed_correlations(mm.ravel(), cc.ravel(), table, cfg, gg_only)
    envelope = 1.25 * float(dens.max())
    if envelope <= 0.0:
        raise EnvelopeFailure("sampling density vanishes on the window")

    out_m = np.empty(0)
    out_c = np.empty(0)
    proposed = 0
    while len(out_m) < n:
        batch = max(4096, int(1.5 * (n - len(out_m))))
        m_try = rng.uniform(m_lo, m_hi, size=batch)
        c_try = rng.uniform(-1.0, 1.0, size=batch)
        _, dens = _mixed_correlations(m_try, c_try, table, cfg, gg_only)
        if np.any(dens > envelope):
            raise EnvelopeFailure("kinematic density exceeded its envelope")
        keep = rng.uniform(0.0, envelope, size=batch) < dens
        out_m = np.concatenate([out_m, m_try[keep]])
        out_c = np.concatenate([out_c, c_try[keep]])
        proposed += batch
        if proposed >= 10 * n and len(out_m) < _MIN_ACCEPTANCE * proposed:
            raise EnvelopeFailure(f"kinematic acceptance below {_MIN_ACCEPTANCE}")
    out_m = out_m[:n]
    out_c = out_c[:n]

    c_hel, _ = _mixed_correlations(out_m, out_c, table, cfg, gg_only)
    phi = rng.uniform(0.0, 2.0 * np.pi, size=n)
    rot = _beam_rotations(out_c, phi)
    c_beam = np.einsum("nab,nbc,ndc->nad", rot, c_hel, rot)
    q_plus, q_minus = _sample_lepton_pairs(np.zeros(3), np.zeros(3), c_beam, rng)
    return EventSample(out_m, out_c, q_plus, q_minus)


def sample_from_state(
    state: TwoQubitState,
    n: int,
    seed: int,
    m_ttbar: float = 346.0,
    cos_theta: float = 0.0,
) -> EventSample:
    """Pseudo-events with frozen kinematics, drawn from one fixed state.

    The state's coefficients are taken as already expressed in beam
    coordinates.  Used for estimator fixtures and convergence studies.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    c_beam = np.broadcast_to(state.c, (n, 3, 3))
    q_plus, q_minus = _sample_lepton_pairs(state.b_plus, state.b_minus, c_beam, rng)
    return EventSample(np.full(n, m_ttbar), np.full(n, cos_theta), q_plus, q_minus)


@dataclass(frozen=True)
class TomographyResult:
    """Reconstructed state with per-coefficient standard errors.

    ``assumption_level`` is the number of fitted parameters: 2 (axial
    symmetry + vanishing polarizations), 4 (axial symmetry only) or 15
    (no assumption).  Frozen parameters carry zero standard error.
    """

    raw_state: TwoQubitState
    projected_state: TwoQubitState
    n_events: int
    se_b_plus: np.ndarray
    se_b_minus: np.ndarray
    se_c: np.ndarray
    assumption_level: int

    def to_dict(self) -> dict:
        return {
            "schema": "ttspin tomography v1",
            "n_events": self.n_events,
            "assumption_level": self.assumption_level,
            "raw": {
                "b_plus": self.raw_state.b_plus.tolist(),
                "b_minus": self.raw_state.b_minus.tolist(),
                "c": self.raw_state.c.tolist(),
            },
            "projected": {
                "b_plus": self.projected_state.b_plus.tolist(),
                "b_minus": self.projected_state.b_minus.tolist(),
                "c": self.projected_state.c.tolist(),
            },
            "stderr": {
                "b_plus": self.se_b_plus.tolist(),
                "b_minus": self.se_b_minus.tolist(),
                "c": self.se_c.tolist(),
            },
        }


def project_physical(raw: TwoQubitState) -> TwoQubitState:
    """Closest physical state: clip negative eigenvalues of the
    assembled matrix to zero and spread the unit-trace deficit uniformly
    over the remaining positive ones (repeated until all eigenvalues are
    non-negative).  Idempotent on physical inputs."""
    from .states import assemble_density  # local import keeps module load light

    # raw moment estimates legitimately land outside the coefficient cube
    w, v = np.linalg.eigh(assemble_density(raw, warn_out_of_cube=False))
    w = w.copy()
    for _ in range(8):
        if np.all(w >= 0.0):
            break
        w = np.clip(w, 0.0, None)
        positive = w > 0.0
        w[positive] -= (w.sum() - 1.0) / positive.sum()
    w = np.clip(w, 0.0, None)
    w /= w.sum()
    rho = (v * w) @ v.conj().T
    return bloch_from_density(rho, basis_label=raw.basis_label)


def _moment_errors(samples: np.ndarray, scale: float) -> tuple[float, float]:
    """Mean-based estimate and its standard error, scaled."""
    n = len(samples)
    mean = samples.mean()
    se = samples.std(ddof=1) / np.sqrt(n)
    return scale * mean, abs(scale) * se


def estimate_moments(sample: EventSample) -> TomographyResult:
    """Unconstrained moment estimates of all 15 Bloch parameters.

    B+_i = 3 <q+_i>, B-_i = -3 <q-_i>, C_ij = -9 <q+_i q-_j>; standard
    errors are the scaled sample standard deviations / sqrt(n).
    """
    return tomography_report(sample, assumption_level=15)


def tomography_report(sample: EventSample, assumption_level: int) -> TomographyResult:
    """Fit only the parameters of the requested assumption level and
    project the result onto the physical set.

    Level 15 fits everything; level 4 assumes symmetry around the beam
    axis (B+-_z, C_perp, C_z); level 2 additionally drops the
    polarizations (C_perp, C_z).
    """
    n = len(sample)
    if n < 2:
        raise InsufficientEvents(f"need at least 2 events, got {n}")
    if assumption_level not in (2, 4, 15):
        raise ValueError("assumption_level must be one of 2, 4, 15")
    qp, qm = sample.q_plus, sample.q_minus
    b_plus = np.zeros(3)
    b_minus = np.zeros(3)
    se_bp = np.zeros(3)
    se_bm = np.zeros(3)
    c = np.zeros((3, 3))
    se_c = np.zeros((3, 3))
    if assumption_level == 15:
        for i in range(3):
            b_plus[i], se_bp[i] = _moment_errors(qp[:, i], 3.0)
            b_minus[i], se_bm[i] = _moment_errors(qm[:, i], -3.0)
            for j in range(3):
                c[i, j], se_c[i, j] = _moment_errors(qp[:, i] * qm[:, j], -9.0)
    else:
        if assumption_level == 4:
            b_plus[2], se_bp[2] = _moment_errors(qp[:, 2], 3.0)
            b_minus[2], se_bm[2] = _moment_errors(qm[:, 2], -3.0)
        perp_samples = (qp[:, 0] * qm[:, 0] + qp[:, 1] * qm[:, 1]) / 2.0
        c_perp, se_perp = _moment_errors(perp_samples, -9.0)
        c_z, se_z = _moment_errors(qp[:, 2] * qm[:, 2], -9.0)
        c = np.diag([c_perp, c_perp, c_z])
        se_c = np.diag([se_perp, se_perp, se_z])
    raw = TwoQubitState(b_plus, b_minus, c, basis_label="beam")
    return TomographyResult(
        raw_state=raw,
        projected_state=project_physical(raw),
        n_events=n,
        se_b_plus=se_bp,
        se_b_minus=se_bm,
        se_c=se_c,
        assumption_level=assumption_level,
    )


def estimate_D(sample: EventSample) -> tuple[float, float]:
    """Estimate D = tr C / 3 from the lepton opening angle:
    D = -3 <cos phi>, with its standard error."""
    if len(sample) < 2:
        raise InsufficientEvents(f"need at least 2 events, got {len(sample)}")
    return _moment_errors(sample.cos_phi(), -3.0)


def witness(d: float) -> float:
    """Entanglement witness W = D + 1/3; negative values certify
    entanglement."""
    return d + 1.0 / 3.0


def expected_events(sigma_pb: float, integrated_lumi_fb: float, efficiency: float) -> float:
    """Expected event count for a window cross-section, an integrated
    luminosity in 1/fb, and a single flat efficiency factor standing in
    for branching fractions, selection and detector acceptance."""
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError("efficiency must lie in [0, 1]")
    return sigma_pb * 1000.0 * integrated_lumi_fb * efficiency


def significance(d: float, rel_unc: float) -> float:
    """Number of measurement uncertainties separating D from the null
    hypothesis D = -1/3, with Delta D = rel_unc * |D|.

    Zero unless d < -1/3 (no detection on or above the boundary); the
    printed definition has a sign ambiguity in the detection regime, so
    the magnitude |d + 1/3| / Delta D is used there.
    """
    if rel_unc <= 0.0:
        raise ValueError("rel_unc must be strictly positive")
    if d >= -1.0 / 3.0:
        return 0.0
    return abs(witness(d)) / (rel_unc * abs(d))
