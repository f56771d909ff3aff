"""Two-qubit spin-state algebra.

A state is stored by its Bloch decomposition: single-spin polarizations
``b_plus`` / ``b_minus`` and the 3x3 spin-correlation matrix ``c``.  The
assembled density matrix is

    rho = (I4 + sum_i b+_i s_i x I2 + sum_i b-_i I2 x s_i
               + sum_ij c_ij s_i x s_j) / 4

with s_i the Pauli matrices.  Everything here is a pure function of its
inputs; nothing mutates shared state.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InputNotPhysical, NotPhysicalCoefficients

TOL_PSD = 1e-10

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)
I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)

# Basis operators multiplying (b+_1..3, b-_1..3, c_11..c_33) in the assembly,
# flattened row-major for vectorized batch construction.
_BASIS_OPS = np.stack(
    [np.kron(s, I2) for s in PAULI]
    + [np.kron(I2, s) for s in PAULI]
    + [np.kron(si, sj) for si in PAULI for sj in PAULI]
)


@dataclass(frozen=True)
class TwoQubitState:
    """Bloch decomposition of a two-qubit spin density matrix.

    ``basis_label`` is bookkeeping only ("helicity", "beam" or "other"):
    it records which orthonormal triad the components refer to and does
    not affect any algebra.
    """

    b_plus: np.ndarray
    b_minus: np.ndarray
    c: np.ndarray
    basis_label: str = "other"

    def __post_init__(self):
        object.__setattr__(self, "b_plus", np.asarray(self.b_plus, dtype=float).reshape(3))
        object.__setattr__(self, "b_minus", np.asarray(self.b_minus, dtype=float).reshape(3))
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float).reshape(3, 3))
        if self.basis_label not in ("helicity", "beam", "other"):
            raise ValueError(f"unknown basis label {self.basis_label!r}")

    @property
    def coefficients(self) -> np.ndarray:
        """The 15 Bloch parameters as a flat vector (b+, b-, c row-major)."""
        return np.concatenate([self.b_plus, self.b_minus, self.c.ravel()])


def unpolarized(c, basis_label="other") -> TwoQubitState:
    """State with vanishing single-spin polarizations."""
    return TwoQubitState(np.zeros(3), np.zeros(3), c, basis_label)


def assemble_density(state: TwoQubitState, warn_out_of_cube: bool = True) -> np.ndarray:
    """Assemble the 4x4 density matrix from the Bloch coefficients.

    Total on finite inputs.  Coefficients outside [-1, 1] cannot belong
    to a physical state; they are accepted (raw tomography estimates
    live there) but flagged with a RuntimeWarning unless suppressed.
    """
    coeffs = state.coefficients
    if warn_out_of_cube and np.abs(coeffs).max() > 1.0 + 1e-9:
        warnings.warn(
            f"Bloch coefficient magnitude {np.abs(coeffs).max():.4f} exceeds 1; "
            "the assembled matrix cannot be a physical state",
            RuntimeWarning,
            stacklevel=2,
        )
    return (I4 + np.tensordot(coeffs, _BASIS_OPS, axes=1)) / 4.0


def assemble_density_batch(coeffs: np.ndarray) -> np.ndarray:
    """Vectorized assembly for an (n, 15) array of Bloch parameter rows."""
    coeffs = np.asarray(coeffs, dtype=float)
    return (I4[None, :, :] + np.einsum("nk,kij->nij", coeffs, _BASIS_OPS)) / 4.0


def bloch_from_density(rho: np.ndarray, basis_label="other") -> TwoQubitState:
    """Read Bloch coefficients back off a (trace-one) density matrix."""
    b_plus = [np.trace(rho @ np.kron(s, I2)).real for s in PAULI]
    b_minus = [np.trace(rho @ np.kron(I2, s)).real for s in PAULI]
    c = [[np.trace(rho @ np.kron(si, sj)).real for sj in PAULI] for si in PAULI]
    return TwoQubitState(np.array(b_plus), np.array(b_minus), np.array(c), basis_label)


def partial_transpose(m: np.ndarray) -> np.ndarray:
    """Transpose the four 2x2 blocks of a 4x4 matrix in place.

    This is the partial transpose with respect to the second spin;
    applying it twice returns the input exactly.
    """
    m = np.asarray(m)
    if m.shape != (4, 4):
        raise ValueError("partial_transpose expects a 4x4 matrix")
    blocks = m.reshape(2, 2, 2, 2)  # (row-block, row-in-block, col-block, col-in-block)
    return blocks.transpose(0, 3, 2, 1).reshape(4, 4)


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian 4x4 matrix."""
    return float(np.linalg.eigvalsh(m)[0])


def is_physical(state: TwoQubitState, tol: float = TOL_PSD) -> bool:
    """True when the assembled matrix is PSD within ``tol``.

    Uses a full Hermitian eigendecomposition rather than a Cholesky
    attempt so that boundary (rank-deficient) states are handled exactly.
    """
    return min_eigenvalue(assemble_density(state)) >= -tol


def is_entangled_ppt(state: TwoQubitState, tol: float = TOL_PSD) -> bool:
    """Positive-partial-transpose test.

    For two qubits a negative partial transpose is necessary *and*
    sufficient for entanglement.  The boundary (smallest eigenvalue in
    [-tol, 0]) is treated as separable.

    Raises
    ------
    InputNotPhysical
        If the input state itself is not PSD within ``tol``.
    """
    rho = assemble_density(state)
    lo = min_eigenvalue(rho)
    if lo < -tol:
        raise InputNotPhysical(f"state has eigenvalue {lo:.3e} < -{tol:.1e}")
    return min_eigenvalue(partial_transpose(rho)) < -tol


def _psd_sqrt(m: np.ndarray, clip: float = -1e-12) -> np.ndarray:
    """Hermitian square root via eigendecomposition.

    Eigenvalues above ``clip`` but below zero are numerical noise on
    boundary states and are clipped to zero; anything below ``clip``
    raises, since the input was supposed to be PSD.
    """
    w, v = np.linalg.eigh(m)
    if w[0] < clip:
        raise InputNotPhysical(f"matrix square root of non-PSD input (min eig {w[0]:.3e})")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def concurrence_wootters(state: TwoQubitState, tol: float = TOL_PSD) -> float:
    """Concurrence of an arbitrary two-qubit state.

    C = max(0, l1 - l2 - l3 - l4) with l_i the decreasing eigenvalues of
    sqrt(sqrt(rho) rho_tilde sqrt(rho)) and
    rho_tilde = (s_y x s_y) rho* (s_y x s_y).
    """
    rho = assemble_density(state)
    lo = min_eigenvalue(rho)
    if lo < -tol:
        raise InputNotPhysical(f"state has eigenvalue {lo:.3e} < -{tol:.1e}")
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    rho_tilde = yy @ rho.conj() @ yy
    # eigenvalues of sqrt(sqrt(rho) rho_tilde sqrt(rho)) are the singular
    # values of sqrt(rho_tilde) sqrt(rho); the SVD form stays accurate on
    # boundary (rank-deficient) states where the sandwich form loses digits
    lam = np.linalg.svd(_psd_sqrt(rho_tilde) @ _psd_sqrt(rho), compute_uv=False)
    return float(min(max(lam[0] - lam[1] - lam[2] - lam[3], 0.0), 1.0))


def diagonal_physicality_margin(c1: float, c2: float, c3: float) -> float:
    """Largest violation of the diagonal-state physicality bounds.

    A real unpolarized state with C = diag(c1, c2, c3) is physical iff
    c3 + |c1 + c2| <= 1 and -c3 + |c1 - c2| <= 1; returns the max of the
    two left-hand sides minus 1 (<= 0 means physical).
    """
    return max(c3 + abs(c1 + c2), -c3 + abs(c1 - c2)) - 1.0


def concurrence_diagonal(c1: float, c2: float, c3: float) -> float:
    """Closed-form concurrence for real unpolarized diagonal-C states.

    Equivalent to the general formula on this family; the two sign
    branches meet at c3 = 0, where both are evaluated and must agree.

    Raises
    ------
    NotPhysicalCoefficients
        If (c1, c2, c3) violate the diagonal physicality bounds beyond 1e-12.
    """
    if diagonal_physicality_margin(c1, c2, c3) > 1e-12:
        raise NotPhysicalCoefficients(f"diag({c1}, {c2}, {c3}) is not a physical state")
    neg = max(-c3 + abs(c1 + c2) - 1.0, 0.0) / 2.0  # c3 <= 0 branch
    pos = max(c3 + abs(c1 - c2) - 1.0, 0.0) / 2.0   # c3 >= 0 branch
    if c3 == 0.0:
        assert abs(neg - pos) < 1e-12
        return neg
    return neg if c3 < 0.0 else pos


@dataclass(frozen=True)
class SufficientCriteria:
    """Scalar entanglement certificates; each strictly positive value
    certifies entanglement (none is necessary on its own)."""

    p_general: float
    p_tilde: float
    delta: float
    trace_criterion: float

    def any_positive(self, margin: float = 0.0) -> bool:
        return max(self.p_general, self.p_tilde, self.delta, self.trace_criterion) > margin


def sufficient_criteria(state: TwoQubitState) -> SufficientCriteria:
    """Evaluate the four sufficient entanglement criteria.

    p_general: (b+_3 + b-_3)^2 + (c11 + c22)^2 + (c21 - c12)^2 - (1 + c33)^2
    p_tilde:   (c11 + c22)^2 - (1 + c33)^2
    delta:     -c33 + |c11 + c22| - 1
    trace:     -tr C - 1
    """
    b3 = state.b_plus[2] + state.b_minus[2]
    c = state.c
    p_general = b3**2 + (c[0, 0] + c[1, 1]) ** 2 + (c[1, 0] - c[0, 1]) ** 2 - (1.0 + c[2, 2]) ** 2
    p_tilde = (c[0, 0] + c[1, 1]) ** 2 - (1.0 + c[2, 2]) ** 2
    delta = -c[2, 2] + abs(c[0, 0] + c[1, 1]) - 1.0
    trace_criterion = -np.trace(c) - 1.0
    return SufficientCriteria(float(p_general), float(p_tilde), float(delta), float(trace_criterion))


def delta_axial(c_perp: float, c_z: float) -> float:
    """Axial discriminant -c_z + 2|c_perp| - 1.

    For unpolarized axially symmetric states this is positive iff the
    state is entangled, with concurrence max(delta, 0)/2.
    """
    return -c_z + 2.0 * abs(c_perp) - 1.0


def ppt_axial(c_perp: float, c_z: float, b_plus_z: float = 0.0, b_minus_z: float = 0.0) -> float:
    """PPT discriminant for axially symmetric states (possibly polarized
    along the symmetry axis): 4 c_perp^2 + (b+_z + b-_z)^2 - (1 + c_z)^2,
    positive iff entangled."""
    return 4.0 * c_perp**2 + (b_plus_z + b_minus_z) ** 2 - (1.0 + c_z) ** 2


def _bloch_rows_from_densities(rhos: np.ndarray) -> np.ndarray:
    """(n, 15) Bloch parameter rows read off a batch of density matrices."""
    return np.einsum("nij,kji->nk", rhos, _BASIS_OPS).real


def random_physical_states(
    n: int,
    rng: np.random.Generator,
    unpolarized_only: bool = False,
    diagonal_c: bool = False,
    method: str | None = None,
    tol: float = TOL_PSD,
    batch: int = 50000,
    max_batches: int = 10000,
) -> list[TwoQubitState]:
    """Draw random physical two-qubit states.

    Two samplers:

    "cube"    coefficients uniform in [-1, 1] with non-PSD draws
              rejected.  Tractable only for the restricted families:
              acceptance is ~1/3 for diagonal C, ~1.6e-3 for
              unpolarized draws, and collapses to ~1e-6 for the full
              15-parameter cube.
    "ginibre" rho = G G^dag / tr(G G^dag) with complex Gaussian G: the
              Hilbert-Schmidt measure, physical by construction; no
              family restrictions supported.

    Default: cube when a family flag restricts the draw, Ginibre for
    unrestricted states (where cube rejection is impractical).
    """
    if method is None:
        method = "cube" if (unpolarized_only or diagonal_c) else "ginibre"
    out: list[TwoQubitState] = []
    if method == "ginibre":
        if unpolarized_only or diagonal_c:
            raise ValueError("family restrictions require the cube sampler")
        g = rng.normal(size=(n, 4, 4)) + 1j * rng.normal(size=(n, 4, 4))
        rhos = np.einsum("nij,nkj->nik", g, g.conj())
        rhos /= np.trace(rhos, axis1=1, axis2=2)[:, None, None].real
        for row in _bloch_rows_from_densities(rhos):
            out.append(TwoQubitState(row[:3], row[3:6], row[6:].reshape(3, 3)))
        return out
    if method != "cube":
        raise ValueError(f"unknown sampler {method!r}")
    for _ in range(max_batches):
        if len(out) >= n:
            break
        coeffs = rng.uniform(-1.0, 1.0, size=(batch, 15))
        if unpolarized_only:
            coeffs[:, :6] = 0.0
        if diagonal_c:
            mask = np.zeros(9, dtype=bool)
            mask[[0, 4, 8]] = True
            coeffs[:, 6:][:, ~mask] = 0.0
        rhos = assemble_density_batch(coeffs)
        good = np.linalg.eigvalsh(rhos)[:, 0] >= -tol
        for row in coeffs[good]:
            out.append(TwoQubitState(row[:3], row[3:6], row[6:].reshape(3, 3)))
            if len(out) == n:
                break
    if len(out) < n:
        raise RuntimeError("rejection sampler failed to collect enough physical states")
    return out
