"""Shared entangled resources: NME basis, Schmidt-form states, entropies."""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
import scipy.linalg as la
from numpy.typing import ArrayLike, NDArray
from scipy.special import entr

from .config import NORM_TOL, SPECTRUM_TOL
from .qmath import Operator, StateVector, as_state, basis_ket, projector

logger = logging.getLogger(__name__)

# Storage tolerance for a Schmidt spectrum after construction
_STORED_SUM_TOL = 1e-12


def _validate_probabilities(values: Sequence[float], tol: float) -> NDArray[np.float64]:
    probs = np.asarray(values, dtype=np.float64)
    if probs.ndim != 1 or probs.size == 0:
        raise ValueError("Spectrum must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(probs)):
        raise ValueError("Spectrum has non-finite entries")
    if np.any(probs < 0):
        raise ValueError(f"Spectrum has negative entries: {probs.tolist()}")
    total = float(probs.sum())
    if abs(total - 1.0) > tol:
        raise ValueError(f"Spectrum sums to {total:.12g}, expected 1 within {tol:.0e}")
    return probs


@dataclass(frozen=True)
class SchmidtState:
    """Bipartite pure state sum_k sqrt(p_k) |k>|k>, stored by its spectrum.

    The spectrum keeps the caller's index order; closed forms such as the qutrit
    bound single out p_0.
    """

    spectrum: Tuple[float, ...]

    def __post_init__(self) -> None:
        probs = _validate_probabilities(self.spectrum, _STORED_SUM_TOL)
        object.__setattr__(self, "spectrum", tuple(float(p) for p in probs))

    @classmethod
    def from_spectrum(cls, values: Sequence[float], tol: float = SPECTRUM_TOL) -> "SchmidtState":
        """Validate within tol, then renormalize exactly."""
        probs = _validate_probabilities(values, tol)
        return cls(tuple(probs / probs.sum()))

    @classmethod
    def uniform(cls, dim: int) -> "SchmidtState":
        """Maximally entangled resource of local dimension dim."""
        if dim < 1:
            raise ValueError(f"Dimension must be positive, got {dim}")
        return cls(tuple([1.0 / dim] * dim))

    @classmethod
    def from_ell(cls, ell: complex) -> "SchmidtState":
        """Qubit channel L(|00> + ell|11>): spectrum (L^2, L^2 |ell|^2)."""
        weight = abs(ell) ** 2
        p0 = 1.0 / (1.0 + weight)
        return cls((p0, 1.0 - p0))

    @property
    def dim(self) -> int:
        return len(self.spectrum)

    @property
    def probabilities(self) -> NDArray[np.float64]:
        return np.array(self.spectrum)

    def state_vector(self) -> StateVector:
        return schmidt_form(self.spectrum)


@dataclass(frozen=True)
class NmeBasis:
    """The four mutually orthogonal NME vectors for parameters (ell, p).

    vectors[0] = L(|00> + ell|11>),   vectors[1] = L(ell*|00> - |11>),
    vectors[2] = P(|01> + p|10>),     vectors[3] = P(p*|01> - |10>).
    """

    ell: complex
    p: complex
    vectors: Tuple[StateVector, ...]

    def matrix(self) -> Operator:
        """Vectors as the columns of a 4x4 matrix."""
        return np.column_stack(self.vectors)

    def gram(self) -> Operator:
        basis = self.matrix()
        return basis.conj().T @ basis

    def completeness_residual(self) -> float:
        """max |sum_i |psi_i><psi_i| - I| entrywise."""
        total = sum(projector(v) for v in self.vectors)
        return float(np.max(np.abs(total - np.eye(4))))

    def entropies(self) -> Tuple[float, ...]:
        """Entanglement entropy (ebits) of each basis vector."""
        return tuple(
            entanglement_entropy(schmidt_decompose(v, 2, 2).state) for v in self.vectors
        )


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Schmidt spectrum plus local bases: v = sum_k sqrt(p_k) a_k (x) b_k."""

    state: SchmidtState
    basis_a: Operator
    basis_b: Operator

    def reconstruct(self) -> StateVector:
        amplitudes = np.sqrt(self.state.probabilities)
        dim = self.basis_a.shape[0] * self.basis_b.shape[0]
        result = np.zeros(dim, dtype=np.complex128)
        for k, amp in enumerate(amplitudes):
            result += amp * np.kron(self.basis_a[:, k], self.basis_b[:, k])
        return result


def nme_basis(ell: complex, p: complex) -> NmeBasis:
    """Build the NME basis for arbitrary complex ell and p."""
    ell = complex(ell)
    p = complex(p)
    big_l = 1.0 / np.sqrt(1.0 + abs(ell) ** 2)
    big_p = 1.0 / np.sqrt(1.0 + abs(p) ** 2)

    k00, k01, k10, k11 = (basis_ket(i, 4) for i in range(4))
    vectors = (
        big_l * (k00 + ell * k11),
        big_l * (ell.conjugate() * k00 - k11),
        big_p * (k01 + p * k10),
        big_p * (p.conjugate() * k01 - k10),
    )
    return NmeBasis(ell=ell, p=p, vectors=vectors)


def schmidt_form(spectrum: Sequence[float]) -> StateVector:
    """State sum_k sqrt(p_k)|k>|k> in C^d (x) C^d.

    Raises:
        ValueError: On negative entries or a sum off 1 by more than 1e-9
    """
    probs = _validate_probabilities(spectrum, SPECTRUM_TOL)
    d = probs.size
    state = np.zeros(d * d, dtype=np.complex128)
    state[np.arange(d) * (d + 1)] = np.sqrt(probs)
    return state


def schmidt_decompose(v: ArrayLike, dim_a: int, dim_b: int) -> SchmidtDecomposition:
    """Schmidt decomposition via SVD of the dim_a x dim_b coefficient matrix.

    The returned spectrum is in descending order.

    Raises:
        ValueError: If dim_a * dim_b differs from the vector length or v is not normalized
    """
    vec = as_state(v)
    if dim_a < 1 or dim_b < 1 or dim_a * dim_b != vec.size:
        raise ValueError(
            f"Dimension mismatch: {dim_a} x {dim_b} does not factor a vector of length {vec.size}"
        )
    squared_norm = float(np.vdot(vec, vec).real)
    if abs(squared_norm - 1.0) > NORM_TOL:
        raise ValueError(f"State is not normalized: squared norm {squared_norm:.12g}")

    coefficients = vec.reshape(dim_a, dim_b)
    u, s, vh = la.svd(coefficients)
    rank = min(dim_a, dim_b)
    probs = s[:rank] ** 2
    state = SchmidtState.from_spectrum(probs, tol=max(SPECTRUM_TOL, NORM_TOL))
    return SchmidtDecomposition(
        state=state,
        basis_a=u[:, :rank],
        basis_b=vh[:rank, :].T,
    )


def entanglement_entropy(s: SchmidtState) -> float:
    """Von Neumann entropy of either reduced state, in ebits (0 log 0 := 0)."""
    return float(np.sum(entr(s.probabilities)) / np.log(2))


def to_standard_channel(v: ArrayLike) -> Tuple[float, Operator, Operator]:
    """Reduce a two-qubit pure state to L(|00> + ell|11>) by local unitaries.

    Returns:
        (ell, u_a, u_b) with 0 <= ell <= 1 and (u_a (x) u_b) v = L(|00> + ell|11>)
    """
    decomposition = schmidt_decompose(v, 2, 2)
    s0, s1 = np.sqrt(decomposition.state.probabilities)
    ell = float(s1 / s0)
    u_a = decomposition.basis_a.conj().T
    u_b = decomposition.basis_b.conj().T
    logger.debug("Reduced two-qubit state to standard channel with ell=%.6f", ell)
    return ell, u_a, u_b


def channel_state(ell: complex) -> StateVector:
    """L(|00> + ell|11>) as a 4-vector."""
    return nme_basis(ell, 0).vectors[0]
