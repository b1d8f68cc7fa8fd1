"""Dense complex linear algebra used by the rest of the package.

States are 1-D ``complex128`` arrays and operators are 2-D ``complex128`` arrays.
Bipartite indices are flattened Alice-first, so the amplitude of ``|i>|j>`` in a
``dA x dB`` system sits at ``i * dB + j``; this matches ``np.kron``.
"""

from typing import Iterable

import numpy as np
import scipy.linalg as la
from numpy.typing import ArrayLike, NDArray

from .config import HERMITIAN_TOL, NORM_TOL, PSD_TOL, UNITARY_TOL

StateVector = NDArray[np.complex128]
Operator = NDArray[np.complex128]


def as_operator(m: ArrayLike) -> Operator:
    """Convert input to a finite complex matrix.

    Raises:
        ValueError: If the input is not 2-D or holds NaN/Inf entries
    """
    op = np.asarray(m, dtype=np.complex128)
    if op.ndim != 2:
        raise ValueError(f"Operator must be 2-D, got shape {op.shape}")
    if not np.all(np.isfinite(op)):
        raise ValueError("Operator has non-finite entries")
    return op


def as_state(v: ArrayLike) -> StateVector:
    """Convert input to a finite complex vector.

    Raises:
        ValueError: If the input is not 1-D or holds NaN/Inf entries
    """
    vec = np.asarray(v, dtype=np.complex128)
    if vec.ndim != 1 or vec.size == 0:
        raise ValueError(f"State vector must be 1-D and non-empty, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValueError("State vector has non-finite entries")
    return vec


def basis_ket(index: int, dim: int) -> StateVector:
    """Computational basis vector |index> in dimension dim."""
    if not 0 <= index < dim:
        raise ValueError(f"Basis index {index} outside [0, {dim})")
    ket = np.zeros(dim, dtype=np.complex128)
    ket[index] = 1.0
    return ket


def dagger(m: ArrayLike) -> Operator:
    """Conjugate transpose."""
    return as_operator(m).conj().T


def projector(v: ArrayLike) -> Operator:
    """Rank-one operator |v><v| (v is not normalized here)."""
    vec = as_state(v)
    return np.outer(vec, vec.conj())


def kron(a: ArrayLike, b: ArrayLike) -> Operator:
    """Kronecker product with Alice's factor first."""
    return np.kron(as_operator(a), as_operator(b))


def kron_all(factors: Iterable[ArrayLike]) -> Operator:
    """Left-to-right Kronecker product of several operators."""
    result = np.ones((1, 1), dtype=np.complex128)
    for factor in factors:
        result = kron(result, factor)
    return result


def spectral_norm(m: ArrayLike) -> float:
    """Largest singular value."""
    op = as_operator(m)
    if op.size == 0:
        return 0.0
    return float(np.linalg.norm(op, 2))


def is_hermitian(m: ArrayLike, tol: float = HERMITIAN_TOL) -> bool:
    """Entrywise Hermiticity check."""
    op = as_operator(m)
    if op.shape[0] != op.shape[1]:
        return False
    return bool(np.max(np.abs(op - op.conj().T), initial=0.0) <= tol)


def is_unitary(m: ArrayLike, tol: float = UNITARY_TOL) -> bool:
    """Check U U^dagger = I entrywise."""
    op = as_operator(m)
    if op.shape[0] != op.shape[1]:
        return False
    identity = np.eye(op.shape[0])
    return bool(np.max(np.abs(op @ op.conj().T - identity), initial=0.0) <= tol)


def _require_hermitian(m: ArrayLike) -> Operator:
    op = as_operator(m)
    if op.shape[0] != op.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {op.shape}")
    deviation = float(np.max(np.abs(op - op.conj().T), initial=0.0))
    if deviation > HERMITIAN_TOL:
        raise ValueError(
            f"Matrix is not Hermitian: max |m - m^dagger| = {deviation:.3e} "
            f"exceeds {HERMITIAN_TOL:.0e}"
        )
    # Symmetrize so LAPACK sees an exactly Hermitian input
    return (op + op.conj().T) / 2


def hermitian_eigenvalues(m: ArrayLike) -> NDArray[np.float64]:
    """Real eigenvalues of a Hermitian matrix in ascending order.

    Raises:
        ValueError: If the matrix is not square or not Hermitian within 1e-10
    """
    op = _require_hermitian(m)
    return la.eigvalsh(op)


def min_eigenvalue(m: ArrayLike) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(hermitian_eigenvalues(m)[0])


def is_psd(m: ArrayLike, tol: float = PSD_TOL) -> bool:
    """True iff the smallest eigenvalue is >= -tol * max(1, ||m||)."""
    op = _require_hermitian(m)
    if op.shape[0] == 0:
        return True
    scale = max(1.0, spectral_norm(op))
    return bool(la.eigvalsh(op)[0] >= -tol * scale)


def apply(op: ArrayLike, v: ArrayLike) -> StateVector:
    """Matrix-vector product.

    Raises:
        ValueError: If the operator's column count differs from the vector length
    """
    matrix = as_operator(op)
    vec = as_state(v)
    if matrix.shape[1] != vec.shape[0]:
        raise ValueError(
            f"Dimension mismatch: operator is {matrix.shape[0]}x{matrix.shape[1]}, "
            f"vector has length {vec.shape[0]}"
        )
    return matrix @ vec


def norm(v: ArrayLike) -> float:
    """Euclidean norm of a state vector."""
    return float(np.linalg.norm(as_state(v)))


def is_normalized(v: ArrayLike, tol: float = NORM_TOL) -> bool:
    """Check sum |amp|^2 = 1 within tol."""
    vec = as_state(v)
    return bool(abs(float(np.vdot(vec, vec).real) - 1.0) <= tol)


def normalize(v: ArrayLike) -> StateVector:
    """Return v / ||v||.

    Raises:
        ValueError: If v is the zero vector
    """
    vec = as_state(v)
    length = np.linalg.norm(vec)
    if length == 0:
        raise ValueError("Cannot normalize the zero vector")
    return vec / length


def phase_equal(a: ArrayLike, b: ArrayLike, tol: float = NORM_TOL) -> bool:
    """True iff two normalized vectors are equal up to a global phase."""
    return bool(abs(abs(np.vdot(as_state(a), as_state(b))) - 1.0) <= tol)
