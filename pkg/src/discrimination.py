"""Receiver-side mathematics: Gram matrices, feasibility, bounds and USD measurements."""

import logging
from dataclasses import dataclass
from typing import Callable, Hashable, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
from numpy.typing import ArrayLike, NDArray

from .coding import EncodedFamily, MessageIndex
from .config import (
    HERMITIAN_TOL,
    INCONCLUSIVE,
    INDEPENDENCE_TOL,
    PAIRWISE_SLACK,
    PSD_TOL,
    RESIDUAL,
    SPECTRUM_TOL,
)
from .qmath import (
    Operator,
    StateVector,
    as_operator,
    as_state,
    hermitian_eigenvalues,
    is_psd,
    min_eigenvalue,
    spectral_norm,
)

logger = logging.getLogger(__name__)

# Feasibility tolerance used when bisecting towards the PSD boundary
_BISECTION_FEASIBILITY_TOL = 1e-13
_BISECTION_STEPS = 200


class LinearDependenceError(ValueError):
    """The candidate states are linearly dependent; no unambiguous measurement exists."""


class InfeasibleProfileError(ValueError):
    """X - diag(gamma) is not positive semidefinite."""

    def __init__(self, message: str, eigenvalue: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue


@dataclass(frozen=True)
class GramMatrix:
    """Pairwise inner products <psi_i|psi_j> of a state family."""

    entries: Operator

    def __post_init__(self) -> None:
        entries = as_operator(self.entries)
        if entries.shape[0] != entries.shape[1]:
            raise ValueError(f"Gram matrix must be square, got shape {entries.shape}")
        deviation = float(np.max(np.abs(entries - entries.conj().T), initial=0.0))
        if deviation > HERMITIAN_TOL:
            raise ValueError(f"Gram matrix is not Hermitian (deviation {deviation:.3e})")
        object.__setattr__(self, "entries", (entries + entries.conj().T) / 2)

    @classmethod
    def from_states(cls, states: Sequence[ArrayLike]) -> "GramMatrix":
        matrix = np.column_stack([as_state(s) for s in states])
        return cls(matrix.conj().T @ matrix)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> NDArray[np.float64]:
        return hermitian_eigenvalues(self.entries)

    @property
    def lambda_min(self) -> float:
        return min_eigenvalue(self.entries)

    def block(self, indices: Sequence[int]) -> "GramMatrix":
        idx = np.asarray(indices)
        return GramMatrix(self.entries[np.ix_(idx, idx)])


@dataclass(frozen=True)
class SuccessProfile:
    """Per-state conclusive identification probabilities gamma_i."""

    gammas: Tuple[float, ...]

    def __post_init__(self) -> None:
        values = _validate_gammas(self.gammas)
        object.__setattr__(self, "gammas", tuple(float(g) for g in values))

    @classmethod
    def uniform(cls, gamma: float, n: int) -> "SuccessProfile":
        return cls(tuple([gamma] * n))

    @property
    def average(self) -> float:
        return float(np.mean(self.gammas)) if self.gammas else 0.0


@dataclass(frozen=True)
class Povm:
    """Labeled positive operators summing to the identity."""

    elements: Tuple[Operator, ...]
    labels: Tuple[Hashable, ...]

    def __post_init__(self) -> None:
        if len(self.elements) != len(self.labels):
            raise ValueError(
                f"POVM has {len(self.elements)} elements but {len(self.labels)} labels"
            )
        if not self.elements:
            raise ValueError("POVM needs at least one element")
        elements = tuple(as_operator(e) for e in self.elements)
        dim = elements[0].shape[0]
        for label, element in zip(self.labels, elements):
            if element.shape != (dim, dim):
                raise ValueError(f"POVM element {label} has shape {element.shape}, expected {dim}x{dim}")
            if not is_psd(element, PSD_TOL):
                raise ValueError(f"POVM element {label} is not positive semidefinite")
        residual = float(np.max(np.abs(sum(elements) - np.eye(dim))))
        if residual > PSD_TOL * max(1.0, max(spectral_norm(e) for e in elements)):
            raise ValueError(f"POVM elements do not sum to identity (residual {residual:.3e})")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    def element(self, label: Hashable) -> Operator:
        return self.elements[self.labels.index(label)]

    def completeness_residual(self) -> float:
        return float(np.max(np.abs(sum(self.elements) - np.eye(self.dim))))

    def probabilities(self, state: ArrayLike) -> NDArray[np.float64]:
        return born_probabilities(self, state)

    def lift(self, indices: Sequence[int], dim: int) -> "Povm":
        """Embed a POVM written on span{|indices>} into dimension dim.

        The complement of the span is added to the inconclusive element (or
        appended as one when there is none).
        """
        idx = np.asarray(indices)
        if idx.size != self.dim:
            raise ValueError(f"Need {self.dim} embedding indices, got {idx.size}")
        complement = np.eye(dim, dtype=np.complex128)
        complement[idx, idx] = 0.0
        lifted = []
        for element in self.elements:
            full = np.zeros((dim, dim), dtype=np.complex128)
            full[np.ix_(idx, idx)] = element
            lifted.append(full)
        labels = list(self.labels)
        if INCONCLUSIVE in labels:
            lifted[labels.index(INCONCLUSIVE)] += complement
        else:
            lifted.append(complement)
            labels.append(INCONCLUSIVE)
        return Povm(elements=tuple(lifted), labels=tuple(labels))


def _validate_gammas(gammas: Sequence[float], n: Optional[int] = None) -> NDArray[np.float64]:
    values = np.asarray(gammas, dtype=np.float64)
    if values.ndim != 1:
        raise ValueError("Efficiencies must be a 1-D sequence")
    if n is not None and values.size != n:
        raise ValueError(f"Got {values.size} efficiencies for {n} states")
    if np.any(values < 0) or np.any(values > 1):
        raise ValueError(f"Efficiencies must lie in [0, 1], got {values.tolist()}")
    return values


def _validate_spectrum(spectrum: Sequence[float]) -> NDArray[np.float64]:
    probs = np.asarray(spectrum, dtype=np.float64)
    if probs.ndim != 1 or probs.size == 0:
        raise ValueError("Spectrum must be a non-empty 1-D sequence")
    if np.any(probs < 0):
        raise ValueError(f"Spectrum has negative entries: {probs.tolist()}")
    if abs(float(probs.sum()) - 1.0) > SPECTRUM_TOL:
        raise ValueError(f"Spectrum sums to {probs.sum():.12g}, expected 1")
    return probs


def _overlap_block(within: NDArray[np.float64], tail: float) -> Operator:
    """M[n, n'] = sum_k p_k exp(-2 pi i k (n - n') / d) + tail, for k < d."""
    d = within.size
    n = np.arange(d)
    diffs = n[:, None] - n[None, :]
    phases = np.exp(-2j * np.pi * np.multiply.outer(np.arange(d), diffs) / d)
    return np.tensordot(within, phases, axes=1) + tail


def _mean_offdiagonal_magnitude(block: Operator) -> float:
    n = block.shape[0]
    mask = ~np.eye(n, dtype=bool)
    return float(np.abs(block[mask]).sum() / (n * (n - 1)))


def gram(family: EncodedFamily) -> GramMatrix:
    """Gram matrix of an encoded family from its state vectors."""
    return GramMatrix.from_states(family.states)


def closed_form_gram(spectrum: Sequence[float], d: int) -> GramMatrix:
    """The d^2 x d^2 Gram matrix of the encoded family without building states.

    Entries are delta_mm' sum_{k<d} p_k exp(-2 pi i k (n - n')/d) plus the tail
    weight sum_{mu>=d} p_mu, which couples every pair.
    """
    probs = _validate_spectrum(spectrum)
    if d < 2 or probs.size < d:
        raise ValueError(f"Need 2 <= d <= D, got d={d}, D={probs.size}")
    tail = float(probs[d:].sum())
    within = _overlap_block(probs[:d], 0.0)
    entries = np.full((d * d, d * d), tail, dtype=np.complex128)
    for m in range(d):
        block = slice(m * d, (m + 1) * d)
        entries[block, block] += within
    return GramMatrix(entries)


def subspace_gram(g: GramMatrix, d: int, m: int) -> GramMatrix:
    """The d x d block of states with shift power m."""
    if not 0 <= m < d or g.n != d * d:
        raise ValueError(f"No subspace {m} in a {g.n}-state family with d={d}")
    return g.block(range(m * d, (m + 1) * d))


def conditional_spectrum(spectrum: Sequence[float], d: int) -> Tuple[float, ...]:
    """p_k / sum_{j<d} p_j for k < d: the resource as seen after a subspace click.

    Raises:
        ValueError: If the first d entries carry no weight
    """
    probs = _validate_spectrum(spectrum)
    head = probs[:d]
    weight = float(head.sum())
    if weight <= 0:
        raise ValueError(f"The first d={d} Schmidt coefficients are all zero")
    return tuple(float(p) for p in head / weight)


def is_linearly_independent(g: GramMatrix, tol: float = INDEPENDENCE_TOL) -> bool:
    """True iff lambda_min(g) > tol."""
    return g.lambda_min > tol


def subspace_projectors(d: int, D: int) -> Povm:
    """Stage-one projectors P_m = sum_{k<d} |k+m mod d><k+m mod d| (x) |k><k|.

    When D > d a residual projector completes the set.
    """
    if d < 2 or D < d:
        raise ValueError(f"Need 2 <= d <= D, got d={d}, D={D}")
    elements = []
    for m in range(d):
        diagonal = np.zeros(D * D)
        for k in range(d):
            diagonal[((k + m) % d) * D + k] = 1.0
        elements.append(np.diag(diagonal).astype(np.complex128))
    labels: list = list(range(d))
    if D > d:
        elements.append(np.eye(D * D, dtype=np.complex128) - sum(elements))
        labels.append(RESIDUAL)
    return Povm(elements=tuple(elements), labels=tuple(labels))


def qubit_povm(ell: float) -> Povm:
    """Explicit POVM on span{|00>, |11>} separating L(|00> + ell|11>) from L(|00> - ell|11>).

    Elements, in the (|00>, |11>) basis:
        A1 = 1/2 [[ell^2, ell], [ell, 1]]    -> message (0,0)
        A2 = 1/2 [[ell^2, -ell], [-ell, 1]]  -> message (0,1)
        A3 = [[1 - ell^2, 0], [0, 0]]        -> inconclusive
    """
    if isinstance(ell, complex) or not 0.0 <= ell <= 1.0:
        raise ValueError(f"ell must be real and in [0, 1], got {ell}")
    a1 = 0.5 * np.array([[ell**2, ell], [ell, 1.0]], dtype=np.complex128)
    a2 = 0.5 * np.array([[ell**2, -ell], [-ell, 1.0]], dtype=np.complex128)
    a3 = np.array([[1.0 - ell**2, 0.0], [0.0, 0.0]], dtype=np.complex128)
    return Povm(
        elements=(a1, a2, a3),
        labels=(MessageIndex(0, 0), MessageIndex(0, 1), INCONCLUSIVE),
    )


def feasibility_margin(g: GramMatrix, gammas: Sequence[float]) -> float:
    """Smallest eigenvalue of X - diag(gamma)."""
    values = _validate_gammas(gammas, g.n)
    return min_eigenvalue(g.entries - np.diag(values))


def duan_guo_feasible(g: GramMatrix, gammas: Sequence[float], tol: float = PSD_TOL) -> bool:
    """True iff X - diag(gamma) is positive semidefinite within tol.

    The boundary counts as feasible: optimal efficiencies sit exactly on it.
    """
    values = _validate_gammas(gammas, g.n)
    return is_psd(g.entries - np.diag(values), tol)


def max_uniform_gamma(g: GramMatrix) -> float:
    """Largest gamma with X - gamma I PSD, i.e. lambda_min(X)."""
    return float(np.clip(g.lambda_min, 0.0, 1.0))


def _bisect_max(predicate: Callable[[float], bool], lo: float, hi: float, tol: float = 1e-13) -> float:
    """Largest x in [lo, hi] with predicate(x), assuming predicate(lo) and monotonicity."""
    if predicate(hi):
        return hi
    for _ in range(_BISECTION_STEPS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            lo = mid
        else:
            hi = mid
    return lo


def bisect_uniform_gamma(g: GramMatrix) -> float:
    """max_uniform_gamma recomputed by bisection over the feasibility test."""
    return _bisect_max(
        lambda gamma: duan_guo_feasible(g, [gamma] * g.n, _BISECTION_FEASIBILITY_TOL),
        0.0,
        1.0,
    )


def optimize_profile(g: GramMatrix, sweeps: int = 25, tol: float = 1e-10) -> SuccessProfile:
    """Best-effort non-uniform profile maximizing sum gamma_i subject to X - Gamma PSD.

    Coordinate ascent from the uniform optimum; each coordinate is pushed to its
    feasibility boundary with the others held fixed. Not a full semidefinite solve.
    """
    gammas = np.full(g.n, max_uniform_gamma(g))
    for sweep in range(sweeps):
        before = gammas.sum()
        for i in range(g.n):
            def feasible(value: float, i: int = i) -> bool:
                trial = gammas.copy()
                trial[i] = value
                return duan_guo_feasible(g, trial, _BISECTION_FEASIBILITY_TOL)

            gammas[i] = _bisect_max(feasible, gammas[i], 1.0)
        if gammas.sum() - before <= tol:
            logger.debug("Profile ascent converged after %d sweeps", sweep + 1)
            break
    return SuccessProfile(tuple(np.clip(gammas, 0.0, 1.0)))


def pairwise_bound_check(
    profile: SuccessProfile, g: GramMatrix, slack: float = PAIRWISE_SLACK
) -> bool:
    """Check (gamma_i + gamma_j)/2 <= 1 - |<psi_i|psi_j>| for every i != j."""
    if len(profile.gammas) != g.n:
        raise ValueError(f"Profile has {len(profile.gammas)} entries, Gram has {g.n}")
    gammas = np.asarray(profile.gammas)
    pair_means = 0.5 * (gammas[:, None] + gammas[None, :])
    limits = 1.0 - np.abs(g.entries)
    off_diagonal = ~np.eye(g.n, dtype=bool)
    return bool(np.all(pair_means[off_diagonal] <= limits[off_diagonal] + slack))


def average_bound(g: GramMatrix) -> float:
    """1 - (1/(N(N-1))) sum_{i != j} |<psi_i|psi_j>|."""
    if g.n < 2:
        raise ValueError(f"Average bound needs at least 2 states, got {g.n}")
    return 1.0 - _mean_offdiagonal_magnitude(g.entries)


def average_bound_full_sum(g: GramMatrix) -> float:
    """N/(N-1) - (1/(N(N-1))) sum_{i,j} |<psi_i|psi_j>| (diagonal included)."""
    n = g.n
    if n < 2:
        raise ValueError(f"Average bound needs at least 2 states, got {n}")
    return n / (n - 1) - float(np.abs(g.entries).sum()) / (n * (n - 1))


def qudit_average_bound(spectrum: Sequence[float], d: int) -> float:
    """Average-success bound within one subspace of a d x d resource."""
    probs = _validate_spectrum(spectrum)
    if d < 2 or probs.size != d:
        raise ValueError(f"Spectrum length {probs.size} does not match d={d}")
    return 1.0 - _mean_offdiagonal_magnitude(_overlap_block(probs, 0.0))


def qutrit_closed_form(spectrum: Sequence[float]) -> float:
    """1 - sqrt((3/2 p0 - 1/2)^2 + 3/4 (p1 - p2)^2)."""
    probs = _validate_spectrum(spectrum)
    if probs.size != 3:
        raise ValueError(f"Qutrit closed form needs 3 coefficients, got {probs.size}")
    p0, p1, p2 = probs
    return float(1.0 - np.sqrt((1.5 * p0 - 0.5) ** 2 + 0.75 * (p1 - p2) ** 2))


def embedded_bound(spectrum: Sequence[float], d: int) -> float:
    """Average-success bound for d^2 messages over a D x D resource (D >= d).

    For a uniform spectrum this is d/D.
    """
    probs = _validate_spectrum(spectrum)
    if d < 2 or probs.size < d:
        raise ValueError(f"Need 2 <= d <= D, got d={d}, D={probs.size}")
    block = _overlap_block(probs[:d], float(probs[d:].sum()))
    return 1.0 - _mean_offdiagonal_magnitude(block)


def reciprocal_states(states: Sequence[ArrayLike]) -> Operator:
    """Dual vectors d_i (columns) with <d_i|s_j> = delta_ij, inside span{s_j}.

    Solves G X = S^dagger rather than inverting anything in the full space.
    """
    matrix = np.column_stack([as_state(s) for s in states])
    g = GramMatrix(matrix.conj().T @ matrix)
    if not is_linearly_independent(g):
        raise LinearDependenceError(
            f"States are linearly dependent (lambda_min = {g.lambda_min:.3e})"
        )
    return la.solve(g.entries, matrix.conj().T, assume_a="her").conj().T


def usd_povm(
    states: Sequence[ArrayLike],
    gammas: Sequence[float],
    labels: Optional[Sequence[Hashable]] = None,
    tol: float = PSD_TOL,
) -> Povm:
    """Unambiguous discrimination POVM from reciprocal states.

    A_i = gamma_i |d_i><d_i| / |<d_i|s_i>|^2 and A_? = I - sum_i A_i.

    Raises:
        LinearDependenceError: If the states are linearly dependent
        InfeasibleProfileError: If X - diag(gamma) is not PSD; carries the eigenvalue
    """
    vectors = [as_state(s) for s in states]
    g = GramMatrix.from_states(vectors)
    values = _validate_gammas(gammas, g.n)
    if not is_linearly_independent(g):
        raise LinearDependenceError(
            f"States are linearly dependent (lambda_min = {g.lambda_min:.3e})"
        )
    if not duan_guo_feasible(g, values, tol):
        margin = feasibility_margin(g, values)
        raise InfeasibleProfileError(
            f"Efficiencies {values.tolist()} are infeasible: "
            f"X - Gamma has eigenvalue {margin:.6e}",
            eigenvalue=margin,
        )

    duals = reciprocal_states(vectors)
    dim = vectors[0].size
    elements = []
    for i, (gamma, state) in enumerate(zip(values, vectors)):
        dual = duals[:, i]
        overlap = abs(np.vdot(dual, state)) ** 2
        elements.append(gamma * np.outer(dual, dual.conj()) / overlap)
    inconclusive = np.eye(dim, dtype=np.complex128) - sum(elements)
    elements.append((inconclusive + inconclusive.conj().T) / 2)

    if labels is None:
        labels = tuple(range(len(vectors)))
    if len(labels) != len(vectors):
        raise ValueError(f"Got {len(labels)} labels for {len(vectors)} states")
    return Povm(elements=tuple(elements), labels=tuple(labels) + (INCONCLUSIVE,))


def born_probabilities(povm: Povm, state: ArrayLike) -> NDArray[np.float64]:
    """tr(A_mu rho) for rho = |state><state|.

    Raises:
        ValueError: On a dimension mismatch
    """
    vec = as_state(state)
    if vec.size != povm.dim:
        raise ValueError(f"State has dimension {vec.size}, POVM acts on {povm.dim}")
    probs = np.array([np.vdot(vec, element @ vec).real for element in povm.elements])
    return np.clip(probs, 0.0, None)


def confusion_matrix(povm: Povm, states: Sequence[StateVector]) -> NDArray[np.float64]:
    """Row j holds the outcome distribution for states[j]."""
    return np.vstack([born_probabilities(povm, s) for s in states])
