"""End-to-end dense coding runs: encode, project onto subspaces, discriminate, tally.

Simulation contract: trials are split into chunks of ``CHUNK_TRIALS``; chunk ``i``
draws from ``default_rng(SeedSequence(seed).spawn(n_chunks)[i])`` and chunk tallies
are summed. The result depends only on ``(config, seed, trials)``, never on the
number of workers.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from .coding import EncodedFamily, MessageIndex, get_encoding
from .config import (
    CHUNK_TRIALS,
    DEFAULT_SCHEME,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    INCONCLUSIVE,
    MAX_DIMENSION,
    PROBABILITY_FLOOR,
    RESIDUAL,
    is_supported_scheme,
)
from .discrimination import (
    GramMatrix,
    Povm,
    born_probabilities,
    embedded_bound,
    gram,
    is_linearly_independent,
    max_uniform_gamma,
    optimize_profile,
    subspace_projectors,
    usd_povm,
)
from .qmath import StateVector, normalize
from .states import SchmidtState, entanglement_entropy

logger = logging.getLogger(__name__)

_MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class ProtocolConfig:
    """One dense coding setup: d^2 messages over a D x D resource.

    D is the length of the spectrum.
    """

    d: int
    spectrum: Tuple[float, ...]
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    scheme: str = DEFAULT_SCHEME
    workers: int = 1

    def __post_init__(self) -> None:
        if len(self.spectrum) > MAX_DIMENSION:
            raise ValueError(f"Resource dimension D={len(self.spectrum)} exceeds {MAX_DIMENSION}")
        shared = SchmidtState.from_spectrum(self.spectrum)
        object.__setattr__(self, "spectrum", shared.spectrum)
        if not 2 <= self.d <= shared.dim:
            raise ValueError(f"Need 2 <= d <= D, got d={self.d}, D={shared.dim}")
        if shared.dim > MAX_DIMENSION:
            raise ValueError(f"Resource dimension D={shared.dim} exceeds {MAX_DIMENSION}")
        if self.trials < 0:
            raise ValueError(f"Trial count must be nonnegative, got {self.trials}")
        if not 0 <= self.seed <= _MAX_SEED:
            raise ValueError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")
        if not is_supported_scheme(self.scheme):
            raise ValueError(f"Unsupported scheme: {self.scheme}")
        if self.workers < 1:
            raise ValueError(f"Worker count must be positive, got {self.workers}")

    @property
    def D(self) -> int:
        return len(self.spectrum)

    @property
    def shared(self) -> SchmidtState:
        return SchmidtState(self.spectrum)

    @property
    def key(self) -> Tuple[str, int, Tuple[float, ...]]:
        """Everything that determines the measurement; trials and seed do not."""
        return (self.scheme, self.d, self.spectrum)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "D": self.D,
            "spectrum": list(self.spectrum),
            "trials": self.trials,
            "seed": self.seed,
            "scheme": self.scheme,
        }


@dataclass(frozen=True)
class TrialRecord:
    """What was sent, where stage one landed, and what Bob concluded."""

    sent: MessageIndex
    stage1: Union[int, str]
    outcome: Union[MessageIndex, str]

    @property
    def conclusive(self) -> bool:
        return self.outcome != INCONCLUSIVE

    @property
    def correct(self) -> bool:
        return self.outcome == self.sent


@dataclass(frozen=True)
class SimulationStats:
    """Monte Carlo tallies over uniformly drawn messages."""

    trials: int
    conclusive: int
    per_message: Tuple[Tuple[int, int], ...]
    stage1_counts: Tuple[int, ...]
    residual: int
    misdecoded: int
    seed: int
    success_rate: float = field(init=False)
    stderr: float = field(init=False)

    def __post_init__(self) -> None:
        if self.conclusive > self.trials:
            raise ValueError("Conclusive count exceeds trial count")
        rate = self.conclusive / self.trials if self.trials else 0.0
        error = math.sqrt(rate * (1.0 - rate) / self.trials) if self.trials else 0.0
        object.__setattr__(self, "success_rate", rate)
        object.__setattr__(self, "stderr", error)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trials": self.trials,
            "conclusive": self.conclusive,
            "success_rate": self.success_rate,
            "stderr": self.stderr,
            "misdecoded": self.misdecoded,
            "residual": self.residual,
            "stage1_counts": list(self.stage1_counts),
            "per_message": [list(pair) for pair in self.per_message],
            "seed": self.seed,
        }


@dataclass(frozen=True)
class AnalysisReport:
    """Analytic figures for one configuration; simulation is attached on request."""

    config: ProtocolConfig
    entropy_ebits: float
    gram_spectrum: Tuple[float, ...]
    paper_bound: float
    achievable_gamma: float
    per_subspace_gamma: Tuple[float, ...]
    residual_probability: float
    linearly_independent: bool
    optimized_gamma: float
    simulation: Optional[SimulationStats] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "entropy_ebits": self.entropy_ebits,
            "gram_spectrum": list(self.gram_spectrum),
            "paper_bound": self.paper_bound,
            "achievable_gamma": self.achievable_gamma,
            "simulation": self.simulation.to_dict() if self.simulation else None,
            "per_subspace_gamma": list(self.per_subspace_gamma),
            "residual_probability": self.residual_probability,
            "linearly_independent": self.linearly_independent,
            "optimized_gamma": self.optimized_gamma,
        }


@dataclass
class _Tally:
    conclusive: int
    per_message_conclusive: NDArray[np.int64]
    per_message_trials: NDArray[np.int64]
    stage1_counts: NDArray[np.int64]
    misdecoded: int

    def __add__(self, other: "_Tally") -> "_Tally":
        return _Tally(
            conclusive=self.conclusive + other.conclusive,
            per_message_conclusive=self.per_message_conclusive + other.per_message_conclusive,
            per_message_trials=self.per_message_trials + other.per_message_trials,
            stage1_counts=self.stage1_counts + other.stage1_counts,
            misdecoded=self.misdecoded + other.misdecoded,
        )


def _cumulative(probs: NDArray[np.float64]) -> NDArray[np.float64]:
    """CDF for inverse-transform sampling; outcomes below the floor are never drawn."""
    cleaned = np.where(probs < PROBABILITY_FLOOR, 0.0, probs)
    cleaned = cleaned / cleaned.sum()
    cdf = np.cumsum(cleaned)
    last = int(np.flatnonzero(cleaned)[-1])
    cdf[last:] = 1.0
    return cdf


def _inverse_cdf(cdf: NDArray[np.float64], u: Union[float, NDArray[np.float64]]) -> Any:
    """Smallest i with u < cdf[i]; works row-wise on stacked CDFs."""
    return np.sum(cdf <= np.asarray(u)[..., None], axis=-1)


class DenseCodingProtocol:
    """Alice's encodings and Bob's two-stage decoder for one configuration.

    Stage one measures the subspace projectors (plus the residual when D > d);
    stage two runs the unambiguous measurement of the clicked subspace on the
    renormalized projected state, with uniform efficiency lambda_min of that
    subspace's Gram matrix.
    """

    def __init__(self, config: ProtocolConfig):
        self.config = config
        self.d = config.d
        self.D = config.D
        self.shared = config.shared
        self.family: EncodedFamily = get_encoding(config.scheme, self.d, self.D).encode(self.shared)
        self.projectors: Povm = subspace_projectors(self.d, self.D)
        self.subspace_weight = float(sum(self.shared.spectrum[: self.d]))

        self.subspace_grams: List[Optional[GramMatrix]] = []
        self.subspace_gammas: List[float] = []
        # Stage-two POVMs are D^2 x D^2; only their outcome tables are kept.
        povms = [self._build_subspace(m) for m in range(self.d)]
        self.stage1_cdf, self.stage2_cdf = self._outcome_tables(povms)
        logger.debug(
            "Built protocol scheme=%s d=%d D=%d gammas=%s",
            config.scheme, self.d, self.D, self.subspace_gammas,
        )

    def _project(self, m: int, state: StateVector) -> Optional[StateVector]:
        projected = self.projectors.elements[m] @ state
        if np.linalg.norm(projected) ** 2 < PROBABILITY_FLOOR:
            return None
        return normalize(projected)

    def _build_subspace(self, m: int) -> Povm:
        projected = [self._project(m, s) for s in self.family.subspace(m)]
        if any(p is None for p in projected):
            logger.warning("Subspace %d carries no weight; stage two is always inconclusive", m)
            return self._add_inconclusive_subspace(None)
        states = [p for p in projected if p is not None]
        conditional = GramMatrix.from_states(states)
        if not is_linearly_independent(conditional):
            logger.warning(
                "Subspace %d states are linearly dependent (lambda_min=%.3e); "
                "stage two is always inconclusive", m, conditional.lambda_min,
            )
            return self._add_inconclusive_subspace(conditional)
        gamma = max_uniform_gamma(conditional)
        labels = [label.n for label in self.family.labels[m * self.d:(m + 1) * self.d]]
        self.subspace_grams.append(conditional)
        self.subspace_gammas.append(gamma)
        return usd_povm(states, [gamma] * self.d, labels=labels)

    def _add_inconclusive_subspace(self, conditional: Optional[GramMatrix]) -> Povm:
        self.subspace_grams.append(conditional)
        self.subspace_gammas.append(0.0)
        identity = np.eye(self.D * self.D, dtype=np.complex128)
        return Povm(elements=(identity,), labels=(INCONCLUSIVE,))

    def _stage2_probabilities(self, povm: Povm, state: StateVector) -> NDArray[np.float64]:
        """Distribution over (n = 0..d-1, inconclusive) for a renormalized state."""
        probs = born_probabilities(povm, state)
        row = np.zeros(self.d + 1)
        for label, p in zip(povm.labels, probs):
            row[self.d if label == INCONCLUSIVE else label] += p
        return row

    def _outcome_tables(self, povms: List[Povm]) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        n_messages = self.d * self.d
        stage1 = np.zeros((n_messages, self.d + 1))
        stage2 = np.zeros((n_messages, self.d, self.d + 1))
        for j, state in enumerate(self.family.states):
            born = born_probabilities(self.projectors, state)
            stage1[j, : born.size] = born
            for m in range(self.d):
                projected = self._project(m, state)
                if projected is None:
                    stage2[j, m, self.d] = 1.0
                else:
                    stage2[j, m] = self._stage2_probabilities(povms[m], projected)
        cdf1 = np.vstack([_cumulative(row) for row in stage1])
        cdf2 = np.stack([np.vstack([_cumulative(row) for row in rows]) for rows in stage2])
        return cdf1, cdf2

    @property
    def achievable_gamma(self) -> float:
        """Stage-one success times the mean within-subspace efficiency."""
        return self.subspace_weight * float(np.mean(self.subspace_gammas))

    def optimized_gamma(self) -> float:
        """Same as achievable_gamma but with best-effort non-uniform profiles."""
        averages = [
            optimize_profile(g).average if g is not None and gamma > 0 else 0.0
            for g, gamma in zip(self.subspace_grams, self.subspace_gammas)
        ]
        return self.subspace_weight * float(np.mean(averages))

    def analyze(self) -> AnalysisReport:
        family_gram = gram(self.family)
        return AnalysisReport(
            config=self.config,
            entropy_ebits=entanglement_entropy(self.shared),
            gram_spectrum=tuple(float(x) for x in family_gram.eigenvalues()),
            paper_bound=embedded_bound(self.shared.spectrum, self.d),
            achievable_gamma=self.achievable_gamma,
            per_subspace_gamma=tuple(self.subspace_gammas),
            residual_probability=max(0.0, 1.0 - self.subspace_weight),
            linearly_independent=is_linearly_independent(family_gram),
            optimized_gamma=self.optimized_gamma(),
        )

    def run_trial(self, message: MessageIndex, rng: np.random.Generator) -> TrialRecord:
        """Send one message and decode it."""
        j = message.flat(self.d)
        stage1 = int(_inverse_cdf(self.stage1_cdf[j], rng.random()))
        if stage1 == self.d:
            return TrialRecord(sent=message, stage1=RESIDUAL, outcome=INCONCLUSIVE)
        stage2 = int(_inverse_cdf(self.stage2_cdf[j, stage1], rng.random()))
        if stage2 == self.d:
            return TrialRecord(sent=message, stage1=stage1, outcome=INCONCLUSIVE)
        return TrialRecord(sent=message, stage1=stage1, outcome=MessageIndex(stage1, stage2))

    def _sample(self, trials: int, rng: np.random.Generator) -> _Tally:
        n_messages = self.d * self.d
        messages = rng.integers(0, n_messages, size=trials)
        uniforms = rng.random((trials, 2))
        stage1 = _inverse_cdf(self.stage1_cdf[messages], uniforms[:, 0])
        subspace = np.minimum(stage1, self.d - 1)
        stage2 = _inverse_cdf(self.stage2_cdf[messages, subspace], uniforms[:, 1])

        conclusive = (stage1 < self.d) & (stage2 < self.d)
        decoded = subspace * self.d + stage2
        correct = conclusive & (decoded == messages)
        return _Tally(
            conclusive=int(correct.sum()),
            per_message_conclusive=np.bincount(messages[correct], minlength=n_messages),
            per_message_trials=np.bincount(messages, minlength=n_messages),
            stage1_counts=np.bincount(stage1, minlength=self.d + 1),
            misdecoded=int((conclusive & ~correct).sum()),
        )

    def simulate(self, trials: int, seed: int, workers: int = 1) -> SimulationStats:
        """Seeded Monte Carlo run; identical output for any worker count."""
        if trials < 1:
            raise ValueError(f"Simulation needs at least one trial, got {trials}")
        n_chunks = math.ceil(trials / CHUNK_TRIALS)
        sizes = [CHUNK_TRIALS] * (n_chunks - 1) + [trials - CHUNK_TRIALS * (n_chunks - 1)]
        children = np.random.SeedSequence(seed).spawn(n_chunks)
        logger.debug("Simulating %d trials in %d chunks on %d workers", trials, n_chunks, workers)

        def run_chunk(i: int) -> _Tally:
            return self._sample(sizes[i], np.random.default_rng(children[i]))

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                tallies = list(pool.map(run_chunk, range(n_chunks)))
        else:
            tallies = [run_chunk(i) for i in range(n_chunks)]

        total = tallies[0]
        for tally in tallies[1:]:
            total = total + tally
        if total.misdecoded:
            logger.error("%d conclusive outcomes disagreed with the sent message", total.misdecoded)

        return SimulationStats(
            trials=trials,
            conclusive=total.conclusive,
            per_message=tuple(
                (int(c), int(t))
                for c, t in zip(total.per_message_conclusive, total.per_message_trials)
            ),
            stage1_counts=tuple(int(c) for c in total.stage1_counts[: self.d]),
            residual=int(total.stage1_counts[self.d]),
            misdecoded=total.misdecoded,
            seed=seed,
        )


def analyze(config: ProtocolConfig) -> AnalysisReport:
    """Analytic report (entropy, Gram spectrum, bound, achievable rate) for config."""
    return DenseCodingProtocol(config).analyze()


def run_trial(config: ProtocolConfig, message: MessageIndex, rng: np.random.Generator) -> TrialRecord:
    """One encode/decode round for message."""
    return DenseCodingProtocol(config).run_trial(message, rng)


def simulate(config: ProtocolConfig) -> SimulationStats:
    """Monte Carlo estimate of the success rate using config.trials and config.seed."""
    return DenseCodingProtocol(config).simulate(config.trials, config.seed, config.workers)
