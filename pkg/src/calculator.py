"""Main DenseCodingCalculator class."""

import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import (
    DEFAULT_SCHEME,
    DEFAULT_SEED,
    PROTOCOL_CACHE_SIZE,
    check_resource_dimension,
    is_supported_scheme,
)
from .discrimination import embedded_bound
from .protocol import AnalysisReport, DenseCodingProtocol, ProtocolConfig, SimulationStats
from .states import SchmidtState, entanglement_entropy, nme_basis

logger = logging.getLogger(__name__)

ProtocolKey = Tuple[str, int, Tuple[float, ...]]

SWEEP_COLUMNS = (
    "axis_value",
    "entropy_ebits",
    "paper_bound",
    "achievable_gamma",
    "mc_rate",
    "mc_stderr",
    "trials",
    "seed",
)


@dataclass(frozen=True)
class SweepRow:
    """One point of a parameter sweep; Monte Carlo fields are None when trials = 0."""

    axis_value: float
    entropy_ebits: float
    paper_bound: float
    achievable_gamma: float
    mc_rate: Optional[float]
    mc_stderr: Optional[float]
    trials: int
    seed: int

    def to_dict(self) -> Dict[str, Any]:
        return {column: getattr(self, column) for column in SWEEP_COLUMNS}


@dataclass(frozen=True)
class BasisReport:
    """The four NME basis vectors with their overlaps and entropies."""

    ell: complex
    p: complex
    vectors: Tuple[np.ndarray, ...]
    overlaps: np.ndarray
    completeness_residual: float
    entropies: Tuple[float, ...]

    def to_dict(self) -> Dict[str, Any]:
        def pair(z: complex) -> List[float]:
            return [float(z.real), float(z.imag)]

        return {
            "ell": pair(self.ell),
            "p": pair(self.p),
            "vectors": [[pair(z) for z in v] for v in self.vectors],
            "overlaps": [[pair(z) for z in row] for row in self.overlaps],
            "completeness_residual": self.completeness_residual,
            "entropies": list(self.entropies),
        }


class DenseCodingCalculator:
    """Main entry point for dense coding analysis and simulation."""

    def __init__(self, cache_size: int = PROTOCOL_CACHE_SIZE) -> None:
        if cache_size < 1:
            raise ValueError(f"cache_size must be at least 1, got {cache_size}")
        self.cache_size = cache_size
        self._protocols: "OrderedDict[ProtocolKey, DenseCodingProtocol]" = OrderedDict()
        self._lock = threading.Lock()

    def _get_protocol(self, config: ProtocolConfig) -> DenseCodingProtocol:
        """Get or build the protocol for config; trials and seed are not part of the key.

        Least recently used protocols are evicted past cache_size.
        """
        with self._lock:
            cached = self._protocols.get(config.key)
            if cached is not None:
                self._protocols.move_to_end(config.key)
                return cached

        logger.debug("Building protocol for %s", config.key)
        protocol = DenseCodingProtocol(config)
        with self._lock:
            self._protocols[config.key] = protocol
            while len(self._protocols) > self.cache_size:
                evicted, _ = self._protocols.popitem(last=False)
                logger.debug("Evicted protocol for %s", evicted)
        return protocol

    def calculate(self, config: ProtocolConfig) -> float:
        """Achievable average success probability for config.

        Raises:
            ValueError: If the configuration is invalid
        """
        return self._get_protocol(config).achievable_gamma

    def calculate_detailed(self, config: ProtocolConfig) -> Dict[str, Any]:
        """Achievable rate together with the bound it is measured against."""
        protocol = self._get_protocol(config)
        return {
            "scheme": config.scheme,
            "d": config.d,
            "D": config.D,
            "achievable_gamma": protocol.achievable_gamma,
            "paper_bound": embedded_bound(config.spectrum, config.d),
            "per_subspace_gamma": list(protocol.subspace_gammas),
            "residual_probability": max(0.0, 1.0 - protocol.subspace_weight),
        }

    def analyze(self, config: ProtocolConfig, include_simulation: bool = False) -> AnalysisReport:
        """Analytic report, with a Monte Carlo run attached when asked and trials > 0."""
        report = self._get_protocol(config).analyze()
        if include_simulation and config.trials > 0:
            report = replace(report, simulation=self.simulate(config))
        return report

    def simulate(self, config: ProtocolConfig) -> SimulationStats:
        """Monte Carlo run using config.trials, config.seed and config.workers."""
        return self._get_protocol(config).simulate(config.trials, config.seed, config.workers)

    def _sweep_row(self, axis_value: float, config: ProtocolConfig) -> SweepRow:
        protocol = self._get_protocol(config)
        stats = protocol.simulate(config.trials, config.seed, config.workers) if config.trials else None
        return SweepRow(
            axis_value=axis_value,
            entropy_ebits=entanglement_entropy(config.shared),
            paper_bound=embedded_bound(config.spectrum, config.d),
            achievable_gamma=protocol.achievable_gamma,
            mc_rate=stats.success_rate if stats else None,
            mc_stderr=stats.stderr if stats else None,
            trials=config.trials,
            seed=config.seed,
        )

    def sweep_ell(
        self,
        ells: Sequence[float],
        trials: int = 0,
        seed: int = DEFAULT_SEED,
        scheme: str = DEFAULT_SCHEME,
        workers: int = 1,
    ) -> List[SweepRow]:
        """Qubit channel L(|00> + ell|11>) for each real ell in [0, 1].

        paper_bound is 2 ell^2 / (1 + ell^2) here.
        """
        if not ells:
            raise ValueError("Sweep range is empty")
        rows = []
        for ell in ells:
            if not 0.0 <= ell <= 1.0:
                raise ValueError(f"ell must lie in [0, 1], got {ell}")
            shared = SchmidtState.from_ell(ell)
            config = ProtocolConfig(
                d=2, spectrum=shared.spectrum, trials=trials, seed=seed,
                scheme=scheme, workers=workers,
            )
            rows.append(self._sweep_row(ell, config))
        return rows

    def sweep_dimension(
        self,
        d: int,
        dims: Sequence[int],
        trials: int = 0,
        seed: int = DEFAULT_SEED,
        scheme: str = DEFAULT_SCHEME,
        workers: int = 1,
    ) -> List[SweepRow]:
        """Maximally entangled D x D resources carrying d^2 messages, one row per D."""
        if not dims:
            raise ValueError("Dimension list is empty")
        for D in dims:
            check_resource_dimension(D)
        rows = []
        for D in dims:
            config = ProtocolConfig(
                d=d, spectrum=SchmidtState.uniform(D).spectrum, trials=trials, seed=seed,
                scheme=scheme, workers=workers,
            )
            rows.append(self._sweep_row(float(D), config))
        return rows

    def basis_report(self, ell: complex, p: complex) -> BasisReport:
        """Vectors, pairwise overlaps, completeness residual and entropies of the NME basis."""
        basis = nme_basis(ell, p)
        return BasisReport(
            ell=complex(ell),
            p=complex(p),
            vectors=tuple(basis.vectors),
            overlaps=basis.gram(),
            completeness_residual=basis.completeness_residual(),
            entropies=basis.entropies(),
        )

    def clear_cache(self) -> None:
        with self._lock:
            self._protocols.clear()

    @staticmethod
    def supports(scheme: str) -> bool:
        return is_supported_scheme(scheme)
