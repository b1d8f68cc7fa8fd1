"""Probabilistic dense coding with non-maximally entangled resources."""

from .calculator import BasisReport, DenseCodingCalculator, SweepRow
from .coding import MessageIndex, encode_family, get_encoding
from .discrimination import (
    GramMatrix,
    InfeasibleProfileError,
    LinearDependenceError,
    Povm,
    SuccessProfile,
    average_bound,
    embedded_bound,
    max_uniform_gamma,
    qudit_average_bound,
    qutrit_closed_form,
    usd_povm,
)
from .parsing import ParameterParser
from .protocol import (
    AnalysisReport,
    DenseCodingProtocol,
    ProtocolConfig,
    SimulationStats,
    TrialRecord,
    analyze,
    run_trial,
    simulate,
)
from .states import SchmidtState, entanglement_entropy, nme_basis

__all__ = [
    "AnalysisReport",
    "BasisReport",
    "DenseCodingCalculator",
    "DenseCodingProtocol",
    "GramMatrix",
    "InfeasibleProfileError",
    "LinearDependenceError",
    "MessageIndex",
    "ParameterParser",
    "Povm",
    "ProtocolConfig",
    "SchmidtState",
    "SimulationStats",
    "SuccessProfile",
    "SweepRow",
    "TrialRecord",
    "analyze",
    "average_bound",
    "embedded_bound",
    "encode_family",
    "entanglement_entropy",
    "get_encoding",
    "max_uniform_gamma",
    "nme_basis",
    "qudit_average_bound",
    "qutrit_closed_form",
    "run_trial",
    "simulate",
    "usd_povm",
]
__version__ = "0.2.0"
