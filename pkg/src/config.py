"""Encoding scheme configuration and numeric constants."""

from typing import Dict

# Supported encoding schemes mapping
SUPPORTED_SCHEMES: Dict[str, str] = {
    # Shift/clock products U^m V^n, any d >= 2
    "weyl": "qudit",
    # {I, sigma_x, i sigma_y, sigma_z}, qubits only
    "pauli": "qubit",
}

DEFAULT_SCHEME = "weyl"

# Numeric tolerances
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
NORM_TOL = 1e-10
UNITARY_TOL = 1e-10
SPECTRUM_TOL = 1e-9
FLAG_SPECTRUM_TOL = 1e-6
INDEPENDENCE_TOL = 1e-10
PAIRWISE_SLACK = 1e-12
PROBABILITY_FLOOR = 1e-12

# Simulation and reporting defaults
DEFAULT_SEED = 0
DEFAULT_TRIALS = 100_000
CHUNK_TRIALS = 10_000
CSV_SIGNIFICANT_DIGITS = 12
MAX_DIMENSION = 12
MAX_API_TRIALS = 1_000_000
PROTOCOL_CACHE_SIZE = 16

INCONCLUSIVE = "inconclusive"
RESIDUAL = "residual"


def get_scheme_type(scheme: str) -> str:
    """Get the message family for a given encoding scheme.

    Args:
        scheme: The scheme name

    Returns:
        The family name (e.g., 'qudit', 'qubit')

    Raises:
        ValueError: If the scheme is not supported
    """
    if scheme not in SUPPORTED_SCHEMES:
        raise ValueError(
            f"Unsupported scheme: {scheme}. "
            f"Supported schemes: {', '.join(SUPPORTED_SCHEMES.keys())}"
        )
    return SUPPORTED_SCHEMES[scheme]


def is_supported_scheme(scheme: str) -> bool:
    """Check if an encoding scheme is supported."""
    return scheme in SUPPORTED_SCHEMES


def check_resource_dimension(D: int) -> int:
    """Return D if it is a usable resource dimension, before anything is allocated for it."""
    if not 2 <= D <= MAX_DIMENSION:
        raise ValueError(f"Resource dimension D={D} must lie in [2, {MAX_DIMENSION}]")
    return D
