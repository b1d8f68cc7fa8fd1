"""Message encodings applied by the sender."""

from .base import BaseEncoding, EncodedFamily, EncodingOperator, MessageIndex
from .pauli import PauliEncoding, pauli_encodings
from .weyl import (
    WeylEncoding,
    clock_op,
    embed_encoding,
    shift_op,
    weyl,
    weyl_commutator_phase,
)
from ..config import DEFAULT_SCHEME, get_scheme_type
from ..states import SchmidtState


def get_encoding(scheme: str, d: int, D: int) -> BaseEncoding:
    """Create the encoding registered under scheme.

    Raises:
        ValueError: If the scheme is unknown or incompatible with (d, D)
    """
    scheme_type = get_scheme_type(scheme)
    if scheme_type == "qudit":
        return WeylEncoding(d, D)
    if scheme_type == "qubit":
        return PauliEncoding(d, D)
    raise ValueError(f"Unknown scheme type: {scheme_type}")


def encode_family(shared: SchmidtState, d: int, scheme: str = DEFAULT_SCHEME) -> EncodedFamily:
    """Encode all d^2 messages into the shared state (embedded when shared.dim > d)."""
    return get_encoding(scheme, d, shared.dim).encode(shared)


__all__ = [
    "BaseEncoding",
    "EncodedFamily",
    "EncodingOperator",
    "MessageIndex",
    "PauliEncoding",
    "WeylEncoding",
    "clock_op",
    "embed_encoding",
    "encode_family",
    "get_encoding",
    "pauli_encodings",
    "shift_op",
    "weyl",
    "weyl_commutator_phase",
]
