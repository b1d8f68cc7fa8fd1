"""Base encoding interface."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..config import NORM_TOL, UNITARY_TOL
from ..qmath import Operator, StateVector, apply, as_operator, is_unitary, kron
from ..states import SchmidtState


@dataclass(frozen=True, order=True)
class MessageIndex:
    """Message label (m, n); m selects the shift power, n the clock power."""

    m: int
    n: int

    def check(self, d: int) -> None:
        """Raise ValueError unless 0 <= m, n < d."""
        if not (0 <= self.m < d and 0 <= self.n < d):
            raise ValueError(f"Message index ({self.m},{self.n}) outside [0, {d}) x [0, {d})")

    def flat(self, d: int) -> int:
        """Flattened position m*d + n."""
        self.check(d)
        return self.m * d + self.n

    @classmethod
    def from_flat(cls, index: int, d: int) -> "MessageIndex":
        if not 0 <= index < d * d:
            raise ValueError(f"Flat message index {index} outside [0, {d * d})")
        return cls(index // d, index % d)

    def __str__(self) -> str:
        return f"({self.m},{self.n})"


@dataclass(frozen=True)
class EncodingOperator:
    """A labeled unitary applied by Alice to her half of the resource."""

    label: MessageIndex
    matrix: Operator

    def __post_init__(self) -> None:
        matrix = as_operator(self.matrix)
        if not is_unitary(matrix, UNITARY_TOL):
            raise ValueError(f"Encoding operator {self.label} is not unitary")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class EncodedFamily:
    """The d^2 states Bob may receive, in flattened m*d + n order."""

    d: int
    D: int
    labels: Tuple[MessageIndex, ...]
    states: Tuple[StateVector, ...]

    def __len__(self) -> int:
        return len(self.states)

    def state(self, label: MessageIndex) -> StateVector:
        return self.states[label.flat(self.d)]

    def matrix(self) -> Operator:
        """States as the columns of a D^2 x d^2 matrix."""
        return np.column_stack(self.states)

    def subspace(self, m: int) -> Tuple[StateVector, ...]:
        """The d states sharing shift power m."""
        return self.states[m * self.d:(m + 1) * self.d]


class BaseEncoding(ABC):
    """Abstract base class for all message encodings."""

    scheme: str = ""

    def __init__(self, d: int, D: int):
        """Initialize the encoding.

        Args:
            d: Message alphabet dimension (d^2 messages)
            D: Local dimension of the shared resource, D >= d
        """
        if d < 2:
            raise ValueError(f"Message dimension must be at least 2, got d={d}")
        if D < d:
            raise ValueError(f"Resource dimension D={D} is smaller than d={d}")
        self.d = d
        self.D = D

    @abstractmethod
    def operators(self) -> List[EncodingOperator]:
        """The d^2 encoding unitaries, each D x D.

        Returns:
            One operator per message label
        """

    def get_scheme_name(self) -> str:
        return self.scheme

    def encode(self, shared: SchmidtState) -> EncodedFamily:
        """Apply every encoding to Alice's half of the shared state.

        Args:
            shared: The shared resource; its dimension must equal D

        Returns:
            The encoded family ordered by flattened label
        """
        if shared.dim != self.D:
            raise ValueError(
                f"Shared state has local dimension {shared.dim}, encoding expects D={self.D}"
            )
        resource = shared.state_vector()
        identity = np.eye(self.D)
        ordered = sorted(self.operators(), key=lambda op: op.label.flat(self.d))
        states = []
        for op in ordered:
            encoded = apply(kron(op.matrix, identity), resource)
            if abs(np.linalg.norm(encoded) - 1.0) > NORM_TOL:
                raise ValueError(f"Encoding {op.label} did not preserve the norm")
            states.append(encoded)
        return EncodedFamily(
            d=self.d,
            D=self.D,
            labels=tuple(op.label for op in ordered),
            states=tuple(states),
        )
