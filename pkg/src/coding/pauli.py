"""Pauli encodings {I, sigma_x, i sigma_y, sigma_z} for qubit dense coding."""

from typing import List

import numpy as np

from .base import BaseEncoding, EncodingOperator, MessageIndex

# single-qubit Pauli operators
I = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

# label (m, n): m = power of X, n = power of Z
PAULI_LABELS = {
    (0, 0): I,
    (1, 0): X,
    (1, 1): 1j * Y,
    (0, 1): Z,
}


def pauli_encodings() -> List[EncodingOperator]:
    """I, sigma_x, i sigma_y, sigma_z labeled (0,0), (1,0), (1,1), (0,1)."""
    return [
        EncodingOperator(label=MessageIndex(m, n), matrix=matrix)
        for (m, n), matrix in PAULI_LABELS.items()
    ]


class PauliEncoding(BaseEncoding):
    """The textbook qubit encoding; differs from Weyl d=2 only by a phase on (1,1)."""

    scheme = "pauli"

    def __init__(self, d: int = 2, D: int = 2):
        if d != 2 or D != 2:
            raise ValueError(f"Pauli encoding requires d = D = 2, got d={d}, D={D}")
        super().__init__(d, D)

    def operators(self) -> List[EncodingOperator]:
        return pauli_encodings()
