"""Shift/clock (Weyl) encodings for qudits, with identity padding for D > d."""

from typing import List

import numpy as np
import scipy.linalg as la

from .base import BaseEncoding, EncodingOperator, MessageIndex
from ..qmath import Operator


def shift_op(d: int) -> Operator:
    """U|k> = |k + 1 mod d>."""
    if d < 2:
        raise ValueError(f"Shift operator needs d >= 2, got {d}")
    return np.roll(np.eye(d, dtype=np.complex128), 1, axis=0)


def clock_op(d: int) -> Operator:
    """V|k> = exp(2 pi i k / d)|k>."""
    if d < 2:
        raise ValueError(f"Clock operator needs d >= 2, got {d}")
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def weyl_commutator_phase(d: int) -> complex:
    """Phase w with V U = w U V."""
    return complex(np.exp(2j * np.pi / d))


def weyl(m: int, n: int, d: int) -> EncodingOperator:
    """U^m V^n labeled (m, n)."""
    label = MessageIndex(m, n)
    label.check(d)
    matrix = np.linalg.matrix_power(shift_op(d), m) @ np.linalg.matrix_power(clock_op(d), n)
    return EncodingOperator(label=label, matrix=matrix)


def embed_encoding(op: EncodingOperator, D: int) -> EncodingOperator:
    """Act as op on span{|0>..|d-1>} and as the identity on the rest."""
    d = op.dim
    if D < d:
        raise ValueError(f"Cannot embed a {d}-level operator into D={D}")
    if D == d:
        return op
    return EncodingOperator(label=op.label, matrix=la.block_diag(op.matrix, np.eye(D - d)))


class WeylEncoding(BaseEncoding):
    """Encoding by U^m V^n, embedded in a D-level system when D > d."""

    scheme = "weyl"

    def operators(self) -> List[EncodingOperator]:
        return [
            embed_encoding(weyl(m, n, self.d), self.D)
            for m in range(self.d)
            for n in range(self.d)
        ]
