"""Parsing of textual parameters from flags and JSON bodies."""

import logging
import math
import re
from typing import List, Tuple

import numpy as np

from .config import FLAG_SPECTRUM_TOL

logger = logging.getLogger(__name__)

_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
# digits, signs, exponents and a trailing j only; complex() does the rest
_COMPLEX = re.compile(r"^[0-9eE.+\-]*j?$")
_RANGE = re.compile(rf"^(?P<start>[+-]?{_NUMBER}):(?P<stop>[+-]?{_NUMBER}):(?P<steps>\d+)$")
_SEPARATOR = re.compile(r"\s*,\s*")


class ParameterParser:
    """Turns flag strings into validated numeric values."""

    def complex_value(self, text: str) -> complex:
        """Parse "re[+imi]" (e.g. "0.5", "0.3+0.4i", "-2i").

        Raises:
            ValueError: If the text is not a finite complex number
        """
        cleaned = re.sub(r"\s+", "", str(text)).replace("i", "j")
        if not _COMPLEX.match(cleaned):
            raise ValueError(f"Cannot parse complex number: {text!r}")
        try:
            value = complex(cleaned)
        except ValueError:
            raise ValueError(f"Cannot parse complex number: {text!r}") from None
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise ValueError(f"Complex number must be finite: {text!r}")
        return value

    def real_value(self, text: str) -> float:
        """Parse a number that must have no imaginary part."""
        value = self.complex_value(text)
        if value.imag != 0.0:
            raise ValueError(f"Expected a real number, got {text!r}")
        return value.real

    def spectrum(self, text: str, tol: float = FLAG_SPECTRUM_TOL) -> Tuple[float, ...]:
        """Parse "a,b,c" into a probability vector.

        Sums within tol of 1 are renormalized with a warning; anything else is rejected.

        Raises:
            ValueError: On empty input, non-numbers, negative entries or a bad sum
        """
        parts = [p for p in _SEPARATOR.split(str(text).strip()) if p]
        if not parts:
            raise ValueError("Spectrum is empty")
        values = np.array([self.real_value(p) for p in parts], dtype=np.float64)
        if np.any(values < 0.0):
            raise ValueError(f"Spectrum entries must be nonnegative, got {text!r}")
        total = float(values.sum())
        if abs(total - 1.0) > tol:
            raise ValueError(f"Spectrum sums to {total:.9g}, expected 1 within {tol:g}")
        if total != 1.0:
            logger.warning("Renormalizing spectrum %s (sum %.12g)", text, total)
        return tuple(float(v) for v in values / total)

    def float_range(self, text: str) -> List[float]:
        """Parse "start:stop:steps" into steps evenly spaced points, endpoints included.

        Raises:
            ValueError: If malformed or steps < 1
        """
        match = _RANGE.match(re.sub(r"\s+", "", str(text)))
        if not match:
            raise ValueError(f"Range must look like start:stop:steps, got {text!r}")
        steps = int(match["steps"])
        if steps < 1:
            raise ValueError(f"Range is empty: {text!r}")
        start, stop = float(match["start"]), float(match["stop"])
        if steps == 1:
            return [start]
        return [float(x) for x in np.linspace(start, stop, steps)]

    def int_list(self, text: str) -> List[int]:
        """Parse "2,3,4" into integers.

        Raises:
            ValueError: On empty input or a non-integer entry
        """
        parts = [p for p in _SEPARATOR.split(str(text).strip()) if p]
        if not parts:
            raise ValueError("List is empty")
        values = []
        for part in parts:
            if not re.fullmatch(r"[+-]?\d+", part):
                raise ValueError(f"Expected an integer, got {part!r}")
            values.append(int(part))
        return values
