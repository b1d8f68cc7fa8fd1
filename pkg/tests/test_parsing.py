"""Tests for parameter parsing."""

import logging

import pytest

from src.parsing import ParameterParser


@pytest.fixture
def parser():
    return ParameterParser()


class TestComplexValues:
    """Test "re[+imi]" parsing."""

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("0.5", 0.5),
            ("1", 1.0),
            ("0.3+0.4i", 0.3 + 0.4j),
            ("0.3-0.4i", 0.3 - 0.4j),
            ("-2i", -2j),
            ("i", 1j),
            ("1e-3+2j", 0.001 + 2j),
            (" 0.5 + 0.5i ", 0.5 + 0.5j),
        ],
    )
    def test_valid(self, parser, text, expected):
        """Test accepted spellings."""
        assert parser.complex_value(text) == pytest.approx(expected)

    @pytest.mark.parametrize("text", ["", "abc", "1+", "nan", "inf", "0.5k", "1,2"])
    def test_invalid(self, parser, text):
        """Test rejected spellings."""
        with pytest.raises(ValueError):
            parser.complex_value(text)

    def test_real_value_rejects_imaginary(self, parser):
        """Test that real_value refuses an imaginary part."""
        with pytest.raises(ValueError, match="real number"):
            parser.real_value("1+1i")


class TestSpectrum:
    """Test Schmidt spectrum parsing."""

    def test_exact(self, parser):
        """Test a spectrum that already sums to 1."""
        assert parser.spectrum("0.8,0.2") == pytest.approx((0.8, 0.2))

    def test_renormalizes_truncated_decimals(self, parser, caplog):
        """Test silent renormalization within tolerance, with a warning record."""
        with caplog.at_level(logging.WARNING, logger="src.parsing"):
            values = parser.spectrum("0.3333333,0.3333333,0.3333333")
        assert sum(values) == pytest.approx(1.0, abs=1e-15)
        assert "Renormalizing" in caplog.text

    def test_rejects_large_deviation(self, parser):
        """Test that a sum off by more than 1e-6 is rejected."""
        with pytest.raises(ValueError, match="sums to"):
            parser.spectrum("0.5,0.4")

    def test_rejects_negative(self, parser):
        """Test that negative entries are rejected."""
        with pytest.raises(ValueError, match="nonnegative"):
            parser.spectrum("1.2,-0.2")

    def test_rejects_empty(self, parser):
        """Test that an empty spectrum is rejected."""
        with pytest.raises(ValueError, match="empty"):
            parser.spectrum(" ")


class TestRanges:
    """Test range and list parsing."""

    def test_float_range(self, parser):
        """Test start:stop:steps including both endpoints."""
        values = parser.float_range("0:1:11")
        assert len(values) == 11
        assert values[0] == 0.0 and values[-1] == 1.0
        assert values[3] == pytest.approx(0.3)

    def test_single_point(self, parser):
        """Test a one-step range."""
        assert parser.float_range("0.5:1:1") == [0.5]

    @pytest.mark.parametrize("text", ["0:1", "0:1:0", "a:b:3", "0:1:2.5"])
    def test_bad_range(self, parser, text):
        """Test malformed or empty ranges."""
        with pytest.raises(ValueError):
            parser.float_range(text)

    def test_int_list(self, parser):
        """Test comma-separated integers."""
        assert parser.int_list("2, 3,4,6") == [2, 3, 4, 6]

    def test_int_list_rejects_floats(self, parser):
        """Test that non-integers are rejected."""
        with pytest.raises(ValueError, match="integer"):
            parser.int_list("2,3.5")
