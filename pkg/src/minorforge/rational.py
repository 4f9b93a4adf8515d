"""Exact rational lengths plus the symbolic infinity used for triangulation chords.

All graph lengths and distances in this package are `fractions.Fraction`
values; `INF` is a singleton that compares greater than every Fraction and
never takes part in arithmetic. It is a distinct symbolic value, not a
sentinel number, so it can never be confused with a real length.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import FormatError


class SymbolicInfinity:
    """Singleton standing for an infinite length or an unattainable value."""

    _instance = None
    __slots__ = ()

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("minorforge.INF")

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True


INF = SymbolicInfinity()

# A length is a positive Fraction or INF.
Length = Fraction | SymbolicInfinity


def is_finite(value: Length) -> bool:
    return value is not INF


def parse_fraction(text: str) -> Fraction:
    """Parse 'p/q' or a bare integer into an exact Fraction."""
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"not a rational: {text!r}") from exc


def format_fraction(value: Fraction) -> str:
    """Render a Fraction as 'p/q' (always with an explicit denominator)."""
    return f"{value.numerator}/{value.denominator}"
