from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, log10
from typing import Optional

from cutpoint.errors.exceptions import ValidationError


@dataclass(frozen=True)
class Enclosure:
    """A certified interval [lower, upper] around a real value, with the precision it was computed at."""

    lower: Fraction
    upper: Fraction
    precision: int

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValidationError(
                "enclosure endpoints out of order",
                {"lower": str(self.lower), "upper": str(self.upper)},
            )

    @classmethod
    def exact(cls, value: Fraction, precision: int) -> "Enclosure":
        return cls(Fraction(value), Fraction(value), precision)

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def is_exact(self) -> bool:
        return self.lower == self.upper

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    @property
    def magnitude(self) -> Fraction:
        """Smallest absolute value inside the enclosure."""
        if self.lower <= 0 <= self.upper:
            return Fraction(0)
        return min(abs(self.lower), abs(self.upper))

    def tolerance(self) -> Fraction:
        # width bound 2^(1-p) * max(1, |value|)
        return Fraction(2, 2 ** self.precision) * max(Fraction(1), self.magnitude)

    def contains(self, value) -> bool:
        value = Fraction(value)
        return self.lower <= value <= self.upper

    def contains_enclosure(self, other: "Enclosure") -> bool:
        return self.lower <= other.lower and other.upper <= self.upper

    def excludes(self, value) -> bool:
        return not self.contains(value)

    def sign(self) -> Optional[int]:
        """+1 or -1 when the enclosure excludes zero, None when it straddles it."""
        if self.lower > 0:
            return 1
        if self.upper < 0:
            return -1
        return None

    def intersect(self, other: "Enclosure") -> "Enclosure":
        lower = max(self.lower, other.lower)
        upper = min(self.upper, other.upper)
        return Enclosure(lower, upper, max(self.precision, other.precision))

    def floor_bounds(self) -> tuple:
        return floor(self.lower), floor(self.upper)

    def decimal_digits(self) -> int:
        return max(10, ceil(self.precision * log10(2)) + 1)

    def format(self) -> str:
        """Exact values print as p/q; everything else as an outward-rounded "[lo, hi]@bits"."""
        if self.is_exact:
            value = self.lower
            if value.denominator == 1:
                return str(value.numerator)
            return f"{value.numerator}/{value.denominator}"
        digits = self.decimal_digits()
        scale = 10 ** digits
        lo = _decimal(floor(self.lower * scale), digits)
        hi = _decimal(ceil(self.upper * scale), digits)
        return f"[{lo}, {hi}]@{self.precision}"

    def __str__(self) -> str:
        return self.format()


def _decimal(scaled: int, digits: int) -> str:
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10 ** digits)
    return f"{sign}{whole}.{frac:0{digits}d}"
