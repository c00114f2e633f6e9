"""
Parameters in (0, 1) and their binary expansions.

An IrrationalParam is either an exact rational, an exact quadratic irrational
or a digit stream (a generator of binary digits, optionally with a fast
prefix function). Digit streams carry an `asserted_irrational` flag: the
caller vouches for irrationality, nothing here can check it.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import floor, gcd, isqrt
from typing import Callable, Dict, Optional, Tuple

from cutpoint.errors.exceptions import ParameterRangeError, ValidationError
from cutpoint.kernel.certify import certified_floor, exact_sign
from cutpoint.kernel.expressions import (
    Const,
    ExprLike,
    Quadratic,
    ScalarExpr,
    as_expr,
    mul,
    quadratic,
    rational_value,
    stream,
    sub,
    to_text,
)


class ParamTag(str, Enum):
    RATIONAL = "rational"
    QUADRATIC = "quadratic"
    DIGIT_STREAM = "digit-stream"


@dataclass(frozen=True)
class DigitExpansion:
    bits: Tuple[int, ...]
    terminating: bool

    def as_string(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True, eq=False)
class IrrationalParam:
    tag: ParamTag
    value: Optional[ScalarExpr] = None
    generator: Optional[Callable[[int], int]] = None
    prefix_fn: Optional[Callable[[int], int]] = None
    asserted_irrational: bool = False
    label: str = ""
    # longest prefix computed so far, as (n, floor(2^n * value))
    _longest: Dict[str, Tuple[int, int]] = field(default_factory=dict, init=False, repr=False, compare=False)

    @classmethod
    def rational(cls, value) -> "IrrationalParam":
        value = Fraction(value)
        return cls(ParamTag.RATIONAL, Const(value), label=_fraction_text(value))

    @classmethod
    def quadratic(cls, p, q, d: int) -> "IrrationalParam":
        expr = quadratic(p, q, d)
        if not isinstance(expr, Quadratic):
            return cls.rational(rational_value(expr))
        return cls(ParamTag.QUADRATIC, expr, asserted_irrational=True, label=to_text(expr))

    @classmethod
    def digit_stream(
        cls,
        generator: Optional[Callable[[int], int]] = None,
        asserted_irrational: bool = False,
        label: str = "stream",
        prefix: Optional[Callable[[int], int]] = None,
    ) -> "IrrationalParam":
        """
        Wrap a digit generator k -> d_k (k >= 1) and/or a prefix function
        n -> floor(2^n * value).
        """
        if generator is None and prefix is None:
            raise ValidationError("digit stream needs a generator or a prefix function")
        if generator is None:
            generator = lambda k: prefix(k) & 1  # noqa: E731
        return cls(
            ParamTag.DIGIT_STREAM,
            generator=generator,
            prefix_fn=prefix,
            asserted_irrational=asserted_irrational,
            label=label,
        )

    @classmethod
    def with_prefix(cls, bits: str, radicand: int = 2) -> "IrrationalParam":
        """
        The quadratic irrational 0.<bits> followed by the fractional digits of sqrt(radicand).
        """
        if not bits or any(b not in "01" for b in bits):
            raise ValidationError("prefix must be a nonempty binary string", {"bits": bits})
        root = isqrt(radicand)
        if root * root == radicand:
            raise ValidationError("radicand must not be a perfect square", {"radicand": radicand})
        scale = Fraction(1, 2 ** len(bits))
        return cls.quadratic((int(bits, 2) - root) * scale, scale, radicand)

    @classmethod
    def from_expr(cls, expr: ExprLike, label: Optional[str] = None, asserted_irrational: bool = False) -> "IrrationalParam":
        expr = as_expr(expr)
        if isinstance(expr, Const):
            return cls.rational(expr.value)
        if isinstance(expr, Quadratic):
            return cls(ParamTag.QUADRATIC, expr, asserted_irrational=True, label=label or to_text(expr))
        return digit_stream_from_expr(expr, label or to_text(expr), asserted_irrational)

    @property
    def is_irrational(self) -> bool:
        if self.tag is ParamTag.RATIONAL:
            return False
        return self.asserted_irrational

    def as_expr(self) -> ScalarExpr:
        if self.value is not None:
            return self.value
        return stream(self)

    def prefix(self, n: int) -> int:
        """The integer formed by the first n binary digits, i.e. floor(2^n * value)."""
        if n < 0:
            raise ValidationError("prefix length must be nonnegative", {"n": n})
        if n == 0:
            return 0
        known = self._longest.get("prefix")
        if known is not None and known[0] >= n:
            return known[1] >> (known[0] - n)
        head = self._compute_prefix(n)
        self._longest["prefix"] = (n, head)
        return head

    def _compute_prefix(self, n: int) -> int:
        if self.tag is ParamTag.RATIONAL:
            return floor(rational_value(self.value) * 2 ** n)
        if self.tag is ParamTag.QUADRATIC:
            return _quadratic_floor(self.value, 2 ** n)
        if self.prefix_fn is not None:
            return int(self.prefix_fn(n))
        head = 0
        for k in range(1, n + 1):
            head = (head << 1) | self._stream_digit(k)
        return head

    def digit(self, k: int) -> int:
        """The k-th binary digit after the point (k >= 1)."""
        if k < 1:
            raise ValidationError("digit index starts at 1", {"k": k})
        if self.tag is ParamTag.DIGIT_STREAM and self.prefix_fn is None:
            known = self._longest.get("prefix")
            if known is not None and known[0] >= k:
                return (known[1] >> (known[0] - k)) & 1
            return self._stream_digit(k)
        return self.prefix(k) & 1

    def _stream_digit(self, k: int) -> int:
        bit = self.generator(k)
        if bit not in (0, 1):
            raise ValidationError("digit stream produced a non-binary digit", {"k": k, "digit": bit})
        return bit

    def check_unit_interval(self) -> None:
        """Exact values must lie strictly inside (0, 1); streams are in [0, 1] by construction."""
        if self.value is None:
            return
        if exact_sign(self.value) != 1 or exact_sign(sub(1, self.value)) != 1:
            raise ParameterRangeError("parameter must lie in (0, 1)", {"value": self.label})


def digit_stream_from_expr(expr: ExprLike, label: str, asserted_irrational: bool = False) -> IrrationalParam:
    """Digit stream of a symbolic value in (0, 1), each prefix obtained by a certified floor."""
    expr = as_expr(expr)

    def prefix(n: int) -> int:
        return certified_floor(mul(expr, 2 ** n))

    return IrrationalParam.digit_stream(asserted_irrational=asserted_irrational, label=label, prefix=prefix)


def _quadratic_floor(value: Quadratic, scale: int) -> int:
    """floor(scale * (p + q*sqrt(d))) in integer arithmetic; q != 0 and d not a perfect square."""
    r, s = value.p * scale, value.q * scale
    common = r.denominator * s.denominator // gcd(r.denominator, s.denominator)
    big_r, big_s = int(r * common), int(s * common)
    root = isqrt(big_s * big_s * value.d)
    # sqrt(d) is irrational, so S*sqrt(d) is never an integer
    floor_term = root if big_s > 0 else -root - 1
    return (big_r + floor_term) // common


def binary_digits(param: IrrationalParam, n: int) -> DigitExpansion:
    """First n binary digits of param; rationals with a power-of-two denominator report terminating."""
    if n < 0:
        raise ValidationError("digit count must be nonnegative", {"n": n})
    param.check_unit_interval()
    head = param.prefix(n)
    bits = tuple((head >> (n - k)) & 1 for k in range(1, n + 1))
    terminating = False
    if param.tag is ParamTag.RATIONAL:
        denominator = rational_value(param.value).denominator
        terminating = denominator & (denominator - 1) == 0
    return DigitExpansion(bits, terminating)


def _fraction_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
