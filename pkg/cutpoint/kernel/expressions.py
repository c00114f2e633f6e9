"""
Exact scalar expressions.

A ScalarExpr is an immutable expression tree over rationals, quadratic
irrationals p + q*sqrt(d), the constant pi, digit-stream literals and the
operations sqrt, arccos, cos, sin, abs, +, -, *, / and integer powers.

Constructors fold eagerly: any operation whose operands are rationals returns
a rational `Const`, and field operations between quadratic irrationals with
the same radicand stay inside Q(sqrt(d)). Everything else is kept symbolic and
evaluated on demand by `cutpoint.kernel.certify`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Dict, FrozenSet, Hashable, Optional, Protocol, Tuple, Union

from cutpoint.errors.exceptions import DivisionByZero, DomainError

Number = Union[int, Fraction]
ExprLike = Union["ScalarExpr", int, Fraction]

# Radicands are reduced by these primes only; larger square factors are left in place
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class DigitSource(Protocol):
    """Anything that yields the integer formed by the first n binary digits of a value in (0, 1)."""

    label: str

    def prefix(self, n: int) -> int:
        ...


class ScalarExpr:
    """Base class of all expression nodes."""

    __slots__ = ()

    def __add__(self, other: ExprLike) -> "ScalarExpr":
        return add(self, other)

    def __radd__(self, other: ExprLike) -> "ScalarExpr":
        return add(other, self)

    def __sub__(self, other: ExprLike) -> "ScalarExpr":
        return sub(self, other)

    def __rsub__(self, other: ExprLike) -> "ScalarExpr":
        return sub(other, self)

    def __mul__(self, other: ExprLike) -> "ScalarExpr":
        return mul(self, other)

    def __rmul__(self, other: ExprLike) -> "ScalarExpr":
        return mul(other, self)

    def __truediv__(self, other: ExprLike) -> "ScalarExpr":
        return div(self, other)

    def __rtruediv__(self, other: ExprLike) -> "ScalarExpr":
        return div(other, self)

    def __neg__(self) -> "ScalarExpr":
        return neg(self)

    def __pow__(self, exponent: int) -> "ScalarExpr":
        return power(self, exponent)

    def __repr__(self) -> str:
        return f"ScalarExpr({to_text(self)})"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Const(ScalarExpr):
    value: Fraction


@dataclass(frozen=True, repr=False)
class Quadratic(ScalarExpr):
    """p + q*sqrt(d) with q != 0 and d > 1 not a perfect square."""

    p: Fraction
    q: Fraction
    d: int


@dataclass(frozen=True, repr=False)
class PiConst(ScalarExpr):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class Stream(ScalarExpr):
    source: DigitSource


@dataclass(frozen=True, eq=False, repr=False)
class Unary(ScalarExpr):
    op: str
    arg: ScalarExpr


@dataclass(frozen=True, eq=False, repr=False)
class Binary(ScalarExpr):
    op: str
    left: ScalarExpr
    right: ScalarExpr


@dataclass(frozen=True, eq=False, repr=False)
class Power(ScalarExpr):
    base: ScalarExpr
    exponent: int


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))
PI = PiConst()

UNARY_OPS = ("neg", "sqrt", "acos", "cos", "sin", "abs")
BINARY_OPS = ("add", "sub", "mul", "div")


def const(value: Number) -> Const:
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise TypeError(f"exact rational expected, got {type(value).__name__}")
    return Const(Fraction(value))


def as_expr(value: ExprLike) -> ScalarExpr:
    if isinstance(value, ScalarExpr):
        return value
    return const(value)


def rational_value(expr: ExprLike) -> Optional[Fraction]:
    """The exact value of a rational expression, None otherwise."""
    expr = as_expr(expr)
    if isinstance(expr, Const):
        return expr.value
    return None


def is_rational(expr: ExprLike) -> bool:
    return rational_value(expr) is not None


def _square_free(d: int) -> Tuple[int, int]:
    """Split d = s^2 * r, pulling out small square factors only."""
    s = 1
    for prime in _SMALL_PRIMES:
        square = prime * prime
        while d % square == 0:
            d //= square
            s *= prime
    root = isqrt(d)
    if root * root == d:
        return s * root, 1
    return s, d


def quadratic(p: Number, q: Number, d: int) -> ScalarExpr:
    """Build p + q*sqrt(d), folding to a rational when possible."""
    p, q = Fraction(p), Fraction(q)
    if d < 0:
        raise DomainError("negative radicand", {"radicand": d})
    if q == 0 or d == 0:
        return Const(p)
    s, r = _square_free(d)
    if r == 1:
        return Const(p + q * s)
    return Quadratic(p, q * s, r)


def _field_parts(expr: ScalarExpr) -> Optional[Tuple[Fraction, Fraction, int]]:
    if isinstance(expr, Const):
        return expr.value, Fraction(0), 0
    if isinstance(expr, Quadratic):
        return expr.p, expr.q, expr.d
    return None


def _common_radicand(a, b) -> Optional[int]:
    if a is None or b is None:
        return None
    da, db = a[2], b[2]
    if da == 0:
        return db
    if db == 0 or da == db:
        return da
    return None


def add(left: ExprLike, right: ExprLike) -> ScalarExpr:
    left, right = as_expr(left), as_expr(right)
    a, b = _field_parts(left), _field_parts(right)
    d = _common_radicand(a, b)
    if d is not None:
        return quadratic(a[0] + b[0], a[1] + b[1], d)
    if left == ZERO:
        return right
    if right == ZERO:
        return left
    return Binary("add", left, right)


def neg(arg: ExprLike) -> ScalarExpr:
    arg = as_expr(arg)
    parts = _field_parts(arg)
    if parts is not None:
        return quadratic(-parts[0], -parts[1], parts[2])
    if isinstance(arg, Unary) and arg.op == "neg":
        return arg.arg
    return Unary("neg", arg)


def sub(left: ExprLike, right: ExprLike) -> ScalarExpr:
    left, right = as_expr(left), as_expr(right)
    a, b = _field_parts(left), _field_parts(right)
    d = _common_radicand(a, b)
    if d is not None:
        return quadratic(a[0] - b[0], a[1] - b[1], d)
    if right == ZERO:
        return left
    if left is right:
        return ZERO
    return Binary("sub", left, right)


def mul(left: ExprLike, right: ExprLike) -> ScalarExpr:
    left, right = as_expr(left), as_expr(right)
    a, b = _field_parts(left), _field_parts(right)
    d = _common_radicand(a, b)
    if d is not None:
        p = a[0] * b[0] + a[1] * b[1] * d
        q = a[0] * b[1] + a[1] * b[0]
        return quadratic(p, q, d)
    if left == ZERO or right == ZERO:
        return ZERO
    if left == ONE:
        return right
    if right == ONE:
        return left
    return Binary("mul", left, right)


def div(left: ExprLike, right: ExprLike) -> ScalarExpr:
    left, right = as_expr(left), as_expr(right)
    if right == ZERO:
        raise DivisionByZero("division by exact zero", {"numerator": to_text(left)})
    b = _field_parts(right)
    if b is not None and _field_parts(left) is not None:
        p, q, d = b
        # multiply by the conjugate; p^2 - q^2 d != 0 since sqrt(d) is irrational
        norm = p * p - q * q * d if d else p * p
        conjugate = quadratic(p / norm, -q / norm, d) if d else Const(1 / p)
        return mul(left, conjugate)
    if right == ONE:
        return left
    return Binary("div", left, right)


def power(base: ExprLike, exponent: int) -> ScalarExpr:
    base = as_expr(base)
    if isinstance(exponent, bool) or not isinstance(exponent, int):
        raise TypeError("integer exponent expected")
    if exponent < 0:
        return div(ONE, power(base, -exponent))
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if _field_parts(base) is not None:
        result: ScalarExpr = ONE
        square = base
        n = exponent
        while n:
            if n & 1:
                result = mul(result, square)
            n >>= 1
            if n:
                square = mul(square, square)
        return result
    return Power(base, exponent)


def sqrt(arg: ExprLike) -> ScalarExpr:
    arg = as_expr(arg)
    value = rational_value(arg)
    if value is not None:
        if value < 0:
            raise DomainError("square root of a negative rational", {"value": str(value)})
        # sqrt(p/q) = sqrt(p*q)/q
        return quadratic(0, Fraction(1, value.denominator), value.numerator * value.denominator)
    return Unary("sqrt", arg)


def acos(arg: ExprLike) -> ScalarExpr:
    arg = as_expr(arg)
    value = rational_value(arg)
    if value is not None:
        if abs(value) > 1:
            raise DomainError("arccos argument outside [-1, 1]", {"value": str(value)})
        if value == 1:
            return ZERO
        if value == -1:
            return PI
    return Unary("acos", arg)


def cos(arg: ExprLike) -> ScalarExpr:
    arg = as_expr(arg)
    if arg == ZERO:
        return ONE
    return Unary("cos", arg)


def sin(arg: ExprLike) -> ScalarExpr:
    arg = as_expr(arg)
    if arg == ZERO:
        return ZERO
    return Unary("sin", arg)


def absolute(arg: ExprLike) -> ScalarExpr:
    arg = as_expr(arg)
    value = rational_value(arg)
    if value is not None:
        return Const(abs(value))
    return Unary("abs", arg)


def stream(source: DigitSource) -> ScalarExpr:
    return Stream(source)


def _format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def to_text(expr: ScalarExpr, depth: int = 12) -> str:
    """Readable infix rendering; deep trees are elided."""
    if isinstance(expr, Const):
        return _format_fraction(expr.value)
    if isinstance(expr, Quadratic):
        sign = "-" if expr.q < 0 else "+"
        q = abs(expr.q)
        radical = f"sqrt({expr.d})" if q == 1 else f"{_format_fraction(q)}*sqrt({expr.d})"
        if expr.p == 0:
            return radical if sign == "+" else f"-{radical}"
        return f"{_format_fraction(expr.p)} {sign} {radical}"
    if isinstance(expr, PiConst):
        return "pi"
    if isinstance(expr, Stream):
        return f"stream({expr.source.label})"
    if depth <= 0:
        return "..."
    if isinstance(expr, Unary):
        inner = to_text(expr.arg, depth - 1)
        if expr.op == "neg":
            return f"-({inner})"
        return f"{expr.op}({inner})"
    if isinstance(expr, Binary):
        symbol = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[expr.op]
        return f"({to_text(expr.left, depth - 1)} {symbol} {to_text(expr.right, depth - 1)})"
    if isinstance(expr, Power):
        return f"({to_text(expr.base, depth - 1)})^{expr.exponent}"
    raise TypeError(f"unknown expression node {type(expr).__name__}")


# Exact zero test through a polynomial normal form. Every subexpression that is
# not a field operation becomes an atom; sqrt(d)^2 = d and cos(t)^2 = 1 - sin(t)^2
# are the only identities applied, so False means "not shown to be zero".

Monomial = FrozenSet[Tuple[Hashable, int]]
Polynomial = Dict[Monomial, Fraction]

_UNIT: Monomial = frozenset()


def _structure(expr: ScalarExpr) -> Hashable:
    if isinstance(expr, Const):
        return ("const", expr.value)
    if isinstance(expr, Quadratic):
        return ("quadratic", expr.p, expr.q, expr.d)
    if isinstance(expr, PiConst):
        return ("pi",)
    if isinstance(expr, Stream):
        return ("stream", id(expr.source))
    if isinstance(expr, Unary):
        return ("unary", expr.op, _structure(expr.arg))
    if isinstance(expr, Binary):
        return ("binary", expr.op, _structure(expr.left), _structure(expr.right))
    if isinstance(expr, Power):
        return ("power", _structure(expr.base), expr.exponent)
    raise TypeError(f"unknown expression node {type(expr).__name__}")


def _shift(monomial: Monomial, key: Hashable, delta: int) -> Monomial:
    exponents = dict(monomial)
    exponents[key] = exponents.get(key, 0) + delta
    return frozenset((k, e) for k, e in exponents.items() if e)


def _combine(left: Polynomial, right: Polynomial, factor: Fraction = Fraction(1)) -> Polynomial:
    result = dict(left)
    for monomial, coeff in right.items():
        result[monomial] = result.get(monomial, Fraction(0)) + factor * coeff
    return {m: c for m, c in result.items() if c}


def _product(left: Polynomial, right: Polynomial) -> Polynomial:
    result: Polynomial = {}
    for ma, ca in left.items():
        for mb, cb in right.items():
            monomial = ma
            for key, exponent in mb:
                monomial = _shift(monomial, key, exponent)
            result[monomial] = result.get(monomial, Fraction(0)) + ca * cb
    return {m: c for m, c in result.items() if c}


def _atom(key: Hashable) -> Polynomial:
    return {frozenset({(key, 1)}): Fraction(1)}


def _polynomial(expr: ScalarExpr) -> Polynomial:
    if isinstance(expr, Const):
        return {_UNIT: expr.value} if expr.value else {}
    if isinstance(expr, Quadratic):
        return _combine({_UNIT: expr.p} if expr.p else {}, _atom(("sqrt", expr.d)), expr.q)
    if isinstance(expr, Unary) and expr.op == "neg":
        return _combine({}, _polynomial(expr.arg), Fraction(-1))
    if isinstance(expr, Binary):
        if expr.op == "add":
            return _combine(_polynomial(expr.left), _polynomial(expr.right))
        if expr.op == "sub":
            return _combine(_polynomial(expr.left), _polynomial(expr.right), Fraction(-1))
        if expr.op == "mul":
            return _product(_polynomial(expr.left), _polynomial(expr.right))
        divisor = rational_value(expr.right)
        if divisor is not None:
            return _combine({}, _polynomial(expr.left), 1 / divisor)
    if isinstance(expr, Power):
        base = _polynomial(expr.base)
        result: Polynomial = {_UNIT: Fraction(1)}
        for _ in range(expr.exponent):
            result = _product(result, base)
        return result
    return _atom(_structure(expr))


def _rewrite(monomial: Monomial) -> Optional[Polynomial]:
    for key, exponent in monomial:
        if exponent < 2:
            continue
        rest = _shift(monomial, key, -2)
        if key[0] == "sqrt":
            return {rest: Fraction(key[1])}
        if key[0] == "unary" and key[1] == "cos":
            sine = ("unary", "sin", key[2])
            return {rest: Fraction(1), _shift(rest, sine, 2): Fraction(-1)}
    return None


def identically_zero(expr: ExprLike) -> bool:
    """True if expr reduces to 0 in the polynomial normal form."""
    poly = _polynomial(as_expr(expr))
    pending = True
    while pending:
        pending = False
        for monomial, coeff in list(poly.items()):
            replacement = _rewrite(monomial)
            if replacement is None:
                continue
            poly.pop(monomial)
            poly = _combine(poly, replacement, coeff)
            pending = True
            break
    return not poly
