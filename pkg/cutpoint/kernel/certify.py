"""
Certified evaluation of ScalarExpr trees.

Enclosures are computed with mpmath's directed-rounding interval primitives
(`mpmath.libmp.mpi_*`). A working precision that is too low never produces a
wrong answer, only a wide enclosure; `evaluate` raises the working precision
until the requested width is reached.
"""
from enum import Enum
from fractions import Fraction
from math import floor
from typing import Dict, List, Optional, Tuple

from mpmath import libmp

from cutpoint.config.settings import Settings, get_settings
from cutpoint.errors.exceptions import (
    DivisionByZero,
    DomainError,
    PrecisionExhausted,
    ValidationError,
)
from cutpoint.kernel.enclosure import Enclosure
from cutpoint.kernel.expressions import (
    Binary,
    Const,
    ExprLike,
    PiConst,
    Power,
    Quadratic,
    ScalarExpr,
    Stream,
    Unary,
    as_expr,
    rational_value,
    sub,
    to_text,
)
from cutpoint.utils.logging_config import get_logger

logger = get_logger(__name__)

MPI = Tuple[tuple, tuple]

_INFINITE = (libmp.finf, libmp.fninf, libmp.fnan)


class Sign(Enum):
    NEGATIVE = -1
    POSITIVE = 1


class Ordering(Enum):
    LESS = -1
    GREATER = 1


class _Undecided(Exception):
    """An enclosure could not be certified at the current working precision."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
        self.message = message

    def as_error(self, details: Dict) -> Exception:
        if self.kind == "division":
            return DivisionByZero(self.message, details)
        if self.kind == "domain":
            return DomainError(self.message, details)
        return PrecisionExhausted(self.message, details)


def _mpi_rational(value: Fraction, wp: int) -> MPI:
    p, q = value.numerator, value.denominator
    return (
        libmp.from_rational(p, q, wp, libmp.round_floor),
        libmp.from_rational(p, q, wp, libmp.round_ceiling),
    )


def _to_fraction(value) -> Fraction:
    if value in _INFINITE:
        raise _Undecided("overflow", "enclosure is unbounded")
    p, q = libmp.to_rational(value)
    # gmpy-backed mpmath hands back mpz
    return Fraction(int(p), int(q))


def _straddles_zero(interval: MPI) -> bool:
    return libmp.mpf_sign(interval[0]) <= 0 <= libmp.mpf_sign(interval[1])


def _children(node: ScalarExpr) -> Tuple[ScalarExpr, ...]:
    if isinstance(node, Unary):
        return (node.arg,)
    if isinstance(node, Binary):
        return (node.left, node.right)
    if isinstance(node, Power):
        return (node.base,)
    return ()


class _Evaluator:
    """Interval evaluation of one expression DAG at a fixed working precision."""

    def __init__(self, wp: int):
        self.wp = wp
        self._memo: Dict[int, MPI] = {}

    def run(self, root: ScalarExpr) -> MPI:
        memo = self._memo
        # iterative post-order; deep DAGs come out of long matrix products
        stack: List[Tuple[ScalarExpr, bool]] = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if id(node) in memo:
                continue
            pending = [c for c in _children(node) if id(c) not in memo]
            if pending and not expanded:
                stack.append((node, True))
                stack.extend((child, False) for child in pending)
                continue
            memo[id(node)] = self._apply(node, [memo[id(c)] for c in _children(node)])
        return memo[id(root)]

    def _apply(self, node: ScalarExpr, args: List[MPI]) -> MPI:
        wp = self.wp
        if isinstance(node, Const):
            return _mpi_rational(node.value, wp)
        if isinstance(node, Quadratic):
            root = libmp.mpi_sqrt(_mpi_rational(Fraction(node.d), wp + 8), wp + 8)
            scaled = libmp.mpi_mul(_mpi_rational(node.q, wp + 8), root, wp + 8)
            return libmp.mpi_add(_mpi_rational(node.p, wp), scaled, wp)
        if isinstance(node, PiConst):
            return libmp.mpf_pi(wp, libmp.round_floor), libmp.mpf_pi(wp, libmp.round_ceiling)
        if isinstance(node, Stream):
            n = wp + 8
            head = node.source.prefix(n)
            return libmp.from_man_exp(head, -n), libmp.from_man_exp(head + 1, -n)
        if isinstance(node, Unary):
            return self._unary(node.op, args[0])
        if isinstance(node, Binary):
            return self._binary(node.op, args[0], args[1])
        if isinstance(node, Power):
            return libmp.mpi_pow_int(args[0], node.exponent, wp)
        raise TypeError(f"unknown expression node {type(node).__name__}")

    def _unary(self, op: str, a: MPI) -> MPI:
        wp = self.wp
        if op == "neg":
            return libmp.mpi_neg(a, wp)
        if op == "abs":
            return libmp.mpi_abs(a, wp)
        if op == "cos":
            return libmp.mpi_cos(a, wp)
        if op == "sin":
            return libmp.mpi_sin(a, wp)
        if op == "sqrt":
            if libmp.mpf_sign(a[1]) < 0:
                raise DomainError("square root of a certified negative value")
            if libmp.mpf_sign(a[0]) < 0:
                raise _Undecided("domain", "square root argument not certified nonnegative")
            return libmp.mpi_sqrt(a, wp)
        if op == "acos":
            return self._acos(a)
        raise TypeError(f"unknown unary operation {op}")

    def _acos(self, a: MPI) -> MPI:
        wp = self.wp
        lo, hi = a
        if libmp.mpf_gt(lo, libmp.fone) or libmp.mpf_lt(hi, libmp.fnone):
            raise DomainError("arccos argument certified outside [-1, 1]")
        if libmp.mpf_lt(lo, libmp.fnone) or libmp.mpf_gt(hi, libmp.fone):
            raise _Undecided("domain", "arccos argument enclosure escapes [-1, 1]")
        # arccos is decreasing: image is [acos(hi), acos(lo)]
        return self._acos_point(hi)[0], self._acos_point(lo)[1]

    def _acos_point(self, t) -> MPI:
        wp = self.wp + 8
        point = (t, t)
        # acos(t) = atan2(sqrt(1 - t^2), t); 1 - t^2 >= 0 since |t| <= 1 exactly
        rest = libmp.mpi_sub((libmp.fone, libmp.fone), libmp.mpi_mul(point, point, wp), wp)
        if libmp.mpf_sign(rest[0]) < 0:
            rest = (libmp.fzero, rest[1])
        return libmp.mpi_atan2(libmp.mpi_sqrt(rest, wp), point, self.wp)

    def _binary(self, op: str, a: MPI, b: MPI) -> MPI:
        wp = self.wp
        if op == "add":
            return libmp.mpi_add(a, b, wp)
        if op == "sub":
            return libmp.mpi_sub(a, b, wp)
        if op == "mul":
            return libmp.mpi_mul(a, b, wp)
        if op == "div":
            if _straddles_zero(b):
                raise _Undecided("division", "denominator enclosure contains zero")
            return libmp.mpi_div(a, b, wp)
        raise TypeError(f"unknown binary operation {op}")


def _raw_enclosure(expr: ScalarExpr, precision: int, settings: Settings) -> Enclosure:
    """One enclosure meeting the width bound at `precision`, escalating the working precision."""
    wp = precision + settings.GUARD_BITS + 8
    limit = 4 * max(settings.MAX_BITS, precision) + settings.GUARD_BITS
    while True:
        failure: Optional[_Undecided] = None
        try:
            lo, hi = _Evaluator(wp).run(expr)
            enclosure = Enclosure(_to_fraction(lo), _to_fraction(hi), precision)
            if enclosure.width <= enclosure.tolerance():
                return enclosure
        except _Undecided as exc:
            failure = exc
        if wp >= limit:
            details = {"expression": to_text(expr), "working_bits": wp}
            if failure is not None:
                raise failure.as_error(details)
            raise PrecisionExhausted("enclosure width bound not reached", details)
        logger.debug(
            "Raising working precision",
            extra={"working_bits": wp, "target_bits": precision, "reason": failure.kind if failure else "width"},
        )
        wp = min(2 * wp, limit)


def evaluate(expr: ExprLike, precision_bits: int) -> Enclosure:
    """
    Certified enclosure of `expr`.

    Rational expressions come back exact (zero width). Otherwise the result is
    the intersection of enclosures at precision_bits, precision_bits // 2, ...
    down to START_BITS, so evaluate(e, 2p) is always contained in evaluate(e, p).

    Raises:
        DomainError: an arccos/sqrt argument cannot be certified inside its domain
        DivisionByZero: a denominator enclosure still contains 0 at the maximal budget
    """
    if precision_bits <= 0:
        raise ValidationError("precision_bits must be positive", {"precision_bits": precision_bits})
    expr = as_expr(expr)
    value = rational_value(expr)
    if value is not None:
        return Enclosure.exact(value, precision_bits)
    settings = get_settings()
    enclosure = _raw_enclosure(expr, precision_bits, settings)
    level = precision_bits // 2
    while level >= settings.START_BITS:
        enclosure = enclosure.intersect(_raw_enclosure(expr, level, settings))
        level //= 2
    return Enclosure(enclosure.lower, enclosure.upper, precision_bits)


def exact_sign(expr: ExprLike) -> Optional[int]:
    """Sign of a rational or quadratic literal decided exactly; None for anything else."""
    expr = as_expr(expr)
    if isinstance(expr, Const):
        return (expr.value > 0) - (expr.value < 0)
    if isinstance(expr, Quadratic):
        p, q, d = expr.p, expr.q, expr.d
        if p >= 0 and q > 0:
            return 1
        if p <= 0 and q < 0:
            return -1
        # mixed signs: compare p^2 with q^2 d (never equal, sqrt(d) is irrational)
        if p > 0:
            return 1 if p * p > q * q * d else -1
        return 1 if q * q * d > p * p else -1
    return None


def _ladder(max_bits: int, settings: Settings) -> List[int]:
    rungs = []
    bits = min(settings.START_BITS, max_bits)
    while bits < max_bits:
        rungs.append(bits)
        bits *= 2
    rungs.append(max_bits)
    return rungs


def certified_sign(expr: ExprLike, max_bits: Optional[int] = None) -> Sign:
    """
    Sign of a nonzero expression, doubling precision from START_BITS up to max_bits.

    Raises PrecisionExhausted when the enclosure still straddles 0 at max_bits;
    exact zeros (rational or otherwise) always end up there.
    """
    expr = as_expr(expr)
    settings = get_settings()
    max_bits = max_bits or settings.MAX_BITS
    known = exact_sign(expr)
    if known is not None:
        if known == 0:
            raise PrecisionExhausted("expression is exactly zero", {"exact_tie": True})
        return Sign(known)
    enclosure = None
    for bits in _ladder(max_bits, settings):
        enclosure = _raw_enclosure(expr, bits, settings)
        sign = enclosure.sign()
        if sign is not None:
            return Sign(sign)
    logger.warning("Sign not certified", extra={"max_bits": max_bits, "enclosure": enclosure.format()})
    raise PrecisionExhausted(
        "enclosure still contains 0 at the last precision rung",
        {"max_bits": max_bits, "enclosure": enclosure.format(), "exact_tie": False},
    )


def certified_compare(lhs: ExprLike, rhs: ExprLike, max_bits: Optional[int] = None) -> Ordering:
    """Strict comparison of two expressions; equal values raise PrecisionExhausted."""
    sign = certified_sign(sub(as_expr(lhs), as_expr(rhs)), max_bits)
    return Ordering.LESS if sign is Sign.NEGATIVE else Ordering.GREATER


def certified_floor(expr: ExprLike, max_bits: Optional[int] = None) -> int:
    """floor(expr), exact for rationals; irrational values are refined until both endpoints agree."""
    expr = as_expr(expr)
    settings = get_settings()
    value = rational_value(expr)
    if value is not None:
        return floor(value)
    max_bits = max_bits or settings.MAX_BITS
    # relative precision must cover the integer part as well
    coarse = _raw_enclosure(expr, settings.START_BITS, settings)
    magnitude = max(abs(coarse.lower), abs(coarse.upper), Fraction(1))
    extra = floor(magnitude).bit_length()
    enclosure = coarse
    for bits in _ladder(max_bits, settings):
        enclosure = _raw_enclosure(expr, bits + extra, settings)
        low, high = enclosure.floor_bounds()
        if low == high:
            return int(low)
    raise PrecisionExhausted(
        "floor not certified: value may be an integer",
        {"max_bits": max_bits, "enclosure": enclosure.format()},
    )
