"""
Builders for the automaton families and their closed-form acceptance probabilities.

Families:
    rabin           2-state binary PFA with f(w) = bin(reverse(w))
    rabin-alpha     the same automaton scaled by alpha: f(w) = alpha * bin(reverse(w))
    rotation        2-state unary QFA rotating by 2*pi*alpha: f(0^j) = cos^2(2*pi*j*alpha)
    bx              3-state unary PFA B_x with f(0^m) = a + 2|b + ci| x^(m/2) cos(m*theta + gamma)
    qprime          3-state unary PFA whose matrix is the cube of B_{x,alpha}, alpha = (3x+1)/2

Closed forms are returned as ScalarExprs and must agree with matrix simulation.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Tuple, Union

from cutpoint.config.settings import get_settings
from cutpoint.errors.exceptions import ValidationError
from cutpoint.kernel.certify import evaluate
from cutpoint.kernel.digits import IrrationalParam, digit_stream_from_expr
from cutpoint.kernel.expressions import (
    ONE,
    PI,
    ZERO,
    Const,
    ExprLike,
    ScalarExpr,
    acos,
    add,
    as_expr,
    cos,
    div,
    mul,
    neg,
    power,
    rational_value,
    sin,
    sqrt,
    sub,
    to_text,
)
from cutpoint.models.automata import PFA, QFA
from cutpoint.models.linalg import Matrix, mat_pow
from cutpoint.models.schemas import ClosedFormCoefficients
from cutpoint.utils.logging_config import get_logger
from cutpoint.utils.validation import is_binary_word, require_interval

logger = get_logger(__name__)

BINARY = ("0", "1")
UNARY = ("0",)
HALF = Const(Fraction(1, 2))

Pair = Tuple[ScalarExpr, ScalarExpr]


# Rabin's automaton and its scaled version

def rabin_pfa() -> PFA:
    a0 = Matrix.from_rows([[1, Fraction(1, 2)], [0, Fraction(1, 2)]])
    a1 = Matrix.from_rows([[Fraction(1, 2), 0], [Fraction(1, 2), 1]])
    return PFA(2, BINARY, {"0": a0, "1": a1}, initial=1, accepting={2}, name="pfa rabin")


def rabin_alpha_pfa(alpha: ExprLike) -> PFA:
    """Rabin's automaton with A_1 replaced by [[1 - a/2, (1 - a)/2], [a/2, (1 + a)/2]]; alpha in (0, 1]."""
    alpha = as_expr(alpha)
    require_interval("alpha", alpha, 0, 1, upper_closed=True)
    a0 = Matrix.from_rows([[1, Fraction(1, 2)], [0, Fraction(1, 2)]])
    a1 = Matrix.from_rows([
        [sub(1, mul(alpha, HALF)), mul(sub(1, alpha), HALF)],
        [mul(alpha, HALF), mul(add(1, alpha), HALF)],
    ])
    return PFA(2, BINARY, {"0": a0, "1": a1}, initial=1, accepting={2}, name=f"pfa rabin-alpha {to_text(alpha)}")


def bin_reverse_oracle(word: str) -> Fraction:
    """bin(reverse(word)) = sum_k word[len - k] * 2^-k; the empty word gives 0."""
    if not is_binary_word(word):
        raise ValidationError("binary word expected", {"word": word})
    value = Fraction(0)
    for k, symbol in enumerate(reversed(word), start=1):
        if symbol == "1":
            value += Fraction(1, 2 ** k)
    return value


# Rotation QFAs

def _pair_mul(left: Pair, right: Pair) -> Pair:
    (a, b), (c, d) = left, right
    return sub(mul(a, c), mul(b, d)), add(mul(a, d), mul(b, c))


def _pair_pow(base: Pair, k: int) -> Pair:
    result: Pair = (ONE, ZERO)
    square = base
    while k:
        if k & 1:
            result = _pair_mul(result, square)
        k >>= 1
        if k:
            square = _pair_mul(square, square)
    return result


@dataclass(frozen=True, eq=False)
class Rotation:
    """A plane rotation by 2*pi*turns, stored as its (cos, sin) pair."""

    cos: ScalarExpr
    sin: ScalarExpr
    turns: IrrationalParam
    label: str

    @property
    def exact(self) -> bool:
        return rational_value(self.cos) is not None and rational_value(self.sin) is not None

    @property
    def angle(self) -> ScalarExpr:
        return mul(mul(2, PI), self.turns.as_expr())

    def matrix(self) -> Matrix:
        return Matrix.from_rows([[self.cos, neg(self.sin)], [self.sin, self.cos]])

    def multiple(self, j: int) -> Pair:
        """(cos, sin) of j times the rotation angle; exact rotations use the angle-sum recurrence."""
        if j < 0:
            raise ValidationError("rotation multiple must be nonnegative", {"j": j})
        if self.exact:
            return _pair_pow((self.cos, self.sin), j)
        if j == 0:
            return ONE, ZERO
        scaled = mul(j, self.angle)
        return cos(scaled), sin(scaled)


def rotation_from_param(alpha: IrrationalParam) -> Rotation:
    alpha.check_unit_interval()
    angle = mul(mul(2, PI), alpha.as_expr())
    return Rotation(cos(angle), sin(angle), alpha, alpha.label)


@lru_cache(maxsize=1)
def fixed_rotation() -> Rotation:
    """The rotation with cos = 3/5 and sin = 4/5; its turn count arccos(3/5)/(2*pi) is irrational."""
    turns = digit_stream_from_expr(
        div(acos(Fraction(3, 5)), mul(2, PI)),
        label="acos(3/5)/(2*pi)",
        asserted_irrational=True,
    )
    return Rotation(Const(Fraction(3, 5)), Const(Fraction(4, 5)), turns, "fixed")


def as_rotation(rotation: Union[Rotation, IrrationalParam]) -> Rotation:
    if isinstance(rotation, Rotation):
        return rotation
    return rotation_from_param(rotation)


def rotation_qfa(rotation: Union[Rotation, IrrationalParam]) -> QFA:
    rotation = as_rotation(rotation)
    return QFA(2, UNARY, {"0": rotation.matrix()}, initial=1, accepting={1}, name=f"qfa rotation {rotation.label}")


def qfa_prob_oracle(rotation: Union[Rotation, IrrationalParam], j: int) -> ScalarExpr:
    """cos^2(j * 2*pi*alpha)."""
    c, _ = as_rotation(rotation).multiple(j)
    return mul(c, c)


# The unary family B_x

def _check_bx_range(x: ScalarExpr) -> None:
    require_interval("x", x, 0, Fraction(1, 2), upper_closed=True)


def matrix_Bx(x: ExprLike) -> Matrix:
    x = as_expr(x)
    return Matrix.from_rows([
        [0, 0, x],
        [1, 0, x],
        [0, 1, sub(1, mul(2, x))],
    ])


def unary_pfa_Bx(x: ExprLike) -> PFA:
    x = as_expr(x)
    _check_bx_range(x)
    return PFA(3, UNARY, {"0": matrix_Bx(x)}, initial=1, accepting={3}, name=f"pfa bx {to_text(x)}")


def closed_form_coeffs(x: ExprLike) -> ClosedFormCoefficients:
    x = as_expr(x)
    _check_bx_range(x)
    return _coefficients(x, ONE)


def _coefficients(x: ScalarExpr, scale: ScalarExpr) -> ClosedFormCoefficients:
    imag = sqrt(sub(x, mul(x, x)))
    a = div(1, add(mul(3, x), 1))
    b = neg(div(1, add(mul(6, x), 2)))
    c = div(add(x, 1), mul(add(mul(6, x), 2), imag))
    amplitude = sqrt(add(mul(b, b), mul(c, c)))
    return ClosedFormCoefficients(
        x=x,
        scale=scale,
        a=mul(scale, a),
        b=mul(scale, b),
        c=mul(scale, c),
        amplitude=mul(scale, amplitude),
        theta=acos(neg(sqrt(x))),
        gamma=acos(div(b, amplitude)),
        eigen_real=neg(x),
        eigen_imag=imag,
    )


def _phase_cos(coeffs: ClosedFormCoefficients, k: int) -> ScalarExpr:
    if k == 0:
        # cos(gamma) = b / |b + ci|
        return div(coeffs.b, coeffs.amplitude)
    return cos(add(mul(k, coeffs.theta), coeffs.gamma))


def closed_form_prob(x: ExprLike, m: int) -> ScalarExpr:
    """a + 2 sqrt(b^2 + c^2) x^(m/2) cos(m*theta_x + gamma_x)."""
    coeffs = closed_form_coeffs(x)
    magnitude = power(sqrt(coeffs.x), m)
    return add(coeffs.a, mul(mul(2, mul(coeffs.amplitude, magnitude)), _phase_cos(coeffs, m)))


def eigen_form_prob(x: ExprLike, m: int) -> ScalarExpr:
    """
    a + (b + ci) r2^m + (b - ci) r3^m = a + 2 Re((b + ci) r2^m).

    Free of transcendental functions, so rational x gives an exact rational.
    """
    coeffs = closed_form_coeffs(x)
    r2 = (coeffs.eigen_real, coeffs.eigen_imag)
    real, _ = _pair_mul((coeffs.b, coeffs.c), _pair_pow(r2, m))
    return add(coeffs.a, mul(2, real))


def cutpoint_lambda(x: ExprLike) -> ScalarExpr:
    x = as_expr(x)
    _check_bx_range(x)
    return div(1, add(mul(3, x), 1))


def eigenvalues_Bx(x: ExprLike) -> Tuple[Pair, Pair, Pair]:
    """r1 = 1, r2 = -x + sqrt(x - x^2) i, r3 = its conjugate, as (real, imaginary) pairs."""
    x = as_expr(x)
    _check_bx_range(x)
    imag = sqrt(sub(x, mul(x, x)))
    return (ONE, ZERO), (neg(x), imag), (neg(x), neg(imag))


def poly_eval_complex(coefficients: Sequence[ScalarExpr], point: Pair) -> Pair:
    """Horner evaluation of a real polynomial at a complex point given as a pair."""
    value: Pair = (ZERO, ZERO)
    for c in coefficients:
        real, imag = _pair_mul(value, point)
        value = (add(real, c), imag)
    return value


# The primed family

def _check_primed_range(x: ScalarExpr) -> None:
    require_interval("x", x, 0, Fraction(1, 10))


def matrix_Bxalpha(x: ExprLike, alpha: ExprLike) -> Matrix:
    """B_{x,alpha}; not stochastic in general, but its bottom row and eigenvalues match B_x."""
    x, alpha = as_expr(x), as_expr(alpha)
    _check_primed_range(x)
    require_interval("alpha", alpha, Fraction(1, 2), 1, upper_closed=True)
    one_minus = sub(1, alpha)
    return Matrix.from_rows([
        [one_minus, one_minus, add(x, one_minus)],
        [alpha, sub(alpha, 1), sub(add(alpha, x), 1)],
        [0, 1, sub(1, mul(2, x))],
    ])


def displayed_cube(x: ExprLike, alpha: ExprLike) -> Matrix:
    """B_{x,alpha}^3 written out entry by entry, as a polynomial matrix in x and alpha."""
    x, a = as_expr(x), as_expr(alpha)
    ax = mul(a, x)
    x2, x3 = power(x, 2), power(x, 3)

    def poly(*terms: ExprLike) -> ScalarExpr:
        total = ZERO
        for term in terms:
            total = add(total, term)
        return total

    return Matrix.from_rows([
        [
            poly(1, neg(a), ax),
            poly(1, neg(a), ax, mul(-2, x2)),
            poly(1, ax, neg(a), mul(-3, x2), mul(4, x3)),
        ],
        [
            ax,
            poly(ax, x, mul(-2, x2)),
            poly(x, ax, mul(-5, x2), mul(4, x3)),
        ],
        [
            poly(a, mul(-2, ax)),
            poly(a, mul(-2, ax), neg(x), mul(4, x2)),
            poly(a, mul(-2, ax), neg(x), mul(8, x2), mul(-8, x3)),
        ],
    ])


def qprime_alpha(x: ExprLike) -> ScalarExpr:
    return div(add(mul(3, as_expr(x)), 1), 2)


def _cubes_agree(computed: Matrix, displayed: Matrix) -> bool:
    bits = get_settings().PRECISION_BITS
    for row_c, row_d in zip(computed.entries, displayed.entries):
        for c, d in zip(row_c, row_d):
            delta = sub(c, d)
            value = rational_value(delta)
            if value is not None:
                if value != 0:
                    return False
            elif evaluate(delta, bits).excludes(0):
                return False
    return True


def qprime_pfa(x: ExprLike) -> PFA:
    """Q'_x: the unary PFA with matrix B_{x,alpha}^3, alpha = (3x+1)/2, initial state 1, accepting {3}."""
    x = as_expr(x)
    _check_primed_range(x)
    alpha = qprime_alpha(x)
    cube = mat_pow(matrix_Bxalpha(x, alpha), 3)
    if not _cubes_agree(cube, displayed_cube(x, alpha)):
        logger.error("Computed cube differs from its polynomial form", extra={"x": to_text(x)})
        raise ValidationError("B_{x,alpha}^3 does not match its polynomial form", {"x": to_text(x)})
    return PFA(3, UNARY, {"0": cube}, initial=1, accepting={3}, name=f"pfa qprime {to_text(x)}")


def primed_coefficients(x: ExprLike, alpha: ExprLike) -> ClosedFormCoefficients:
    """(a', b', c') = alpha * (a, b, c); theta and gamma are those of B_x."""
    x, alpha = as_expr(x), as_expr(alpha)
    _check_primed_range(x)
    require_interval("alpha", alpha, Fraction(1, 2), 1, upper_closed=True)
    return _coefficients(x, alpha)


def primed_closed_form_prob(x: ExprLike, m: int) -> ScalarExpr:
    """f_{Q'_x}(0^m) = 1/2 + 2 alpha sqrt(b^2 + c^2) x^(3m/2) cos(3m*theta_x + gamma_x)."""
    x = as_expr(x)
    coeffs = primed_coefficients(x, qprime_alpha(x))
    magnitude = power(sqrt(x), 3 * m)
    # alpha / (3x + 1) is 1/2 for alpha = (3x + 1)/2
    return add(HALF, mul(mul(2, mul(coeffs.amplitude, magnitude)), _phase_cos(coeffs, 3 * m)))
