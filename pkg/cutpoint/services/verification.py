"""
The claims suite behind `cli.py verify`.

Each claim checks one identity, inequality family or witness construction on a
fixed, deterministic sample and returns a ClaimResult. Claims never raise:
an error inside a claim is recorded as a failure with its message.
"""
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from cutpoint.errors.exceptions import BaseError
from cutpoint.kernel.certify import Ordering, Sign, certified_compare, certified_sign, evaluate
from cutpoint.kernel.digits import IrrationalParam
from cutpoint.kernel.expressions import PI, ExprLike, add, as_expr, cos, div, mul, rational_value, sub
from cutpoint.models.linalg import is_column_stochastic, mat_pow
from cutpoint.models.schemas import ClaimResult
from cutpoint.services.constructions import (
    bin_reverse_oracle,
    closed_form_coeffs,
    closed_form_prob,
    cutpoint_lambda,
    displayed_cube,
    eigen_form_prob,
    fixed_rotation,
    matrix_Bx,
    matrix_Bxalpha,
    primed_closed_form_prob,
    primed_coefficients,
    qfa_prob_oracle,
    qprime_alpha,
    qprime_pfa,
    rabin_alpha_pfa,
    rabin_pfa,
    rotation_qfa,
)
from cutpoint.services.separation import (
    FIXED,
    QUADRANT_TABLE,
    VARIABLE,
    angle_drift_bounds,
    qfa_quadrant_witness,
    rabin_cutpoint_separation,
    scaled_pair_separation,
    unary_pfa_witness,
)
from cutpoint.services.simulation import accept_prob, accept_prob_pfa, accept_prob_qfa, words_up_to
from cutpoint.utils.logging_config import get_logger

logger = get_logger(__name__)

F = Fraction

SCALED_ALPHAS = (F(1, 7), F(1, 3), F(2, 5), F(9, 10))
UNARY_XS = (F(1, 10), F(1, 4), F(1, 2))
WIDE_SAMPLE = tuple(F(k, 40) for k in range(1, 21))
NARROW_SAMPLE = tuple(F(k, 210) for k in range(1, 21))
PRIMED_PAIRS = tuple((F(k, 110), F(1, 2) + F(k, 22)) for k in range(1, 11))
VARIABLE_PAIRS = (
    (F(1, 4), F(1, 2)), (F(1, 10), F(1, 5)), (F(1, 5), F(1, 3)), (F(1, 3), F(1, 2)), (F(1, 8), F(3, 8)),
    (F(1, 20), F(1, 10)), (F(2, 5), F(1, 2)), (F(1, 6), F(1, 4)), (F(3, 10), F(2, 5)), (F(1, 50), F(1, 2)),
    (F(1, 7), F(2, 7)), (F(1, 9), F(4, 9)), (F(1, 12), F(5, 12)), (F(1, 16), F(7, 16)), (F(1, 30), F(1, 15)),
    (F(1, 100), F(1, 50)), (F(1, 4), F(1, 3)), (F(9, 20), F(1, 2)), (F(1, 11), F(3, 11)), (F(2, 9), F(4, 9)),
)
FIXED_PAIRS = (
    (F(1, 100), F(1, 20)), (F(1, 100), F(9, 100)), (F(1, 50), F(1, 20)), (F(1, 20), F(2, 25)), (F(1, 40), F(3, 40)),
    (F(1, 30), F(1, 15)), (F(1, 200), F(1, 100)), (F(3, 100), F(7, 100)), (F(1, 16), F(1, 12)), (F(1, 25), F(2, 25)),
    (F(1, 60), F(1, 11)), (F(2, 100), F(3, 100)), (F(1, 80), F(1, 40)), (F(1, 15), F(1, 11)), (F(7, 100), F(9, 100)),
    (F(1, 150), F(1, 30)), (F(1, 20), F(7, 100)), (F(3, 200), F(1, 25)), (F(1, 12), F(9, 100)), (F(1, 120), F(1, 13)),
)

Checker = Callable[[bool], Tuple[int, List[str]]]
CLAIMS: Dict[str, Checker] = {}


def claim(name: str) -> Callable[[Checker], Checker]:
    def register(checker: Checker) -> Checker:
        CLAIMS[name] = checker
        return checker
    return register


def _sample(values: Tuple, quick: bool, size: int = 3) -> Tuple:
    return values[:size] if quick else values


def _exact(expr) -> Optional[Fraction]:
    return rational_value(expr)


# Exact identities

@claim("rabin-identity")
def check_rabin_identity(quick: bool) -> Tuple[int, List[str]]:
    automaton = rabin_pfa()
    failures = []
    words = words_up_to(automaton.alphabet, 8 if quick else 12)
    for word in words:
        if _exact(accept_prob_pfa(automaton, word)) != bin_reverse_oracle(word):
            failures.append(f"w={word!r}")
    return len(words), failures


@claim("scaled-rabin-identity")
def check_scaled_identity(quick: bool) -> Tuple[int, List[str]]:
    failures = []
    checked = 0
    for alpha in SCALED_ALPHAS:
        automaton = rabin_alpha_pfa(alpha)
        for word in words_up_to(automaton.alphabet, 6 if quick else 10):
            checked += 1
            if _exact(accept_prob_pfa(automaton, word)) != alpha * bin_reverse_oracle(word):
                failures.append(f"alpha={alpha} w={word!r}")
    return checked, failures


@claim("rotation-closed-form")
def check_rotation_closed_form(quick: bool) -> Tuple[int, List[str]]:
    rotation = fixed_rotation()
    automaton = rotation_qfa(rotation)
    failures = []
    top = 16 if quick else 64
    for j in range(top + 1):
        simulated = _exact(accept_prob_qfa(automaton, "0" * j))
        if simulated is None or simulated != _exact(qfa_prob_oracle(rotation, j)):
            failures.append(f"j={j}")
    return top + 1, failures


@claim("unary-closed-form")
def check_unary_closed_form(quick: bool) -> Tuple[int, List[str]]:
    """Closed form, eigenvalue form and matrix power agree; the enclosure at 128 bits is tighter than 2^-100."""
    failures = []
    checked = 0
    top = 20 if quick else 60
    for x in UNARY_XS:
        matrix = matrix_Bx(x)
        for m in range(top + 1):
            checked += 1
            simulated = _exact(mat_pow(matrix, m).entry(3, 1))
            enclosure = evaluate(closed_form_prob(x, m), 128)
            if not enclosure.contains(simulated) or enclosure.width >= F(1, 2 ** 100):
                failures.append(f"closed form x={x} m={m}")
            if _exact(eigen_form_prob(x, m)) != simulated:
                failures.append(f"eigen form x={x} m={m}")
    return checked, failures


@claim("unary-initial-conditions")
def check_initial_conditions(quick: bool) -> Tuple[int, List[str]]:
    failures = []
    xs = _sample(tuple(F(k, 20) for k in range(1, 11)), quick)
    for x in xs:
        for m, expected in ((0, 0), (1, 0), (2, 1)):
            if _exact(eigen_form_prob(x, m)) != expected:
                failures.append(f"x={x} m={m}")
            if not evaluate(closed_form_prob(x, m), 128).contains(expected):
                failures.append(f"closed form x={x} m={m}")
    return 3 * len(xs), failures


@claim("primed-scaling")
def check_primed_scaling(quick: bool) -> Tuple[int, List[str]]:
    failures = []
    checked = 0
    top = 10 if quick else 30
    for x, alpha in _sample(PRIMED_PAIRS, quick):
        scaled, plain = matrix_Bxalpha(x, alpha), matrix_Bx(x)
        coeffs, base = primed_coefficients(x, alpha), closed_form_coeffs(x)
        for name in ("a", "b", "c"):
            if _exact(sub(getattr(coeffs, name), mul(alpha, getattr(base, name)))) != 0:
                failures.append(f"{name}' x={x} alpha={alpha}")
        for m in range(top + 1):
            checked += 1
            if _exact(mat_pow(scaled, m).entry(3, 1)) != alpha * _exact(mat_pow(plain, m).entry(3, 1)):
                failures.append(f"x={x} alpha={alpha} m={m}")
    for x in _sample(NARROW_SAMPLE, quick):
        checked += 1
        if _exact(div(qprime_alpha(x), add(mul(3, x), 1))) != F(1, 2):
            failures.append(f"constant term x={x}")
    return checked, failures


@claim("stochastic-cube")
def check_stochastic_cube(quick: bool) -> Tuple[int, List[str]]:
    failures = []
    xs = _sample(NARROW_SAMPLE, quick)
    for x in xs:
        if not is_column_stochastic(mat_pow(matrix_Bxalpha(x, qprime_alpha(x)), 3)):
            failures.append(f"x={x}")
    return len(xs), failures


@claim("displayed-cube")
def check_displayed_cube(quick: bool) -> Tuple[int, List[str]]:
    x = F(1, 16)
    alpha = qprime_alpha(x)
    cube = mat_pow(matrix_Bxalpha(x, alpha), 3)
    failures = [] if cube.exact_equals(displayed_cube(x, alpha)) else [f"x={x}"]
    simulated = _exact(accept_prob(qprime_pfa(x), "0"))
    if simulated != F(133, 256) or _exact(primed_closed_form_prob(x, 1)) not in (None, simulated):
        failures.append("one-step probability")
    if not evaluate(primed_closed_form_prob(x, 1), 128).contains(F(133, 256)):
        failures.append("one-step closed form")
    return 1, failures


# Interval claims and angle bounds

def _inside(value: ExprLike, lower: ExprLike, upper: ExprLike) -> bool:
    return (
        certified_compare(value, lower) is Ordering.GREATER
        and certified_compare(value, upper) is Ordering.LESS
    )


def interval_claims(x: ExprLike) -> Dict[str, bool]:
    """
    theta_x in (pi/2, 3pi/4] and gamma_x in (pi/2, 11pi/18) for x in (0, 1/2];
    for x <= 1/10 additionally theta_x, gamma_x in (pi/2, 11pi/18).
    """
    x = as_expr(x)
    coeffs = closed_form_coeffs(x)
    half, three_quarters, eleven = div(PI, 2), mul(F(3, 4), PI), mul(F(11, 18), PI)
    if _exact(x) == F(1, 2):
        # theta_{1/2} = 3pi/4 exactly; the closed end is not certifiable by enclosures
        theta_ok = certified_compare(coeffs.theta, half) is Ordering.GREATER
    else:
        theta_ok = _inside(coeffs.theta, half, three_quarters)
    result = {"theta": theta_ok, "gamma": _inside(coeffs.gamma, half, eleven)}
    value = _exact(x)
    small = value <= F(1, 10) if value is not None else certified_compare(x, F(1, 10)) is Ordering.LESS
    if small:
        result["theta_small_x"] = _inside(coeffs.theta, half, eleven)
        result["gamma_small_x"] = result["gamma"]
    return result


@claim("interval-claims")
def check_interval_claims(quick: bool) -> Tuple[int, List[str]]:
    failures = []
    xs = _sample(WIDE_SAMPLE, quick) + _sample(NARROW_SAMPLE, quick)
    for x in xs:
        for name, holds in interval_claims(x).items():
            if not holds:
                failures.append(f"{name} x={x}")
    return len(xs), failures


@claim("drift-bounds")
def check_drift_bounds(quick: bool) -> Tuple[int, List[str]]:
    failures = []
    checked = 0
    for mode, pairs in ((VARIABLE, VARIABLE_PAIRS), (FIXED, FIXED_PAIRS)):
        for x1, x2 in _sample(pairs, quick):
            checked += 1
            bounds = angle_drift_bounds(x1, x2, mode)
            if not bounds.holds or certified_sign(bounds.drift) is not Sign.POSITIVE:
                failures.append(f"{mode} x1={x1} x2={x2}")
    return checked, failures


@claim("lambda-sign")
def check_lambda_sign(quick: bool) -> Tuple[int, List[str]]:
    """f(0^m) - lambda_x has the sign of cos(m theta_x + gamma_x)."""
    failures = []
    xs = (F(1, 10), F(1, 4), F(1, 3), F(1, 2))
    top = 8 if quick else 20
    for x in xs:
        coeffs, lam = closed_form_coeffs(x), cutpoint_lambda(x)
        for m in range(1, top + 1):
            lhs = certified_sign(sub(eigen_form_prob(x, m), lam))
            rhs = certified_sign(cos(add(mul(m, coeffs.theta), coeffs.gamma)))
            if lhs is not rhs:
                failures.append(f"x={x} m={m}")
    return len(xs) * top, failures


# Witness constructions

def quadrant_pair(j: int, prev2: int, prev1: int, alpha_digit: int) -> Tuple[IrrationalParam, IrrationalParam]:
    """Two irrationals in (0, 1/4) agreeing on the first j - 1 digits, ending in prev2 prev1, and differing at j."""
    if j < 5:
        raise ValueError("j must be at least 5 to choose both preceding digits freely")
    head = "00" + ("01" * j)[: j - 5] + f"{prev2}{prev1}"
    return (
        IrrationalParam.with_prefix(head + str(alpha_digit), 2),
        IrrationalParam.with_prefix(head + str(1 - alpha_digit), 3),
    )


@claim("quadrant-table")
def check_quadrant_table(quick: bool) -> Tuple[int, List[str]]:
    failures = []
    checked = 0
    for j in range(5, 6 if quick else 12):
        for prev2 in (0, 1):
            for prev1 in (0, 1):
                for alpha_digit in (1, 0):
                    checked += 1
                    alpha, beta = quadrant_pair(j, prev2, prev1, alpha_digit)
                    quadrant = 1 + 2 * prev2 + prev1
                    expected = QUADRANT_TABLE[quadrant]
                    if alpha_digit == 0:
                        expected = (expected[1], expected[0])
                    certificate = qfa_quadrant_witness(alpha, beta)
                    if (
                        certificate.verdicts != expected
                        or certificate.quadrant.quadrant != quadrant
                        or certificate.unary_length != 2 ** (j - 3)
                    ):
                        failures.append(f"j={j} digits={prev2}{prev1}{alpha_digit}")
    return checked, failures


def _scaled_triples(count: int) -> Iterable[Tuple[Fraction, Fraction, Fraction]]:
    for n in range(1, count + 1):
        lam = F(1, n + 2)
        alpha1 = F(1, 2) + F(1, n + 4)
        yield lam, alpha1, alpha1 + (1 - alpha1) / (n + 1)


@claim("scaled-pair-witnesses")
def check_scaled_pairs(quick: bool) -> Tuple[int, List[str]]:
    failures = []
    count = 5 if quick else 25
    for lam, alpha1, alpha2 in _scaled_triples(count):
        certificate = scaled_pair_separation(lam, alpha1, alpha2)
        if certificate.verdicts != (True, False):
            failures.append(f"lambda={lam} alpha1={alpha1} alpha2={alpha2}")
    for lambda1, lambda2 in ((F(1, 4), F(1, 2)), (F(0), F(1, 3)), (F(5, 8), F(3, 4))):
        count += 1
        if rabin_cutpoint_separation(lambda1, lambda2).verdicts != (True, False):
            failures.append(f"lambda1={lambda1} lambda2={lambda2}")
    return count, failures


@claim("unary-witnesses")
def check_unary_witnesses(quick: bool) -> Tuple[int, List[str]]:
    failures = []
    checked = 0
    for mode, pairs in ((VARIABLE, VARIABLE_PAIRS), (FIXED, FIXED_PAIRS)):
        for x1, x2 in _sample(pairs, quick, 2):
            checked += 1
            certificate = unary_pfa_witness(x1, x2, mode)
            if certificate.verdicts[0] == certificate.verdicts[1]:
                failures.append(f"{mode} x1={x1} x2={x2}")
    return checked, failures


def run_claim(name: str, quick: bool = False) -> ClaimResult:
    checker = CLAIMS[name]
    try:
        checked, failures = checker(quick)
    except BaseError as e:
        logger.warning(f"Claim {name} failed with an error", extra={"error": e.message})
        return ClaimResult(name=name, passed=False, detail=e.message)
    detail = "; ".join(failures[:5])
    if len(failures) > 5:
        detail += f"; ... {len(failures) - 5} more"
    result = ClaimResult(name=name, passed=not failures, checked=checked, detail=detail)
    logger.info("Claim checked", extra={"claim": name, "passed": result.passed, "checked": checked})
    return result


def run_claims(quick: bool = False, names: Optional[Iterable[str]] = None) -> List[ClaimResult]:
    selected = list(names) if names else list(CLAIMS)
    return [run_claim(name, quick) for name in selected]
