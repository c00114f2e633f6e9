"""
Witness finders: for two automata of one family and their cutpoints, find an
input on which the two cutpoint languages provably disagree.

Every finder re-simulates its witness through `cutpoint.services.simulation`
before returning; a disagreement between the predicted and the simulated
verdicts raises WitnessVerificationError.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Optional, Tuple, Union

from cutpoint.config.settings import get_settings
from cutpoint.errors.exceptions import (
    CertificationError,
    DigitBudgetExhausted,
    ParameterRangeError,
    PrecisionExhausted,
    ScanBudgetExhausted,
    WitnessVerificationError,
)
from cutpoint.kernel.certify import Ordering, Sign, certified_compare, certified_floor, certified_sign, evaluate
from cutpoint.kernel.digits import IrrationalParam
from cutpoint.kernel.expressions import (
    PI,
    ExprLike,
    ScalarExpr,
    absolute,
    add,
    as_expr,
    cos,
    div,
    mul,
    rational_value,
    sub,
    to_text,
)
from cutpoint.models.automata import CutpointAcceptor
from cutpoint.models.schemas import ClosedFormCoefficients, DigitContext, QuadrantWitness, WitnessCertificate
from cutpoint.services.constructions import (
    HALF,
    Rotation,
    as_rotation,
    closed_form_coeffs,
    cutpoint_lambda,
    qfa_prob_oracle,
    qprime_pfa,
    rabin_alpha_pfa,
    rabin_pfa,
    rotation_qfa,
    unary_pfa_Bx,
)
from cutpoint.services.simulation import certify_member
from cutpoint.utils.logging_config import get_logger
from cutpoint.utils.validation import require_interval, require_less

logger = get_logger(__name__)

VARIABLE = "variable-cutpoint"
FIXED = "fixed-cutpoint"
MODES = (VARIABLE, FIXED)

# Verdict pair (member_alpha, member_beta) per quadrant when alpha_j = 1, beta_j = 0
QUADRANT_TABLE = {
    1: (False, True),
    2: (True, False),
    3: (False, True),
    4: (True, False),
}


def _budget(value: Optional[int], default: int) -> int:
    return default if value is None else value


def _certificate(
    acceptors: Tuple[CutpointAcceptor, CutpointAcceptor],
    word: str,
    note: str,
    expected: Optional[Tuple[bool, bool]] = None,
    unary: bool = False,
    precision_bits: Optional[int] = None,
    **extra,
) -> WitnessCertificate:
    """Certify both memberships of `word` and package them; mismatches with `expected` are fatal."""
    settings = get_settings()
    bits = precision_bits or settings.PRECISION_BITS
    evidence = [certify_member(acc, word, bits) for acc in acceptors]
    verdicts = (evidence[0].verdict, evidence[1].verdict)
    if expected is not None and verdicts != expected:
        raise WitnessVerificationError(
            "simulated verdicts differ from the predicted ones",
            {"word_length": len(word), "expected": list(expected), "simulated": list(verdicts)},
        )
    if verdicts[0] == verdicts[1]:
        raise WitnessVerificationError("witness does not separate the languages", {"word_length": len(word)})
    precision = max(e.enclosure.precision for e in evidence)
    certificate = WitnessCertificate(
        word=None if unary else word,
        unary_length=len(word) if unary else None,
        automata=(acceptors[0].automaton.name, acceptors[1].automaton.name),
        cutpoints=(acceptors[0].cutpoint, acceptors[1].cutpoint),
        enclosures=(evidence[0].enclosure, evidence[1].enclosure),
        verdicts=verdicts,
        precision=precision,
        note=note,
        **extra,
    )
    logger.info("Witness certified", extra={"note": note, "length": len(word), "verdicts": list(verdicts)})
    return certificate


# Binary PFAs

def find_density_witness(lambda1: ExprLike, lambda2: ExprLike) -> str:
    """
    The shortest binary z (then the one with the smallest value) with lambda1 < bin(reverse(z)) < lambda2.

    Among n-bit words the smallest value above lambda1 is k / 2^n with k = floor(lambda1 * 2^n) + 1,
    so each length needs a single comparison.
    """
    lambda1, lambda2 = as_expr(lambda1), as_expr(lambda2)
    require_interval("lambda1", lambda1, 0, 1, lower_closed=True)
    require_interval("lambda2", lambda2, 0, 1, upper_closed=True)
    require_less("lambda1 < lambda2", lambda1, lambda2)
    settings = get_settings()
    for n in range(1, settings.MAX_BITS + 1):
        k = certified_floor(mul(lambda1, 2 ** n)) + 1
        candidate = Fraction(k, 2 ** n)
        upper = rational_value(lambda2)
        below = candidate < upper if upper is not None else certified_compare(candidate, lambda2) is Ordering.LESS
        if below:
            reversed_word = format(k, f"0{n}b")
            return reversed_word[::-1]
    raise PrecisionExhausted("no dyadic point found between the bounds", {"max_bits": settings.MAX_BITS})


def scaled_pair_separation(lam: ExprLike, alpha1: ExprLike, alpha2: ExprLike) -> WitnessCertificate:
    """
    P_{lam/alpha1} and P_{lam/alpha2} with the common cutpoint lam disagree on any z
    with alpha1 < bin(reverse(z)) < alpha2: the first accepts, the second rejects.
    """
    lam, alpha1, alpha2 = as_expr(lam), as_expr(alpha1), as_expr(alpha2)
    require_interval("lambda", lam, 0, 1)
    require_interval("alpha1", alpha1, 0, 1)
    require_interval("alpha2", alpha2, 0, 1)
    require_less("alpha1 < alpha2", alpha1, alpha2)
    # lam / alpha1 must be a valid scaling parameter
    require_less("lambda < alpha1", lam, alpha1)
    z = find_density_witness(alpha1, alpha2)
    acceptors = (
        CutpointAcceptor.of(rabin_alpha_pfa(div(lam, alpha1)), lam),
        CutpointAcceptor.of(rabin_alpha_pfa(div(lam, alpha2)), lam),
    )
    return _certificate(acceptors, z, "scaled pair: alpha1 < bin(z^r) < alpha2", expected=(True, False))


def rabin_cutpoint_separation(lambda1: ExprLike, lambda2: ExprLike) -> WitnessCertificate:
    """Rabin's automaton with two cutpoints lambda1 < lambda2 in [0, 1) recognizes two different languages."""
    lambda1, lambda2 = as_expr(lambda1), as_expr(lambda2)
    require_interval("lambda2", lambda2, 0, 1)
    z = find_density_witness(lambda1, lambda2)
    automaton = rabin_pfa()
    acceptors = (CutpointAcceptor.of(automaton, lambda1), CutpointAcceptor.of(automaton, lambda2))
    return _certificate(acceptors, z, "two cutpoints: lambda1 < bin(z^r) < lambda2", expected=(True, False))


# Rotation QFAs

def first_diff_digit(alpha: IrrationalParam, beta: IrrationalParam, max_index: Optional[int] = None) -> DigitContext:
    """
    Minimal j with alpha_j != beta_j, found by comparing digit prefixes of doubling length.

    Raises:
        ParameterRangeError: a parameter is not irrational or not in (0, 1/4)
        DigitBudgetExhausted: no difference among the first max_index digits
    """
    max_index = _budget(max_index, get_settings().DIGIT_BUDGET)
    for name, param in (("alpha", alpha), ("beta", beta)):
        param.check_unit_interval()
        if not param.is_irrational:
            raise ParameterRangeError(f"{name} must be irrational", {name: param.label})
        if param.prefix(2) != 0:
            raise ParameterRangeError(f"{name} must lie in (0, 1/4)", {name: param.label})
    n = 2
    while n < max_index:
        n = min(2 * n, max_index)
        difference = alpha.prefix(n) ^ beta.prefix(n)
        if difference:
            j = n - difference.bit_length() + 1
            return DigitContext(
                alpha=alpha,
                beta=beta,
                j=j,
                alpha_prev2=alpha.digit(j - 2),
                alpha_prev1=alpha.digit(j - 1),
                alpha_j=alpha.digit(j),
                beta_j=beta.digit(j),
            )
    raise DigitBudgetExhausted(
        "parameters agree on every inspected digit",
        {"alpha": alpha.label, "beta": beta.label, "max_index": max_index},
    )


def _reduced_angle(param: IrrationalParam, j: int, prev2: int, prev1: int, digit: int) -> Tuple[ScalarExpr, ScalarExpr]:
    """
    For L = 2^(j-3), L * 2*pi*alpha is congruent to (0.a_{j-2} a_{j-1} a_j)_2 * 2*pi + theta',
    with theta' = (pi/4) * frac(2^j alpha).
    """
    fraction = sub(mul(2 ** j, param.as_expr()), param.prefix(j))
    remainder = mul(div(PI, 4), fraction)
    head = 4 * prev2 + 2 * prev1 + digit
    reduced = add(mul(div(PI, 4), head), remainder)
    return reduced, remainder


def _check_remainder(remainder: ScalarExpr, label: str) -> None:
    low = certified_sign(remainder)
    high = certified_compare(remainder, div(PI, 4))
    if low is not Sign.POSITIVE or high is not Ordering.LESS:
        raise CertificationError("remainder angle is not inside (0, pi/4)", {"parameter": label})


def qfa_quadrant_witness(alpha: IrrationalParam, beta: IrrationalParam, max_index: Optional[int] = None) -> WitnessCertificate:
    """
    M_alpha and M_beta with cutpoint 1/2 disagree on 0^L, L = 2^(j-3), j the first differing digit.

    After L steps both states lie in the same quadrant, determined by the digits
    alpha_{j-2} alpha_{j-1}, and digit j decides on which side of the diagonal
    (cos^2 = 1/2) each one lands.
    """
    context = first_diff_digit(alpha, beta, max_index)
    j = context.j
    length = 2 ** (j - 3)
    reduced_a, remainder_a = _reduced_angle(alpha, j, context.alpha_prev2, context.alpha_prev1, context.alpha_j)
    reduced_b, remainder_b = _reduced_angle(beta, j, context.alpha_prev2, context.alpha_prev1, context.beta_j)
    _check_remainder(remainder_a, alpha.label)
    _check_remainder(remainder_b, beta.label)

    quadrant = 1 + 2 * context.alpha_prev2 + context.alpha_prev1
    expected = QUADRANT_TABLE[quadrant]
    if context.alpha_j == 0:
        expected = (expected[1], expected[0])

    # certified cos^2 of the reduced angles on both sides of 1/2
    predicted = tuple(
        certified_compare(mul(cos(angle), cos(angle)), HALF) is Ordering.GREATER
        for angle in (reduced_a, reduced_b)
    )
    if predicted != expected:
        raise WitnessVerificationError(
            "reduced angles disagree with the quadrant table",
            {"quadrant": quadrant, "expected": list(expected), "predicted": list(predicted)},
        )
    witness = QuadrantWitness(
        context=context,
        length=length,
        reduced_alpha=reduced_a,
        reduced_beta=reduced_b,
        remainder_alpha=remainder_a,
        remainder_beta=remainder_b,
        quadrant=quadrant,
        expected=expected,
    )
    acceptors = (
        CutpointAcceptor.of(rotation_qfa(alpha), HALF),
        CutpointAcceptor.of(rotation_qfa(beta), HALF),
    )
    note = f"quadrant {quadrant}: first differing digit j = {j}"
    return _certificate(acceptors, "0" * length, note, expected=expected, unary=True, quadrant=witness)


def qfa_density_witness(
    rotation: Union[Rotation, IrrationalParam],
    lambda1: ExprLike,
    lambda2: ExprLike,
    scan_cap: Optional[int] = None,
) -> int:
    """Smallest j with lambda1 < cos^2(2*pi*j*alpha) < lambda2, certified."""
    rotation = as_rotation(rotation)
    lambda1, lambda2 = as_expr(lambda1), as_expr(lambda2)
    require_less("lambda1 < lambda2", lambda1, lambda2)
    cap = _budget(scan_cap, get_settings().SCAN_CAP)
    for j in range(cap + 1):
        value = qfa_prob_oracle(rotation, j)
        if _strictly_between(value, lambda1, lambda2):
            logger.info("Density witness found", extra={"rotation": rotation.label, "j": j})
            return j
    raise ScanBudgetExhausted("no power of the rotation lands between the bounds", {"scan_cap": cap})


def _strictly_between(value: ScalarExpr, lower: ScalarExpr, upper: ScalarExpr) -> bool:
    exact = [rational_value(e) for e in (value, lower, upper)]
    if all(v is not None for v in exact):
        return exact[1] < exact[0] < exact[2]
    try:
        return (
            certified_compare(value, lower) is Ordering.GREATER
            and certified_compare(value, upper) is Ordering.LESS
        )
    except PrecisionExhausted as exc:
        if exc.details.get("exact_tie"):
            return False
        raise


# Unary PFAs

@dataclass(frozen=True)
class DriftBounds:
    drift: ScalarExpr
    gamma_gap: ScalarExpr
    holds: bool


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ParameterRangeError("unknown separation mode", {"mode": mode, "modes": list(MODES)})


def _pair_coefficients(x1: ScalarExpr, x2: ScalarExpr) -> Tuple[ClosedFormCoefficients, ClosedFormCoefficients]:
    first = closed_form_coeffs(x1)
    v1, v2 = rational_value(x1), rational_value(x2)
    if v1 is not None and v1 == v2:
        return first, first
    return first, closed_form_coeffs(x2)


def _check_pair_range(x1: ScalarExpr, x2: ScalarExpr, mode: str) -> None:
    upper = Fraction(1, 2) if mode == VARIABLE else Fraction(1, 10)
    closed = mode == VARIABLE
    require_interval("x1", x1, 0, upper, upper_closed=closed)
    require_interval("x2", x2, 0, upper, upper_closed=closed)


def angle_drift_bounds(x1: ExprLike, x2: ExprLike, mode: str = VARIABLE) -> DriftBounds:
    """
    drift = k (theta_{x2} - theta_{x1}) with k = 1 (variable cutpoint) or 3 (fixed cutpoint),
    and gamma_gap = gamma_{x2} - gamma_{x1}.

    `holds` certifies drift < pi/4 and |gamma_gap| < pi/9 (variable), or
    drift < pi/3 and drift + gamma_gap < 4 pi/9 (fixed).
    """
    _check_mode(mode)
    x1, x2 = as_expr(x1), as_expr(x2)
    _check_pair_range(x1, x2, mode)
    c1, c2 = _pair_coefficients(x1, x2)
    factor = 1 if mode == VARIABLE else 3
    drift = mul(factor, sub(c2.theta, c1.theta))
    gap = sub(c2.gamma, c1.gamma)
    if mode == VARIABLE:
        checks = ((drift, div(PI, 4)), (absolute(gap), div(PI, 9)))
    else:
        checks = ((drift, div(PI, 3)), (add(drift, gap), mul(Fraction(4, 9), PI)))
    holds = all(certified_compare(value, bound) is Ordering.LESS for value, bound in checks)
    return DriftBounds(drift, gap, holds)


class _LinearScan:
    """
    Certified sign of m * drift + gap - target for successive m, using Fraction
    enclosures of drift, gap and target that are tightened only when needed.
    """

    def __init__(self, drift: ScalarExpr, gap: ScalarExpr, target: ScalarExpr, max_bits: int):
        self.exprs = (drift, gap, target)
        self.max_bits = max_bits
        self.bits = get_settings().START_BITS * 2
        self._refresh()

    def _refresh(self) -> None:
        self.drift, self.gap, self.target = (evaluate(e, self.bits) for e in self.exprs)

    def sign(self, m: int) -> int:
        while True:
            lower = m * self.drift.lower + self.gap.lower - self.target.upper
            upper = m * self.drift.upper + self.gap.upper - self.target.lower
            if lower > 0:
                return 1
            if upper < 0:
                return -1
            if self.bits >= self.max_bits:
                raise PrecisionExhausted(
                    "bracket condition undecided at the last precision rung",
                    {"m": m, "max_bits": self.max_bits},
                )
            self.bits = min(2 * self.bits, self.max_bits)
            self._refresh()


def _opposite_cos_signs(c1: ClosedFormCoefficients, c2: ClosedFormCoefficients, k: int, max_bits: int) -> Optional[Tuple[Sign, Sign]]:
    try:
        signs = tuple(certified_sign(cos(add(mul(k, c.theta), c.gamma)), max_bits) for c in (c1, c2))
    except PrecisionExhausted:
        return None
    return signs if signs[0] is not signs[1] else None


def unary_pfa_witness(
    x1: ExprLike,
    x2: ExprLike,
    mode: str = VARIABLE,
    scan_cap: Optional[int] = None,
    max_bits: Optional[int] = None,
) -> WitnessCertificate:
    """
    Separate Q_{x1} and Q_{x2} (cutpoints lambda_{x1}, lambda_{x2}) or Q'_{x1} and Q'_{x2} (cutpoint 1/2).

    Scans m = 0, 1, ... for the first m with
    m * drift + gap <= pi < (m+1) * drift + gap < 2 pi and tries the length m + 1.
    The bracket bounds the gap between the two cosine arguments, but does not
    by itself force opposite signs; when the signs at m + 1 are not certified
    opposite, the lengths 0, 1, 2, ... are scanned for the first one that is.
    """
    _check_mode(mode)
    x1, x2 = as_expr(x1), as_expr(x2)
    _check_pair_range(x1, x2, mode)
    require_less("x1 < x2", x1, x2)
    settings = get_settings()
    cap = _budget(scan_cap, settings.SCAN_CAP)
    bits = _budget(max_bits, settings.MAX_BITS)

    bounds = angle_drift_bounds(x1, x2, mode)
    if not bounds.holds:
        raise CertificationError("angle drift bounds do not hold", {"x1": to_text(x1), "x2": to_text(x2), "mode": mode})
    if certified_sign(bounds.drift, bits) is not Sign.POSITIVE:
        raise CertificationError("theta is not increasing between x1 and x2", {"x1": to_text(x1), "x2": to_text(x2)})
    c1, c2 = _pair_coefficients(x1, x2)
    factor = 1 if mode == VARIABLE else 3

    m = _bracket(bounds, cap, bits)
    length = m + 1
    note = f"{mode}: bracket m = {m}, length m + 1"
    signs = _opposite_cos_signs(c1, c2, factor * length, bits)
    if signs is None:
        logger.warning("Bracket length does not give opposite signs, scanning lengths", extra={"m": m})
        length, signs = _scan_lengths(c1, c2, factor, cap, bits)
        note = f"{mode}: bracket m = {m}; first length with opposite cosine signs"

    if mode == VARIABLE:
        acceptors = (
            CutpointAcceptor.of(unary_pfa_Bx(x1), cutpoint_lambda(x1)),
            CutpointAcceptor.of(unary_pfa_Bx(x2), cutpoint_lambda(x2)),
        )
    else:
        acceptors = (CutpointAcceptor.of(qprime_pfa(x1), HALF), CutpointAcceptor.of(qprime_pfa(x2), HALF))
    expected = (signs[0] is Sign.POSITIVE, signs[1] is Sign.POSITIVE)
    return _certificate(acceptors, "0" * length, note, expected=expected, unary=True, bracket_m=m)


def _bracket(bounds: DriftBounds, cap: int, max_bits: int) -> int:
    """First m with (m+1) * drift + gap > pi; then m * drift + gap <= pi and (m+1) * drift + gap < 2 pi."""
    scan = _LinearScan(bounds.drift, bounds.gamma_gap, PI, max_bits)
    # drift > 0, so the crossing happens by ceil((pi - gap) / drift)
    stop = min(cap, ceil(Fraction(2) * scan.target.upper / scan.drift.lower) + 1)
    for m in range(stop + 1):
        if scan.sign(m + 1) > 0:
            upper = _LinearScan(bounds.drift, bounds.gamma_gap, mul(2, PI), max_bits)
            if upper.sign(m + 1) >= 0:
                raise CertificationError("bracket overshoots 2 pi", {"m": m})
            return m
    raise ScanBudgetExhausted("bracket condition not met within the scan bound", {"scan_cap": cap, "stop": stop})


def _scan_lengths(c1, c2, factor: int, cap: int, max_bits: int) -> Tuple[int, Tuple[Sign, Sign]]:
    for length in range(cap + 1):
        signs = _opposite_cos_signs(c1, c2, factor * length, max_bits)
        if signs is not None:
            return length, signs
    raise ScanBudgetExhausted("no length with opposite cosine signs", {"scan_cap": cap})
