"""
Run semantics of PFAs and measure-once QFAs, and cutpoint membership.

Words are read left to right; the matrix of the leftmost symbol is applied
first. Runs of a repeated symbol are collapsed into one matrix power so that
long unary inputs cost O(log length) matrix products.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import groupby, product
from typing import List, Optional, Sequence

from cutpoint.config.settings import get_settings
from cutpoint.errors.exceptions import PrecisionExhausted, ValidationError
from cutpoint.kernel.certify import Ordering, certified_compare, evaluate
from cutpoint.kernel.enclosure import Enclosure
from cutpoint.kernel.expressions import ScalarExpr, add, mul, ZERO, to_text
from cutpoint.models.automata import PFA, QFA, Automaton, CutpointAcceptor
from cutpoint.models.linalg import StateVector, mat_pow, mat_vec
from cutpoint.utils.logging_config import get_logger

logger = get_logger(__name__)

# Runs shorter than this are applied symbol by symbol
_POWER_THRESHOLD = 4


def final_state(automaton: Automaton, word: str) -> StateVector:
    """The state vector after reading `word`; the initial vector for the empty word."""
    automaton.check_word(word)
    state = automaton.initial_vector()
    for symbol, run in groupby(word):
        count = sum(1 for _ in run)
        matrix = automaton.matrices[symbol]
        if count < _POWER_THRESHOLD:
            for _ in range(count):
                state = mat_vec(matrix, state)
        else:
            state = mat_vec(mat_pow(matrix, count), state)
    return state


def accept_prob_pfa(p: PFA, word: str) -> ScalarExpr:
    if not isinstance(p, PFA):
        raise ValidationError("accept_prob_pfa expects a PFA", {"kind": getattr(p, "kind", type(p).__name__)})
    state = final_state(p, word)
    total: ScalarExpr = ZERO
    for index in sorted(p.accepting):
        total = add(total, state[index])
    return total


def accept_prob_qfa(q: QFA, word: str) -> ScalarExpr:
    if not isinstance(q, QFA):
        raise ValidationError("accept_prob_qfa expects a QFA", {"kind": getattr(q, "kind", type(q).__name__)})
    state = final_state(q, word)
    total: ScalarExpr = ZERO
    for index in sorted(q.accepting):
        amplitude = state[index]
        total = add(total, mul(amplitude, amplitude))
    return total


def accept_prob(automaton: Automaton, word: str) -> ScalarExpr:
    if isinstance(automaton, QFA):
        return accept_prob_qfa(automaton, word)
    return accept_prob_pfa(automaton, word)


def member(acc: CutpointAcceptor, word: str, max_bits: Optional[int] = None) -> bool:
    """
    True iff the acceptance probability of `word` is strictly greater than the cutpoint.

    Raises:
        PrecisionExhausted: the probability equals the cutpoint, or the budget
            was too small to separate them
    """
    probability = accept_prob(acc.automaton, word)
    try:
        return certified_compare(probability, acc.cutpoint, max_bits) is Ordering.GREATER
    except PrecisionExhausted as exc:
        details = {**exc.details, "word": word, "cutpoint": to_text(acc.cutpoint)}
        if exc.details.get("exact_tie"):
            raise PrecisionExhausted("probability equals cutpoint", details) from exc
        raise PrecisionExhausted("probability not separated from cutpoint", details) from exc


@dataclass(frozen=True)
class MembershipEvidence:
    word: str
    probability: ScalarExpr
    enclosure: Enclosure
    verdict: bool


def certify_member(
    acc: CutpointAcceptor,
    word: str,
    precision_bits: Optional[int] = None,
    max_bits: Optional[int] = None,
) -> MembershipEvidence:
    """Membership together with a probability enclosure that excludes the cutpoint."""
    settings = get_settings()
    bits = precision_bits or settings.PRECISION_BITS
    limit = max(max_bits or settings.MAX_BITS, bits)
    verdict = member(acc, word, limit)
    probability = accept_prob(acc.automaton, word)
    while True:
        enclosure = evaluate(probability, bits)
        bound = evaluate(acc.cutpoint, bits)
        if enclosure.lower > bound.upper or enclosure.upper < bound.lower:
            return MembershipEvidence(word, probability, enclosure, verdict)
        if bits >= limit:
            raise PrecisionExhausted(
                "probability enclosure does not exclude the cutpoint",
                {"word": word, "bits": bits, "enclosure": enclosure.format()},
            )
        bits = min(2 * bits, limit)


def member_batch(acc: CutpointAcceptor, words: Sequence[str], max_bits: Optional[int] = None) -> List[bool]:
    """Membership for many words on a thread pool; results follow the input order."""
    settings = get_settings()
    with ThreadPoolExecutor(max_workers=settings.MAX_WORKERS) as pool:
        return list(pool.map(lambda w: member(acc, w, max_bits), words))


def words_up_to(alphabet: Sequence[str], max_length: int) -> List[str]:
    """All words of length <= max_length, by length and then in alphabet order."""
    words = [""]
    for length in range(1, max_length + 1):
        words.extend("".join(letters) for letters in product(alphabet, repeat=length))
    return words


def language_slice(acc: CutpointAcceptor, max_length: int, max_bits: Optional[int] = None) -> List[str]:
    """Members of the cutpoint language with length <= max_length."""
    if max_length < 0:
        raise ValidationError("max_length must be nonnegative", {"max_length": max_length})
    words = words_up_to(acc.automaton.alphabet, max_length)
    verdicts = member_batch(acc, words, max_bits)
    members = [w for w, accepted in zip(words, verdicts) if accepted]
    logger.info("Language slice computed", extra={"max_length": max_length, "members": len(members)})
    return members
