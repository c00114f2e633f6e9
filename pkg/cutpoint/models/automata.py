from dataclasses import dataclass, field
from typing import FrozenSet, Mapping, Tuple, Union

from cutpoint.errors.exceptions import AlphabetError, DimensionMismatchError, ParameterRangeError, ValidationError
from cutpoint.kernel.certify import Sign, certified_sign
from cutpoint.kernel.expressions import ExprLike, ScalarExpr, as_expr, rational_value, sub, to_text
from cutpoint.models.linalg import Matrix, StateVector, VectorKind, is_column_stochastic, is_unitary
from cutpoint.utils.validation import ValidationErrorType, ValidationResult


@dataclass(frozen=True, eq=False)
class FiniteAutomaton:
    """
    Shared record of PFAs and QFAs: n states numbered 1..n, one n x n matrix
    per alphabet symbol, an initial state and a set of accepting states.
    """

    n: int
    alphabet: Tuple[str, ...]
    matrices: Mapping[str, Matrix]
    initial: int = 1
    accepting: FrozenSet[int] = field(default_factory=frozenset)
    allow_empty_accepting: bool = False
    name: str = ""

    kind = "automaton"
    vector_kind = VectorKind.PROBABILISTIC

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "matrices", dict(self.matrices))
        if self.n < 1:
            raise ValidationError("automaton needs at least one state", {"n": self.n})
        if not self.alphabet or len(set(self.alphabet)) != len(self.alphabet):
            raise AlphabetError("alphabet must be a nonempty list of distinct symbols", {"alphabet": self.alphabet})
        if any(len(symbol) != 1 for symbol in self.alphabet):
            raise AlphabetError("alphabet symbols must be single characters", {"alphabet": self.alphabet})
        if set(self.matrices) != set(self.alphabet):
            raise AlphabetError(
                "exactly one matrix per alphabet symbol is required",
                {"alphabet": self.alphabet, "matrices": sorted(self.matrices)},
            )
        if not 1 <= self.initial <= self.n:
            raise ValidationError("initial state out of range", {"initial": self.initial, "n": self.n})
        if not self.accepting and not self.allow_empty_accepting:
            raise ValidationError("accepting set is empty")
        if any(not 1 <= s <= self.n for s in self.accepting):
            raise ValidationError("accepting state out of range", {"accepting": sorted(self.accepting)})
        for symbol, matrix in self.matrices.items():
            if matrix.dimension != self.n:
                raise DimensionMismatchError(
                    "transition matrix dimension differs from state count",
                    {"symbol": symbol, "dimension": matrix.dimension, "n": self.n},
                )
            self._check_matrix(symbol, matrix)

    def _check_matrix(self, symbol: str, matrix: Matrix) -> None:
        raise NotImplementedError

    @property
    def exact(self) -> bool:
        return all(m.exact for m in self.matrices.values())

    @property
    def is_unary(self) -> bool:
        return len(self.alphabet) == 1

    def initial_vector(self) -> StateVector:
        return StateVector.basis(self.n, self.initial, self.vector_kind)

    def check_word(self, word: str) -> None:
        unknown = sorted(set(word) - set(self.alphabet))
        if unknown:
            raise AlphabetError(
                "word contains symbols outside the alphabet",
                {"symbols": unknown, "alphabet": "".join(self.alphabet)},
            )

    def matrix(self, symbol: str) -> Matrix:
        self.check_word(symbol)
        return self.matrices[symbol]


@dataclass(frozen=True, eq=False)
class PFA(FiniteAutomaton):
    kind = "pfa"
    vector_kind = VectorKind.PROBABILISTIC

    def _check_matrix(self, symbol: str, matrix: Matrix) -> None:
        if not is_column_stochastic(matrix):
            result = ValidationResult()
            result.add_error(symbol, ValidationErrorType.NOT_STOCHASTIC, f"matrix for {symbol!r} is not column-stochastic")
            result.raise_if_invalid("PFA transition matrix is not column-stochastic", ValidationError)


@dataclass(frozen=True, eq=False)
class QFA(FiniteAutomaton):
    """Measure-once QFA with real amplitudes."""

    kind = "qfa"
    vector_kind = VectorKind.QUANTUM

    def _check_matrix(self, symbol: str, matrix: Matrix) -> None:
        if not is_unitary(matrix):
            result = ValidationResult()
            result.add_error(symbol, ValidationErrorType.NOT_UNITARY, f"matrix for {symbol!r} is not unitary")
            result.raise_if_invalid("QFA transition matrix is not unitary", ValidationError)


Automaton = Union[PFA, QFA]


@dataclass(frozen=True, eq=False)
class CutpointAcceptor:
    """An automaton with a cutpoint; the language is {w : prob(w) > cutpoint}."""

    automaton: Automaton
    cutpoint: ScalarExpr

    def __post_init__(self):
        cutpoint = as_expr(self.cutpoint)
        object.__setattr__(self, "cutpoint", cutpoint)
        value = rational_value(cutpoint)
        if value is not None:
            in_range = 0 <= value < 1
        else:
            in_range = (
                certified_sign(cutpoint) is Sign.POSITIVE
                and certified_sign(sub(1, cutpoint)) is Sign.POSITIVE
            )
        if not in_range:
            raise ParameterRangeError("cutpoint must lie in [0, 1)", {"cutpoint": to_text(cutpoint)})

    @classmethod
    def of(cls, automaton: Automaton, cutpoint: ExprLike) -> "CutpointAcceptor":
        return cls(automaton, as_expr(cutpoint))
