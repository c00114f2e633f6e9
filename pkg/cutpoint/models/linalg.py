"""
Square matrices and state vectors over ScalarExpr.

Exact (all-rational) operands take a Fraction fast path; anything symbolic is
combined through the folding constructors of `cutpoint.kernel.expressions`
and only evaluated when a predicate needs a certified decision.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from cutpoint.config.settings import get_settings
from cutpoint.errors.exceptions import DimensionMismatchError, PrecisionExhausted, ValidationError
from cutpoint.kernel.certify import Sign, certified_sign, evaluate
from cutpoint.kernel.expressions import (
    ONE,
    ZERO,
    Const,
    ExprLike,
    ScalarExpr,
    add,
    as_expr,
    identically_zero,
    mul,
    neg,
    rational_value,
    sub,
)

Row = Tuple[ScalarExpr, ...]


class VectorKind(str, Enum):
    PROBABILISTIC = "probabilistic"
    QUANTUM = "quantum"


def _rational_grid(rows: Sequence[Sequence[ScalarExpr]]) -> Optional[List[List[Fraction]]]:
    grid = []
    for row in rows:
        values = [rational_value(e) for e in row]
        if any(v is None for v in values):
            return None
        grid.append(values)
    return grid


def _sum(terms: Iterable[ScalarExpr]) -> ScalarExpr:
    total: ScalarExpr = ZERO
    for term in terms:
        total = add(total, term)
    return total


@dataclass(frozen=True, eq=False)
class Matrix:
    entries: Tuple[Row, ...]

    def __post_init__(self):
        rows = tuple(tuple(as_expr(e) for e in row) for row in self.entries)
        n = len(rows)
        if n == 0:
            raise ValidationError("matrix dimension must be at least 1")
        if any(len(row) != n for row in rows):
            raise DimensionMismatchError("matrix must be square", {"rows": n, "columns": [len(r) for r in rows]})
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[ExprLike]]) -> "Matrix":
        return cls(tuple(tuple(row) for row in rows))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @property
    def dimension(self) -> int:
        return len(self.entries)

    @property
    def exact(self) -> bool:
        return _rational_grid(self.entries) is not None

    def entry(self, row: int, col: int) -> ScalarExpr:
        """1-based access, matching the (row, column) notation used for automata."""
        n = self.dimension
        if not (1 <= row <= n and 1 <= col <= n):
            raise DimensionMismatchError("entry index out of range", {"row": row, "col": col, "dimension": n})
        return self.entries[row - 1][col - 1]

    def column(self, col: int) -> Row:
        return tuple(self.entry(row, col) for row in range(1, self.dimension + 1))

    def rational_rows(self) -> List[List[Fraction]]:
        grid = _rational_grid(self.entries)
        if grid is None:
            raise ValidationError("matrix has symbolic entries")
        return grid

    def exact_equals(self, other: "Matrix") -> bool:
        if self.dimension != other.dimension:
            return False
        return self.rational_rows() == other.rational_rows()

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)


@dataclass(frozen=True, eq=False)
class StateVector:
    entries: Row
    kind: VectorKind = VectorKind.PROBABILISTIC

    def __post_init__(self):
        entries = tuple(as_expr(e) for e in self.entries)
        if not entries:
            raise ValidationError("state vector dimension must be at least 1")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "kind", VectorKind(self.kind))

    @classmethod
    def basis(cls, n: int, index: int, kind: VectorKind = VectorKind.PROBABILISTIC) -> "StateVector":
        if not 1 <= index <= n:
            raise DimensionMismatchError("basis index out of range", {"index": index, "dimension": n})
        return cls(tuple(ONE if k == index else ZERO for k in range(1, n + 1)), kind)

    @property
    def dimension(self) -> int:
        return len(self.entries)

    @property
    def exact(self) -> bool:
        return all(rational_value(e) is not None for e in self.entries)

    def __getitem__(self, index: int) -> ScalarExpr:
        """1-based, like Matrix.entry."""
        if not 1 <= index <= self.dimension:
            raise DimensionMismatchError("vector index out of range", {"index": index, "dimension": self.dimension})
        return self.entries[index - 1]

    def total(self) -> ScalarExpr:
        return _sum(self.entries)

    def squared_norm(self) -> ScalarExpr:
        return _sum(mul(e, e) for e in self.entries)

    def validate(self) -> None:
        """Exact vectors must be distributions (probabilistic) or unit vectors (quantum)."""
        if not self.exact:
            return
        values = [rational_value(e) for e in self.entries]
        if self.kind is VectorKind.PROBABILISTIC:
            if any(v < 0 for v in values) or sum(values) != 1:
                raise ValidationError("probabilistic state must be nonnegative and sum to 1")
        elif sum(v * v for v in values) != 1:
            raise ValidationError("quantum state must have unit norm")


def _check_dimensions(a: int, b: int, what: str) -> None:
    if a != b:
        raise DimensionMismatchError(f"{what}: dimensions differ", {"left": a, "right": b})


def mat_vec(m: Matrix, v: StateVector) -> StateVector:
    _check_dimensions(m.dimension, v.dimension, "mat_vec")
    grid = _rational_grid(m.entries)
    values = [rational_value(e) for e in v.entries]
    if grid is not None and all(x is not None for x in values):
        product = (sum(a * b for a, b in zip(row, values)) for row in grid)
        return StateVector(tuple(Const(p) for p in product), v.kind)
    return StateVector(
        tuple(_sum(mul(a, b) for a, b in zip(row, v.entries)) for row in m.entries),
        v.kind,
    )


def mat_mul(left: Matrix, right: Matrix) -> Matrix:
    n = left.dimension
    _check_dimensions(n, right.dimension, "mat_mul")
    a, b = _rational_grid(left.entries), _rational_grid(right.entries)
    if a is not None and b is not None:
        return Matrix(tuple(
            tuple(Const(sum(a[i][k] * b[k][j] for k in range(n))) for j in range(n))
            for i in range(n)
        ))
    return Matrix(tuple(
        tuple(_sum(mul(left.entries[i][k], right.entries[k][j]) for k in range(n)) for j in range(n))
        for i in range(n)
    ))


def mat_add(left: Matrix, right: Matrix) -> Matrix:
    _check_dimensions(left.dimension, right.dimension, "mat_add")
    return Matrix(tuple(
        tuple(add(x, y) for x, y in zip(r1, r2)) for r1, r2 in zip(left.entries, right.entries)
    ))


def mat_scale(factor: ExprLike, m: Matrix) -> Matrix:
    return Matrix(tuple(tuple(mul(factor, e) for e in row) for row in m.entries))


def transpose(m: Matrix) -> Matrix:
    return Matrix(tuple(zip(*m.entries)))


def mat_pow(m: Matrix, k: int) -> Matrix:
    """m^k by square-and-multiply; m^0 is the identity."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise ValidationError("exponent must be a nonnegative integer", {"k": k})
    result = Matrix.identity(m.dimension)
    square = m
    while k:
        if k & 1:
            result = mat_mul(result, square)
        k >>= 1
        if k:
            square = mat_mul(square, square)
    return result


def trace(m: Matrix) -> ScalarExpr:
    return _sum(m.entries[i][i] for i in range(m.dimension))


def is_column_stochastic(m: Matrix, max_bits: Optional[int] = None) -> bool:
    """
    Every entry certifiably >= 0 and every column summing to exactly 1.

    A symbolic column sum that does not fold to the rational 1 is rejected:
    no enclosure can certify an equality.
    """
    for row in m.entries:
        for entry in row:
            value = rational_value(entry)
            if value is not None:
                if value < 0:
                    return False
            elif certified_sign(entry, max_bits) is Sign.NEGATIVE:
                return False
    for col in range(1, m.dimension + 1):
        if rational_value(_sum(m.column(col))) != 1:
            return False
    return True


def is_unitary(m: Matrix, max_bits: Optional[int] = None) -> bool:
    """
    m^T m == I, decided exactly.

    Each entry of m^T m - I must fold to 0 or vanish in the polynomial normal
    form of `identically_zero`. An entry certified nonzero at max_bits means
    not unitary; one that is neither raises PrecisionExhausted.
    """
    gram = mat_mul(transpose(m), m)
    bits = max_bits or get_settings().PRECISION_BITS
    for i, row in enumerate(gram.entries):
        for j, entry in enumerate(row):
            delta = sub(entry, ONE if i == j else ZERO)
            value = rational_value(delta)
            if value is not None:
                if value != 0:
                    return False
                continue
            if identically_zero(delta):
                continue
            enclosure = evaluate(delta, bits)
            if enclosure.excludes(0):
                return False
            raise PrecisionExhausted(
                "cannot certify unitarity",
                {"entry": f"({i + 1}, {j + 1})", "enclosure": enclosure.format()},
            )
    return True


def characteristic_polynomial(m: Matrix) -> Tuple[ScalarExpr, ...]:
    """
    Coefficients of det(tI - m), highest degree first, by Faddeev-LeVerrier.

    For n = 3 the result is (1, c2, c1, c0) with t^3 + c2 t^2 + c1 t + c0.
    """
    n = m.dimension
    identity = Matrix.identity(n)
    coefficients: List[ScalarExpr] = [ONE]
    running = Matrix.identity(n)
    for k in range(1, n + 1):
        product = mat_mul(m, running)
        c = neg(mul(trace(product), Fraction(1, k)))
        coefficients.append(c)
        running = mat_add(product, mat_scale(c, identity))
    return tuple(coefficients)


def poly_eval(coefficients: Sequence[ScalarExpr], t: ExprLike) -> ScalarExpr:
    """Horner evaluation at a real point."""
    value: ScalarExpr = ZERO
    for c in coefficients:
        value = add(mul(value, t), c)
    return value
