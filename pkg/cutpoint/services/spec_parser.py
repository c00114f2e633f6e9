"""
Automaton spec files.

    pfa rabin
    pfa rabin-alpha 1/3
    qfa rotation sqrt(2)/8        (or: qfa rotation fixed)
    pfa bx 1/4
    pfa qprime 1/16
    pfa custom symbols=01 initial=1 accept=2
    2
    1 1/2
    0 1/2
    1/2 0
    1/2 1

A custom spec gives the state count on its own line, followed by one n x n
grid per symbol (in the order of `symbols`), one row per line. Blank lines
and text after '#' are ignored. Scalars use the expression grammar of
`parse_expression`: rationals and decimals, pi, sqrt/acos/cos/sin/abs,
+ - * / ^ and parentheses.
"""
import re
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from cutpoint.errors.exceptions import DivisionByZero, DomainError, SpecSyntaxError
from cutpoint.kernel.digits import IrrationalParam
from cutpoint.kernel.expressions import (
    PI,
    ScalarExpr,
    absolute,
    acos,
    add,
    const,
    cos,
    div,
    mul,
    neg,
    power,
    sin,
    sqrt,
    sub,
    to_text,
)
from cutpoint.models.automata import PFA, QFA, Automaton
from cutpoint.models.linalg import Matrix
from cutpoint.models.schemas import AutomatonSpec
from cutpoint.services import constructions
from cutpoint.utils.logging_config import get_logger

logger = get_logger(__name__)

FAMILIES: Dict[str, Tuple[str, ...]] = {
    "rabin": ("pfa",),
    "rabin-alpha": ("pfa",),
    "rotation": ("qfa",),
    "bx": ("pfa",),
    "qprime": ("pfa",),
    "custom": ("pfa", "qfa"),
}
PARAM_COUNT = {"rabin": 0, "rabin-alpha": 1, "rotation": 1, "bx": 1, "qprime": 1, "custom": 0}

FUNCTIONS: Dict[str, Callable[[ScalarExpr], ScalarExpr]] = {
    "sqrt": sqrt,
    "acos": acos,
    "cos": cos,
    "sin": sin,
    "abs": absolute,
}

_TOKEN = re.compile(r"\s*(?:(?P<number>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_]+)|(?P<op>[-+*/^()]))")


class _Tokens:
    def __init__(self, text: str, line: int, offset: int):
        self.line = line
        self.items: List[Tuple[str, str, int]] = []
        position = 0
        stripped = text.rstrip()
        while position < len(stripped):
            match = _TOKEN.match(stripped, position)
            if not match or match.end() == position:
                rest = stripped[position:]
                skipped = len(rest) - len(rest.lstrip())
                raise SpecSyntaxError(f"unexpected character {rest.lstrip()[:1]!r}", line, offset + position + skipped + 1)
            kind = match.lastgroup
            self.items.append((kind, match.group(kind), offset + match.start(kind) + 1))
            position = match.end()
        self.index = 0
        self.end_column = offset + len(stripped) + 1

    def peek(self) -> Optional[Tuple[str, str, int]]:
        return self.items[self.index] if self.index < len(self.items) else None

    def take(self) -> Tuple[str, str, int]:
        token = self.peek()
        if token is None:
            raise SpecSyntaxError("unexpected end of expression", self.line, self.end_column)
        self.index += 1
        return token

    def expect(self, value: str) -> None:
        kind, text, column = self.take()
        if text != value:
            raise SpecSyntaxError(f"expected {value!r}, found {text!r}", self.line, column)


def parse_expression(text: str, line: int = 1, offset: int = 0) -> ScalarExpr:
    """Parse one scalar expression; `offset` is the column of text[0] minus one, for diagnostics."""
    tokens = _Tokens(text, line, offset)
    if tokens.peek() is None:
        raise SpecSyntaxError("empty expression", line, offset + 1)
    expr = _sum(tokens)
    extra = tokens.peek()
    if extra is not None:
        raise SpecSyntaxError(f"unexpected {extra[1]!r}", line, extra[2])
    return expr


def _sum(tokens: _Tokens) -> ScalarExpr:
    expr = _product(tokens)
    while tokens.peek() and tokens.peek()[1] in "+-":
        op = tokens.take()[1]
        right = _product(tokens)
        expr = add(expr, right) if op == "+" else sub(expr, right)
    return expr


def _product(tokens: _Tokens) -> ScalarExpr:
    expr = _signed(tokens)
    while tokens.peek() and tokens.peek()[1] in "*/":
        _, op, column = tokens.take()
        right = _signed(tokens)
        if op == "*":
            expr = mul(expr, right)
        else:
            try:
                expr = div(expr, right)
            except DivisionByZero as exc:
                raise SpecSyntaxError("division by zero", tokens.line, column) from exc
    return expr


def _signed(tokens: _Tokens) -> ScalarExpr:
    token = tokens.peek()
    if token and token[1] == "-":
        tokens.take()
        return neg(_signed(tokens))
    if token and token[1] == "+":
        tokens.take()
        return _signed(tokens)
    return _power(tokens)


def _power(tokens: _Tokens) -> ScalarExpr:
    base = _atom(tokens)
    token = tokens.peek()
    if token and token[1] == "^":
        tokens.take()
        sign = 1
        if tokens.peek() and tokens.peek()[1] == "-":
            tokens.take()
            sign = -1
        kind, text, column = tokens.take()
        if kind != "number" or "." in text:
            raise SpecSyntaxError("exponent must be an integer", tokens.line, column)
        return power(base, sign * int(text))
    return base


def _atom(tokens: _Tokens) -> ScalarExpr:
    kind, text, column = tokens.take()
    if kind == "number":
        return const(Fraction(text))
    if kind == "name":
        name = text.lower()
        if name == "pi":
            return PI
        if name in FUNCTIONS:
            tokens.expect("(")
            argument = _sum(tokens)
            tokens.expect(")")
            try:
                return FUNCTIONS[name](argument)
            except DomainError as exc:
                raise SpecSyntaxError(exc.message, tokens.line, column) from exc
        raise SpecSyntaxError(f"unknown name {text!r}", tokens.line, column)
    if text == "(":
        expr = _sum(tokens)
        tokens.expect(")")
        return expr
    raise SpecSyntaxError(f"unexpected {text!r}", tokens.line, column)


def _content_lines(text: str) -> List[Tuple[int, str]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].rstrip()
        if content.strip():
            lines.append((number, content))
    return lines


def _column_of(line: str, token_index: int) -> int:
    position = 0
    for index, match in enumerate(re.finditer(r"\S+", line)):
        position = match.start()
        if index == token_index:
            break
    return position + 1


def parse_spec(text: str) -> AutomatonSpec:
    """
    Parse and validate an automaton spec.

    Raises:
        SpecSyntaxError: malformed text, with line and column
        ValidationError: well-formed but invalid automaton (e.g. parameter out of range)
    """
    lines = _content_lines(text)
    if not lines:
        raise SpecSyntaxError("empty spec", 1, 1)
    number, header = lines[0]
    words = header.split()
    kind = words[0]
    if kind not in ("pfa", "qfa"):
        raise SpecSyntaxError(f"unknown automaton kind {kind!r}", number, _column_of(header, 0))
    if len(words) < 2:
        raise SpecSyntaxError("missing family", number, len(header) + 1)
    family = words[1]
    if family not in FAMILIES:
        raise SpecSyntaxError(f"unknown family {family!r}", number, _column_of(header, 1))
    if kind not in FAMILIES[family]:
        raise SpecSyntaxError(f"family {family!r} is not a {kind}", number, _column_of(header, 1))

    if family == "custom":
        spec = _parse_custom(kind, header, number, lines[1:])
    else:
        if len(lines) > 1:
            raise SpecSyntaxError("unexpected text after the header", lines[1][0], 1)
        spec = AutomatonSpec(kind=kind, family=family, params=_family_params(family, header, number))
    build_automaton(spec)
    return spec


def _family_params(family: str, header: str, number: int) -> Tuple[str, ...]:
    expected = PARAM_COUNT[family]
    match = re.match(r"\s*\S+\s+\S+", header)
    rest_offset = match.end()
    rest = header[rest_offset:]
    if expected == 0:
        if rest.strip():
            raise SpecSyntaxError(f"family {family!r} takes no parameters", number, rest_offset + len(rest) - len(rest.lstrip()) + 1)
        return ()
    if not rest.strip():
        raise SpecSyntaxError(f"family {family!r} needs a parameter", number, len(header) + 1)
    if family == "rotation" and rest.strip() == "fixed":
        return ("fixed",)
    return (to_text(parse_expression(rest, number, rest_offset)),)


def _parse_custom(kind: str, header: str, number: int, body: List[Tuple[int, str]]) -> AutomatonSpec:
    options = {"symbols": "01", "initial": "1", "accept": ""}
    for index, token in enumerate(header.split()[2:], start=2):
        key, _, value = token.partition("=")
        if key not in options or not value:
            raise SpecSyntaxError(f"bad option {token!r}", number, _column_of(header, index))
        options[key] = value
    if not options["accept"]:
        raise SpecSyntaxError("custom spec needs accept=<states>", number, len(header) + 1)
    try:
        initial = int(options["initial"])
        accepting = tuple(int(s) for s in options["accept"].split(","))
    except ValueError as exc:
        raise SpecSyntaxError("states must be integers", number, 1) from exc
    if not body:
        raise SpecSyntaxError("missing state count", number + 1, 1)
    size_line, size_text = body[0]
    if not size_text.strip().isdigit() or int(size_text) < 1:
        raise SpecSyntaxError("state count must be a positive integer", size_line, _column_of(size_text, 0))
    n = int(size_text)
    symbols = options["symbols"]
    rows = body[1:]
    if len(rows) != n * len(symbols):
        at = rows[n * len(symbols)][0] if len(rows) > n * len(symbols) else (rows[-1][0] + 1 if rows else size_line + 1)
        raise SpecSyntaxError(f"expected {n * len(symbols)} matrix rows, found {len(rows)}", at, 1)
    grids = []
    for s in range(len(symbols)):
        grid = []
        for line_number, row in rows[s * n:(s + 1) * n]:
            cells = [(m.group(), m.start()) for m in re.finditer(r"\S+", row)]
            if len(cells) != n:
                raise SpecSyntaxError(f"expected {n} entries, found {len(cells)}", line_number, 1)
            grid.append(tuple(_cell_text(parse_expression(cell, line_number, start)) for cell, start in cells))
        grids.append(tuple(grid))
    return AutomatonSpec(
        kind=kind,
        family="custom",
        symbols=symbols,
        initial=initial,
        accepting=accepting,
        rows=tuple(grids),
    )


def _cell_text(expr: ScalarExpr) -> str:
    # matrix rows are whitespace separated
    return to_text(expr).replace(" ", "")


def _rotation(param: str):
    if param == "fixed":
        return constructions.fixed_rotation()
    return IrrationalParam.from_expr(parse_expression(param))


def build_automaton(spec: AutomatonSpec) -> Automaton:
    family = spec.family
    if family == "rabin":
        return constructions.rabin_pfa()
    if family == "rotation":
        return constructions.rotation_qfa(_rotation(spec.params[0]))
    if family != "custom":
        builder = {
            "rabin-alpha": constructions.rabin_alpha_pfa,
            "bx": constructions.unary_pfa_Bx,
            "qprime": constructions.qprime_pfa,
        }[family]
        return builder(parse_expression(spec.params[0]))
    matrices = {
        symbol: Matrix.from_rows([[parse_expression(cell) for cell in row] for row in grid])
        for symbol, grid in zip(spec.symbols, spec.rows)
    }
    cls = PFA if spec.kind == "pfa" else QFA
    return cls(len(spec.rows[0]), tuple(spec.symbols), matrices, initial=spec.initial, accepting=frozenset(spec.accepting), name=f"{spec.kind} custom")


def render_spec(spec: AutomatonSpec) -> str:
    """Inverse of parse_spec for normalized specs."""
    if spec.family != "custom":
        return " ".join([spec.kind, spec.family, *spec.params]) + "\n"
    header = f"{spec.kind} custom symbols={spec.symbols} initial={spec.initial} accept={','.join(str(s) for s in spec.accepting)}"
    lines = [header, str(len(spec.rows[0]))]
    for grid in spec.rows:
        lines.extend(" ".join(row) for row in grid)
    return "\n".join(lines) + "\n"
