from __future__ import annotations

from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from cutpoint.kernel.certify import evaluate
from cutpoint.kernel.digits import IrrationalParam
from cutpoint.kernel.enclosure import Enclosure
from cutpoint.kernel.expressions import ONE, ScalarExpr, rational_value, to_text

# Records carrying kernel values (expressions, enclosures, parameters)
record_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class ClosedFormCoefficients(BaseModel):
    model_config = record_config

    x: ScalarExpr = Field(..., description="Parameter of the unary family")
    scale: ScalarExpr = Field(ONE, description="Scaling alpha of the primed family; 1 for B_x itself")
    a: ScalarExpr
    b: ScalarExpr
    c: ScalarExpr
    amplitude: ScalarExpr = Field(..., description="sqrt(b^2 + c^2)")
    theta: ScalarExpr = Field(..., description="Argument of the complex eigenvalue, arccos(-sqrt(x))")
    gamma: ScalarExpr = Field(..., description="Phase arccos(b / amplitude)")
    eigen_real: ScalarExpr
    eigen_imag: ScalarExpr

    @property
    def primed(self) -> bool:
        return rational_value(self.scale) != 1


class DigitContext(BaseModel):
    model_config = record_config

    alpha: IrrationalParam
    beta: IrrationalParam
    j: int = Field(..., gt=2, description="First index where the binary digits differ")
    alpha_prev2: int = Field(..., ge=0, le=1)
    alpha_prev1: int = Field(..., ge=0, le=1)
    alpha_j: int = Field(..., ge=0, le=1)
    beta_j: int = Field(..., ge=0, le=1)

    @model_validator(mode="after")
    def digits_differ(self):
        if self.alpha_j == self.beta_j:
            raise ValueError("digits at index j must differ")
        return self


class QuadrantWitness(BaseModel):
    model_config = record_config

    context: DigitContext
    length: int = Field(..., ge=1, description="Unary input length 2^(j-3)")
    reduced_alpha: ScalarExpr
    reduced_beta: ScalarExpr
    remainder_alpha: ScalarExpr
    remainder_beta: ScalarExpr
    quadrant: int = Field(..., ge=1, le=4)
    expected: Tuple[bool, bool]


class WitnessCertificate(BaseModel):
    """A separating input plus the certified evidence that two cutpoint languages disagree on it."""

    model_config = record_config

    word: Optional[str] = Field(None, description="Separating word (binary families)")
    unary_length: Optional[int] = Field(None, ge=0, description="Separating length (unary families)")
    automata: Tuple[str, str]
    cutpoints: Tuple[ScalarExpr, ScalarExpr]
    enclosures: Tuple[Enclosure, Enclosure]
    verdicts: Tuple[bool, bool]
    precision: int = Field(..., gt=0)
    note: str = Field(..., description="Which construction and branch produced the witness")
    quadrant: Optional[QuadrantWitness] = None
    bracket_m: Optional[int] = None

    @model_validator(mode="after")
    def check_evidence(self):
        if (self.word is None) == (self.unary_length is None):
            raise ValueError("exactly one of word and unary_length must be set")
        if self.verdicts[0] == self.verdicts[1]:
            raise ValueError("verdicts must differ")
        for enclosure, cutpoint, verdict in zip(self.enclosures, self.cutpoints, self.verdicts):
            value = rational_value(cutpoint)
            bound = Enclosure.exact(value, self.precision) if value is not None else evaluate(cutpoint, self.precision)
            above = enclosure.lower > bound.upper
            below = enclosure.upper < bound.lower
            if not (above or below):
                raise ValueError("probability enclosure does not exclude the cutpoint")
            if above != verdict:
                raise ValueError("verdict disagrees with the enclosure")
        return self

    def input_word(self, symbol: str = "0") -> str:
        if self.word is not None:
            return self.word
        return symbol * self.unary_length

    def summary(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "automata": list(self.automata),
            "cutpoints": [to_text(c) for c in self.cutpoints],
            "probabilities": [e.format() for e in self.enclosures],
            "verdicts": list(self.verdicts),
            "precision": str(self.precision),
            "note": self.note,
        }
        if self.word is not None:
            data["word"] = self.word
        else:
            data["unary_length"] = str(self.unary_length)
        if self.bracket_m is not None:
            data["bracket_m"] = str(self.bracket_m)
        if self.quadrant is not None:
            ctx = self.quadrant.context
            data["quadrant"] = {
                "j": str(ctx.j),
                "digits": f"{ctx.alpha_prev2}{ctx.alpha_prev1}{ctx.alpha_j}/{ctx.beta_j}",
                "quadrant": str(self.quadrant.quadrant),
                "length": str(self.quadrant.length),
            }
        return data


class AutomatonSpec(BaseModel):
    """Textual automaton description; expressions are kept in their normalized text form."""

    model_config = ConfigDict(frozen=True)

    kind: str = Field(..., description="pfa or qfa")
    family: str = Field(..., description="rabin, rabin-alpha, rotation, bx, qprime or custom")
    params: Tuple[str, ...] = ()
    symbols: str = "01"
    initial: int = Field(1, ge=1)
    accepting: Tuple[int, ...] = ()
    rows: Tuple[Tuple[Tuple[str, ...], ...], ...] = Field((), description="Custom matrices, one grid per symbol")

    @field_validator("kind")
    @classmethod
    def validate_kind(cls, v: str) -> str:
        if v not in ("pfa", "qfa"):
            raise ValueError("kind must be pfa or qfa")
        return v


class ClaimResult(BaseModel):
    name: str
    passed: bool
    checked: int = Field(0, ge=0, description="Number of instances checked")
    detail: str = ""

    @field_serializer("checked")
    def serialize_checked(self, checked: int) -> str:
        return str(checked)


class Report(BaseModel):
    """Record of one command run. All numbers are strings; timing is not part of the replayable content."""

    command: str
    inputs: Dict[str, str] = Field(default_factory=dict)
    outputs: Dict[str, Any] = Field(default_factory=dict)
    verdicts: List[bool] = Field(default_factory=list)
    certificates: List[Dict[str, Any]] = Field(default_factory=list)
    claims: List[ClaimResult] = Field(default_factory=list)
    timing_seconds: Optional[float] = None

    @field_serializer("timing_seconds")
    def serialize_timing(self, seconds: Optional[float]) -> Optional[str]:
        return None if seconds is None else f"{seconds:.6f}"

    def replayable(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"timing_seconds"})
