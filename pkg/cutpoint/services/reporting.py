"""
Report building and rendering.

Numbers never appear as floats: exact values print as "p/q", everything else
as an outward-rounded enclosure "[lo, hi]@bits".
"""
from typing import Any, Dict, List, Optional, Sequence

from cutpoint.config.settings import get_settings
from cutpoint.errors.exceptions import ValidationError
from cutpoint.kernel.certify import evaluate
from cutpoint.kernel.expressions import ExprLike, as_expr, rational_value
from cutpoint.models.schemas import ClaimResult, Report, WitnessCertificate

FORMATS = ("text", "json")


def format_value(expr: ExprLike, precision_bits: Optional[int] = None) -> str:
    expr = as_expr(expr)
    value = rational_value(expr)
    if value is not None:
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    return evaluate(expr, precision_bits or get_settings().PRECISION_BITS).format()


def build_report(
    command: str,
    inputs: Optional[Dict[str, Any]] = None,
    outputs: Optional[Dict[str, Any]] = None,
    verdicts: Sequence[bool] = (),
    certificates: Sequence[WitnessCertificate] = (),
    claims: Sequence[ClaimResult] = (),
) -> Report:
    return Report(
        command=command,
        inputs={key: str(value) for key, value in (inputs or {}).items() if value is not None},
        outputs=outputs or {},
        verdicts=list(verdicts),
        certificates=[c.summary() for c in certificates],
        claims=list(claims),
    )


def _flatten(prefix: str, value: Any, lines: List[str]) -> None:
    if isinstance(value, dict):
        for key, item in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), item, lines)
    elif isinstance(value, (list, tuple)) and any(isinstance(item, dict) for item in value):
        for index, item in enumerate(value):
            _flatten(f"{prefix}.{index}", item, lines)
    elif isinstance(value, (list, tuple)):
        lines.append(f"{prefix}: {', '.join(_scalar(item) for item in value)}")
    else:
        lines.append(f"{prefix}: {_scalar(value)}")


def _scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def render_text(report: Report) -> str:
    """One "key: value" line per leaf; nested keys are dotted. Timing is left out."""
    lines = [f"command: {report.command}"]
    _flatten("input", report.inputs, lines)
    _flatten("", report.outputs, lines)
    if report.verdicts:
        _flatten("verdicts", report.verdicts, lines)
    for index, certificate in enumerate(report.certificates):
        _flatten(f"certificate.{index}", certificate, lines)
    for claim in report.claims:
        status = "PASS" if claim.passed else "FAIL"
        detail = f" {claim.detail}" if claim.detail else ""
        lines.append(f"claim {claim.name}: {status} ({claim.checked} checked){detail}")
    return "\n".join(lines)


def render_json(report: Report) -> str:
    return report.model_dump_json(indent=2)


def render(report: Report, fmt: str = "text") -> str:
    if fmt not in FORMATS:
        raise ValidationError("unknown report format", {"format": fmt, "formats": list(FORMATS)})
    if fmt == "json":
        return render_json(report)
    return render_text(report)
