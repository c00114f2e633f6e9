"""
Validation utilities for cutpoint

Range checks for automaton parameters. Rational values are checked exactly,
anything else through certified comparisons, so a parameter sitting exactly
on an open boundary is rejected instead of guessed.
"""

import re
from enum import Enum
from typing import Any, Dict, Optional, Type

from cutpoint.errors.exceptions import BaseError, ParameterRangeError, PrecisionExhausted
from cutpoint.kernel.certify import Ordering, certified_compare
from cutpoint.kernel.expressions import ExprLike, as_expr, rational_value, to_text

BINARY_WORD_PATTERN = r'^[01]*$'


class ValidationErrorType(Enum):
    """Types of validation errors for better error classification"""
    OUT_OF_RANGE = "out_of_range"
    NOT_STOCHASTIC = "not_stochastic"
    NOT_UNITARY = "not_unitary"


class ValidationResult:
    """
    Object representing the result of a validation operation
    with structured information about validation errors.
    """
    def __init__(self, is_valid: bool = True, errors: Optional[Dict[str, Any]] = None):
        self.is_valid = is_valid
        self.errors = errors or {}

    def add_error(self, field: str, error_type: ValidationErrorType, message: str):
        """Add a validation error for a specific field"""
        if field not in self.errors:
            self.errors[field] = []

        self.errors[field].append({
            "type": error_type.value,
            "message": message
        })
        self.is_valid = False

    def to_dict(self) -> Dict[str, Any]:
        """Convert the validation result to a dictionary representation"""
        return {
            "is_valid": self.is_valid,
            "errors": self.errors
        }

    def raise_if_invalid(
        self,
        message: str = "parameter validation failed",
        error_class: Type[BaseError] = ParameterRangeError,
    ):
        if not self.is_valid:
            raise error_class(message, self.errors)


def is_binary_word(value: str) -> bool:
    return bool(re.match(BINARY_WORD_PATTERN, value))


def _is_above(value, bound, closed: bool, max_bits: Optional[int]) -> bool:
    exact_value, exact_bound = rational_value(value), rational_value(bound)
    if exact_value is not None and exact_bound is not None:
        return exact_value >= exact_bound if closed else exact_value > exact_bound
    try:
        return certified_compare(value, bound, max_bits) is Ordering.GREATER
    except PrecisionExhausted:
        return False


def check_interval(
    result: ValidationResult,
    field: str,
    value: ExprLike,
    lower: ExprLike,
    upper: ExprLike,
    lower_closed: bool = False,
    upper_closed: bool = False,
    max_bits: Optional[int] = None,
) -> ValidationResult:
    """
    Record an OUT_OF_RANGE error on `result` unless value lies in the interval.

    Args:
        result: The result collecting errors
        field: Parameter name used in the error record
        value, lower, upper: Expressions or exact rationals
        lower_closed, upper_closed: Whether the endpoints belong to the interval

    Returns:
        ValidationResult: the same result object, for chaining
    """
    value, lower, upper = as_expr(value), as_expr(lower), as_expr(upper)
    inside = _is_above(value, lower, lower_closed, max_bits) and _is_above(upper, value, upper_closed, max_bits)
    if not inside:
        left = "[" if lower_closed else "("
        right = "]" if upper_closed else ")"
        result.add_error(
            field,
            ValidationErrorType.OUT_OF_RANGE,
            f"{field} = {to_text(value)} is not in {left}{to_text(lower)}, {to_text(upper)}{right}",
        )
    return result


def require_interval(
    field: str,
    value: ExprLike,
    lower: ExprLike,
    upper: ExprLike,
    lower_closed: bool = False,
    upper_closed: bool = False,
    max_bits: Optional[int] = None,
) -> None:
    """Raise ParameterRangeError unless value lies in the interval."""
    result = check_interval(ValidationResult(), field, value, lower, upper, lower_closed, upper_closed, max_bits)
    result.raise_if_invalid(f"{field} out of range")


def require_less(field: str, lhs: ExprLike, rhs: ExprLike, max_bits: Optional[int] = None) -> None:
    """Raise ParameterRangeError unless lhs < rhs strictly."""
    if not _is_above(as_expr(rhs), as_expr(lhs), False, max_bits):
        result = ValidationResult()
        result.add_error(
            field,
            ValidationErrorType.OUT_OF_RANGE,
            f"{to_text(as_expr(lhs))} is not less than {to_text(as_expr(rhs))}",
        )
        result.raise_if_invalid(f"{field} violated")
