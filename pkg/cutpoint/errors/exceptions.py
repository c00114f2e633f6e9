from typing import Optional, Dict, Any

class BaseError(Exception):
    """Base exception class for application errors"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)

class ValidationError(BaseError):
    """Raised when input validation fails"""
    pass

class ParameterRangeError(ValidationError):
    """Raised when an automaton parameter lies outside its admissible interval"""
    pass

class DimensionMismatchError(ValidationError):
    """Raised when matrix and vector dimensions do not agree"""
    pass

class AlphabetError(ValidationError):
    """Raised when a word contains a symbol outside the automaton's alphabet"""
    pass

class SpecSyntaxError(ValidationError):
    """Raised when an automaton spec cannot be parsed"""
    def __init__(self, message: str, line: int, column: int, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, {"line": line, "column": column, **(details or {})})
        self.line = line
        self.column = column

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"

class CertificationError(BaseError):
    """Raised when a certified decision cannot be made"""
    pass

class PrecisionExhausted(CertificationError):
    """Raised when an enclosure still straddles the decision point at the last precision rung"""
    pass

class DomainError(CertificationError):
    """Raised when a function argument cannot be certified to lie in the function's domain"""
    pass

class DivisionByZero(CertificationError):
    """Raised when a denominator cannot be certified nonzero"""
    pass

class DigitBudgetExhausted(CertificationError):
    """Raised when two parameters agree on every inspected binary digit"""
    pass

class ScanBudgetExhausted(CertificationError):
    """Raised when a witness scan reaches its hard cap"""
    pass

class WitnessVerificationError(CertificationError):
    """Raised when re-simulating a witness does not reproduce its verdicts"""
    pass

class ConfigurationError(BaseError):
    """Raised when there's a configuration issue"""
    pass
