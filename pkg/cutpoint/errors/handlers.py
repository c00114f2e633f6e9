"""
Error handlers for the command line interface
"""
import functools
from typing import Callable, Dict, Tuple, Type

import click
from cutpoint.errors.exceptions import (
    BaseError,
    CertificationError,
    ConfigurationError,
    PrecisionExhausted,
    SpecSyntaxError,
    ValidationError,
)
from cutpoint.utils.logging_config import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CERTIFICATION = 1
EXIT_USAGE = 2

ExitResult = Tuple[int, str]


def certification_error_handler(exc: CertificationError) -> ExitResult:
    """Handler for undecided or failed certifications"""
    logger.warning(f"Certification error: {exc.message}", extra={"details": _loggable(exc.details)})
    return EXIT_CERTIFICATION, exc.message


def precision_exhausted_handler(exc: PrecisionExhausted) -> ExitResult:
    """Handler for comparisons that stayed undecided up to the last precision rung"""
    logger.warning(f"Precision exhausted: {exc.message}", extra={"details": _loggable(exc.details)})
    return EXIT_CERTIFICATION, exc.message


def validation_error_handler(exc: ValidationError) -> ExitResult:
    """Handler for invalid automata, parameters and words"""
    logger.warning(f"Validation error: {exc.message}", extra={"details": _loggable(exc.details)})
    return EXIT_USAGE, exc.message


def spec_syntax_error_handler(exc: SpecSyntaxError) -> ExitResult:
    logger.warning(f"Spec syntax error: {exc.message}", extra={"line": exc.line, "column": exc.column})
    return EXIT_USAGE, f"spec {exc}"


def configuration_error_handler(exc: ConfigurationError) -> ExitResult:
    logger.error(f"Configuration error: {exc.message}", extra={"details": _loggable(exc.details)})
    return EXIT_USAGE, exc.message


def base_error_handler(exc: BaseError) -> ExitResult:
    """Handler for all other application errors"""
    logger.error(f"Error running command: {exc.message}", extra={"details": _loggable(exc.details)})
    return EXIT_CERTIFICATION, exc.message


ERROR_HANDLERS: Dict[Type[BaseException], Callable[..., ExitResult]] = {
    BaseError: base_error_handler,
    ValidationError: validation_error_handler,
    SpecSyntaxError: spec_syntax_error_handler,
    CertificationError: certification_error_handler,
    PrecisionExhausted: precision_exhausted_handler,
    ConfigurationError: configuration_error_handler,
}


def _loggable(details: dict) -> dict:
    return {key: str(value) for key, value in details.items()}


def resolve_exit(exc: BaseException) -> ExitResult:
    """
    Map an exception to (exit code, message).

    The most specific registered handler along the exception's MRO wins.
    Usage errors (click, invalid settings) exit 2; anything unknown exits 1
    and is logged with its traceback.
    """
    for cls in type(exc).__mro__:
        handler = ERROR_HANDLERS.get(cls)
        if handler is not None:
            return handler(exc)
    if isinstance(exc, click.UsageError):
        return EXIT_USAGE, exc.format_message()
    logger.exception(f"Unexpected error: {exc}")
    return EXIT_CERTIFICATION, str(exc)


def handle_errors(command: Callable) -> Callable:
    """Decorator for click commands: report errors as "Error: ..." and exit with the mapped code."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except click.exceptions.Exit:
            raise
        except Exception as e:
            code, message = resolve_exit(e)
            click.echo(f"Error: {message}")
            raise click.exceptions.Exit(code)

    return wrapper
