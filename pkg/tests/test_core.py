import logging

import click
import pytest

from cutpoint.config.settings import Settings, get_settings, override_settings
from cutpoint.errors.exceptions import (
    BaseError,
    CertificationError,
    ConfigurationError,
    DivisionByZero,
    ParameterRangeError,
    PrecisionExhausted,
    SpecSyntaxError,
    ValidationError,
)
from cutpoint.errors.handlers import EXIT_CERTIFICATION, EXIT_USAGE, resolve_exit
from cutpoint.utils.logging_config import CustomJsonFormatter, get_logger, setup_logging
from cutpoint.utils.validation import ValidationErrorType, ValidationResult, check_interval, is_binary_word


@pytest.mark.unit
class TestSettings:
    def test_settings_defaults(self):
        """Test settings validation and defaults"""
        settings = Settings()
        assert settings.PROJECT_NAME == "cutpoint"
        assert settings.VERSION == "1.0.0"
        assert settings.PRECISION_BITS == 256
        assert settings.MAX_BITS == 4096
        assert settings.START_BITS == 32
        assert settings.SCAN_CAP == 1_000_000

    @pytest.mark.env
    def test_settings_from_environment(self, settings):
        """pytest-env switches logging to text for the test run"""
        assert settings.LOG_FORMAT == "text"
        assert settings.is_test

    @pytest.mark.env
    def test_environment_variable_override(self, monkeypatch):
        monkeypatch.setenv("MAX_BITS", "1024")
        assert override_settings().MAX_BITS == 1024

    def test_override_settings_replaces_cached_instance(self):
        first = get_settings()
        second = override_settings(PRECISION_BITS=128, MAX_BITS=None)
        assert second is not first
        assert get_settings().PRECISION_BITS == 128
        assert get_settings().MAX_BITS == 4096
        assert override_settings().PRECISION_BITS == 256

    def test_invalid_settings(self):
        """Test handling of invalid settings"""
        with pytest.raises(ValueError):
            Settings(PRECISION_BITS=0)
        with pytest.raises(ValueError):
            Settings(MAX_BITS=16)
        with pytest.raises(ValueError):
            Settings(DIGIT_BUDGET=2)
        with pytest.raises(ValueError):
            Settings(LOG_FORMAT="xml")

    def test_log_level_is_normalized(self):
        assert Settings(LOG_LEVEL="debug").LOG_LEVEL == "DEBUG"


@pytest.mark.unit
class TestLogging:
    def test_logging_setup_is_idempotent(self):
        setup_logging()
        setup_logging()
        named = [h for h in logging.getLogger().handlers if h.get_name() == "cutpoint"]
        assert len(named) == 1

    @pytest.mark.env
    def test_replaced_log_file_handler_is_closed(self, monkeypatch, tmp_path):
        monkeypatch.setenv("LOG_FILE", str(tmp_path / "cutpoint.log"))
        override_settings()
        setup_logging()
        first = next(h for h in logging.getLogger().handlers if h.get_name() == "cutpoint")
        setup_logging()
        assert first not in logging.getLogger().handlers
        assert first.stream is None
        monkeypatch.delenv("LOG_FILE")
        override_settings()
        setup_logging()

    def test_json_formatter_adds_app_fields(self):
        formatter = CustomJsonFormatter(fmt="%(levelname)s %(name)s %(message)s")
        record = logging.LogRecord("cutpoint.test", logging.INFO, __file__, 1, "hello", None, None)
        output = formatter.format(record)
        assert '"app": "cutpoint"' in output
        assert '"environment": "test"' in output

    def test_module_logger(self, caplog):
        """Test structured logging through get_logger"""
        logger = get_logger("cutpoint.test")
        with caplog.at_level(logging.INFO, logger="cutpoint.test"):
            logger.info("Witness certified", extra={"length": 2})
        assert len(caplog.records) == 1
        record = caplog.records[0]
        assert record.message == "Witness certified"
        assert record.length == 2


@pytest.mark.unit
class TestErrorHandling:
    def test_error_hierarchy(self):
        assert issubclass(ParameterRangeError, ValidationError)
        assert issubclass(PrecisionExhausted, CertificationError)
        assert issubclass(DivisionByZero, CertificationError)
        assert issubclass(ValidationError, BaseError)

    def test_error_details(self):
        error = PrecisionExhausted("probability equals cutpoint", {"exact_tie": True})
        assert error.message == "probability equals cutpoint"
        assert error.details["exact_tie"] is True
        assert str(error) == "probability equals cutpoint"

    def test_spec_syntax_error_location(self):
        error = SpecSyntaxError("unknown family 'foo'", 1, 5)
        assert str(error) == "1:5: unknown family 'foo'"
        assert error.message == "unknown family 'foo'"
        assert (error.line, error.column) == (1, 5)
        assert error.details == {"line": 1, "column": 5}

    def test_resolve_exit_codes(self):
        assert resolve_exit(PrecisionExhausted("probability equals cutpoint")) == (EXIT_CERTIFICATION, "probability equals cutpoint")
        assert resolve_exit(ParameterRangeError("x out of range"))[0] == EXIT_USAGE
        assert resolve_exit(SpecSyntaxError("bad", 2, 3)) == (EXIT_USAGE, "spec 2:3: bad")
        assert resolve_exit(click.UsageError("missing option"))[0] == EXIT_USAGE
        assert resolve_exit(RuntimeError("boom")) == (EXIT_CERTIFICATION, "boom")

    @pytest.mark.env
    def test_settings_validation_is_a_usage_error(self, monkeypatch):
        monkeypatch.setenv("MAX_BITS", "0")
        with pytest.raises(ConfigurationError) as exc_info:
            override_settings()
        assert exc_info.value.details["field"] == "MAX_BITS"
        code, message = resolve_exit(exc_info.value)
        assert code == EXIT_USAGE
        assert message.startswith("invalid option value")

    def test_rejected_override_keeps_previous_settings(self):
        override_settings(PRECISION_BITS=128)
        with pytest.raises(ConfigurationError) as exc_info:
            override_settings(MAX_BITS=8)
        assert exc_info.value.details["field"] == "settings"
        assert get_settings().PRECISION_BITS == 128
        assert get_settings().MAX_BITS == 4096


@pytest.mark.unit
class TestValidation:
    def test_binary_words(self):
        assert is_binary_word("")
        assert is_binary_word("0110")
        assert not is_binary_word("012")

    def test_check_interval_records_errors(self):
        result = check_interval(ValidationResult(), "x", 1, 0, 1)
        assert not result.is_valid
        assert result.to_dict()["errors"]["x"][0]["type"] == ValidationErrorType.OUT_OF_RANGE.value
        assert check_interval(ValidationResult(), "x", 1, 0, 1, upper_closed=True).is_valid

    def test_raise_if_invalid(self):
        result = ValidationResult()
        result.add_error("alpha", ValidationErrorType.OUT_OF_RANGE, "alpha = 3/2 is not in (0, 1]")
        with pytest.raises(ParameterRangeError) as exc_info:
            result.raise_if_invalid()
        assert "alpha" in exc_info.value.details
