from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field, ValidationError, field_validator, model_validator
from typing import Any, Dict, Optional
import os
from functools import lru_cache
from dotenv import load_dotenv

from cutpoint.errors.exceptions import ConfigurationError

# Load environment variables from a .env file
load_dotenv()

class Settings(BaseSettings):
    PROJECT_NAME: str = "cutpoint"
    VERSION: str = "1.0.0"

    # Certified arithmetic
    PRECISION_BITS: int = Field(
        default=256,
        description="Precision used when a command prints or certifies an enclosure"
    )
    MAX_BITS: int = Field(
        default=4096,
        description="Last rung of the precision ladder used by certified_sign"
    )
    START_BITS: int = Field(
        default=32,
        description="First rung of the precision ladder"
    )
    GUARD_BITS: int = Field(
        default=24,
        description="Extra working bits added on top of the requested precision"
    )

    # Search budgets
    SCAN_CAP: int = Field(
        default=1_000_000,
        description="Hard cap on the unary witness scan"
    )
    DIGIT_BUDGET: int = Field(
        default=2048,
        description="Largest binary digit index inspected by first_diff_digit"
    )
    MAX_WORKERS: int = Field(default=4, description="Thread pool size for batch membership")

    # Logging settings
    LOG_LEVEL: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)"
    )
    LOG_FORMAT: str = Field(
        default="json",
        description="Log format (json or text)"
    )
    LOG_FILE: Optional[str] = Field(
        default=None,
        description="Path to log file. If not set, logs to stderr"
    )

    @field_validator("PRECISION_BITS", "MAX_BITS", "START_BITS", "SCAN_CAP", "MAX_WORKERS")
    @classmethod
    def validate_positive_numbers(cls, v: int, info):
        if v <= 0:
            raise ValueError(f"{info.field_name} must be greater than 0")
        return v

    @field_validator("GUARD_BITS")
    @classmethod
    def validate_guard_bits(cls, v: int):
        if v < 0:
            raise ValueError("GUARD_BITS must not be negative")
        return v

    @field_validator("DIGIT_BUDGET")
    @classmethod
    def validate_digit_budget(cls, v: int):
        if v <= 2:
            raise ValueError("DIGIT_BUDGET must be greater than 2")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str):
        allowed_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in allowed_levels:
            raise ValueError(f"LOG_LEVEL must be one of: {', '.join(allowed_levels)}")
        return v.upper()

    @field_validator("LOG_FORMAT")
    @classmethod
    def validate_log_format(cls, v: str):
        allowed_formats = ["json", "text"]
        if v.lower() not in allowed_formats:
            raise ValueError(f"LOG_FORMAT must be one of: {', '.join(allowed_formats)}")
        return v.lower()

    @model_validator(mode="after")
    def validate_ladder(self):
        if self.MAX_BITS < self.START_BITS:
            raise ValueError("MAX_BITS must be at least START_BITS")
        return self

    # Environment-specific configuration properties
    @property
    def environment(self) -> str:
        return os.getenv("ENVIRONMENT", "development").lower()

    @property
    def is_test(self) -> bool:
        return self.environment == "test"

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )

# Values given on the command line; they take priority over the environment
_overrides: Dict[str, Any] = {}

@lru_cache
def get_settings() -> Settings:
    """Settings built from the environment plus any command-line overrides, cached"""
    try:
        return Settings(**_overrides)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigurationError(
            f"invalid option value: {first['msg']}",
            {"field": ".".join(str(part) for part in first["loc"]) or "settings", "errors": e.error_count()},
        ) from e

def override_settings(**values: Any) -> Settings:
    """Replace the cached settings with one built from the environment plus `values`"""
    previous = dict(_overrides)
    _overrides.clear()
    _overrides.update({key: value for key, value in values.items() if value is not None})
    get_settings.cache_clear()
    try:
        return get_settings()
    except ConfigurationError:
        # a rejected override leaves the previous settings in place
        _overrides.clear()
        _overrides.update(previous)
        get_settings.cache_clear()
        raise
