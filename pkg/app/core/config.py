"""
Configuration management for lcbandit.
Handles environment variables and process-level settings using Pydantic.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field
from functools import lru_cache
from enum import Enum


class Environment(str, Enum):
    DEVELOPMENT = "development"
    PRODUCTION = "production"
    TESTING = "testing"


class Settings(BaseSettings):
    """lcbandit configuration settings."""

    # Environment
    environment: Environment = Field(default=Environment.DEVELOPMENT, description="Runtime environment")
    debug: bool = Field(default=False, description="Debug mode (colored, verbose logs)")
    log_level: str = Field(default="INFO", description="Root log level when not in debug mode")

    # Application
    app_name: str = Field(default="lcbandit", description="Application name")
    version: str = Field(default="0.1.0", description="Application version")

    # Execution
    workers: int = Field(default=1, ge=1, description="Default size of the experiment worker pool")
    keep_curve_snapshots: bool = Field(
        default=True, description="Record fitted-curve snapshots in every RunResult"
    )

    @property
    def APP_NAME(self) -> str:
        return self.app_name

    @property
    def VERSION(self) -> str:
        return self.version

    @property
    def DEBUG(self) -> bool:
        return self.debug

    @property
    def LOG_LEVEL(self) -> str:
        return self.log_level.upper()

    @property
    def WORKERS(self) -> int:
        return self.workers

    @property
    def KEEP_CURVE_SNAPSHOTS(self) -> bool:
        return self.keep_curve_snapshots

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        env_prefix="LCBANDIT_",
        validate_assignment=True,
        extra="ignore"
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


# Global settings instance
settings = get_settings()
