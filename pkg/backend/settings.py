"""Runtime configuration: defaults < TOML config file < OMEGA_* environment < explicit flags."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal, Optional, Tuple, Type

from pydantic import Field, field_validator
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    TomlConfigSettingsSource,
)

DEFAULT_CONFIG_FILE = "omega.toml"


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="OMEGA_", extra="ignore", toml_file=DEFAULT_CONFIG_FILE)

    max_edges: int = Field(default=10, ge=0, description="Resource guard: largest e = l + v - 1 the generator accepts.")
    brute_force_max_edges: int = Field(default=6, ge=0, description="Resource guard for the brute-force enumerator.")
    workers: int = Field(default=1, ge=1, description="Processes used for the Q_i / T_i summands; 1 = single-threaded.")
    canonical_method: Literal["refined", "exhaustive"] = Field(default="exhaustive", description="Canonicalizer used by forget_order.")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(default="WARNING", description="Root log level for the CLI.")
    console_width: int = Field(default=100, ge=40, description="Fixed table width so output is byte-stable.")

    @field_validator("log_level", mode="before")
    @classmethod
    def _upper(cls, value: str) -> str:
        return value.upper() if isinstance(value, str) else value

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        return (init_settings, env_settings, dotenv_settings, TomlConfigSettingsSource(settings_cls))


def load_settings(config_file: Optional[Path] = None, **overrides: Any) -> Settings:
    """
    Build Settings from an optional TOML file plus explicit overrides.

    Overrides whose value is None are ignored, so unset CLI flags fall through to
    the environment, the file and the defaults.
    """
    settings_cls: Type[Settings] = Settings
    if config_file is not None:
        settings_cls = type("FileSettings", (Settings,), {"model_config": SettingsConfigDict(toml_file=config_file)})
    return settings_cls(**{k: v for k, v in overrides.items() if v is not None})
