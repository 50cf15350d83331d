"""Application settings and analysis defaults."""

from functools import lru_cache

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Defaults for every analysis knob, overridable from the environment or ``.env``."""

    # Application
    app_name: str = Field(default="markov-delay-space", alias="APP_NAME")
    log_level: str = Field(default="INFO", alias="LOG_LEVEL")

    # Characteristic points
    r0: float = Field(default=1.0, alias="MARKOV_R0")
    k: float = Field(default=1.4, alias="MARKOV_K")
    cell_size: float = Field(default=1.0, alias="MARKOV_CELL_SIZE")
    dimension_percentile: float = Field(default=95.0, alias="MARKOV_DIMENSION_PERCENTILE")
    adequacy_threshold: float = Field(default=0.75, alias="MARKOV_ADEQUACY_THRESHOLD")

    # Transition matrix
    alpha_factor: float = Field(default=0.01, alias="MARKOV_ALPHA_FACTOR")
    stride: int = Field(default=1, alias="MARKOV_STRIDE")

    # Modal analysis
    attractor_tol: float = Field(default=1e-3, alias="MARKOV_ATTRACTOR_TOL")
    real_tol: float = Field(default=1e-9, alias="MARKOV_REAL_TOL")

    # Reproducibility
    seed: int = Field(default=42, alias="MARKOV_SEED")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate the log level name."""
        level = v.strip().upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"LOG_LEVEL must be a logging level name, got: {v}")
        return level

    @field_validator("r0", "k", "cell_size", "alpha_factor", "attractor_tol", "real_tol")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Validate strictly positive reals."""
        if not v > 0.0:
            raise ValueError(f"value must be > 0, got: {v}")
        return v

    @field_validator("dimension_percentile")
    @classmethod
    def validate_percentile(cls, v: float) -> float:
        """Validate the percentile used for the robust neighbor maximum."""
        if not 0.0 < v <= 100.0:
            raise ValueError(f"MARKOV_DIMENSION_PERCENTILE must be in (0, 100], got: {v}")
        return v

    @field_validator("adequacy_threshold")
    @classmethod
    def validate_threshold(cls, v: float) -> float:
        """Validate the adequacy cutoff is a fraction."""
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"MARKOV_ADEQUACY_THRESHOLD must be in [0, 1], got: {v}")
        return v

    @field_validator("stride")
    @classmethod
    def validate_stride(cls, v: int) -> int:
        """Validate stride is a positive sample count."""
        if v < 1:
            raise ValueError(f"MARKOV_STRIDE must be >= 1, got: {v}")
        return v

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        populate_by_name=True,
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance.

    Returns:
        Settings instance

    Raises:
        ValueError: If an environment override is invalid
    """
    try:
        return Settings()
    except Exception as e:
        raise ValueError(
            f"Invalid analysis settings: {e}\n"
            "Check the .env file and MARKOV_* environment variables."
        ) from e
