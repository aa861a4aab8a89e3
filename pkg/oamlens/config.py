from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache
from typing import Literal


class Settings(BaseSettings):
    # Application
    APP_NAME: str = "OAM Lens Toolkit"
    LOG_LEVEL: str = "INFO"

    # Beam model
    BESSEL_ARGUMENT_FACTOR: float = 2.0  # Bessel argument = factor * k * R * sin(theta)
    PATTERN_GRID_POINTS: int = 4096

    # Fitting
    FIT_MAX_ITERATIONS: int = 200
    FIT_STEP_TOLERANCE: float = 1e-10

    # Lens
    PROFILE_SAMPLES: int = 512
    ATTENUATION_MODE: Literal["linear", "exponential"] = "linear"
    DEFAULT_ATTENUATION_PER_MM: float = 5.0
    DEFAULT_ENERGY_RATIO: float = 1e-3
    DEFAULT_BALANCE_COEFFICIENT: float = 1.67

    # Link budget
    DEFAULT_RESIDUAL_DIVERGENCE_DEG: float = 0.5
    BIFOCAL_REDISTRIBUTION_FOCAL: Literal["feed", "region"] = "feed"
    BIFOCAL_COVER_HIGHER_MODES: bool = False

    # Sweeps
    SWEEP_MAX_WORKERS: int = 1

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )


@lru_cache()
def get_settings():
    return Settings()
