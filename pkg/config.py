"""
Configuration settings for the greedylab experiment harness
"""
from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict

VERSION = "1.0.0"


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="GREEDYLAB_", env_file=".env", extra="ignore")

    # Enumeration budget (number of vectors a single exhaustive search may evaluate)
    BUDGET: int = 20_000_000

    # Randomized searches
    SEED: int = 20240601
    JOBS: int = 1

    # Numeric tolerances
    REL_TOL: float = 1e-9
    WITNESS_TOL: float = 1e-9

    # Output formatting
    CSV_DIGITS: int = 17

    # Coefficient grid: magnitudes 2^-k for 0 <= k <= DYADIC_DEPTH, plus 0
    DYADIC_DEPTH: int = 6

    # Rows per vectorised norm evaluation
    BATCH_SIZE: int = 65536

    # Logging / progress
    LOG_LEVEL: str = "INFO"
    PROGRESS: bool = False


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Get the process-wide settings instance"""
    return Settings()
