"""Configuration settings for cy-mirror-series."""

from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # App
    app_name: str = "cy-mirror-series"
    app_version: str = "1.0.0"
    log_level: str = "WARNING"
    log_json: bool = False

    # Truncation
    series_terms: int = 12
    instanton_depth: int = 5

    # Recurrence fitting
    fit_order: int = 4
    fit_max_m: int = 6
    fit_margin: int = 10

    # Output and persistence
    output_format: str = "json"
    cache_dir: Optional[str] = None

    # Catalog fan-out
    worker_concurrency: int = 4

    class Config:
        env_file = ".env"
        case_sensitive = False


# Global settings instance
settings = Settings()
