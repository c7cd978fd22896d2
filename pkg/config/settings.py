"""Application configuration settings."""
from typing import Literal, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Provider
    api_base: str = "https://blockchain.info"
    provider: Literal["http", "fixture"] = "fixture"
    fixture_dir: str = "fixtures/demo"
    rate_limit: float = Field(default=0.5, gt=0)  # requests per second
    max_retries: int = Field(default=3, ge=0)
    page_size: int = Field(default=50, gt=0)
    parallelism: int = Field(default=4, gt=0)
    request_timeout: int = 30  # seconds
    backoff_base: float = 1.0  # seconds
    jitter_seed: int = 0

    # Artifacts
    store_path: str = "ransomtrace.db"
    out_dir: str = "out"
    campaign_dir: str = "campaigns"

    # Classification
    fee_band_mode: Literal["fee_to_usd", "gross_band"] = "fee_to_usd"

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None

    model_config = SettingsConfigDict(
        env_prefix="RANSOMTRACE_",
        env_file=".env",
        case_sensitive=False,
    )


# Global settings instance
settings = Settings()
