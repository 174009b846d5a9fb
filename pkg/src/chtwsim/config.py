from pathlib import Path
from typing import Optional
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="CHTW_", env_file=".env", extra="ignore")

    # Run defaults (CLI flags take precedence)
    default_steps: int = Field(10, ge=0, description="Steps executed by `run` when --steps is omitted")
    sample_every: int = Field(1, ge=1, description="Record full states every K steps")
    strict: bool = Field(False, description="Abort runs on NEGATIVE_RESOURCE")
    output_dir: Path = Field(Path("out"), description="Directory for trace.csv and summary.json")

    # Logging
    log_level: str = Field("WARNING", description="Level of the JSON stderr sink")
    log_file: Optional[Path] = Field(None, description="Optional rotating log file")

    # Output formatting
    significant_digits: int = Field(12, ge=1, le=17, description="Digits used in CSV/JSON outputs")

    # Scenario catalog
    scenarios_path: Path = Field(Path("scenarios"), description="Directory of scenario YAML descriptors")


@lru_cache
def get_settings() -> Settings:
    return Settings()
