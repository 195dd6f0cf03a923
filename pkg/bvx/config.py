"""Runtime settings read from BVX_* environment variables."""

import logging
import os
from functools import lru_cache
from typing import Optional

from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger(__name__)


class Settings(BaseModel):
    """Tunable limits for dispatch, validation and instrumentation."""

    log_level: str = Field("INFO", description="Root logging level")
    diam2_budget: int = Field(10**8, ge=0, description="Largest n*m for the full diameter-2 check")
    validate_max_n: int = Field(400, ge=1, description="Largest n for all-pairs validation checks")
    sigma_samples: int = Field(64, ge=1, description="Sources sampled when validating large sigma orderings")
    sigma_full_check_n: int = Field(300, ge=1, description="Largest n validated on all pairs")
    treewidth_max_width: int = Field(6, ge=1, description="Widest decomposition auto dispatch accepts")
    treewidth_max_sites: int = Field(16, ge=1, description="Most sites auto dispatch sends to the treewidth solver")
    bench_workers: int = Field(1, ge=1, description="Worker threads for bench ladders")
    debug_checks: bool = Field(False, description="Recompute sweep invariants from scratch on small inputs")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in logging.getLevelNamesMapping():
            raise ValueError(f"Unknown log level: {v}")
        return level


def _env(name: str) -> Optional[str]:
    value = os.getenv(f"BVX_{name.upper()}")
    return value if value not in (None, "") else None


def load_settings() -> Settings:
    """Build settings from the environment, falling back to defaults."""
    values = {}
    for name in Settings.model_fields:
        raw = _env(name)
        if raw is not None:
            values[name] = raw
    return Settings(**values)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging once for an entry point."""
    logging.basicConfig(
        level=(level or get_settings().log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
