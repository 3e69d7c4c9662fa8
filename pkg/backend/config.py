import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()

DEFAULT_BUDGET = 10 ** 8


class Settings(BaseModel):
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    budget: int = Field(default=DEFAULT_BUDGET, ge=1)
    samples: int = Field(default=2000, ge=0)
    recovery_samples: int = Field(default=100, ge=0)
    log_level: str = "INFO"


def _env_int(name: str) -> Optional[int]:
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return None
    return int(value)


def get_settings() -> Settings:
    """Lê configuração do ambiente (.env incluído)"""
    values = {
        "seed": _env_int("LRC_SEED"),
        "budget": _env_int("LRC_BUDGET"),
        "samples": _env_int("LRC_SAMPLES"),
        "recovery_samples": _env_int("LRC_RECOVERY_SAMPLES"),
        "log_level": os.getenv("LRC_LOG_LEVEL"),
    }
    return Settings(**{key: value for key, value in values.items() if value is not None})
