from typing import Any, Dict, Optional
import os
import json
import pathlib
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _env_int(key: str, default: int) -> int:
    raw = os.getenv(key, "")
    if "#" in raw:
        raw = raw.split("#")[0].strip()
    try:
        return int(raw) if raw else default
    except (ValueError, TypeError):
        return default


def _env_float(key: str, default: float) -> float:
    raw = os.getenv(key, "")
    if "#" in raw:
        raw = raw.split("#")[0].strip()
    try:
        return float(raw) if raw else default
    except (ValueError, TypeError):
        return default


# Environment variables whose settings attribute has another name
ENV_ALIASES = {"GOSSIP_AGE_SEED": "DEFAULT_SEED"}


# Plain settings class, read once at import
class Settings:
    PROJECT_NAME: str = os.getenv("PROJECT_NAME", "gossip-age")
    API_V1_STR: str = "/api/v1"
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO").upper()
    PORT: int = _env_int("PORT", 8000)

    # Default seed for every stochastic run
    DEFAULT_SEED: int = _env_int("GOSSIP_AGE_SEED", 20240101)

    # Search guards
    LINE_PERIOD_CAP: int = _env_int("LINE_PERIOD_CAP", 10_000)
    FC_MAX_USERS: int = _env_int("FC_MAX_USERS", 1_000)

    # Simulation defaults
    SIM_SLOTS: int = _env_int("SIM_SLOTS", 10_000)
    SIM_ITERATIONS: int = _env_int("SIM_ITERATIONS", 2_000)
    SIM_BLOCK_SIZE: int = _env_int("SIM_BLOCK_SIZE", 256)
    SIM_WORKERS: int = _env_int("SIM_WORKERS", 1)
    Z_THRESHOLD: float = _env_float("Z_THRESHOLD", 3.0)

    # Full-scale validation protocol
    FULL_SLOTS: int = 10_000
    FULL_ITERATIONS: int = 200_000

    # Server sampling cost c(beta) = a * beta ** q
    COST_A: float = _env_float("COST_A", 80.0)
    COST_Q: float = _env_float("COST_Q", 2.0)

    def update_from_file(self, path: Optional[str]) -> Dict[str, Any]:
        """
        Merge a JSON config document into the settings.

        Upper-case keys override settings attributes, by attribute name or by
        the environment variable that feeds it; the whole document is
        returned so callers can pick up run parameters from it as well.
        """
        if not path:
            return {}
        document = json.loads(pathlib.Path(path).read_text(encoding="utf-8"))
        if not isinstance(document, dict):
            raise ValueError(f"config file {path} must hold a JSON object")
        for key, value in document.items():
            name = ENV_ALIASES.get(key, key)
            if name.isupper() and hasattr(self, name):
                setattr(self, name, type(getattr(self, name))(value))
        return document


settings = Settings()
