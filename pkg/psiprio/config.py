"""
PsiPRIO - Configuración
Valores por defecto, data/psiprio_config.json y variables de entorno PSIPRIO_*.
"""
import json
import logging
import os
from pathlib import Path
from typing import List

from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger(__name__)

CONFIG_PATH = Path(__file__).parent.parent / "data" / "psiprio_config.json"

ENV_VARS = {
    "depth": "PSIPRIO_DEPTH",
    "jobs": "PSIPRIO_JOBS",
    "max_states": "PSIPRIO_MAX_STATES",
    "seed": "PSIPRIO_SEED",
    "log_level": "PSIPRIO_LOG_LEVEL",
    "rep_unfold": "PSIPRIO_REP_UNFOLD",
    "unfold_budget": "PSIPRIO_UNFOLD_BUDGET",
}


class Settings(BaseModel):
    depth: int = 4
    jobs: int = 1
    max_states: int = 20000
    seed: int = 0
    log_level: str = "WARNING"
    rep_unfold: int = 2
    unfold_budget: int = 2
    universe: List[str] = Field(default_factory=lambda: ["x", "y"])
    samples: int = 200

    @field_validator("log_level")
    @classmethod
    def _level(cls, v: str) -> str:
        v = v.upper()
        if v not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Nivel de log no válido: {v}")
        return v

    @field_validator("depth", "jobs", "max_states", "rep_unfold", "samples")
    @classmethod
    def _positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("debe ser >= 1")
        return v


# =========================================================
#  Fichero de configuración
# =========================================================

def _load_config(path: Path = None) -> dict:
    path = path or CONFIG_PATH
    if path.exists():
        with open(path, "r") as f:
            return json.load(f)
    return {}


def _save_config(config: dict, path: Path = None):
    path = path or CONFIG_PATH
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(config, f, indent=2)


def get_settings(path: Path = None) -> Settings:
    valores = _load_config(path)
    for campo, variable in ENV_VARS.items():
        if variable in os.environ:
            valores[campo] = os.environ[variable]
    if "PSIPRIO_UNIVERSE" in os.environ:
        valores["universe"] = [n.strip() for n in os.environ["PSIPRIO_UNIVERSE"].split(",") if n.strip()]
    return Settings(**valores)


def save_settings(settings: Settings, path: Path = None):
    _save_config(settings.model_dump(), path)
    logger.info(f"Configuración guardada en {path or CONFIG_PATH}")
