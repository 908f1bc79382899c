"""
Configuration loader - reads .env / environment into a Settings object
"""

import logging
import os
import sys
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from .errors import ParameterError

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


@dataclass(frozen=True)
class Settings:
    log_level: str = 'INFO'
    log_file: Optional[str] = None
    workers: int = 1
    dense_limit: int = 4096
    full_basis_cap: int = 2 ** 24
    max_ground_degeneracy: int = 1
    seed: int = 0
    tol: float = 1e-10


def _int_env(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ParameterError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return value


def _float_env(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ParameterError(f"{name} must be a number, got {raw!r}")
    if not value > 0:
        raise ParameterError(f"{name} must be positive, got {value}")
    return value


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Load settings from the environment (and .env if present)"""
    load_dotenv()

    return Settings(
        log_level=os.getenv('LOG_LEVEL', 'INFO').upper(),
        log_file=os.getenv('LOG_FILE') or None,
        workers=_int_env('MATRYOSHKA_WORKERS', 1),
        dense_limit=_int_env('MATRYOSHKA_DENSE_LIMIT', 4096),
        full_basis_cap=_int_env('MATRYOSHKA_FULL_BASIS_CAP', 2 ** 24),
        max_ground_degeneracy=_int_env('MATRYOSHKA_MAX_GROUND_DEGENERACY', 1),
        seed=_int_env('MATRYOSHKA_SEED', 0, minimum=0),
        tol=_float_env('MATRYOSHKA_TOL', 1e-10),
    )


def configure_logging(settings: Optional[Settings] = None) -> None:
    """Attach stderr (and optional file) handlers to the package loggers"""
    settings = settings or get_settings()

    root = logging.getLogger()
    level = getattr(logging, settings.log_level, None)
    if not isinstance(level, int):
        raise ParameterError(f"Unknown LOG_LEVEL {settings.log_level!r}")
    root.setLevel(level)

    if getattr(configure_logging, '_configured', False):
        return

    formatter = logging.Formatter(LOG_FORMAT)
    stream = logging.StreamHandler(sys.stderr)
    stream.setFormatter(formatter)
    root.addHandler(stream)

    if settings.log_file:
        Path(settings.log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(settings.log_file)
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    configure_logging._configured = True
