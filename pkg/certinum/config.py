"""
Runtime settings for certinum.

Defaults come from data/defaults.yaml; environment variables (optionally from
a .env file) and finally CLI flags override them.
"""

import os
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import yaml
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DATA_PATH = Path(__file__).resolve().parent.parent / "data"
DEFAULTS_FILE = DATA_PATH / "defaults.yaml"

ENV_OVERRIDES = {
    "CERTINUM_BUDGET": "budget",
    "CERTINUM_SEED": "seed",
    "CERTINUM_DPS": "dps",
    "CERTINUM_WORKERS": "workers",
}


@dataclass(frozen=True)
class DiffConfig:
    """Derivative engine and probe configuration."""
    fd_step: Optional[float] = None  # None = scale-relative step
    max_order: int = 24
    probe_min_exponent: int = 1
    probe_max_exponent: int = 20
    probe_threshold: float = 1e-6

    def __post_init__(self):
        if self.fd_step is not None and self.fd_step <= 0:
            raise ValueError(f"fd_step must be positive, got {self.fd_step}")
        if self.max_order < 1:
            raise ValueError(f"max_order must be at least 1, got {self.max_order}")
        if self.probe_min_exponent > self.probe_max_exponent:
            raise ValueError("probe radii schedule is empty")

    def probe_radii(self, center: float = 0.0) -> list[float]:
        """Powers of two 2^-min ... 2^-max scaled by max(1, |center|)."""
        scale = max(1.0, abs(center))
        return [scale * 2.0 ** -k for k in range(self.probe_min_exponent, self.probe_max_exponent + 1)]


@dataclass(frozen=True)
class Settings:
    """Everything tunable, in one immutable bundle."""
    budget: int = 1_000_000
    seed: int = 0xC0FFEE
    random_samples: int = 64
    workers: int = 1
    dps: int = 50
    oracle_iterations: int = 200
    grid_points: int = 257
    delta_min_exponent: int = 1
    delta_max_exponent: int = 20
    slack_ulps: int = 16
    fixed_point_ulps: int = 8
    derivative_zero_tol: float = 1e-10
    diff: DiffConfig = field(default_factory=DiffConfig)

    def with_overrides(self, **changes) -> "Settings":
        """Copy with the non-None keyword values replaced."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _flatten(data: dict) -> tuple[dict, dict]:
    """Split the YAML sections into Settings and DiffConfig keyword sets."""
    top, diff = {}, {}
    for section, values in data.items():
        if not isinstance(values, dict):
            continue
        target = diff if section == "differentiation" else top
        target.update(values)
    return top, diff


def load_settings(path: Optional[Path | str] = None, use_env: bool = True) -> Settings:
    """Load settings from YAML, then apply environment overrides."""
    path = Path(path) if path is not None else DEFAULTS_FILE
    top: dict = {}
    diff: dict = {}

    if path.exists():
        with open(path) as f:
            data = yaml.safe_load(f) or {}
        top, diff = _flatten(data)
        logger.info(f"Loaded settings from {path}")
    else:
        logger.warning(f"Settings file not found: {path}; using built-in defaults")

    known = set(Settings.__dataclass_fields__) - {"diff"}
    unknown = set(top) - known
    if unknown:
        logger.warning(f"Ignoring unknown settings: {sorted(unknown)}")
    settings = Settings(
        diff=DiffConfig(**{k: v for k, v in diff.items() if k in DiffConfig.__dataclass_fields__}),
        **{k: v for k, v in top.items() if k in known},
    )

    if use_env:
        load_dotenv()
        overrides = {}
        for var, attr in ENV_OVERRIDES.items():
            raw = os.getenv(var)
            if raw:
                overrides[attr] = int(raw, 0)
        if overrides:
            logger.info(f"Environment overrides: {overrides}")
            settings = settings.with_overrides(**overrides)

    return settings


_cached: Optional[Settings] = None


def get_settings() -> Settings:
    """Process-wide settings, loaded once on first use."""
    global _cached
    if _cached is None:
        _cached = load_settings()
    return _cached


def use_settings(settings: Settings) -> Settings:
    """Install settings for the rest of the process (CLI flags, tests)."""
    global _cached
    _cached = settings
    return settings
