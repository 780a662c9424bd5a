import os
import logging
from dataclasses import dataclass, replace
from typing import Any, Optional, Tuple

import numpy as np
from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances shared by every computation.

    Attributes:
        rank_rel_tol: Relative singular-value cutoff (times sigma_max).
        residual_tol: Acceptance bound for equation residuals.
        set_match_tol: Matching threshold for spectrum multisets.
        psd_clamp_tol: Negative eigenvalues above -psd_clamp_tol*||M|| are clamped to 0.
    """
    rank_rel_tol: float = 1e-10
    residual_tol: float = 1e-9
    set_match_tol: float = 1e-8
    psd_clamp_tol: float = 1e-10

    def __post_init__(self):
        for name in ("rank_rel_tol", "residual_tol", "set_match_tol", "psd_clamp_tol"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"Configuration error: {name} must be strictly positive, got {value}")

    def with_overrides(self, **overrides: Optional[float]) -> "ToleranceConfig":
        changes = {k: float(v) for k, v in overrides.items() if v is not None}
        return replace(self, **changes) if changes else self

    @classmethod
    def for_exact_diagonal(cls, base: Optional["ToleranceConfig"] = None) -> "ToleranceConfig":
        # Diagonal weights given entrywise must keep every nonzero entry.
        base = base or cls()
        return replace(base, rank_rel_tol=float(np.finfo(float).tiny))

    def to_dict(self) -> dict:
        return {
            "rank_rel_tol": self.rank_rel_tol,
            "residual_tol": self.residual_tol,
            "set_match_tol": self.set_match_tol,
            "psd_clamp_tol": self.psd_clamp_tol,
        }


def _env_float(name: str) -> Optional[float]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        return float(raw)
    except ValueError:
        logger.error(f"Invalid value for {name}: {raw!r}")
        raise ValueError(f"Configuration error: {name} is not a number") from None


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.error(f"Invalid value for {name}: {raw!r}")
        raise ValueError(f"Configuration error: {name} is not an integer") from None


class Config:
    DEFAULT_SEED = _env_int("ASPECTRA_SEED", 20240601)
    OUTPUT_DIR = os.getenv("ASPECTRA_OUTPUT_DIR", "data/runs")
    LOG_LEVEL = os.getenv("ASPECTRA_LOG_LEVEL", "INFO").upper()

    DEFAULT_TRIALS = 200
    DEFAULT_DIMS: Tuple[int, int] = (2, 8)
    DEFAULT_SPREAD = 4.0
    DEFAULT_SCALE = 1.0

    GELFAND_DOUBLINGS = 12
    SHIFT_LINEAR_MAX_N = 160
    DIVERGENCE_RATIO = 10.0

    ENV_TOLERANCES = {
        "rank_rel_tol": "ASPECTRA_RANK_REL_TOL",
        "residual_tol": "ASPECTRA_RESIDUAL_TOL",
        "set_match_tol": "ASPECTRA_SET_MATCH_TOL",
        "psd_clamp_tol": "ASPECTRA_PSD_CLAMP_TOL",
    }

    @classmethod
    def tolerances(cls, **overrides: Any) -> ToleranceConfig:
        """Defaults, then environment, then explicit overrides (None entries ignored)."""
        from_env = {field: _env_float(var) for field, var in cls.ENV_TOLERANCES.items()}
        return ToleranceConfig().with_overrides(**from_env).with_overrides(**overrides)
