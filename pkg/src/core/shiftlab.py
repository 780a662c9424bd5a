"""Truncated weighted-shift models.

unilateral_halved: sqrt weights a_n = 2^-n (n = 0..N-1), T = (2/5) S, L = (1/5) S*.
bilateral_factorial: indices -floor(N/2)..ceil(N/2)-1, a_n = 1 for n < 0 and
1/n! for n >= 0, T = S. In both, sqrt(A) = diag(a_n) and A = diag(a_n^2).

Truncation is a hard cutoff, so T_N is nilpotent and T_N - lambda is
lower bidiagonal. Resolvents are formed by forward substitution; a
relative-cutoff pseudoinverse would discard exactly the tiny singular
values whose reciprocals carry the growth being measured.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.special import factorial, gammaln

from src.config import Config
from src.core.errors import IndexOutOfTruncation, TruncationTooSmall, UnderflowRisk
from src.core.matcore import op_norm
from src.core.weightspace import PositiveWeight, operator_a_seminorm

logger = logging.getLogger(__name__)

MIN_TRUNCATION = 4
UNILATERAL_T = 0.4
UNILATERAL_L = 0.2


class ShiftKind(str, Enum):
    UNILATERAL_HALVED = "unilateral_halved"
    BILATERAL_FACTORIAL = "bilateral_factorial"


class WeightScaleMode(str, Enum):
    LINEAR = "linear"
    LOG_DOMAIN = "log_domain"


class ProbeMode(str, Enum):
    ADJOINT_SHIFT = "adjoint_shift"


class ScanStatus(str, Enum):
    FINITE = "finite"
    SINGULAR = "singular"


@dataclass(frozen=True)
class ShiftModel:
    kind: ShiftKind
    N: int
    weight_scale_mode: WeightScaleMode = WeightScaleMode.LINEAR

    def __post_init__(self):
        if self.N < MIN_TRUNCATION:
            raise TruncationTooSmall(f"Truncation size must be >= {MIN_TRUNCATION}, got {self.N}")
        if (
            self.kind == ShiftKind.BILATERAL_FACTORIAL
            and self.weight_scale_mode == WeightScaleMode.LINEAR
            and self.N > Config.SHIFT_LINEAR_MAX_N
        ):
            raise UnderflowRisk(
                f"Factorial weights underflow beyond N={Config.SHIFT_LINEAR_MAX_N} in linear mode; use log_domain"
            )

    @property
    def index_offset(self) -> int:
        return -(self.N // 2) if self.kind == ShiftKind.BILATERAL_FACTORIAL else 0

    def indices(self) -> np.ndarray:
        return np.arange(self.index_offset, self.index_offset + self.N)

    def log_weights(self) -> np.ndarray:
        n = self.indices()
        if self.kind == ShiftKind.UNILATERAL_HALVED:
            return -n * math.log(2.0)
        return np.where(n < 0, 0.0, -gammaln(np.maximum(n, 0) + 1.0))

    def weights(self) -> np.ndarray:
        if self.weight_scale_mode == WeightScaleMode.LOG_DOMAIN:
            return np.exp(self.log_weights())
        n = self.indices()
        if self.kind == ShiftKind.UNILATERAL_HALVED:
            return np.ldexp(1.0, -n)
        return np.where(n < 0, 1.0, 1.0 / factorial(np.maximum(n, 0), exact=False))

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind.value,
            "N": self.N,
            "index_offset": self.index_offset,
            "weight_scale_mode": self.weight_scale_mode.value,
        }


class ShiftRealization(NamedTuple):
    weight: PositiveWeight
    T: np.ndarray
    L: Optional[np.ndarray]


@dataclass
class ScanResult:
    lam: complex
    N: int
    growth: float
    status: ScanStatus

    def to_row(self) -> Dict:
        return {
            "lambda_re": float(self.lam.real),
            "lambda_im": float(self.lam.imag),
            "N": self.N,
            "growth": self.growth,
            "status": self.status.value,
        }


@dataclass
class DiscRow:
    lam: complex
    growths: List[float]
    ratio: float
    score: float
    divergent: bool

    @property
    def modulus(self) -> float:
        return abs(self.lam)

    def to_row(self) -> Dict:
        return {
            "lambda_re": float(self.lam.real),
            "lambda_im": float(self.lam.imag),
            "modulus": self.modulus,
            "ratio": self.ratio,
            "score": self.score,
            "divergent": self.divergent,
        }


@dataclass
class DiscReport:
    model: ShiftModel
    N_list: List[int]
    rows: List[DiscRow] = field(default_factory=list)
    scans: List[ScanResult] = field(default_factory=list)

    @property
    def score_threshold(self) -> float:
        """Slope matching a growth ratio of DIVERGENCE_RATIO across the N span."""
        return math.log(Config.DIVERGENCE_RATIO) / (max(self.N_list) - min(self.N_list))

    @property
    def resolvable_radius(self) -> float:
        """Largest |lambda| whose resolvent growth reaches score_threshold across the N span.

        Bilateral growth is |lambda|^(-N/2) from the unit-weight half; unilateral
        growth is (c/|lambda|)^N with c = a_{n+1} T_{n+1,n} / a_n.
        """
        if self.model.kind == ShiftKind.BILATERAL_FACTORIAL:
            return math.exp(-2.0 * self.score_threshold)
        return 0.5 * UNILATERAL_T * math.exp(-self.score_threshold)

    @property
    def divergent_count(self) -> int:
        return sum(row.divergent for row in self.rows)

    @property
    def bounded_count(self) -> int:
        return len(self.rows) - self.divergent_count

    def row_for(self, lam: complex) -> DiscRow:
        return min(self.rows, key=lambda row: abs(row.lam - lam))


def _shift_matrix(N: int, value: float, offset: int) -> np.ndarray:
    return np.diag(np.full(N - 1, value, dtype=complex), k=offset)


def build_model(
    kind: ShiftKind,
    N: int,
    mode: WeightScaleMode = WeightScaleMode.LINEAR,
) -> ShiftRealization:
    model = ShiftModel(ShiftKind(kind), N, WeightScaleMode(mode))
    weight = PositiveWeight.from_sqrt_diagonal(model.weights())
    if model.kind == ShiftKind.UNILATERAL_HALVED:
        return ShiftRealization(weight, _shift_matrix(N, UNILATERAL_T, -1), _shift_matrix(N, UNILATERAL_L, 1))

    # L e_{n+1} = (a_{n+1} / a_n) e_n
    log_a = model.log_weights()
    L = np.diag(np.exp(log_a[1:] - log_a[:-1]).astype(complex), k=1)
    return ShiftRealization(weight, _shift_matrix(N, 1.0, -1), L)


def example_one_norms(N: int) -> Tuple[float, float, float]:
    """(||T||_A, ||L||_A, ||T* A^1/2 - A^1/2 L||) for the unilateral model."""
    weight, T, L = build_model(ShiftKind.UNILATERAL_HALVED, N)
    residual = op_norm(T.conj().T @ weight.sqrtA - weight.sqrtA @ L)
    return operator_a_seminorm(weight, T), operator_a_seminorm(weight, L), residual


def _resolvent_growth(realization: ShiftRealization, lam: complex) -> Tuple[float, ScanStatus]:
    weight, T, _ = realization
    shifted = T - lam * np.eye(T.shape[0])
    try:
        resolvent = scipy.linalg.solve_triangular(shifted, np.eye(T.shape[0], dtype=complex), lower=True)
    except np.linalg.LinAlgError:
        return math.inf, ScanStatus.SINGULAR
    if not np.all(np.isfinite(resolvent)):
        return math.inf, ScanStatus.SINGULAR
    growth = operator_a_seminorm(weight, resolvent)
    if not math.isfinite(growth):
        return math.inf, ScanStatus.SINGULAR
    return growth, ScanStatus.FINITE


def resolvent_scan(model: ShiftModel, lambdas: Sequence[complex], N_list: Sequence[int]) -> List[ScanResult]:
    """||(T_N - lambda)^-1||_A for every (lambda, N), ordered by lambda then N."""
    realizations = {N: build_model(model.kind, N, model.weight_scale_mode) for N in N_list}
    results = []
    for lam in lambdas:
        for N in N_list:
            growth, status = _resolvent_growth(realizations[N], complex(lam))
            results.append(ScanResult(lam=complex(lam), N=int(N), growth=growth, status=status))
    return results


def vector_ratio_probe(
    model: ShiftModel,
    n_values: Sequence[int],
    mode: ProbeMode = ProbeMode.ADJOINT_SHIFT,
) -> List[float]:
    """||A^1/2 T* e_n|| / ||A^1/2 e_n|| = a_{n-1} / a_n."""
    if ProbeMode(mode) != ProbeMode.ADJOINT_SHIFT:
        raise ValueError(f"Unsupported probe mode: {mode}")
    low = model.index_offset + 1
    high = model.index_offset + model.N - 2
    outside = [n for n in n_values if not low <= n <= high]
    if outside:
        raise IndexOutOfTruncation(f"Indices {outside} are not in the interior range [{low}, {high}]")

    positions = np.asarray(n_values) - model.index_offset
    if model.weight_scale_mode == WeightScaleMode.LOG_DOMAIN:
        log_a = model.log_weights()
        return [float(np.exp(log_a[p - 1] - log_a[p])) for p in positions]
    a = model.weights()
    return [float(a[p - 1] / a[p]) for p in positions]


def disc_grid(grid_density: float, extent: float = 1.5) -> List[complex]:
    steps = int(round(2 * extent / grid_density))
    axis = np.round(np.linspace(-extent, extent, steps + 1), 12)
    return [complex(x, y) for y in axis for x in axis]


def disc_report(model: ShiftModel, grid_density: float, N_list: Sequence[int]) -> DiscReport:
    """Divergence diagnostic over the grid [-1.5, 1.5]^2.

    A point is flagged divergent when any truncation is singular, when its
    growth ratio across the N span reaches DIVERGENCE_RATIO, or when the
    fitted slope of log growth against N reaches score_threshold. Points
    beyond resolvable_radius grow too slowly to cross either bound over the
    span and read as bounded; widen the span to resolve them. This is a
    numerical diagnostic for the infinite model, not a proof.
    """
    N_list = sorted(int(N) for N in N_list)
    if len(N_list) < 2:
        raise ValueError("disc_report needs at least two truncation sizes")

    lambdas = disc_grid(grid_density)
    scans = resolvent_scan(model, lambdas, N_list)
    report = DiscReport(model=model, N_list=N_list, scans=scans)
    for i, lam in enumerate(lambdas):
        chunk = scans[i * len(N_list):(i + 1) * len(N_list)]
        growths = [s.growth for s in chunk]
        if any(s.status == ScanStatus.SINGULAR for s in chunk):
            report.rows.append(DiscRow(lam, growths, math.inf, math.inf, True))
            continue
        ratio = growths[-1] / growths[0]
        score = float(np.polyfit(N_list, np.log(growths), 1)[0])
        divergent = ratio >= Config.DIVERGENCE_RATIO or score >= report.score_threshold
        report.rows.append(DiscRow(lam, growths, ratio, score, divergent))

    logger.info(
        f"disc_report {model.kind.value}: {report.divergent_count} divergent, "
        f"{report.bounded_count} bounded of {len(report.rows)} grid points "
        f"(resolvable radius {report.resolvable_radius:.3f})"
    )
    return report
