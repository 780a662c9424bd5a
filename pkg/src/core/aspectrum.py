"""A-spectrum, A-spectral radius and A-invertibility.

Three routes are implemented and checked against each other by the law
suite: the range-space compression B = U* T U, the Douglas inequalities
on two Hermitian pencils, and rank-one pure states built from left
eigenvectors of B.

Left and right A-spectra are not exposed separately; for the finite
compression they coincide.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
import scipy.linalg

from src.core.errors import NotAInvertible
from src.core.matcore import general_eig, op_norm
from src.core.weightspace import PositiveWeight, require_member, half_compression, range_block

logger = logging.getLogger(__name__)

UNDERFLOW_FLOOR = 1e-300


class SpectrumMethod(str, Enum):
    COMPRESSION = "compression"
    PURE_STATE = "pure_state"
    GELFAND_RADIUS_ONLY = "gelfand_radius_only"


class InvertibilityRoute(str, Enum):
    COMPRESSION = "compression"
    DOUGLAS = "douglas"


class FailingCondition(str, Enum):
    COND_I_LOWER = "cond_i_lower"
    COND_I_UPPER = "cond_i_upper"
    COND_II = "cond_ii"
    SINGULAR_COMPRESSION = "singular_compression"


def singular_cutoff(rank_rel_tol: float, scale: float) -> float:
    """Singular values at or below this count as zero for an operator of norm scale.

    Absolute as well as relative; a 1x1 compression has sigma_min = sigma_max.
    """
    return rank_rel_tol * (1.0 + scale)


def _points_to_list(points: np.ndarray) -> list:
    return [[float(p.real), float(p.imag)] for p in np.asarray(points, dtype=complex)]


@dataclass
class SpectrumReport:
    points: np.ndarray
    radius: float
    method: SpectrumMethod
    weight_rank: int
    residuals: Dict[str, Any] = field(default_factory=dict)

    @property
    def degenerate(self) -> bool:
        return bool(self.residuals.get("degenerate_eigenvectors", False))

    def to_dict(self) -> Dict:
        return {
            "points": _points_to_list(self.points),
            "radius": self.radius,
            "method": self.method.value,
            "weight_rank": self.weight_rank,
            "residuals": self.residuals,
        }


@dataclass
class PencilMargins:
    """Extreme generalized eigenvalues of the two Douglas pencils.

    Pencil eigenvalues are squared singular values of the whitened
    factors; they are obtained from those singular values directly so
    that small margins are not lost to squaring.
    """
    cond_i_lower: float
    cond_i_upper: float
    cond_ii_lower: float
    cond_ii_upper: float

    @staticmethod
    def _degenerate(lower: float, upper: float, rank_rel_tol: float) -> bool:
        return math.sqrt(max(lower, 0.0)) <= singular_cutoff(rank_rel_tol, math.sqrt(max(upper, 0.0)))

    def failing_condition(self, rank_rel_tol: float) -> Optional[FailingCondition]:
        if not math.isfinite(self.cond_i_upper):
            return FailingCondition.COND_I_UPPER
        if self._degenerate(self.cond_i_lower, self.cond_i_upper, rank_rel_tol):
            return FailingCondition.COND_I_LOWER
        if self._degenerate(self.cond_ii_lower, self.cond_ii_upper, rank_rel_tol):
            return FailingCondition.COND_II
        return None


@dataclass
class InvertibilityVerdict:
    invertible: bool
    route: InvertibilityRoute
    margin: float
    inverse: Optional[np.ndarray] = None
    failed_condition: Optional[FailingCondition] = None

    def to_dict(self) -> Dict:
        return {
            "invertible": self.invertible,
            "route": self.route.value,
            "margin": self.margin,
            "failed_condition": self.failed_condition.value if self.failed_condition else None,
        }


def compress(w: PositiveWeight, T) -> np.ndarray:
    return range_block(w, require_member(w, T))


def a_spectrum(w: PositiveWeight, T) -> SpectrumReport:
    B = compress(w, T)
    points = general_eig(B, tol=w.tol).values
    return SpectrumReport(
        points=points,
        radius=float(np.max(np.abs(points))),
        method=SpectrumMethod.COMPRESSION,
        weight_rank=w.rank,
    )


def a_radius_eig(w: PositiveWeight, T) -> float:
    return a_spectrum(w, T).radius


def gelfand_report(w: PositiveWeight, T, doublings: int = 12) -> SpectrumReport:
    """r_A(T) as ||S^(2^k)||^(2^-k) with S = A^{1/2} T (A^{1/2})^+.

    Each squaring is renormalized and the scale is carried as a logarithm.
    """
    current = half_compression(w, require_member(w, T))
    log_scale = 0.0
    underflow = False
    for step in range(doublings + 1):
        if step:
            current = current @ current
            log_scale *= 2.0
        norm = op_norm(current)
        if norm < UNDERFLOW_FLOOR:
            underflow = True
            break
        log_scale += math.log(norm)
        current = current / norm

    radius = 0.0 if underflow else math.exp(log_scale / 2.0 ** doublings)
    if underflow:
        logger.debug(f"Gelfand iterates collapsed below {UNDERFLOW_FLOOR:g}; radius reported as 0")
    return SpectrumReport(
        points=np.zeros(0, dtype=complex),
        radius=radius,
        method=SpectrumMethod.GELFAND_RADIUS_ONLY,
        weight_rank=w.rank,
        residuals={"underflow": underflow, "doublings": doublings},
    )


def a_radius_gelfand(w: PositiveWeight, T, doublings: int = 12) -> float:
    return gelfand_report(w, T, doublings).radius


def _whitened_singular_values(factor: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """Singular values of factor @ R^{-1} where gram = R* R."""
    R = scipy.linalg.cholesky((gram + gram.conj().T) / 2, lower=False)
    whitened = scipy.linalg.solve_triangular(R.T, factor.T, lower=True).T
    return scipy.linalg.svdvals(whitened)


def pencil_margins(w: PositiveWeight, T) -> PencilMargins:
    """Condition (i): pencil (U*T*ATU, U*AU). Condition (ii): pencil (U*ATT*AU, U*A^2U)."""
    arr = require_member(w, T)
    AU = w.A @ w.U
    first = _whitened_singular_values(w.sqrtA @ arr @ w.U, w.U.conj().T @ AU)
    second = _whitened_singular_values(arr.conj().T @ AU, AU.conj().T @ AU)
    return PencilMargins(
        cond_i_lower=float(first.min() ** 2),
        cond_i_upper=float(first.max() ** 2),
        cond_ii_lower=float(second.min() ** 2),
        cond_ii_upper=float(second.max() ** 2),
    )


def _compression_inverse(w: PositiveWeight, B: np.ndarray) -> np.ndarray:
    inner = scipy.linalg.solve(B, np.eye(B.shape[0], dtype=complex))
    return w.U @ inner @ w.U.conj().T


def a_invertible(w: PositiveWeight, T, route: InvertibilityRoute = InvertibilityRoute.COMPRESSION) -> InvertibilityVerdict:
    B = compress(w, T)
    if route == InvertibilityRoute.DOUGLAS:
        margins = pencil_margins(w, T)
        failed = margins.failing_condition(w.tol.rank_rel_tol)
        return InvertibilityVerdict(
            invertible=failed is None,
            route=route,
            margin=margins.cond_i_lower,
            inverse=_compression_inverse(w, B) if failed is None else None,
            failed_condition=failed,
        )

    singular = scipy.linalg.svdvals(B)
    invertible = singular[-1] > singular_cutoff(w.tol.rank_rel_tol, singular[0])
    return InvertibilityVerdict(
        invertible=bool(invertible),
        route=route,
        margin=float(singular[-1]),
        inverse=_compression_inverse(w, B) if invertible else None,
        failed_condition=None if invertible else FailingCondition.SINGULAR_COMPRESSION,
    )


def a_inverse(w: PositiveWeight, T) -> np.ndarray:
    """S = U B^{-1} U*, satisfying ATS = AST = A."""
    verdict = a_invertible(w, T)
    if not verdict.invertible:
        raise NotAInvertible(f"Compression is singular (smallest singular value {verdict.margin:.3e})")
    return verdict.inverse


@dataclass(frozen=True)
class PureState:
    value: complex
    trace_defect: float
    point_residual: float
    certified: bool


def certify_pure_state(q: np.ndarray, P: np.ndarray, PT: np.ndarray, expected: complex, trace_tol: float, point_tol: float) -> PureState:
    """tr(Q P T) for Q = qq*/|q|^2, replaced by expected unless tr(QP) = 1 and the value matches."""
    weight = np.vdot(q, q).real
    trace_defect = float(abs(np.vdot(q, P @ q) / weight - 1.0))
    value = complex(np.vdot(q, PT @ q) / weight)
    residual = float(abs(value - expected))
    certified = trace_defect <= trace_tol and residual <= point_tol
    return PureState(
        value=value if certified else complex(expected),
        trace_defect=trace_defect,
        point_residual=residual,
        certified=certified,
    )


def pure_state_spectrum(w: PositiveWeight, T) -> SpectrumReport:
    """A-spectrum as values tr(Q P T) of rank-one projections Q = qq*/|q|^2.

    q = U y for left eigenvectors y of the compression, so tr(QP) = 1.
    Clustered or poorly certified points fall back to compression values.
    """
    arr = require_member(w, T)
    B = range_block(w, arr)
    eig = general_eig(B, want_vectors=True, tol=w.tol)
    values = eig.values

    if eig.clustered:
        logger.warning("Clustered compression eigenvalues; pure-state values replaced by compression values")
        return SpectrumReport(
            points=values,
            radius=float(np.max(np.abs(values))),
            method=SpectrumMethod.PURE_STATE,
            weight_rank=w.rank,
            residuals={"degenerate_eigenvectors": True, "max_trace_defect": None, "max_point_residual": None},
        )

    PT = w.P @ arr
    bound = w.tol.set_match_tol * (1 + op_norm(B))
    points = np.empty_like(values)
    trace_defect = 0.0
    point_residual = 0.0
    degenerate = False
    for i, y in enumerate(eig.left_vectors.T):
        state = certify_pure_state(w.U @ y, w.P, PT, values[i], w.tol.set_match_tol, bound)
        trace_defect = max(trace_defect, state.trace_defect)
        point_residual = max(point_residual, state.point_residual)
        degenerate = degenerate or not state.certified
        points[i] = state.value

    if degenerate:
        logger.warning("Some pure-state values failed certification; compression values used for them")
    return SpectrumReport(
        points=points,
        radius=float(np.max(np.abs(points))),
        method=SpectrumMethod.PURE_STATE,
        weight_rank=w.rank,
        residuals={
            "degenerate_eigenvectors": degenerate,
            "max_trace_defect": float(trace_defect),
            "max_point_residual": float(point_residual),
        },
    )


def contains_zero(report: SpectrumReport, tol: float) -> bool:
    return bool(report.points.size) and bool(np.min(np.abs(report.points)) <= tol)
