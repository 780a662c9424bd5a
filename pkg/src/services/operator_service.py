import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from src.config import ToleranceConfig
from src.core import aspectrum, weightspace
from src.core.errors import DimensionMismatch, NotApplicable, SpectralError
from src.core.matcore import op_norm
from src.repositories import MatrixRepository

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_APPLICABLE = 1
EXIT_USAGE = 2


@dataclass
class OperatorResult:
    success: bool
    exit_code: int = EXIT_OK
    payload: Dict[str, Any] = field(default_factory=dict)
    lines: List[str] = field(default_factory=list)
    written: List[str] = field(default_factory=list)
    error_message: Optional[str] = None


def guarded(action: Callable[..., OperatorResult]) -> Callable[..., OperatorResult]:
    """Maps toolkit errors to result objects with the CLI exit-code contract."""
    def wrapper(*args, **kwargs) -> OperatorResult:
        try:
            return action(*args, **kwargs)
        except NotApplicable as e:
            logger.error(f"{action.__name__}: {e}")
            return OperatorResult(success=False, exit_code=EXIT_NOT_APPLICABLE, error_message=str(e))
        except (SpectralError, OSError, ValueError) as e:
            logger.error(f"{action.__name__}: {type(e).__name__}: {e}")
            return OperatorResult(success=False, exit_code=EXIT_USAGE, error_message=str(e))
    wrapper.__name__ = action.__name__
    wrapper.__doc__ = action.__doc__
    return wrapper


class OperatorService:
    """Single-operator computations on a (weight, operator) file pair."""

    def __init__(self, tol: Optional[ToleranceConfig] = None, matrix_repository: Optional[MatrixRepository] = None):
        self.tol = tol or ToleranceConfig()
        self.matrix_repo = matrix_repository or MatrixRepository()

    def _load(self, weight_path: str, operator_path: str):
        A = self.matrix_repo.load(weight_path)
        T = self.matrix_repo.load(operator_path)
        w = weightspace.make_weight(A, self.tol)
        if T.shape != A.shape:
            raise DimensionMismatch(f"Operator shape {T.shape} does not match weight shape {A.shape}")
        return w, T

    @staticmethod
    def _non_member(w: weightspace.PositiveWeight, T: np.ndarray) -> OperatorResult:
        defect = weightspace.membership_defect(w, T)
        return OperatorResult(
            success=False,
            exit_code=EXIT_NOT_APPLICABLE,
            payload={"in_MA": False, "seminorm": math.inf, "membership_defect": defect},
            lines=["verdict: not in M^A", "||T||_A = inf"],
            error_message="Operator is not in M^A",
        )

    @guarded
    def norm(self, weight_path: str, operator_path: str) -> OperatorResult:
        w, T = self._load(weight_path, operator_path)
        op = weightspace.a_operator(w, T)
        if not op.in_MA:
            return self._non_member(w, T)
        norm_L = weightspace.operator_a_seminorm(w, op.half_adjoint)
        return OperatorResult(
            success=True,
            payload={
                "in_MA": True,
                "seminorm": op.seminorm,
                "half_adjoint_seminorm": norm_L,
                "compressed_shape": [w.rank, w.rank],
            },
            lines=[
                "verdict: in M^A",
                f"||T||_A = {op.seminorm:.16g}",
                f"||L||_A = {norm_L:.16g}",
                f"compression: {w.rank}x{w.rank}",
            ],
        )

    @guarded
    def adjoint(self, weight_path: str, operator_path: str, out_dir: Optional[str] = None) -> OperatorResult:
        w, T = self._load(weight_path, operator_path)
        op = weightspace.a_operator(w, T)
        if not op.in_MA:
            return self._non_member(w, T)
        sharp_residual = op_norm(w.A @ op.sharp - T.conj().T @ w.A)
        half_residual = op_norm(w.sqrtA @ T - op.half_adjoint.conj().T @ w.sqrtA)
        result = OperatorResult(
            success=True,
            payload={"a_adjoint_residual": sharp_residual, "half_adjoint_residual": half_residual},
            lines=[
                f"||A S - T* A|| = {sharp_residual:.3e}",
                f"||A^1/2 T - L* A^1/2|| = {half_residual:.3e}",
            ],
        )
        if out_dir:
            result.written.append(self.matrix_repo.save(os.path.join(out_dir, "a_adjoint.json"), op.sharp))
            result.written.append(self.matrix_repo.save(os.path.join(out_dir, "half_adjoint.json"), op.half_adjoint))
        return result

    @guarded
    def spectrum(self, weight_path: str, operator_path: str, method: str = "compression", doublings: int = 12) -> OperatorResult:
        w, T = self._load(weight_path, operator_path)
        if not weightspace.membership(w, T):
            return self._non_member(w, T)
        chosen = aspectrum.SpectrumMethod(method)
        if chosen == aspectrum.SpectrumMethod.PURE_STATE:
            report = aspectrum.pure_state_spectrum(w, T)
        elif chosen == aspectrum.SpectrumMethod.GELFAND_RADIUS_ONLY:
            report = aspectrum.gelfand_report(w, T, doublings)
        else:
            report = aspectrum.a_spectrum(w, T)
        lines = [f"{p.real:.16g} {p.imag:+.16g}i" for p in report.points]
        lines.append(f"radius: {report.radius:.16g} ({report.method.value})")
        return OperatorResult(success=True, payload=report.to_dict(), lines=lines)

    @guarded
    def invert(self, weight_path: str, operator_path: str, out_path: Optional[str] = None) -> OperatorResult:
        w, T = self._load(weight_path, operator_path)
        if not weightspace.membership(w, T):
            return self._non_member(w, T)
        by_compression = aspectrum.a_invertible(w, T, aspectrum.InvertibilityRoute.COMPRESSION)
        by_douglas = aspectrum.a_invertible(w, T, aspectrum.InvertibilityRoute.DOUGLAS)
        payload = {"compression": by_compression.to_dict(), "douglas": by_douglas.to_dict()}
        lines = [
            f"{v.route.value}: {'A-invertible' if v.invertible else 'not A-invertible'} (margin {v.margin:.3e})"
            + (f", failed {v.failed_condition.value}" if v.failed_condition else "")
            for v in (by_compression, by_douglas)
        ]
        if not by_compression.invertible:
            return OperatorResult(
                success=False,
                exit_code=EXIT_NOT_APPLICABLE,
                payload=payload,
                lines=lines,
                error_message="Operator is not A-invertible",
            )

        S = by_compression.inverse
        payload["residual_ATS"] = op_norm(w.A @ T @ S - w.A)
        payload["residual_AST"] = op_norm(w.A @ S @ T - w.A)
        result = OperatorResult(success=True, payload=payload, lines=lines)
        if out_path:
            result.written.append(self.matrix_repo.save(out_path, S))
        return result
