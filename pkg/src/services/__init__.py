"""
Service layer

Command-level orchestration between the CLI and the numerical core.
Every service method returns a result dataclass carrying an exit code.

- OperatorService: norm, adjoint, spectrum and invert on matrix files
- ExperimentService: law-suite runs, shift-lab scans, random matrix generation
"""

from .operator_service import OperatorResult, OperatorService
from .experiment_service import ExperimentService, LawsRunResult, ShiftlabRunResult

__all__ = [
    "OperatorResult",
    "OperatorService",
    "ExperimentService",
    "LawsRunResult",
    "ShiftlabRunResult",
]
