from .weightspace import PositiveWeight, AOperator, make_weight, a_operator, operator_a_seminorm
from .aspectrum import SpectrumReport, InvertibilityVerdict, a_spectrum, a_invertible, pure_state_spectrum
from .laws import FuzzConfig, LawReport, run_law, run_suite
from .shiftlab import ShiftKind, ShiftModel, build_model, disc_report, resolvent_scan

__all__ = [
    "PositiveWeight",
    "AOperator",
    "make_weight",
    "a_operator",
    "operator_a_seminorm",
    "SpectrumReport",
    "InvertibilityVerdict",
    "a_spectrum",
    "a_invertible",
    "pure_state_spectrum",
    "FuzzConfig",
    "LawReport",
    "run_law",
    "run_suite",
    "ShiftKind",
    "ShiftModel",
    "build_model",
    "disc_report",
    "resolvent_scan",
]
