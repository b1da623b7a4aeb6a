from experiments.config import METHODS, ExperimentConfig, MethodSpec, parse_coefficient, parse_tolerance
from experiments.reports import CSV_COLUMNS, SolveReport, emit_report, load_reports

__all__ = [
    "CSV_COLUMNS",
    "METHODS",
    "ExperimentConfig",
    "MethodSpec",
    "SolveReport",
    "emit_report",
    "load_reports",
    "parse_coefficient",
    "parse_tolerance",
]
