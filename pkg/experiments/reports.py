"""Solve reports and their CSV/JSON emission"""

import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import pendulum

CSV_COLUMNS = ["method", "pnum1", "pnum2", "pnumE", "iter", "lambda_min", "lambda_max", "kappa", "time"]


@dataclass
class SolveReport:
    method: int
    dim: int
    N: int
    m: int
    coefficient: str
    scaling: str
    eta: str = "full"
    tol_face: Optional[float] = None
    tol_edge: Optional[float] = None

    # adaptive primal counts and their ratios to the number of faces/edges
    pnum1: int = 0
    pnum2: int = 0
    pnumE: int = 0
    p1: float = 0.0
    p2: float = 0.0
    pE: float = 0.0
    primal_total: int = 0

    iterations: int = 0
    converged: bool = False
    lambda_min: float = 1.0
    lambda_max: float = 1.0
    kappa: float = 1.0
    residuals: List[float] = field(default_factory=list)
    time: float = 0.0

    bound_constant: Optional[float] = None
    bound_value: Optional[float] = None
    bound_ok: Optional[bool] = None
    gram_condition: Optional[float] = None
    direct_error: Optional[float] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    class_selections: List[dict] = field(default_factory=list)
    stages: Dict[str, float] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    run_id: Optional[str] = None
    created_at: str = field(default_factory=lambda: pendulum.now("UTC").to_iso8601_string())

    @property
    def tolerance(self) -> Optional[float]:
        values = [v for v in (self.tol_face, self.tol_edge) if v is not None]
        return max(values) if values else None

    def csv_row(self) -> List[Any]:
        return [self.method, self.pnum1, self.pnum2, self.pnumE, self.iterations, self.lambda_min, self.lambda_max, self.kappa, self.time]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SolveReport":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


def _as_list(reports: Union[SolveReport, Iterable[SolveReport]]) -> List[SolveReport]:
    return [reports] if isinstance(reports, SolveReport) else list(reports)


def format_csv(reports: Union[SolveReport, Iterable[SolveReport]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for report in _as_list(reports):
        writer.writerow(report.csv_row())
    return buffer.getvalue()


def format_json(reports: Union[SolveReport, Iterable[SolveReport]]) -> str:
    items = [r.to_dict() for r in _as_list(reports)]
    return json.dumps(items[0] if len(items) == 1 else items, indent=2)


def emit_report(reports: Union[SolveReport, Iterable[SolveReport]], path, fmt: str = "csv") -> Path:
    """Write one or more reports; the csv form holds the table columns, the json form everything"""
    if fmt == "csv":
        text = format_csv(reports)
    elif fmt == "json":
        text = format_json(reports)
    else:
        raise ValueError(f"Unknown report format: {fmt}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def load_reports(path) -> List[SolveReport]:
    data = json.loads(Path(path).read_text())
    return [SolveReport.from_dict(d) for d in (data if isinstance(data, list) else [data])]
