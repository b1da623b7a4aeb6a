"""Per-class eigenvalue dumps for the full and the economic (slab) eigenproblems"""

import csv
from pathlib import Path
from typing import List, Optional

import numpy as np

from coarse.space import class_blocks, class_eigenproblems
from context.manager import ContextManager
from experiments.config import ExperimentConfig
from experiments.pipeline import build_problem
from logger import LOGGER
from schur.slab import parse_eta
from workers import parallel_map

SPECTRA_COLUMNS = ["class_id", "kind", "multiplicity", "problem", "eta", "infinite_count", "eigenvalues"]


def _widths(eta) -> List[str]:
    return ["h", "H"] if str(eta) == "both" else [str(eta)]


def class_spectra(problem, config: ExperimentConfig, eta: str) -> List[dict]:
    width = parse_eta(eta, problem.mesh)
    face_problem = config.spec.face_problem or "parallel_sum"
    candidates = [c for c in problem.classes if not c.is_primal_vertex]

    def spectra_of(cls):
        blocks = class_blocks(cls, problem.schurs, width)
        return [
            {
                "class_id": cls.id,
                "kind": cls.kind.value,
                "multiplicity": cls.multiplicity,
                "problem": selection.problem,
                "eta": eta,
                "infinite_count": selection.infinite_count,
                "eigenvalues": sorted(selection.finite_values.tolist(), reverse=True),
            }
            for selection in class_eigenproblems(cls, blocks, face_problem, config.scaling_kind)
        ]

    return [row for rows in parallel_map(spectra_of, candidates) for row in rows]


def dump_spectra(config: ExperimentConfig, path: Optional[str] = None) -> List[dict]:
    """Finite eigenvalues (descending) and infinity counts of every face and edge eigenproblem"""
    ContextManager.start_run({**config.summary(), "command": "spectra"})
    try:
        problem = build_problem(config)
        rows = []
        with ContextManager.record_stage("eigenproblems"):
            for eta in _widths(config.eta):
                rows.extend(class_spectra(problem, config, eta))
    finally:
        ContextManager.reset()

    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SPECTRA_COLUMNS)
            for row in rows:
                values = ";".join(repr(float(v)) for v in row["eigenvalues"])
                writer.writerow([row[c] for c in SPECTRA_COLUMNS[:-1]] + [values])
        LOGGER.info(f"Wrote {len(rows)} spectra to {path}")
    return rows


def max_eigenvalue(rows: List[dict], class_id: int, eta: str) -> float:
    values = [v for r in rows if r["class_id"] == class_id and r["eta"] == eta for v in r["eigenvalues"]]
    return float(np.max(values)) if values else 0.0
