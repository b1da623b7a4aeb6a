"""Element-wise coefficient fields and their pattern generators"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

import settings
from errors import CoefficientError
from logger import LOGGER

PATTERNS = ("constant", "channels", "random", "fracture", "file")


@dataclass
class CoefficientField:
    """One positive value per fine cell, in lexicographic cell order (shared by the cell's simplices)"""

    values: np.ndarray
    pattern: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise CoefficientError("Coefficient values must be a flat per-cell array")
        if not np.all(self.values > 0):
            raise CoefficientError("Coefficient values must be positive")

    @property
    def contrast(self) -> float:
        return float(self.values.max() / self.values.min())

    def scaled(self, factor: float) -> "CoefficientField":
        return CoefficientField(self.values * factor, self.pattern, dict(self.params), self.seed)


def _local_cell_coords(mesh) -> np.ndarray:
    cells = np.arange(mesh.num_cells, dtype=np.int64)
    return mesh.cell_coords(cells) % mesh.m


def _channels(mesh, count: int, contrast: float) -> np.ndarray:
    """Bars one cell thick, evenly spaced in every subdomain and crossing it along x.

    2D: local rows floor((k+1) m / (count+1)). 3D: rods along x at local y of the same rows
    and local z = m // 2.

    Each bar crosses the faces normal to x once, so those faces take one constraint per bar, the
    constant among them. Faces parallel to the bars and every edge only take the constant.
    """
    if count < 1:
        raise CoefficientError(f"Channel count must be positive, got {count}")
    rows = np.array([((k + 1) * mesh.m) // (count + 1) for k in range(count)])
    local = _local_cell_coords(mesh)
    mask = np.isin(local[:, 1], rows)
    if mesh.dim == 3:
        mask &= local[:, 2] == mesh.m // 2
    values = np.ones(mesh.num_cells)
    values[mask] = contrast
    return values


def _walk(rng: np.random.Generator, start: np.ndarray, steps: np.ndarray, n: int, length: int) -> list:
    path, cell = [start.copy()], start.copy()
    for _ in range(length):
        candidates = [s for s in steps if np.all((cell + s >= 0) & (cell + s < n))]
        if not candidates:
            break
        cell = cell + candidates[rng.integers(len(candidates))]
        path.append(cell.copy())
    return path


def _fracture(mesh, contrast: float, seed: int, branches: int) -> np.ndarray:
    """A monotone lattice walk from the x=0 side to the far corner plus `branches` side cracks"""
    rng = np.random.default_rng(seed)
    n, dim = mesh.n, mesh.dim
    eye = np.eye(dim, dtype=np.int64)

    start = np.zeros(dim, dtype=np.int64)
    start[1:] = rng.integers(0, max(1, n // 4), size=dim - 1)
    main = _walk(rng, start, eye, n, length=dim * n)

    cracks = list(main)
    branch_steps = [eye[0], -eye[1]] + ([eye[2], -eye[2]] if dim == 3 else [])
    for _ in range(branches):
        origin = main[rng.integers(len(main))]
        length = int(rng.integers(max(1, n // 4), max(2, n // 2)))
        cracks.extend(_walk(rng, origin, np.array(branch_steps), n, length))

    values = np.ones(mesh.num_cells)
    values[mesh.cell_ids(np.array(cracks))] = contrast
    return values


def generate_coefficient(mesh, pattern: str, params: Optional[Dict[str, Any]] = None, seed: Optional[int] = None) -> CoefficientField:
    params = dict(params or {})

    if pattern == "constant":
        values = np.full(mesh.num_cells, float(params.get("value", 1.0)))

    elif pattern == "channels":
        values = _channels(mesh, int(params.get("count", 1)), float(params.get("contrast", 1e6)))

    elif pattern == "random":
        low, high = float(params.get("low", -3.0)), float(params.get("high", 3.0))
        if not low < high:
            raise CoefficientError(f"Empty exponent range ({low}, {high})")
        rng = np.random.default_rng(seed)
        values = 10.0 ** rng.uniform(low, high, size=mesh.num_cells)

    elif pattern == "fracture":
        branches = int(params.get("branches", settings.FRACTURE_BRANCHES))
        values = _fracture(mesh, float(params.get("contrast", 1e6)), 0 if seed is None else seed, branches)

    elif pattern == "file":
        return read_coefficient_file(params["path"], mesh)

    else:
        raise CoefficientError(f"Unknown coefficient pattern: {pattern}")

    LOGGER.debug(f"Generated {pattern} coefficient, contrast {values.max() / values.min():.3g}")
    return CoefficientField(values=values, pattern=pattern, params=params, seed=seed)


# --- Coefficient files ---


def read_coefficient_file(path, mesh) -> CoefficientField:
    lines = Path(path).read_text().split("\n")
    lines = [line.strip() for line in lines if line.strip()]
    if not lines:
        raise CoefficientError(f"Empty coefficient file: {path}")

    try:
        dim, N, m = (int(tok) for tok in lines[0].split())
        values = np.array([float(line) for line in lines[1:]])
    except ValueError as e:
        raise CoefficientError(f"Malformed coefficient file {path}: {e}") from e

    if (dim, N, m) != (mesh.dim, mesh.N, mesh.m):
        raise CoefficientError(f"Coefficient file is for ({dim}, {N}, {m}), mesh is ({mesh.dim}, {mesh.N}, {mesh.m})")
    if len(values) != mesh.num_cells:
        raise CoefficientError(f"Coefficient file has {len(values)} values, mesh has {mesh.num_cells} cells")
    return CoefficientField(values=values, pattern="file", params={"path": str(path)})


def write_coefficient_file(coeff: CoefficientField, mesh, path) -> None:
    if len(coeff.values) != mesh.num_cells:
        raise CoefficientError(f"Field has {len(coeff.values)} values, mesh has {mesh.num_cells} cells")
    body = "\n".join(f"{v:.17g}" for v in coeff.values)
    Path(path).write_text(f"{mesh.dim} {mesh.N} {mesh.m}\n{body}\n")
