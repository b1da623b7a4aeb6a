"""Experiment configuration: methods, tolerance specs and coefficient selectors"""

import math
import re
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

from context.manager import ContextManager
from errors import ConfigurationError
from logger import LOGGER
from scaling.scalings import DELUXE, MULTIPLICITY


@dataclass(frozen=True)
class MethodSpec:
    number: int
    name: str
    solver: str
    scaling: str
    face_problem: Optional[str]
    edge_problem: bool
    description: str

    @property
    def adaptive(self) -> bool:
        return self.face_problem is not None or self.edge_problem

    def to_dict(self) -> dict:
        return asdict(self)


METHODS: Dict[int, MethodSpec] = {
    0: MethodSpec(0, "method0", "bddc", MULTIPLICITY, None, False, "BDDC, vertex primal unknowns, multiplicity scaling"),
    1: MethodSpec(1, "method1", "bddc", MULTIPLICITY, "pairwise", True, "BDDC, two-subdomain face eigenproblems, multiplicity scaling"),
    2: MethodSpec(2, "method2", "bddc", MULTIPLICITY, "parallel_sum", True, "BDDC, parallel-sum eigenproblems, multiplicity scaling"),
    3: MethodSpec(3, "method3", "bddc", DELUXE, "parallel_sum", True, "BDDC, parallel-sum eigenproblems, deluxe scaling"),
    4: MethodSpec(4, "method4", "fetidp", DELUXE, "parallel_sum", True, "FETI-DP, projector preconditioner, deluxe scaling"),
}

DEFAULT_TOL_FACE = "1+log(H/h)"
DEFAULT_TOL_EDGE = "4H/h"

_LOG_SPEC = re.compile(r"^1\s*\+\s*(log|ln)\s*\(\s*H\s*/\s*h\s*\)$")
_LINEAR_SPEC = re.compile(r"^([0-9.eE+-]*)\s*\*?\s*H\s*/\s*h$")


def parse_tolerance(spec, m: int) -> float:
    """Tolerance from a literal, "1+log(H/h)" or "cH/h" (c defaults to 1)"""
    text = str(spec).strip()
    if _LOG_SPEC.match(text):
        value = 1.0 + math.log(m)
    elif match := _LINEAR_SPEC.match(text):
        try:
            value = float(match.group(1) or "1") * m
        except ValueError as e:
            raise ConfigurationError(f"Malformed tolerance {spec!r}") from e
    else:
        try:
            value = float(text)
        except ValueError as e:
            raise ConfigurationError(f"Malformed tolerance {spec!r}") from e
    if not value > 0 or not math.isfinite(value):
        raise ConfigurationError(f"Tolerance must be positive and finite, got {spec!r}")
    return value


def parse_coefficient(selector: str) -> Tuple[str, Dict[str, Any], Optional[int]]:
    """(pattern, params, seed) from constant[:C], channels:K:P, random:SEED[:LO:HI], fracture:P:SEED or file:PATH"""
    pattern, _, rest = str(selector).partition(":")
    parts = rest.split(":") if rest else []
    try:
        if pattern == "constant" and len(parts) <= 1:
            return pattern, ({"value": float(parts[0])} if parts else {}), None
        if pattern == "channels" and len(parts) == 2:
            return pattern, {"count": int(parts[0]), "contrast": float(parts[1])}, None
        if pattern == "random" and len(parts) in (1, 3):
            params = {"low": float(parts[1]), "high": float(parts[2])} if len(parts) == 3 else {}
            return pattern, params, int(parts[0])
        if pattern == "fracture" and len(parts) == 2:
            return pattern, {"contrast": float(parts[0])}, int(parts[1])
        if pattern == "file" and rest:
            return pattern, {"path": rest}, None
    except ValueError as e:
        raise ConfigurationError(f"Malformed coefficient selector {selector!r}: {e}") from e
    raise ConfigurationError(f"Unrecognized coefficient selector {selector!r}")


@dataclass
class ExperimentConfig:
    dim: int
    N: int
    m: int
    method: int
    coeff: str = "constant"
    scaling: Optional[str] = None
    tol_face: Optional[str] = None
    tol_edge: Optional[str] = None
    eta: str = "full"
    out: Optional[str] = None
    format: str = "csv"
    rtol: Optional[float] = None
    maxit: Optional[int] = None
    check_direct: bool = False

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigurationError(f"Dimension must be 2 or 3, got {self.dim}")
        if self.method not in METHODS:
            raise ConfigurationError(f"Unknown method {self.method}; expected one of {sorted(METHODS)}")
        if self.scaling is not None and self.scaling not in (MULTIPLICITY, DELUXE):
            raise ConfigurationError(f"Unknown scaling: {self.scaling}")
        if self.format not in ("csv", "json"):
            raise ConfigurationError(f"Unknown report format: {self.format}")
        parse_coefficient(self.coeff)

    @property
    def spec(self) -> MethodSpec:
        return METHODS[self.method]

    @property
    def scaling_kind(self) -> str:
        return self.scaling or self.spec.scaling

    @property
    def tol_face_value(self) -> Optional[float]:
        if not self.spec.adaptive:
            return None
        return parse_tolerance(self.tol_face or DEFAULT_TOL_FACE, self.m)

    @property
    def tol_edge_value(self) -> Optional[float]:
        if not self.spec.adaptive:
            return None
        if self.dim == 2:
            return self.tol_face_value
        return parse_tolerance(self.tol_edge or DEFAULT_TOL_EDGE, self.m)

    @property
    def tolerance(self) -> Optional[float]:
        """lambda_TOL = max of the face and edge tolerances"""
        values = [v for v in (self.tol_face_value, self.tol_edge_value) if v is not None]
        return max(values) if values else None

    def check_consistency(self) -> None:
        """Warn about settings the method ignores or overrides"""
        if not self.spec.adaptive and (self.tol_face or self.tol_edge):
            self._warn(f"{self.spec.name} selects no adaptive constraints; tolerances ignored")
        if not self.spec.adaptive and self.eta not in ("full", None):
            self._warn(f"{self.spec.name} solves no eigenproblems; slab width ignored")
        if self.scaling is not None and self.scaling != self.spec.scaling:
            self._warn(f"{self.spec.name} normally uses {self.spec.scaling} scaling; running with {self.scaling}")

    @staticmethod
    def _warn(message: str):
        LOGGER.warning(message)
        ContextManager.add_warning(message)

    def summary(self) -> dict:
        return {
            "dim": self.dim,
            "N": self.N,
            "m": self.m,
            "method": self.method,
            "coefficient": self.coeff,
            "scaling": self.scaling_kind,
            "tol_face": self.tol_face_value,
            "tol_edge": self.tol_edge_value,
            "eta": self.eta,
        }
