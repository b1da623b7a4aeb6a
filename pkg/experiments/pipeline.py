"""Problem setup shared by the run and spectra commands"""

from typing import Optional

import numpy as np

from coarse.space import AdaptiveCoarseSpace, build_adaptive_coarse_space, empty_coarse_space, principal_blocks
from context.manager import ContextManager
from decomposition.classes import classify_interface
from experiments.config import ExperimentConfig, parse_coefficient
from grid.assembly import assemble_subdomain
from grid.coefficients import generate_coefficient
from grid.mesh import build_mesh
from scaling.scalings import DELUXE, ScalingSet, build_scaling_set
from schur.complements import schur_interface
from schur.slab import parse_eta
from solvers.base import InterfaceProblem, assemble_interface_rhs
from workers import parallel_map


def build_problem(config: ExperimentConfig) -> InterfaceProblem:
    """Mesh, coefficient, local assembly, classification and Schur complements"""
    with ContextManager.record_stage("assembly"):
        mesh = build_mesh(config.dim, config.N, config.m)
        pattern, params, seed = parse_coefficient(config.coeff)
        coeff = generate_coefficient(mesh, pattern, params, seed)
        systems = parallel_map(lambda i: assemble_subdomain(mesh, i, coeff), range(mesh.num_subdomains))

    with ContextManager.record_stage("schur"):
        schurs = {S.subdomain: S for S in parallel_map(schur_interface, systems)}
        classes, maps = classify_interface(mesh)

    return InterfaceProblem(
        mesh=mesh,
        coeff=coeff,
        classes=classes,
        maps=maps,
        schurs=schurs,
        rhs=assemble_interface_rhs(maps, schurs),
    )


def build_coarse_space(problem: InterfaceProblem, config: ExperimentConfig) -> AdaptiveCoarseSpace:
    spec = config.spec
    if not spec.adaptive:
        return empty_coarse_space(problem.classes)
    with ContextManager.record_stage("eigenproblems"):
        return build_adaptive_coarse_space(
            problem.classes,
            problem.schurs,
            face_problem=spec.face_problem,
            edge_problem=spec.edge_problem and config.dim == 3,
            scaling=config.scaling_kind,
            tol_face=config.tol_face_value,
            tol_edge=config.tol_edge_value,
            eta=parse_eta(config.eta, problem.mesh),
        )


def build_scalings(problem: InterfaceProblem, kind: str, eta: Optional[int] = None) -> ScalingSet:
    """Scalings for the solver; deluxe blocks come from the slab of width `eta` when the eigenproblems use one"""
    blocks = principal_blocks(problem.classes, problem.schurs, eta) if kind == DELUXE else None
    return build_scaling_set(problem.classes, kind, blocks)


def direct_interface_solution(problem: InterfaceProblem, u_free: Optional[np.ndarray] = None) -> np.ndarray:
    """Interface trace of the monodomain direct solution"""
    if u_free is None:
        u_free = problem.direct_solution()
    positions = np.searchsorted(problem.mesh.free_nodes, problem.maps.interface_nodes)
    return u_free[positions]
