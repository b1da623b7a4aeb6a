import numpy as np
import pytest

from coarse import (
    build_adaptive_coarse_space,
    change_of_basis,
    class_blocks,
    class_eigenproblems,
    coarse_component,
    edge_local_form,
    lemma_sides,
    select_primal,
)
from coarse.selection import TWO_SIDED
from decomposition import ClassKind
from errors import ConfigurationError
from linalg import form_leq
from scaling import DELUXE, MULTIPLICITY


def _eigenproblems(problem, kind, face_problem="parallel_sum", scaling=MULTIPLICITY):
    return [
        (cls, class_eigenproblems(cls, class_blocks(cls, problem.schurs), face_problem, scaling))
        for cls in problem.classes
        if cls.kind == kind
    ]


def _assert_remainder_bound(problem, kind, scaling, tol, rng, samples=100):
    """<A (w_C - Pi w_C), w_C - Pi w_C> <= tol <S^(l) w, w> for random subdomain vectors w"""
    checked = 0
    for cls, (eigenproblem,) in _eigenproblems(problem, kind, scaling=scaling):
        selection = select_primal(eigenproblem, tol)
        for l in cls.sharing:
            S = problem.schurs[l].matrix
            for _ in range(samples):
                w = rng.standard_normal(S.shape[0])
                lhs, rhs = lemma_sides(selection, selection.left, w[cls.local[l]], float(w @ S @ w))
                assert lhs <= rhs + 1e-8 * max(1.0, rhs)
                checked += 1
    assert checked > 0


@pytest.mark.parametrize("scaling", [MULTIPLICITY, DELUXE])
@pytest.mark.parametrize("tol", [1.5, 3.0, 10.0])
def test_face_selection_bounds_the_remainder(problem_2d_random, rng, scaling, tol):
    _assert_remainder_bound(problem_2d_random, ClassKind.FACE, scaling, tol, rng)


@pytest.mark.parametrize("scaling", [MULTIPLICITY, DELUXE])
def test_face_selection_bounds_the_remainder_in_3d(problem_3d, rng, scaling):
    _assert_remainder_bound(problem_3d, ClassKind.FACE, scaling, 2.0, rng)


@pytest.mark.parametrize("scaling", [MULTIPLICITY, DELUXE])
@pytest.mark.parametrize("tol", [2.0, 12.0])
def test_edge_selection_bounds_the_remainder(problem_3d, rng, scaling, tol):
    for _, (eigenproblem,) in _eigenproblems(problem_3d, ClassKind.EDGE, scaling=scaling):
        assert eigenproblem.problem == "edge"
    _assert_remainder_bound(problem_3d, ClassKind.EDGE, scaling, tol, rng)


def test_edge_local_forms_are_below_the_edge_form(problem_3d):
    cls, (problem,) = _eigenproblems(problem_3d, ClassKind.EDGE)[0]
    blocks = class_blocks(cls, problem_3d.schurs)
    D = {l: np.eye(cls.size) / cls.multiplicity for l in cls.sharing}
    for m in cls.sharing:
        assert form_leq(edge_local_form(m, cls.sharing, blocks.principal, D), problem.left)
        assert form_leq(problem.right, blocks.condensed[m])


def test_selection_takes_eigenvalues_above_tolerance(problem_2d_random):
    for _, (problem,) in _eigenproblems(problem_2d_random, ClassKind.FACE):
        selection = select_primal(problem, 2.0)
        values = selection.values
        assert sorted(selection.selected) == list(np.flatnonzero(values >= 2.0))
        assert selection.k == int(np.sum(values >= 2.0))
        assert selection.constraints().shape == (problem.size, selection.k)


def test_selection_rejects_nonpositive_tolerance(problem_2d):
    _, (problem,) = _eigenproblems(problem_2d, ClassKind.FACE)[0]
    with pytest.raises(ConfigurationError):
        select_primal(problem, 0.0)


def test_coarse_component_reproduces_selected_span(problem_2d_random):
    _, (problem,) = _eigenproblems(problem_2d_random, ClassKind.FACE)[0]
    selection = select_primal(problem, 1e-12)
    finite = [p for p in selection.selected_pairs if p.normalization == "A"]
    w = sum(p.vector for p in finite)
    np.testing.assert_allclose(coarse_component(selection, w), w, atol=1e-8 * np.abs(w).max())


def test_change_of_basis_puts_selected_vectors_first(problem_2d_random, rng):
    _, (problem,) = _eigenproblems(problem_2d_random, ClassKind.FACE)[0]
    selection = select_primal(problem, 1.2)
    basis = change_of_basis(selection)
    assert basis.k == selection.k
    if basis.kind == "eigen":
        for col, pair in enumerate(selection.selected_pairs):
            np.testing.assert_allclose(basis.matrix[:, col], pair.vector)

    w = rng.standard_normal(selection.size)
    np.testing.assert_allclose(basis.from_coordinates(basis.to_coordinates(w)), w, atol=1e-10)
    S = problem.right
    np.testing.assert_allclose(basis.transform_block(S), basis.matrix.T @ S @ basis.matrix, atol=1e-10 * np.abs(S).max())


def test_parallel_sum_space_counts(problem_2d_random):
    space = build_adaptive_coarse_space(
        problem_2d_random.classes, problem_2d_random.schurs, face_problem="parallel_sum", edge_problem=False, scaling=DELUXE, tol_face=2.0
    )
    c = space.constraints
    assert c.pnum1 == 0 and c.pnumE == 0
    assert c.num_faces == 12
    assert c.pnum2 == sum(s.k for sels in c.selections.values() for s in sels)
    assert c.pnum == c.pnum2
    assert c.p2 == pytest.approx(c.pnum2 / 12)
    assert len(space.records()) == 12


def test_huge_tolerance_keeps_only_infinite_eigenvalues(problem_2d_random):
    space = build_adaptive_coarse_space(
        problem_2d_random.classes, problem_2d_random.schurs, face_problem="parallel_sum", edge_problem=False, scaling=MULTIPLICITY, tol_face=1e300
    )
    selections = [s for sels in space.constraints.selections.values() for s in sels]
    assert space.constraints.pnum2 == sum(s.infinite_count for s in selections)
    # every condensed block annihilates constants, so each face keeps exactly that one
    assert [s.infinite_count for s in selections] == [1] * 12


def test_pairwise_space_uses_two_problems(problem_2d_random):
    space = build_adaptive_coarse_space(
        problem_2d_random.classes, problem_2d_random.schurs, face_problem="pairwise", edge_problem=False, scaling=MULTIPLICITY, tol_face=3.0
    )
    for sels in space.constraints.selections.values():
        assert [s.problem for s in sels] == ["pairwise1", "pairwise2"]
        assert sels[0].rule == TWO_SIDED
    c = space.constraints
    assert c.pnum1 == sum(sels[0].k for sels in c.selections.values())
    assert c.pnum2 == sum(sels[1].k for sels in c.selections.values())
    assert c.pnum <= c.pnum1 + c.pnum2


def test_edge_problems_in_3d(problem_3d):
    space = build_adaptive_coarse_space(
        problem_3d.classes, problem_3d.schurs, face_problem="parallel_sum", edge_problem=True, scaling=DELUXE, tol_face=2.0, tol_edge=4.0
    )
    c = space.constraints
    assert c.num_edges == 6
    edge_ids = [cls.id for cls in problem_3d.classes if cls.kind == ClassKind.EDGE]
    assert c.pnumE == sum(c.selections[cid][0].k for cid in edge_ids)
    for cid in edge_ids:
        assert c.selections[cid][0].tolerance == 4.0


def test_space_validation(problem_2d):
    with pytest.raises(ConfigurationError):
        build_adaptive_coarse_space(
            problem_2d.classes, problem_2d.schurs, face_problem="other", edge_problem=False, scaling=MULTIPLICITY, tol_face=2.0
        )
    with pytest.raises(ConfigurationError):
        build_adaptive_coarse_space(
            problem_2d.classes, problem_2d.schurs, face_problem="parallel_sum", edge_problem=True, scaling=MULTIPLICITY, tol_face=2.0
        )
