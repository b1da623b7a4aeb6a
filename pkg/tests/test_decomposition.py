import numpy as np
import pytest

from decomposition import ClassKind, build_jump_operator, class_counts, classify_interface
from grid import build_mesh


def test_2d_classes():
    classes, maps = classify_interface(build_mesh(2, 3, 4))
    assert class_counts(classes) == {"vertex": 4, "edge": 0, "face": 12}
    for c in classes:
        if c.kind == ClassKind.FACE:
            assert c.size == 3 and c.multiplicity == 2
        else:
            assert c.size == 1 and c.multiplicity == 4
    assert maps.num_interface == 12 * 3 + 4


def test_3d_classes():
    classes, maps = classify_interface(build_mesh(3, 2, 3))
    assert class_counts(classes) == {"vertex": 1, "edge": 6, "face": 12}
    by_kind = {kind: [c for c in classes if c.kind == kind] for kind in ClassKind}
    assert all(c.size == 4 and c.multiplicity == 2 for c in by_kind[ClassKind.FACE])
    assert all(c.size == 2 and c.multiplicity == 4 for c in by_kind[ClassKind.EDGE])
    assert by_kind[ClassKind.VERTEX][0].multiplicity == 8


def test_one_dof_faces_are_faces():
    classes, _ = classify_interface(build_mesh(2, 2, 2))
    assert class_counts(classes) == {"vertex": 1, "edge": 0, "face": 4}


@pytest.mark.parametrize("dim,N,m", [(2, 3, 4), (3, 2, 3)])
def test_classes_partition_the_interface(dim, N, m):
    classes, maps = classify_interface(build_mesh(dim, N, m))
    positions = np.sort(np.concatenate([c.positions for c in classes]))
    np.testing.assert_array_equal(positions, np.arange(maps.num_interface))

    multiplicity = maps.multiplicity()
    for c in classes:
        assert np.all(multiplicity[c.positions] == c.multiplicity)
        for l in c.sharing:
            np.testing.assert_array_equal(maps.restriction[l][c.local[l]], c.positions)


def test_dual_and_primal_split():
    classes, maps = classify_interface(build_mesh(2, 3, 4))
    for i in maps.subdomains:
        local = maps.restriction[i]
        assert len(maps.primal_local[i]) + len(maps.dual_local[i]) == len(local)
        assert np.all(np.isin(local[maps.primal_local[i]], maps.vertex_positions))
    # corner subdomains see one vertex, edge subdomains two, the center four
    assert [len(maps.primal_local[i]) for i in maps.subdomains] == [1, 2, 1, 2, 4, 2, 1, 2, 1]


@pytest.mark.parametrize("dim,N,m,multipliers", [(2, 3, 4, 36), (3, 2, 3, 12 * 4 + 6 * 2 * 6)])
def test_jump_operator(dim, N, m, multipliers):
    classes, maps = classify_interface(build_mesh(dim, N, m))
    jump = build_jump_operator(classes, maps)
    assert jump.num_multipliers == multipliers
    assert jump.num_dual == maps.num_dual
    # every row has one +1 and one -1
    np.testing.assert_allclose(jump.matrix @ np.ones(jump.num_dual), 0.0)
    assert np.all(np.abs(jump.matrix).sum(axis=1) == 2)

    # B annihilates the restriction of any continuous interface function
    u = np.random.default_rng(0).standard_normal(maps.num_interface)
    w = np.zeros(maps.num_dual)
    for i in maps.subdomains:
        d = maps.dual_local[i]
        w[maps.dual_offsets[i] : maps.dual_offsets[i] + len(d)] = u[maps.restriction[i][d]]
    np.testing.assert_allclose(jump.apply(w), 0.0, atol=1e-14)
