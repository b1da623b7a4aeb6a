import numpy as np
import pytest

from decomposition import ClassKind
from errors import ConfigurationError
from grid import build_mesh
from linalg import form_leq
from schur import class_block, class_schur, parse_eta, slab_blocks


def test_schur_complement_is_symmetric_psd(problem_2d_random):
    for S in problem_2d_random.schurs.values():
        np.testing.assert_allclose(S.matrix, S.matrix.T, atol=1e-12 * np.abs(S.matrix).max())
        assert np.linalg.eigvalsh(S.matrix).min() > -1e-9 * np.abs(S.matrix).max()


def test_floating_schur_complement_kills_constants(problem_2d_random):
    S = problem_2d_random.schurs[4]
    np.testing.assert_allclose(S.apply(np.ones(S.size)), 0.0, atol=1e-8 * np.abs(S.matrix).max())


def test_harmonic_extension_has_schur_energy(problem_2d_random, rng):
    S = problem_2d_random.schurs[0]
    system = S.system
    w = rng.standard_normal(S.size)
    u = S.extend(w, f=np.zeros(len(system.nodes)))
    np.testing.assert_allclose(u[system.interface], w)
    assert system.energy(u) == pytest.approx(S.energy(w), rel=1e-9)

    # any other extension has more energy
    v = u.copy()
    v[system.interior] += 0.1 * rng.standard_normal(len(system.interior))
    assert system.energy(v) > S.energy(w)


def test_condensed_rhs_matches_extension(problem_2d_random, rng):
    S = problem_2d_random.schurs[1]
    system = S.system
    w = rng.standard_normal(S.size)
    u = S.extend(w)
    # A u - f vanishes on the interior; on the interface it is S w - g
    residual = system.matrix @ u - system.load
    np.testing.assert_allclose(residual[system.interior], 0.0, atol=1e-10)
    np.testing.assert_allclose(residual[system.interface], S.apply(w) - S.condense_rhs(), atol=1e-9)


def test_condensed_block_is_below_principal_block(problem_2d_random):
    for cls in problem_2d_random.classes:
        for l in cls.sharing:
            S = problem_2d_random.schurs[l]
            assert form_leq(class_schur(S, cls, l), class_block(S, cls, l))


def test_full_width_slab_matches_full_blocks(problem_2d_random):
    mesh = problem_2d_random.mesh
    for cls in problem_2d_random.classes:
        if cls.kind != ClassKind.FACE:
            continue
        for l in cls.sharing:
            S = problem_2d_random.schurs[l]
            principal, condensed = slab_blocks(S.system, cls, mesh.m)
            full_p, full_c = class_block(S, cls, l), class_schur(S, cls, l)
            np.testing.assert_allclose(principal, full_p, rtol=1e-9, atol=1e-9 * np.abs(full_p).max())
            np.testing.assert_allclose(condensed, full_c, rtol=1e-9, atol=1e-9 * np.abs(full_p).max())


def test_condensed_blocks_annihilate_constants_on_boundary_subdomains(problem_2d_random):
    for cls in problem_2d_random.classes:
        if cls.kind != ClassKind.FACE:
            continue
        for l in cls.sharing:
            St = class_schur(problem_2d_random.schurs[l], cls, l)
            np.testing.assert_allclose(St @ np.ones(cls.size), 0.0, atol=1e-8 * np.abs(St).max())


def test_free_boundary_condensed_block_is_below_the_fixed_one(problem_3d):
    for cls in problem_3d.classes:
        if cls.is_primal_vertex:
            continue
        for l in cls.sharing:
            system = problem_3d.schurs[l].system
            _, free = slab_blocks(system, cls, problem_3d.mesh.m, boundary="free")
            _, fixed = slab_blocks(system, cls, problem_3d.mesh.m, boundary="fixed")
            np.testing.assert_allclose(fixed, class_schur(problem_3d.schurs[l].matrix, cls, l), rtol=1e-9, atol=1e-9 * np.abs(fixed).max())
            assert form_leq(free, fixed)


@pytest.mark.parametrize("cut", ["neumann", "dirichlet"])
def test_thin_slab_blocks_are_symmetric(problem_3d, cut):
    cls = next(c for c in problem_3d.classes if c.kind == ClassKind.EDGE)
    l = cls.sharing[0]
    principal, condensed = slab_blocks(problem_3d.schurs[l].system, cls, 1, cut=cut)
    assert principal.shape == condensed.shape == (cls.size, cls.size)
    np.testing.assert_allclose(principal, principal.T)
    assert form_leq(condensed, principal)


def test_slab_validation(problem_2d):
    cls = next(c for c in problem_2d.classes if c.kind == ClassKind.FACE)
    system = problem_2d.schurs[cls.sharing[0]].system
    with pytest.raises(ConfigurationError):
        slab_blocks(system, cls, 0)
    with pytest.raises(ConfigurationError):
        slab_blocks(system, cls, 1, cut="robin")
    with pytest.raises(ConfigurationError):
        slab_blocks(system, cls, 1, boundary="clamped")


def test_parse_eta():
    mesh = build_mesh(2, 2, 4)
    assert parse_eta(None, mesh) is None
    assert parse_eta("full", mesh) is None
    assert parse_eta("h", mesh) == 1
    assert parse_eta("2h", mesh) == 2
    assert parse_eta("H", mesh) == 4
    assert parse_eta("0.25", mesh) == 2
    assert parse_eta("10h", mesh) == 4
    for bad in ("0.3", "xh", "0h", "wide"):
        with pytest.raises(ConfigurationError):
            parse_eta(bad, mesh)
