import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from equipart.generators import orbit_cloud, rotation_orbit, signed_planar_cloud, signed_real_cloud
from equipart.groups import (
    binary_dihedral,
    cosets,
    cyclic,
    cyclic_automorphism,
    identity_automorphism,
)
from equipart.measures import PointCloud, SampledDensity, measure_regions
from equipart.partition import PartitionParams, act, excluded_set_margin
from equipart.solver import (
    SolveConfig,
    SolverError,
    average_problem,
    cube_sphere_grid,
    ham_sandwich_problem,
    oracle_grid,
    regular_fan_problem,
    residual,
    solve,
    solve_coset,
    sphere_starts,
)


def test_residual_threshold_example():
    G = cyclic(2, "R")
    cloud = PointCloud("R", [[0.0], [1.0]], [1.0, 1.0])
    u = PartitionParams.normalized("R", [-0.5, 1.0])
    assert residual(u, [cloud], [identity_automorphism(G)]).aggregate == 0.0


def test_residual_at_pole_is_total_mass(rng):
    G = cyclic(5)
    cloud = PointCloud("C", rng.standard_normal((12, 1, 2)), rng.standard_normal((12, 2)) + [1, 0])
    u0 = np.array([math.cos(0.1), math.sin(0.1)])
    u = PartitionParams("C", np.vstack([u0, [0, 0]]))
    rep = residual(u, [cloud], [identity_automorphism(G)])
    assert rep.aggregate == pytest.approx(np.linalg.norm(cloud.weights.sum(axis=0)), rel=1e-12)


def test_residual_symmetric_c4():
    G = cyclic(4)
    cloud = PointCloud("C", [[[1, 0]], [[0, 1]], [[-1, 0]], [[0, -1]]], np.tile([1.0, 0.0], (4, 1)))
    u = PartitionParams("C", [[0, 0], [1, 0]])
    assert residual(u, [cloud], [identity_automorphism(G)]).aggregate <= 1e-15


def test_residual_dimension_mismatch():
    G = cyclic(3)
    cloud = PointCloud("C", [[[1, 0]]], [[1, 0]])
    with pytest.raises(SolverError):
        residual(PartitionParams("C", [[0, 0], [0, 0], [1, 0]]), [cloud], [identity_automorphism(G)])


@given(st.integers(0, 10**6))
def test_residual_norm_is_orbit_invariant(seed):
    rng = np.random.default_rng(seed)
    G = binary_dihedral(3)
    cloud = PointCloud("H", rng.standard_normal((15, 1, 4)), rng.standard_normal((15, 4)) + [2, 0, 0, 0])
    u = PartitionParams.normalized("H", rng.standard_normal((2, 4)))
    phi = identity_automorphism(G)
    base = residual(u, [cloud], [phi]).aggregate
    for g in range(G.order):
        assert residual(act(g, u, G), [cloud], [phi]).aggregate == pytest.approx(base, rel=1e-12, abs=1e-12)


def test_config_validation():
    with pytest.raises(SolverError):
        SolveConfig(tol=1e-13)
    with pytest.raises(SolverError):
        SolveConfig(restarts=0)
    cfg = SolveConfig.from_json({"restarts": 3, "tol": 1e-9, "seed": 7, "smoothing": 0.0, "junk": 1})
    assert (cfg.restarts, cfg.tol, cfg.seed, cfg.smoothing) == (3, 1e-9, 7, 0.0)


def test_sphere_starts_are_unit_and_seeded():
    a = sphere_starts(6, 10, 3)
    assert np.allclose(np.linalg.norm(a, axis=1), 1.0)
    assert np.array_equal(a, sphere_starts(6, 10, 3))
    assert not np.array_equal(a, sphere_starts(6, 10, 4))


def test_ham_sandwich_two_pairs():
    a = PointCloud("R", [[[0.0], [0.0]], [[1.0], [0.2]]], [1.0, 1.0])
    b = PointCloud("R", [[[3.0], [2.0]], [[3.3], [3.1]]], [1.0, 1.0])
    dists, phis = ham_sandwich_problem([a, b])
    res = solve(dists, phis, SolveConfig(seed=1))
    assert res.converged and res.residual <= 1e-8
    for c in (a, b):
        side = np.sign(c.positions[:, :, 0] @ res.params.u[1:, 0] + res.params.u[0, 0])
        assert side[0] != side[1]


def test_three_fan_on_the_plane(rng):
    cloud = signed_planar_cloud(rng, 9, 3)
    res = solve([cloud], [cyclic_automorphism(cyclic(3), 1)], SolveConfig(seed=2))
    assert res.converged
    vals = measure_regions(cloud, res.params, cyclic(3)).values[:, 0]
    np.testing.assert_allclose(vals, 1.0, atol=1e-12)


def test_symmetric_density_has_symmetric_zero():
    dens = SampledDensity("C", 1, {"type": "annulus", "center": [0, 0], "r_in": 0.5, "r_out": 1.5},
                          N=20_000, seed=1)
    G = cyclic(3)
    u = PartitionParams("C", [[0, 0], [1, 0]])
    rep = residual(u, [dens], [identity_automorphism(G)])
    assert rep.aggregate <= 3 / math.sqrt(20_000)
    res = solve([dens], [identity_automorphism(G)], SolveConfig(seed=0, restarts=8))
    assert res.converged and res.tol == pytest.approx(3 / math.sqrt(20_000))


def test_converged_results_avoid_excluded_set(rng):
    for seed in range(5):
        cloud = signed_planar_cloud(rng, 7, 3)
        res = solve([cloud], [identity_automorphism(cyclic(3))], SolveConfig(seed=seed))
        if res.converged:
            assert excluded_set_margin(res.params, cyclic(3)) > 1e-6


def test_nonconvergence_reported(rng):
    # total mass 1 cannot be split into three equal integer parts
    cloud = signed_planar_cloud(rng, 5, 1)
    res = solve([cloud], [identity_automorphism(cyclic(3))], SolveConfig(seed=0, restarts=2, max_iters=200))
    assert not res.converged and res.residual > 0.5


def test_result_independent_of_threads(rng):
    dists, phis = regular_fan_problem([rng.standard_normal((11, 4))], [np.r_[np.ones(8), -np.ones(3)]], 5)
    one = solve(dists, phis, SolveConfig(seed=4, restarts=6, threads=1))
    many = solve(dists, phis, SolveConfig(seed=4, restarts=6, threads=4))
    assert np.array_equal(one.params.u, many.params.u)
    assert one.to_json() == many.to_json()


def test_coset_with_whole_group_equals_solve(rng):
    cloud = signed_planar_cloud(rng, 9, 3)
    G = cyclic(3)
    dec = cosets(G, [0, 1, 2])
    phi = cyclic_automorphism(G, 1)
    a = solve([cloud], [phi], SolveConfig(seed=5))
    b = solve_coset([cloud], dec, [[identity_automorphism(dec.subgroup)]], SolveConfig(seed=5))
    assert np.array_equal(a.params.u, b.params.u)
    assert a.residual == b.residual


def test_orthogonal_four_fan(rng):
    cloud = signed_planar_cloud(rng, 10, 4)
    G = cyclic(4)
    dec = cosets(G, [0, 2])
    res = solve_coset([cloud], dec, identity_automorphism(dec.subgroup), SolveConfig(seed=0))
    assert res.converged
    v = measure_regions(cloud, res.params, G).values[:, 0]
    assert v[0] == v[2] and v[1] == v[3]


def test_quaternion_orbit_plus_pair(rng):
    Q = binary_dihedral(2)
    base = orbit_cloud(Q, rng.standard_normal(4))
    extra = rng.standard_normal((2, 1, 4))
    w = np.zeros((10, 4))
    w[:, 0] = 1
    cloud = PointCloud("H", np.concatenate([base.positions, extra]), w)
    res = solve([cloud], [identity_automorphism(Q)], SolveConfig(seed=0))
    assert res.converged


def test_regular_fan_problem_validation(rng):
    with pytest.raises(SolverError):
        regular_fan_problem([rng.standard_normal((5, 2))], [np.ones(5)], 4)
    with pytest.raises(SolverError):
        regular_fan_problem([rng.standard_normal((5, 3))], [np.ones(5)], 3)
    dists, phis = regular_fan_problem([rng.standard_normal((5, 4))], [np.ones(5)], 5)
    assert [p.perm for p in phis] == [cyclic_automorphism(cyclic(5), r).perm for r in (1, 2)]
    assert dists[0] is dists[1]


def test_average_problem_validation(rng):
    G = cyclic(3)
    c1 = PointCloud("C", rng.standard_normal((4, 1, 2)), np.tile([1.0, 0], (4, 1)))
    c2 = PointCloud("C", rng.standard_normal((4, 2, 2)), np.tile([1.0, 0], (4, 1)))
    with pytest.raises(SolverError):
        average_problem([c1, c2], [identity_automorphism(G)] * 2)
    with pytest.raises(SolverError):
        average_problem([c1], [identity_automorphism(G), identity_automorphism(cyclic(3))])
    with pytest.raises(SolverError):
        average_problem([PointCloud("R", [[1.0]], [1.0])], [identity_automorphism(G)])


def test_cube_sphere_grid():
    pts, k = cube_sphere_grid(4, 10_000)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)
    assert len(pts) == 8 * k**3
    # covering radius shrinks with resolution
    coarse, _ = cube_sphere_grid(3, 500)
    fine, _ = cube_sphere_grid(3, 20_000)
    probe = np.random.default_rng(0).standard_normal((300, 3))
    probe /= np.linalg.norm(probe, axis=1, keepdims=True)
    cover = lambda g: np.max(np.min(np.linalg.norm(probe[:, None] - g[None], axis=-1), axis=1))  # noqa: E731
    assert cover(fine) < cover(coarse)


def test_oracle_one_dimensional_scan():
    G = cyclic(2, "R")
    cloud = PointCloud("R", [[0.0], [1.0]], [1.0, 1.0])
    out = oracle_grid([cloud], [identity_automorphism(G)], 2000)
    assert out.residual == 0.0
    u = out.params.u[:, 0]
    threshold = -u[0] / u[1]
    assert 0.0 < threshold < 1.0
    assert out.sign_changes > 0


def test_oracle_symmetric_three_atoms():
    out = oracle_grid([rotation_orbit(3)], [identity_automorphism(cyclic(3))], 1_000_000)
    assert out.residual <= 1e-2
    assert out.points >= 500_000


def test_oracle_dimension_limit(rng):
    cloud = PointCloud("H", rng.standard_normal((3, 1, 4)), np.tile([1.0, 0, 0, 0], (3, 1)))
    with pytest.raises(SolverError):
        oracle_grid([cloud], [identity_automorphism(binary_dihedral(2))], 1000)


def test_oracle_never_beats_converged_solver(rng):
    cloud = signed_real_cloud(rng, 6, 2, 2)
    other = signed_real_cloud(rng, 6, 2, 2)
    dists, phis = ham_sandwich_problem([cloud, other])
    res = solve(dists, phis, SolveConfig(seed=0))
    orc = oracle_grid(dists, phis, 50_000)
    assert res.converged and res.residual <= orc.residual + 1e-12
