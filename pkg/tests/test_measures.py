import numpy as np
import pytest

from equipart.algebra import FScalar
from equipart.groups import binary_polyhedral, cyclic
from equipart.measures import (
    MassError,
    PointCloud,
    SampledDensity,
    component_measures,
    distribution_from_json,
    distribution_to_json,
    mc_error_bound,
    measure_regions,
    recombine,
    region_measures_batch,
    total_mass,
)
from equipart.partition import PartitionParams, boundary_distance, fiber_values


def test_symmetric_real_pair():
    cloud = PointCloud("R", [[2.0], [-2.0]], [1.0, 1.0])
    rm = measure_regions(cloud, PartitionParams("R", [0.0, 1.0]), cyclic(2, "R"))
    assert rm.values[:, 0].tolist() == [1.0, 1.0]


def test_empty_region_is_zero():
    cloud = PointCloud("C", [[[1.0, 0.0]]], [[1.0, 0.0]])
    rm = measure_regions(cloud, PartitionParams("C", [[0, 0], [1, 0]]), cyclic(5))
    assert rm.values[1:].tolist() == [[0.0, 0.0]] * 4


def test_uniform_square_split_by_line():
    dens = SampledDensity("C", 1, {"type": "box", "lo": [0, 0], "hi": [1, 1]}, N=100_000, seed=1)
    # region of +1 is Re(x) > 0.5
    params = PartitionParams.normalized("C", [[-0.5, 0], [1, 0]])
    rm = measure_regions(dens, params, cyclic(2))
    bound = mc_error_bound(dens)
    np.testing.assert_allclose(rm.values[:, 0], [0.5, 0.5], atol=bound)
    assert bound == pytest.approx(3 / np.sqrt(100_000))


def test_total_mass_examples():
    assert total_mass(PointCloud("R", [[0.0], [1.0]], [1.0, 1.0])).isclose(FScalar.of("R", 2))
    c = PointCloud("C", [[[0, 0]], [[1, 0]]], [[1, 1], [1, -1]])
    assert total_mass(c).isclose(FScalar.of("C", 2))
    with pytest.raises(MassError, match="total mass is zero"):
        PointCloud("R", [[0.0], [1.0]], [1.0, -1.0])


def test_components():
    c = PointCloud("C", [[[0.3, 0.1]]], [[3.0, 4.0]])
    parts = component_measures(c)
    assert [p.weights[0, 0] for p in parts] == [3.0, 4.0]
    h = PointCloud("H", [[[0, 0, 0, 1.0]]], [[0, 0, 0, 1.0]])
    assert [p.weights[0, 0] for p in component_measures(h)] == [0, 0, 0, 1.0]


def test_component_round_trip_is_bitwise(rng):
    c = PointCloud("H", rng.standard_normal((30, 2, 4)), rng.standard_normal((30, 4)))
    back = recombine(component_measures(c), "H")
    assert np.array_equal(back.positions, c.positions)
    assert np.array_equal(back.weights, c.weights)


def test_additivity_exact(rng):
    G = binary_polyhedral("T*")
    for _ in range(50):
        w = rng.integers(-5, 6, (40, 4)).astype(float)
        w[0, 0] += 100.0
        c = PointCloud("H", rng.standard_normal((40, 1, 4)), w)
        params = PartitionParams.normalized("H", rng.standard_normal((2, 4)))
        rm = measure_regions(c, params, G)
        assert np.array_equal(rm.values.sum(axis=0), w.sum(axis=0))


def test_general_position_has_no_boundary_mass(rng):
    G = cyclic(6)
    hits = 0
    for _ in range(1000):
        c = PointCloud("C", rng.standard_normal((10, 1, 2)), np.tile([1.0, 0.0], (10, 1)))
        rm = measure_regions(c, PartitionParams.normalized("C", rng.standard_normal((2, 2))), G)
        hits += int(np.any(rm.boundary_mass != 0))
    assert hits == 0


def test_values_locally_constant(rng):
    G = cyclic(5)
    c = PointCloud("C", rng.standard_normal((30, 2, 2)), np.tile([1.0, 0.0], (30, 1)))
    checked = 0
    for _ in range(200):
        params = PartitionParams.normalized("C", rng.standard_normal((3, 2)))
        v = fiber_values(c.positions, params.u)
        if min(boundary_distance(x, G) for x in v) <= 1e-3:
            continue
        nudged = PartitionParams.normalized("C", params.u + 1e-6 * rng.standard_normal((3, 2)))
        assert np.array_equal(measure_regions(c, params, G).values, measure_regions(c, nudged, G).values)
        checked += 1
    assert checked > 20


def test_batch_matches_single(rng):
    G = cyclic(4)
    c = PointCloud("C", rng.standard_normal((25, 1, 2)), rng.standard_normal((25, 2)) + [3, 0])
    U = rng.standard_normal((6, 2, 2))
    U /= np.linalg.norm(U.reshape(6, -1), axis=1)[:, None, None]
    vals, _ = region_measures_batch(c.positions, c.weights, U, G)
    for b in range(6):
        single = measure_regions(c, PartitionParams("C", U[b]), G).values
        np.testing.assert_allclose(vals[b], single, atol=1e-12)


def test_density_deterministic():
    spec = {"type": "annulus", "center": [0, 0], "r_in": 0.5, "r_out": 1.0}
    a = SampledDensity("C", 1, spec, N=5000, seed=3)
    b = SampledDensity("C", 1, spec, N=5000, seed=3)
    assert np.array_equal(a.positions, b.positions)
    r = np.linalg.norm(a.positions.reshape(5000, 2), axis=1)
    assert r.min() >= 0.5 and r.max() <= 1.0


def test_affine_density_weights():
    d = SampledDensity("R", 2, {"type": "ball", "center": [0, 0], "radius": 1.0}, N=2000, seed=0,
                       density={"type": "affine", "c0": 1.0, "c": [0.5, 0.0]})
    x = d.positions.reshape(2000, 2)
    np.testing.assert_allclose(d.weights[:, 0], (1.0 + 0.5 * x[:, 0]) / 2000)


def test_json_round_trip(rng):
    c = PointCloud("C", rng.standard_normal((5, 2, 2)), rng.standard_normal((5, 2)) + [2, 0])
    back = distribution_from_json(distribution_to_json(c))
    assert np.array_equal(back.positions, c.positions) and np.array_equal(back.weights, c.weights)
    dens = distribution_from_json({"kind": "density", "algebra": "C", "n": 1, "N": 100,
                                   "support": {"type": "ball", "radius": 1.0}, "seed": 5})
    assert distribution_to_json(distribution_from_json(distribution_to_json(dens))) == distribution_to_json(dens)


def test_json_errors():
    with pytest.raises(MassError):
        distribution_from_json({"kind": "points", "points": []}, "C")
    with pytest.raises(MassError):
        distribution_from_json({"kind": "points", "points": [{"x": [0], "w": 1}, {"x": [1], "w": -1}]}, "R")
    with pytest.raises(MassError):
        distribution_from_json({"kind": "points", "points": [{"x": [[0, 0]], "w": 1}]}, "C", n=2)


def test_shape_validation():
    with pytest.raises(MassError):
        PointCloud("C", np.zeros((3, 1, 4)), np.ones((3, 2)))
    with pytest.raises(MassError):
        PointCloud("R", [[np.nan]], [1.0])
    with pytest.raises(MassError):
        measure_regions(PointCloud("C", [[[0, 0]]], [[1, 0]]), PartitionParams("C", [[0, 0], [0, 0], [1, 0]]),
                        cyclic(3))
