"""F-valued mass distributions modeled as weighted point clouds.

A :class:`PointCloud` is a finite list of atoms ``(x, w)`` with ``x`` in F^n and
``w`` in F. A :class:`SampledDensity` describes a density on a ball, box or
annulus and turns into a point cloud of ``N`` deterministic samples.

Atoms can sit exactly on a region boundary, which real mass distributions
cannot do. Such atoms are reported in ``boundary_mass`` and counted in
the tied region with the smallest element index. Putting atoms in general
position (small random jitter) makes this a probability-zero event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .algebra import FScalar, dim_of
from .groups import FiniteSubgroup
from .partition import EPS_TIE, PartitionParams, assign, fiber_values, site_scores

ZERO_MASS_TOL = 1e-12


class MassError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Atoms at ``positions (N, n, d)`` carrying ``weights (N, d)``."""

    algebra: str
    positions: np.ndarray
    weights: np.ndarray
    require_mass: bool = field(default=True, repr=False)

    def __post_init__(self):
        d = dim_of(self.algebra)
        pos = np.array(self.positions, dtype=float)
        w = np.array(self.weights, dtype=float)
        if d == 1 and pos.ndim == 2:
            pos = pos[..., None]
        if d == 1 and w.ndim == 1:
            w = w[:, None]
        if pos.ndim != 3 or pos.shape[2] != d:
            raise MassError(f"positions must have shape (N, n, {d}), got {pos.shape}")
        if w.shape != (pos.shape[0], d):
            raise MassError(f"weights must have shape ({pos.shape[0]}, {d}), got {w.shape}")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(w))):
            raise MassError("positions and weights must be finite")
        if self.require_mass and np.linalg.norm(w.sum(axis=0)) <= ZERO_MASS_TOL:
            raise MassError(
                "total mass is zero; a mass distribution must have nonzero total mass"
            )
        pos.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.positions.shape[1]

    @property
    def d(self) -> int:
        return self.positions.shape[2]

    @property
    def size(self) -> int:
        return self.positions.shape[0]

    def cloud(self) -> PointCloud:
        return self


@dataclass(frozen=True, eq=False)
class SampledDensity:
    """Uniform or affine density on a support in F^n, sampled with a fixed seed.

    ``support`` is one of::

        {"type": "ball", "center": [...], "radius": r}
        {"type": "box", "lo": [...], "hi": [...]}
        {"type": "annulus", "center": [...], "r_in": r0, "r_out": r1}

    with centers and corners given as the ``d * n`` real coordinates. Each
    sample carries weight ``mass * f(x) / N`` where ``f = 1`` for a uniform
    density and ``f(x) = c0 + <c, x>`` for an affine (possibly signed) one.
    """

    algebra: str
    n: int
    support: dict
    N: int = 100_000
    seed: int = 0
    mass: FScalar | None = None
    density: dict | None = None

    @property
    def d(self) -> int:
        return dim_of(self.algebra)

    @property
    def size(self) -> int:
        return self.N

    def _sample(self) -> np.ndarray:
        D = self.d * self.n
        # Philox is counter-based, so samples depend only on (seed, index).
        rng = np.random.Generator(np.random.Philox(key=self.seed))
        kind = self.support.get("type")
        if kind == "box":
            lo = np.asarray(self.support["lo"], dtype=float).reshape(D)
            hi = np.asarray(self.support["hi"], dtype=float).reshape(D)
            return lo + (hi - lo) * rng.random((self.N, D))
        if kind in ("ball", "annulus"):
            center = np.asarray(self.support.get("center", np.zeros(D)), dtype=float).reshape(D)
            direction = rng.standard_normal((self.N, D))
            direction /= np.linalg.norm(direction, axis=1, keepdims=True)
            t = rng.random(self.N)
            if kind == "ball":
                r = float(self.support["radius"]) * t ** (1.0 / D)
            else:
                r0, r1 = float(self.support["r_in"]), float(self.support["r_out"])
                r = (r0**D + t * (r1**D - r0**D)) ** (1.0 / D)
            return center + direction * r[:, None]
        raise MassError(f"unknown support type {kind!r}")

    @cached_property
    def _cloud(self) -> PointCloud:
        x = self._sample()
        mass = self.mass.array if self.mass is not None else np.eye(self.d)[0]
        dens = self.density or {"type": "uniform"}
        if dens["type"] == "uniform":
            f = np.ones(self.N)
        elif dens["type"] == "affine":
            f = float(dens.get("c0", 0.0)) + x @ np.asarray(dens["c"], dtype=float)
        else:
            raise MassError(f"unknown density type {dens['type']!r}")
        w = f[:, None] * mass[None, :] / self.N
        return PointCloud(self.algebra, x.reshape(self.N, self.n, self.d), w)

    def cloud(self) -> PointCloud:
        return self._cloud

    @property
    def positions(self) -> np.ndarray:
        return self._cloud.positions

    @property
    def weights(self) -> np.ndarray:
        return self._cloud.weights


MassDistribution = PointCloud | SampledDensity


@dataclass(frozen=True, eq=False)
class RegionMeasures:
    """``values[g]`` is the measure of region ``g``; boundary atoms already included."""

    group: FiniteSubgroup
    values: np.ndarray
    boundary_mass: np.ndarray

    def value(self, g: int) -> FScalar:
        return FScalar(self.group.algebra, tuple(self.values[g]))

    @property
    def total(self) -> np.ndarray:
        return self.values.sum(axis=0)

    def scaled(self, alpha: float) -> RegionMeasures:
        return RegionMeasures(self.group, alpha * self.values, alpha * self.boundary_mass)

    def __add__(self, other: RegionMeasures) -> RegionMeasures:
        if other.group is not self.group:
            raise ValueError("region measures over different groups")
        return RegionMeasures(self.group, self.values + other.values,
                              self.boundary_mass + other.boundary_mass)


def region_measures_batch(positions, weights, U, G: FiniteSubgroup,
                          eps_tie: float = EPS_TIE) -> tuple[np.ndarray, np.ndarray]:
    """Hard region measures for a batch of sphere points ``U (B, n+1, d)``.

    Returns ``(values (B, |G|, d), boundary_mass (B, d))``.
    """
    region, boundary = assign(site_scores(fiber_values(positions, U), G), eps_tie)
    onehot = region[..., None] == np.arange(G.order)
    values = np.einsum("bng,nd->bgd", onehot.astype(float), weights)
    bmass = np.einsum("bn,nd->bd", boundary.astype(float), weights)
    return values, bmass


def measure_regions(dist: MassDistribution, params: PartitionParams, G: FiniteSubgroup,
                    eps_tie: float = EPS_TIE) -> RegionMeasures:
    """Measure of every region ``R_g(u)``; sums run over atoms in index order."""
    cloud = dist.cloud()
    if cloud.algebra != params.algebra or cloud.algebra != G.algebra:
        raise MassError("distribution, parameters and group must share the algebra")
    if cloud.n != params.n:
        raise MassError(f"distribution on F^{cloud.n} but partition of F^{params.n}")
    region, boundary = assign(site_scores(fiber_values(cloud.positions, params.u), G), eps_tie)
    values = np.zeros((G.order, cloud.d))
    np.add.at(values, region, cloud.weights)
    bmass = cloud.weights[boundary].sum(axis=0) if boundary.any() else np.zeros(cloud.d)
    return RegionMeasures(G, values, bmass)


def total_mass(dist: MassDistribution) -> FScalar:
    cloud = dist.cloud()
    return FScalar(cloud.algebra, tuple(cloud.weights.sum(axis=0)))


def component_measures(dist: MassDistribution) -> list[PointCloud]:
    """Split ``mu = sum_b mu_b b`` into ``d`` signed clouds on R^{dn}."""
    cloud = dist.cloud()
    pos = cloud.positions.reshape(cloud.size, cloud.n * cloud.d, 1)
    return [
        PointCloud("R", pos, cloud.weights[:, t : t + 1], require_mass=False)
        for t in range(cloud.d)
    ]


def recombine(components: list[PointCloud], algebra: str) -> PointCloud:
    """Inverse of :func:`component_measures`."""
    d = dim_of(algebra)
    if len(components) != d:
        raise MassError(f"{algebra} needs {d} components, got {len(components)}")
    base = components[0].positions
    N, D = base.shape[0], base.shape[1]
    w = np.concatenate([c.weights for c in components], axis=1)
    return PointCloud(algebra, base.reshape(N, D // d, d), w)


# --- JSON -----------------------------------------------------------------

def _scalar(value, algebra: str) -> np.ndarray:
    return FScalar.of(algebra, value if not isinstance(value, list) else value).array


def distribution_from_json(data: dict, algebra: str | None = None, n: int | None = None):
    """Parse a point-cloud or density description."""
    algebra = data.get("algebra", algebra)
    if algebra is None:
        raise MassError("distribution needs an algebra")
    d = dim_of(algebra)
    kind = data.get("kind", "points")
    if kind == "points":
        pts = data["points"]
        if not pts:
            raise MassError("point cloud has no atoms")
        pos = []
        for p in pts:
            x = p["x"]
            x = [x] if np.isscalar(x) else x
            pos.append([_scalar(c, algebra) for c in x])
        w = [_scalar(p.get("w", 1.0), algebra) for p in pts]
        cloud = PointCloud(algebra, np.array(pos, dtype=float), np.array(w, dtype=float))
        if n is not None and cloud.n != n:
            raise MassError(f"points live in F^{cloud.n}, instance expects F^{n}")
        return cloud
    if kind == "density":
        n = int(data.get("n", n if n is not None else 0))
        if n < 1:
            raise MassError("density needs the ambient dimension n")
        mass = FScalar.of(algebra, data["mass"]) if "mass" in data else None
        dens = SampledDensity(algebra, n, data["support"], int(data.get("N", 100_000)),
                              int(data.get("seed", 0)), mass, data.get("density"))
        tm = dens.cloud().weights.sum(axis=0)
        if np.linalg.norm(tm) <= ZERO_MASS_TOL:
            raise MassError("total mass is zero; a mass distribution must have nonzero total mass")
        return dens
    raise MassError(f"unknown distribution kind {kind!r}")


def distribution_to_json(dist: MassDistribution) -> dict:
    if isinstance(dist, SampledDensity):
        out = {"algebra": dist.algebra, "kind": "density", "n": dist.n, "support": dist.support,
               "N": dist.N, "seed": dist.seed}
        if dist.mass is not None:
            out["mass"] = list(dist.mass.coords)
        if dist.density is not None:
            out["density"] = dist.density
        return out
    return {
        "algebra": dist.algebra,
        "kind": "points",
        "points": [{"x": x.tolist(), "w": w.tolist()} for x, w in zip(dist.positions, dist.weights)],
    }


def mc_error_bound(dist: MassDistribution) -> float:
    """``3 / sqrt(N)`` times the total absolute weight: a loose Monte Carlo band."""
    cloud = dist.cloud()
    return 3.0 / math.sqrt(cloud.size) * float(np.abs(cloud.weights).sum(axis=0).max())
