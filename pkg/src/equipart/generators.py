"""Random and symmetric atom clouds used by the tests, demos and benchmarks."""

from __future__ import annotations

import numpy as np

from .algebra import fmul
from .groups import FiniteSubgroup, cyclic
from .measures import PointCloud


def signed_weights(rng: np.random.Generator, N: int, total: int) -> np.ndarray:
    """``N`` weights in {+1, -1} summing to ``total`` (same parity as ``N``)."""
    if (N + total) % 2 or abs(total) > N:
        raise ValueError(f"cannot reach total {total} with {N} unit weights")
    w = -np.ones(N)
    w[rng.choice(N, (N + total) // 2, replace=False)] = 1.0
    return w


def signed_real_cloud(rng: np.random.Generator, N: int, dim: int, total: int) -> PointCloud:
    """Gaussian atoms in R^dim with +-1 weights summing to ``total``."""
    x = rng.standard_normal((N, dim, 1))
    return PointCloud("R", x, signed_weights(rng, N, total)[:, None])


def as_complex(points: np.ndarray, weights: np.ndarray) -> PointCloud:
    """Real atoms in R^{2n} with real weights, read as a cloud on C^n."""
    points = np.asarray(points, dtype=float)
    w = np.asarray(weights, dtype=float).reshape(-1)
    return PointCloud("C", points.reshape(len(points), -1, 2), np.column_stack([w, np.zeros_like(w)]))


def signed_planar_cloud(rng: np.random.Generator, N: int, total: int, dim: int = 2) -> PointCloud:
    """Signed Gaussian cloud in R^dim (dim even) as a complex cloud."""
    return as_complex(rng.standard_normal((N, dim)), signed_weights(rng, N, total))


def orbit_cloud(G: FiniteSubgroup, seed_point, weight: float = 1.0) -> PointCloud:
    """The orbit ``{g x}`` of one atom under left multiplication, equal weights."""
    x = np.asarray(seed_point, dtype=float).reshape(-1, G.d)
    pos = fmul(G.elements[:, None, :], x[None, :, :])
    w = np.zeros((G.order, G.d))
    w[:, 0] = weight
    return PointCloud(G.algebra, pos, w)


def rotation_orbit(m: int, radius: float = 1.0, phase: float = 0.3) -> PointCloud:
    """``m`` unit-weight atoms at ``radius * exp(i (phase + 2 pi k / m))`` on C^1."""
    G = cyclic(m, "C")
    return orbit_cloud(G, [radius * np.cos(phase), radius * np.sin(phase)])


def perturbed_orbit(G: FiniteSubgroup, rng: np.random.Generator, extra: int = 2,
                    scale: float = 1.0) -> PointCloud:
    """A ``G``-orbit of one random atom plus ``extra`` random unit-weight atoms."""
    base = orbit_cloud(G, rng.standard_normal(G.d))
    pos = np.concatenate([base.positions, scale * rng.standard_normal((extra, 1, G.d))])
    w = np.zeros((len(pos), G.d))
    w[:, 0] = 1.0
    return PointCloud(G.algebra, pos, w)
