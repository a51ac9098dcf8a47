"""Search the parameter sphere for a partition whose averages all vanish.

The residual of a point cloud is piecewise constant in ``u``, so it cannot
be minimized directly. Each restart therefore runs a continuation:

1. every atom is blurred by a soft nearest-site assignment (a softmax over
   the site scores, scaled so the blur has width ``h`` in x-space);
2. Nelder-Mead minimizes the smoothed squared residual in a gnomonic chart
   of the sphere centred at the current point, and ``h`` shrinks stage by
   stage;
3. a polish step samples shrinking balls around the smoothed optimum and
   keeps the first point whose exact (hard) residual is below tolerance.

Restarts begin at scrambled Sobol points mapped to the sphere. They may run
on several threads; the returned result is always the lowest-index
converged restart (or the best residual, ties to the lower index), so the
outcome does not depend on the thread count.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm, qmc

from .algebra import FScalar, dim_of, left_matrix
from .averages import AverageReport, _coset_coefficients, g_average, inverse_coefficients
from .groups import Automorphism, CosetDecomposition, FiniteSubgroup, cyclic, cyclic_automorphism
from .measures import MassDistribution, PointCloud, SampledDensity, mc_error_bound, measure_regions
from .partition import (
    EPS_TIE,
    PartitionParams,
    assign,
    excluded_set_margin,
    fiber_values,
    site_scores,
)

# cap on B * N * |G| floats held at once during batched evaluation
_CHUNK = 2_000_000


class SolverError(ValueError):
    pass


@dataclass(frozen=True)
class SolveConfig:
    restarts: int = 64
    max_iters: int = 2000
    step: float = 0.5
    tol: float = 1e-8
    seed: int = 0
    margin_floor: float = 1e-6
    smoothing: float = 0.25
    smoothing_floor: float = 1e-4
    polish_samples: int = 256
    threads: int = 1

    def __post_init__(self):
        for name in ("restarts", "max_iters", "polish_samples", "threads"):
            if getattr(self, name) < 1:
                raise SolverError(f"{name} must be positive")
        if self.tol < 1e-12:
            raise SolverError("tol must be at least 1e-12")
        if self.step <= 0 or self.margin_floor <= 0 or self.smoothing < 0:
            raise SolverError("step and margin floor must be positive, smoothing nonnegative")

    @classmethod
    def from_json(cls, data: dict) -> SolveConfig:
        known = {f for f in cls.__dataclass_fields__}
        kw = {k: v for k, v in data.items() if k in known}
        return cls(**kw)

    def to_json(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__ if f != "threads"}


@dataclass
class SolveResult:
    params: PartitionParams
    report: AverageReport
    converged: bool
    iterations: int
    restart: int
    margin: float
    tol: float
    wall_time: float = field(default=0.0, compare=False)

    @property
    def residual(self) -> float:
        return self.report.aggregate

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "report": self.report.to_json(),
            "converged": self.converged,
            "iterations": self.iterations,
            "restart": self.restart,
            "margin": self.margin,
            "tol": self.tol,
        }


# --- problem assembly -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class Problem:
    """Measures, group, and a list of linear conditions ``sum_g C[g] @ mu_i(R_g) = 0``."""

    group: FiniteSubgroup
    dists: tuple
    conditions: tuple  # (dist index, coefficients (|G|, d, d), label)

    @property
    def algebra(self) -> str:
        return self.group.algebra

    @property
    def n(self) -> int:
        return self.dists[0].cloud().n

    @property
    def d(self) -> int:
        return self.group.d

    @property
    def dim(self) -> int:
        """Real dimension of the ambient space of the parameter sphere."""
        return self.d * (self.n + 1)

    def clouds(self) -> list[PointCloud]:
        return [dist.cloud() for dist in self.dists]

    def mass_scale(self) -> float:
        return max(float(np.abs(c.weights).sum()) for c in self.clouds())

    def spread(self) -> float:
        pts = np.concatenate([c.positions.reshape(c.size, -1) for c in self.clouds()])
        centred = pts - pts.mean(axis=0)
        s = float(np.sqrt((centred**2).sum(axis=1).mean()))
        return s if s > 0 else 1.0

    def evaluate(self, U: np.ndarray, h: float | None = None) -> np.ndarray:
        """Condition values for sphere points ``U (B, n+1, d)``: shape ``(B, C, d)``.

        With ``h`` set, atoms are blurred by a soft assignment of x-space width ``h``.
        """
        B = U.shape[0]
        out = np.zeros((B, len(self.conditions), self.d))
        clouds = self.clouds()
        per = max(1, _CHUNK // max(1, max(c.size for c in clouds) * self.group.order))
        for start in range(0, B, per):
            sl = slice(start, start + per)
            vals = [self._region_values(c, U[sl], h) for c in clouds]
            for c_idx, (i, coeff, _) in enumerate(self.conditions):
                out[sl, c_idx] = np.einsum("gij,bgj->bi", coeff, vals[i])
        return out

    def _region_values(self, cloud: PointCloud, U: np.ndarray, h: float | None) -> np.ndarray:
        scores = site_scores(fiber_values(cloud.positions, U), self.group)
        if h is None:
            region, _ = assign(scores, EPS_TIE)
            weights = (region[..., None] == np.arange(self.group.order)).astype(float)
        else:
            tail = np.maximum(np.linalg.norm(U[:, 1:].reshape(len(U), -1), axis=1), 1e-12)
            logits = scores / (tail[:, None, None] * h)
            logits -= logits.max(axis=-1, keepdims=True)
            weights = np.exp(logits)
            weights /= weights.sum(axis=-1, keepdims=True)
        return np.einsum("bng,nd->bgd", weights, cloud.weights)

    def report(self, params: PartitionParams) -> AverageReport:
        """Exact averages at ``params`` through the public measure path."""
        rms = [measure_regions(dist, params, self.group) for dist in self.dists]
        avgs = []
        for i, coeff, _ in self.conditions:
            avgs.append(FScalar(self.algebra, tuple(np.einsum("gij,gj->i", coeff, rms[i].values))))
        return AverageReport(tuple(avgs), tuple(label for _, _, label in self.conditions))


def _check_measures(dists: Sequence[MassDistribution], G: FiniteSubgroup):
    if not dists:
        raise SolverError("no measures given")
    ns = {dist.cloud().n for dist in dists}
    if len(ns) != 1:
        raise SolverError(f"measures live in different dimensions {sorted(ns)}")
    for dist in dists:
        if dist.cloud().algebra != G.algebra:
            raise SolverError(f"{dist.cloud().algebra} measure with a subgroup of S({G.algebra})")


def average_problem(dists: Sequence[MassDistribution], phis: Sequence[Automorphism]) -> Problem:
    if len(dists) != len(phis):
        raise SolverError(f"{len(dists)} measures but {len(phis)} automorphisms")
    if not phis:
        raise SolverError("no measures given")
    G = phis[0].group
    if any(phi.group is not G for phi in phis):
        raise SolverError("automorphisms of different groups")
    _check_measures(dists, G)
    conds = tuple((i, inverse_coefficients(phi), f"measure {i}") for i, phi in enumerate(phis))
    return Problem(G, tuple(dists), conds)


def coset_problem(dists: Sequence[MassDistribution], decomposition: CosetDecomposition,
                  phis_per_coset) -> Problem:
    """Conditions for every coset ``l`` and measure ``i``.

    ``phis_per_coset[i][l]`` is the automorphism of the subgroup used for
    measure ``i`` on coset ``l``; a single automorphism is used everywhere.
    """
    G = decomposition.group
    _check_measures(dists, G)
    if isinstance(phis_per_coset, Automorphism):
        phis_per_coset = [[phis_per_coset] * decomposition.k for _ in dists]
    if len(phis_per_coset) != len(dists):
        raise SolverError("need one row of coset automorphisms per measure")
    conds = []
    for i, row in enumerate(phis_per_coset):
        if len(row) != decomposition.k:
            raise SolverError(f"measure {i}: need {decomposition.k} automorphisms, got {len(row)}")
        for ell, phi in enumerate(row):
            conds.append((i, _coset_coefficients(decomposition, ell, phi), f"measure {i} coset {ell}"))
    return Problem(G, tuple(dists), tuple(conds))


def residual(u: PartitionParams, dists: Sequence[MassDistribution],
             phis: Sequence[Automorphism]) -> AverageReport:
    """``sum_g phi_i(g)^-1 mu_i(R_g(u))`` for every measure."""
    problem = average_problem(dists, phis)
    if u.n != problem.n or u.algebra != problem.algebra:
        raise SolverError(f"parameters for F^{u.n} but measures on F^{problem.n}")
    return problem.report(u)


# --- sphere charts --------------------------------------------------------

def _tangent_basis(p: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(np.column_stack([p, np.eye(len(p))]))
    return q[:, 1 : len(p)]


def _chart(p: np.ndarray, basis: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Gnomonic chart ``t -> (p + T t) / |p + T t|`` (batched over leading axes of t)."""
    x = p + t @ basis.T
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def sphere_starts(dim: int, count: int, seed: int) -> np.ndarray:
    """``count`` scrambled-Sobol points on the unit sphere in R^dim."""
    m = max(1, math.ceil(math.log2(max(count, 2))))
    pts = qmc.Sobol(d=dim, scramble=True, seed=seed).random_base2(m)[:count]
    pts = norm.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


# --- the search -----------------------------------------------------------

@dataclass
class _Attempt:
    flat: np.ndarray
    value: float
    iterations: int
    restart: int
    margin: float
    converged: bool


class _Search:
    def __init__(self, problem: Problem, config: SolveConfig, tol: float):
        self.problem = problem
        self.config = config
        self.tol = tol
        self.shape = (problem.n + 1, problem.d)
        self.spread = problem.spread()
        self.scale = problem.mass_scale()

    def hard(self, flats: np.ndarray) -> np.ndarray:
        U = flats.reshape((-1,) + self.shape)
        r = self.problem.evaluate(U)
        return np.sqrt((r**2).sum(axis=(1, 2)))

    def margin(self, flat: np.ndarray) -> float:
        return excluded_set_margin(PartitionParams(self.problem.algebra, flat.reshape(self.shape)),
                                   self.problem.group)

    def _smooth_objective(self, p, basis, h):
        h_abs = h * self.spread

        def f(t):
            u = _chart(p, basis, np.asarray(t)[None, :])
            r = self.problem.evaluate(u.reshape((1,) + self.shape), h_abs)
            return float((r**2).sum()) / self.scale**2

        return f

    def _accept(self, flat: np.ndarray, value: float) -> bool:
        return value <= self.tol and self.margin(flat) > self.config.margin_floor

    def _polish(self, p: np.ndarray, radius: float, rng: np.random.Generator):
        """Sample shrinking balls around ``p``; return the best hard point found."""
        dim = len(p)
        basis = _tangent_basis(p)
        best_flat, best_val = p, float(self.hard(p[None])[0])
        if self._accept(best_flat, best_val):
            return best_flat, best_val
        radii = np.geomspace(max(radius, 1e-9), 1e-10, 14)
        for rad in radii:
            z = rng.standard_normal((self.config.polish_samples, dim - 1))
            z /= np.linalg.norm(z, axis=1, keepdims=True)
            z *= rad * rng.random((len(z), 1)) ** (1.0 / max(dim - 1, 1))
            cand = _chart(p, basis, z)
            vals = self.hard(cand)
            for t in np.argsort(vals, kind="stable"):
                if vals[t] > self.tol:
                    break
                if self._accept(cand[t], vals[t]):
                    return cand[t], float(vals[t])
            t = int(np.argmin(vals))
            if vals[t] < best_val and self.margin(cand[t]) > self.config.margin_floor:
                best_flat, best_val = cand[t], float(vals[t])
        return best_flat, best_val

    def run(self, restart: int, start: np.ndarray) -> _Attempt:
        cfg = self.config
        rng = np.random.default_rng([cfg.seed, restart])
        p = start / np.linalg.norm(start)
        dim = len(p)
        iters = 0
        best_flat, best_val = p, float(self.hard(p[None])[0])
        if self._accept(best_flat, best_val):
            return _Attempt(best_flat, best_val, 0, restart, self.margin(best_flat), True)

        stages = []
        h = cfg.smoothing
        while h >= cfg.smoothing_floor:
            stages.append(h)
            h *= 0.3
        budget = max(20, cfg.max_iters // max(1, len(stages)))
        for s, h in enumerate(stages):
            basis = _tangent_basis(p)
            delta = cfg.step * h / stages[0]
            simplex = np.vstack([np.zeros(dim - 1), delta * np.eye(dim - 1)])
            res = minimize(
                self._smooth_objective(p, basis, h),
                np.zeros(dim - 1),
                method="Nelder-Mead",
                options={"initial_simplex": simplex, "maxiter": budget,
                         "xatol": 1e-4 * delta, "fatol": 1e-16},
            )
            iters += int(res.nit)
            p = _chart(p, basis, res.x)
            val = float(self.hard(p[None])[0])
            if val < best_val or s == len(stages) - 1:
                best_flat, best_val = p, val
            if self._accept(p, val):
                return _Attempt(p, val, iters, restart, self.margin(p), True)

        radius = 10.0 * (stages[-1] if stages else cfg.step)
        flat, val = self._polish(p, radius, rng)
        if val < best_val:
            best_flat, best_val = flat, val
        if not self._accept(best_flat, best_val) and stages:
            # the polish may have landed nearer a zero cell than the smoothed point
            flat, val = self._polish(best_flat, radius * 0.1, rng)
            if val < best_val:
                best_flat, best_val = flat, val
        converged = self._accept(best_flat, best_val)
        return _Attempt(best_flat, best_val, iters, restart, self.margin(best_flat), converged)


def effective_tol(problem: Problem, config: SolveConfig) -> float:
    tol = config.tol
    for dist in problem.dists:
        if isinstance(dist, SampledDensity):
            tol = max(tol, mc_error_bound(dist))
    return tol


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("EQUIPART_THREADS", "1") or 1)
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def solve_problem(problem: Problem, config: SolveConfig = SolveConfig()) -> SolveResult:
    t0 = time.perf_counter()
    tol = effective_tol(problem, config)
    search = _Search(problem, config, tol)
    starts = sphere_starts(problem.dim, config.restarts, config.seed)
    threads = max(1, config.threads)
    attempts: list[_Attempt] = []
    winner = None
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for lo in range(0, config.restarts, threads):
            idx = range(lo, min(lo + threads, config.restarts))
            batch = list(pool.map(lambda r: search.run(r, starts[r]), idx))
            attempts.extend(batch)
            done = [a for a in batch if a.converged]
            if done:
                winner = done[0]
                break
    if winner is None:
        winner = min(attempts, key=lambda a: (a.value, a.restart))
    params = PartitionParams.normalized(problem.algebra, winner.flat.reshape(search.shape))
    report = problem.report(params)
    margin = excluded_set_margin(params, problem.group)
    converged = report.aggregate <= tol and margin > config.margin_floor
    return SolveResult(params, report, converged, winner.iterations, winner.restart, margin, tol,
                       time.perf_counter() - t0)


def solve(dists: Sequence[MassDistribution], phis: Sequence[Automorphism],
          config: SolveConfig = SolveConfig()) -> SolveResult:
    """Find ``u`` with every ``(G, phi_i)``-average of ``mu_i`` (numerically) zero."""
    return solve_problem(average_problem(dists, phis), config)


def solve_coset(dists: Sequence[MassDistribution], decomposition: CosetDecomposition,
                phis_per_coset, config: SolveConfig = SolveConfig()) -> SolveResult:
    """Find ``u`` with every coset average of every measure (numerically) zero."""
    return solve_problem(coset_problem(dists, decomposition, phis_per_coset), config)


# --- brute-force oracle ---------------------------------------------------

@dataclass
class OracleResult:
    params: PartitionParams
    residual: float
    points: int
    sign_changes: int
    quantiles: dict

    def to_json(self) -> dict:
        return {"params": self.params.to_json(), "residual": self.residual, "points": self.points,
                "sign_changes": self.sign_changes, "quantiles": self.quantiles}


def cube_sphere_grid(dim: int, resolution: int) -> tuple[np.ndarray, int]:
    """Near-uniform points on S^{dim-1}: a centred lattice on each face of the cube, projected.

    Returns ``(points (2 dim k^(dim-1), dim), k)``.
    """
    k = max(2, int(round((resolution / (2 * dim)) ** (1.0 / max(dim - 1, 1)))))
    axis = (np.arange(k) + 0.5) / k * 2.0 - 1.0
    lattice = np.stack(np.meshgrid(*([axis] * (dim - 1)), indexing="ij"), axis=-1).reshape(-1, dim - 1)
    faces = []
    for a in range(dim):
        for s in (1.0, -1.0):
            pts = np.insert(lattice, a, s, axis=1)
            faces.append(pts)
    pts = np.concatenate(faces)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True), k


def oracle_problem(problem: Problem, resolution: int = 100_000) -> OracleResult:
    if problem.dim - 1 > 3:
        raise SolverError(f"oracle grid needs sphere dimension <= 3, got {problem.dim - 1}")
    pts, k = cube_sphere_grid(problem.dim, resolution)
    shape = (problem.n + 1, problem.d)
    r = problem.evaluate(pts.reshape((-1,) + shape))
    res = np.sqrt((r**2).sum(axis=(1, 2)))
    signs = np.sign(np.round(r.reshape(len(pts), -1), 12)).astype(np.int8)
    face = signs.reshape((2 * problem.dim,) + (k,) * (problem.dim - 1) + (-1,))
    changes = 0
    for ax in range(1, problem.dim):
        a = np.take(face, range(k - 1), axis=ax)
        b = np.take(face, range(1, k), axis=ax)
        changes += int(np.any(a != b, axis=-1).sum())
    best = int(np.argmin(res))
    q = np.quantile(res, [0.0, 0.5, 1.0])
    return OracleResult(
        PartitionParams.normalized(problem.algebra, pts[best].reshape(shape)),
        float(res[best]), len(pts), changes,
        {"min": float(q[0]), "median": float(q[1]), "max": float(q[2])},
    )


def oracle_grid(dists: Sequence[MassDistribution], phis: Sequence[Automorphism],
                resolution: int = 100_000) -> OracleResult:
    """Exhaustive residual scan on a near-uniform grid of the parameter sphere."""
    return oracle_problem(average_problem(dists, phis), resolution)


# --- instance builders ----------------------------------------------------

def ham_sandwich_problem(clouds: Sequence[PointCloud]) -> tuple[list, list]:
    """Real clouds on R^n with the only automorphism of {+1, -1}."""
    G = cyclic(2, "R")
    return list(clouds), [cyclic_automorphism(G, 1)] * len(clouds)


def regular_fan_problem(points: Sequence[np.ndarray], weights: Sequence[np.ndarray], p: int):
    """Signed clouds on R^{(p-1)n} as complex clouds on C^{(p-1)n/2} with ``C_p``.

    Each real measure is repeated for ``r = 1 .. (p-1)/2`` with the power
    automorphism ``g -> g^r``; a zero of all these averages is a regular
    ``p``-fan splitting every measure into ``p`` equal parts.
    """
    if p < 3 or any(p % q == 0 for q in range(2, int(math.isqrt(p)) + 1)):
        raise SolverError(f"p = {p} is not an odd prime")
    G = cyclic(p, "C")
    dists, phis = [], []
    for x, w in zip(points, weights):
        x = np.asarray(x, dtype=float)
        w = np.asarray(w, dtype=float).reshape(-1)
        if x.shape[1] % 2:
            raise SolverError("real dimension must be even to pair coordinates into C")
        cloud = PointCloud("C", x.reshape(len(x), -1, 2), np.column_stack([w, np.zeros_like(w)]))
        for r in range(1, (p - 1) // 2 + 1):
            dists.append(cloud)
            phis.append(cyclic_automorphism(G, r))
    return dists, phis
