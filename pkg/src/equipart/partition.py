"""G-Voronoi partitions of F^n parametrized by points of the sphere S(F^{n+1}).

A sphere point ``u = (u_0, u_1, ..., u_n)`` assigns ``x`` in F^n to the
region of the group element nearest to the fiber value

    v = <x, (u_1, ..., u_n)>_F + conj(u_0)

where the nearest-site rule is taken inside F with the group elements as
sites. Because every site is a unit vector, "nearest" is the same as
"largest real inner product" ``Re <v, g>``, which keeps the regions cones
and the whole classification homogeneous in ``u``.

Away from the poles (``u_1 = ... = u_n = 0``) these are exactly the regions
``R_g(a, b)`` with ``a = u'/|u'|`` and ``b = -u_0/|u'|``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import FScalar, FVector, dim_of, fconj, fmul
from .groups import FiniteSubgroup

EPS_TIE = 1e-9
EPS_POLE = 1e-9


@dataclass(frozen=True, eq=False)
class PartitionParams:
    """A unit vector ``u`` in F^{n+1}, stored as an ``(n+1, d)`` real array."""

    algebra: str
    u: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        d = dim_of(self.algebra)
        if u.ndim == 1 and d == 1:
            u = u[:, None]
        if u.ndim != 2 or u.shape[1] != d or u.shape[0] < 2:
            raise ValueError(f"u must have shape (n+1, {d}) with n >= 1, got {u.shape}")
        if abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise ValueError(f"u must lie on the unit sphere (|u| = {np.linalg.norm(u)!r})")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @classmethod
    def normalized(cls, algebra: str, u) -> PartitionParams:
        u = np.array(u, dtype=float)
        norm = np.linalg.norm(u)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(algebra, u / norm)

    @classmethod
    def from_flat(cls, algebra: str, flat, n: int) -> PartitionParams:
        return cls.normalized(algebra, np.asarray(flat, dtype=float).reshape(n + 1, dim_of(algebra)))

    @classmethod
    def from_hyperplane(cls, a: FVector, b: FScalar) -> PartitionParams:
        """The sphere point whose partition is ``R_g(a, b)``."""
        a_arr = a.array / a.norm()
        return cls.normalized(a.algebra, np.vstack([-b.array[None, :], a_arr]))

    @property
    def n(self) -> int:
        return self.u.shape[0] - 1

    @property
    def d(self) -> int:
        return self.u.shape[1]

    @property
    def flat(self) -> np.ndarray:
        return self.u.ravel()

    @property
    def head(self) -> FScalar:
        return FScalar(self.algebra, tuple(self.u[0]))

    @property
    def tail_norm(self) -> float:
        return float(np.linalg.norm(self.u[1:]))

    def at_pole(self, eps: float = EPS_POLE) -> bool:
        return self.tail_norm <= eps

    @property
    def a(self) -> FVector:
        if self.at_pole():
            raise ValueError("the (a, b) view is undefined at a pole")
        return FVector.from_array(self.algebra, self.u[1:] / self.tail_norm)

    @property
    def b(self) -> FScalar:
        if self.at_pole():
            raise ValueError("the (a, b) view is undefined at a pole")
        return FScalar(self.algebra, tuple(-self.u[0] / self.tail_norm))

    def to_json(self) -> dict:
        return {"u": self.u.tolist()}

    @classmethod
    def from_json(cls, algebra: str, data: dict) -> PartitionParams:
        return cls(algebra, np.array(data["u"], dtype=float))

    def __eq__(self, other):
        return (isinstance(other, PartitionParams) and other.algebra == self.algebra
                and np.array_equal(other.u, self.u))

    def __hash__(self):
        return hash((self.algebra, self.u.tobytes()))


@dataclass(frozen=True)
class Boundary:
    """A point equidistant (within the tie tolerance) from several sites."""

    tied: tuple[int, ...]


@dataclass(frozen=True)
class ClassifiedPoint:
    region: int | Boundary
    fiber_value: FScalar

    @property
    def assigned(self) -> int:
        """Region index with boundary points sent to the smallest tied index."""
        return self.region.tied[0] if isinstance(self.region, Boundary) else self.region


# --- vectorized kernels ---------------------------------------------------

def fiber_values(X, U) -> np.ndarray:
    """Fiber values for positions ``X (N, n, d)`` and sphere points ``U (..., n+1, d)``.

    Returns shape ``U.shape[:-2] + (N, d)``.
    """
    X = np.asarray(X, dtype=float)
    U = np.asarray(U, dtype=float)
    tail = fconj(U[..., 1:, :])[..., None, :, :]  # (..., 1, n, d)
    v = fmul(X, tail).sum(axis=-2)
    return v + fconj(U[..., 0, :])[..., None, :]


def site_scores(V, G: FiniteSubgroup) -> np.ndarray:
    """``Re <v, g>`` for every site; larger means nearer."""
    return np.asarray(V, dtype=float) @ G.elements.T


def assign(scores, eps_tie: float = EPS_TIE) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-site region per row and a boundary flag.

    Squared distances differ by twice the score difference, so a tie means
    ``2 * (max - score) <= eps_tie``. Ties go to the smallest tied index.
    """
    scores = np.asarray(scores)
    best = scores.max(axis=-1, keepdims=True)
    tied = 2.0 * (best - scores) <= eps_tie
    region = np.argmax(tied, axis=-1)
    boundary = tied.sum(axis=-1) > 1
    return region, boundary


# --- operations -----------------------------------------------------------

def voronoi_cell_of(v: FScalar, G: FiniteSubgroup, eps_tie: float = EPS_TIE) -> int | Boundary:
    """Index of the group element nearest to ``v``, or the tied set."""
    if v.algebra != G.algebra:
        raise ValueError(f"{v.algebra} value against a subgroup of S({G.algebra})")
    s = site_scores(v.array, G)
    tied = np.flatnonzero(2.0 * (s.max() - s) <= eps_tie)
    if len(tied) > 1:
        return Boundary(tuple(int(t) for t in tied))
    return int(tied[0])


def classify(x: FVector, params: PartitionParams, G: FiniteSubgroup,
             eps_tie: float = EPS_TIE) -> ClassifiedPoint:
    if x.n != params.n:
        raise ValueError(f"point in F^{x.n} but partition of F^{params.n}")
    v = fiber_values(x.array[None], params.u)[0]
    fv = FScalar(params.algebra, tuple(v))
    return ClassifiedPoint(voronoi_cell_of(fv, G, eps_tie), fv)


def classify_many(X, params: PartitionParams, G: FiniteSubgroup,
                  eps_tie: float = EPS_TIE) -> tuple[np.ndarray, np.ndarray]:
    """Region indices and boundary flags for positions ``X (N, n, d)``."""
    return assign(site_scores(fiber_values(X, params.u), G), eps_tie)


def act(g: int, params: PartitionParams, G: FiniteSubgroup) -> PartitionParams:
    """Left scalar action ``u -> g u``; moves region ``g1 g`` of ``u`` to region ``g1``."""
    # |g| = 1, so the product stays on the sphere up to rounding
    return PartitionParams(params.algebra, fmul(G.elements[g], params.u))


@dataclass(frozen=True)
class HalfHyperplane:
    """``{x : <x, a>_F = conj(b) + r * direction, r >= 0}``, separating two sectors."""

    a: FVector
    b: FScalar
    direction: FScalar
    between: tuple[int, int]

    @property
    def angle(self) -> float:
        """Fiber angle of ``direction`` in [0, 2 pi)."""
        return float(np.arctan2(self.direction.coords[1], self.direction.coords[0]) % (2 * np.pi))


def fan_boundary(params: PartitionParams, G: FiniteSubgroup) -> list[HalfHyperplane]:
    """The ``m`` half-hyperplanes of a complex regular ``m``-fan.

    With the nearest-site rule, sector ``k`` is centred on fiber angle
    ``2 pi k / m`` and meets sector ``k+1`` along the ray at ``2 pi (k + 1/2) / m``.
    """
    if params.algebra != "C" or G.algebra != "C" or G.kind != "cyclic":
        raise ValueError("fan boundaries are defined for cyclic subgroups of S(C)")
    if params.at_pole():
        raise ValueError("no fan at a pole of the parameter sphere")
    m = G.order
    a, b = params.a, params.b
    out = []
    for k in range(m):
        ang = 2.0 * np.pi * (k + 0.5) / m
        lam = FScalar("C", (np.cos(ang), np.sin(ang)))
        out.append(HalfHyperplane(a, b, lam, (k, (k + 1) % m)))
    return out


def boundary_distance(w, G: FiniteSubgroup) -> float:
    """Euclidean distance in F from ``w`` to the union of the cell boundaries."""
    w = np.asarray(w, dtype=float)
    s = G.elements @ w
    best = int(np.argmax(s))
    others = [t for t in range(G.order) if t != best]
    if not others:
        return float("inf")
    gaps = G.elements[best] - G.elements[others]
    return float(np.min((s[best] - s[others]) / np.linalg.norm(gaps, axis=1)))


def excluded_set_margin(params: PartitionParams, G: FiniteSubgroup) -> float:
    """How far ``u`` is from the excluded set ``X_G``; zero means ``u`` lies in it.

    ``X_G`` consists of poles ``(u_0, 0)`` with ``u_0`` on a cell boundary, so
    the margin is the larger of ``|(u_1..u_n)|`` and the boundary distance of
    ``u_0 / |u_0|``.
    """
    tail = params.tail_norm
    head = params.u[0]
    hn = np.linalg.norm(head)
    bd = boundary_distance(head / hn, G) if hn > 0 else 0.0
    return float(max(tail, bd))


def cell_adjacency(G: FiniteSubgroup, eps: float = 1e-9) -> np.ndarray:
    """Number of facet neighbours of each Voronoi cell of ``G`` inside H.

    ``g`` and ``g'`` share a facet when the midpoint of the arc between them
    is nearest to exactly those two sites.
    """
    if G.algebra != "H" or G.order < 3:
        raise ValueError("cell adjacency needs a subgroup of S(H) with at least 3 elements")
    E = G.elements
    mid = E[:, None, :] + E[None, :, :]
    norm = np.linalg.norm(mid, axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        mid = mid / norm
    scores = mid @ E.T  # (g, g', site)
    idx = np.arange(G.order)
    own = scores[idx[:, None], idx[None, :], idx[:, None]]
    other = scores[idx[:, None], idx[None, :], idx[None, :]]
    masked = scores.copy()
    masked[idx[:, None], idx[None, :], idx[:, None]] = -np.inf
    masked[idx[:, None], idx[None, :], idx[None, :]] = -np.inf
    rest = masked.max(axis=-1)
    ok = (np.abs(own - other) <= eps) & (own - rest > eps) & (norm[..., 0] > eps)
    ok[idx, idx] = False
    return ok.sum(axis=1)
