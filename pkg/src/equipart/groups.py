"""Finite subgroups of the unit sphere of R, C or H.

Groups are stored as an explicit element array plus a Cayley table of
element indices. Element order is fixed and documented because automorphism
permutations and JSON files refer to elements by index:

* cyclic ``C_m``: ``zeta_m**k`` for ``k = 0 .. m-1``;
* binary dihedral ``D*_m``: ``zeta_2m**p`` for ``p = 0 .. 2m-1``, then
  ``zeta_2m**q * j`` for ``q = 0 .. 2m-1``;
* binary polyhedral ``T*``, ``O*``, ``I*``: coordinates rounded to 9 places
  and sorted in descending lexicographic order, which puts the identity
  ``(1, 0, 0, 0)`` first and ``-1`` last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import FScalar, dim_of, fmul, finv

MATCH_TOL = 1e-9
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


class GroupError(ValueError):
    pass


def _snap(x: np.ndarray) -> np.ndarray:
    """Round coordinates within 1e-15 of 0 or +-1 onto them."""
    x = np.array(x, dtype=float)
    for t in (0.0, 1.0, -1.0):
        x[np.abs(x - t) < 1e-15] = t
    return x


def _match(products: np.ndarray, elements: np.ndarray) -> np.ndarray:
    """Index of the element nearest to each product; raise if none is within tolerance."""
    dist = np.linalg.norm(products[:, None, :] - elements[None, :, :], axis=-1)
    idx = np.argmin(dist, axis=1)
    worst = dist[np.arange(len(idx)), idx].max()
    if worst > MATCH_TOL:
        raise GroupError(f"product matches no element (distance {worst:.3g})")
    return idx


@dataclass(frozen=True, eq=False)
class FiniteSubgroup:
    """A finite subgroup ``G`` of ``S(F)`` with its multiplication table."""

    algebra: str
    name: str
    elements: np.ndarray
    cayley: np.ndarray = field(repr=False)
    inverses: np.ndarray = field(repr=False)
    kind: str = "generic"

    @classmethod
    def from_elements(cls, algebra: str, elements, name: str, kind: str = "generic"):
        elements = _snap(np.array(elements, dtype=float).reshape(-1, dim_of(algebra)))
        if elements.shape[0] == 0:
            raise GroupError("empty element list")
        norms = np.linalg.norm(elements, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise GroupError("group elements must have unit norm")
        if np.max(np.abs(elements[0] - np.eye(elements.shape[1])[0])) > 1e-12:
            raise GroupError("element 0 must be the identity")
        g = len(elements)
        if g > 1:
            gap = np.linalg.norm(elements[:, None] - elements[None, :], axis=-1)
            gap[np.diag_indices(g)] = np.inf
            if gap.min() <= MATCH_TOL:
                raise GroupError("group elements are not pairwise distinct")
        products = fmul(elements[:, None, :], elements[None, :, :]).reshape(g * g, -1)
        cayley = _match(products, elements).reshape(g, g)
        inverses = _match(finv(elements), elements)
        for arr in (elements, cayley, inverses):
            arr.setflags(write=False)
        return cls(algebra, name, elements, cayley, inverses, kind)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return self.order

    @property
    def d(self) -> int:
        return self.elements.shape[1]

    def element(self, i: int) -> FScalar:
        return FScalar(self.algebra, tuple(self.elements[i]))

    def mul(self, a: int, b: int) -> int:
        return int(self.cayley[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    def index_of(self, q) -> int:
        q = q.array if isinstance(q, FScalar) else np.asarray(q, dtype=float)
        return int(_match(q.reshape(1, -1), self.elements)[0])

    @cached_property
    def minus_one(self) -> int | None:
        """Index of ``-1`` if it belongs to the group."""
        target = -np.eye(self.d)[0]
        dist = np.linalg.norm(self.elements - target, axis=1)
        i = int(np.argmin(dist))
        return i if dist[i] <= MATCH_TOL else None

    @cached_property
    def negation(self) -> np.ndarray | None:
        """Permutation ``g -> -g`` as indices, or None when ``-1`` is missing."""
        if self.minus_one is None:
            return None
        return self.cayley[:, self.minus_one].copy()

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            k += 1
        return k

    def power(self, a: int, r: int) -> int:
        r %= self.element_order(a)
        x = 0
        for _ in range(r):
            x = self.mul(x, a)
        return x

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.cayley, self.cayley.T))

    def is_cyclic(self) -> bool:
        return any(self.element_order(a) == self.order for a in range(self.order))

    def is_subgroup(self, indices: Sequence[int]) -> bool:
        h = set(int(i) for i in indices)
        if 0 not in h or not h <= set(range(self.order)):
            return False
        return all(self.mul(a, b) in h for a in h for b in h)

    def subgroup(self, indices: Sequence[int], name: str | None = None) -> FiniteSubgroup:
        """The subgroup on ``indices`` as a group in its own right (sorted index order)."""
        idx = sorted(set(int(i) for i in indices))
        if not self.is_subgroup(idx):
            raise GroupError(f"indices {idx} do not form a subgroup of {self.name}")
        kind = "cyclic" if self.kind == "cyclic" else "generic"
        return FiniteSubgroup.from_elements(
            self.algebra, self.elements[idx], name or f"{self.name}|{len(idx)}", kind
        )

    def table(self) -> list[list[int]]:
        return self.cayley.tolist()


# --- constructors ---------------------------------------------------------

def cyclic(m: int, algebra: str = "C") -> FiniteSubgroup:
    """The ``m``-th roots of unity in ``algebra`` (only ``m = 2`` in R)."""
    if m < 2:
        raise GroupError(f"cyclic group needs m >= 2, got {m}")
    d = dim_of(algebra)
    if algebra == "R":
        if m != 2:
            raise GroupError("the only nontrivial finite subgroup of S(R) is {+1, -1}")
        return FiniteSubgroup.from_elements("R", [[1.0], [-1.0]], "C2", "cyclic")
    ang = 2.0 * np.pi * np.arange(m) / m
    elements = np.zeros((m, d))
    elements[:, 0] = np.cos(ang)
    elements[:, 1] = np.sin(ang)
    elements[0] = np.eye(d)[0]
    return FiniteSubgroup.from_elements(algebra, elements, f"C{m}", "cyclic")


def binary_dihedral(m: int) -> FiniteSubgroup:
    """``D*_m`` of order ``4m``: powers of ``zeta_2m`` followed by ``zeta_2m**q * j``."""
    if m < 2:
        raise GroupError(f"binary dihedral group needs m >= 2, got {m}")
    ang = np.pi * np.arange(2 * m) / m
    c, s = np.cos(ang), np.sin(ang)
    z = np.zeros_like(c)
    powers = np.stack([c, s, z, z], axis=1)
    # (c + s i) j = c j + s k
    twisted = np.stack([z, z, c, s], axis=1)
    name = "Q8" if m == 2 else f"D*{m}"
    return FiniteSubgroup.from_elements("H", np.vstack([powers, twisted]), name, "binary_dihedral")


def _closure(generators: np.ndarray, limit: int = 240) -> np.ndarray:
    elements = [np.array([1.0, 0.0, 0.0, 0.0])]
    frontier = list(elements)
    while frontier:
        fresh = []
        for a in frontier:
            for g in generators:
                p = fmul(a, g)
                if min(np.linalg.norm(p - e) for e in elements) > MATCH_TOL:
                    elements.append(p)
                    fresh.append(p)
        if len(elements) > limit:
            raise GroupError("generators do not close to a finite group")
        frontier = fresh
    return np.array(elements)


def _canonical_order(elements: np.ndarray) -> np.ndarray:
    key = np.round(elements, 9) + 0.0
    order = sorted(range(len(elements)), key=lambda t: tuple(-key[t]))
    return elements[order]


_POLYHEDRAL = {
    "T*": (24, [[0, 1, 0, 0], [0.5, 0.5, 0.5, 0.5]]),
    "O*": (48, [[0, 1, 0, 0], [0.5, 0.5, 0.5, 0.5], [math.sqrt(0.5), math.sqrt(0.5), 0, 0]]),
    "I*": (120, [[0, 1, 0, 0], [0.5, 0.5, 0.5, 0.5], [GOLDEN / 2, 0.5 / GOLDEN, 0.5, 0.0]]),
}


def binary_polyhedral(kind: str) -> FiniteSubgroup:
    """Binary tetrahedral (24), octahedral (48) or icosahedral (120) group."""
    kind = kind.upper().replace("STAR", "*")
    if kind not in _POLYHEDRAL:
        raise GroupError(f"unknown binary polyhedral group {kind!r}")
    size, gens = _POLYHEDRAL[kind]
    elements = _canonical_order(_closure(np.array(gens, dtype=float)))
    if len(elements) != size:
        raise GroupError(f"{kind} closure produced {len(elements)} elements, expected {size}")
    return FiniteSubgroup.from_elements("H", elements, kind, "binary_polyhedral")


def group_from_spec(spec: dict) -> FiniteSubgroup:
    """Build a group from ``{"kind": ..., "m": ..., "algebra": ...}``."""
    kind = spec.get("kind")
    if kind == "cyclic":
        return cyclic(int(spec["m"]), spec.get("algebra", "C"))
    if kind == "binary_dihedral":
        if spec.get("algebra", "H") != "H":
            raise GroupError("binary dihedral groups live in H")
        return binary_dihedral(int(spec["m"]))
    if kind in ("T*", "O*", "I*"):
        if spec.get("algebra", "H") != "H":
            raise GroupError(f"{kind} lives in H")
        return binary_polyhedral(kind)
    raise GroupError(f"unknown group kind {kind!r}")


# --- automorphisms --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Automorphism:
    """An automorphism of ``group`` given as an index permutation."""

    group: FiniteSubgroup
    perm: tuple[int, ...]

    def __call__(self, g: int) -> int:
        return self.perm[g]

    def compose(self, other: Automorphism) -> Automorphism:
        """``self o other``."""
        if other.group is not self.group:
            raise GroupError("automorphisms of different groups")
        return Automorphism(self.group, tuple(self.perm[p] for p in other.perm))

    def __eq__(self, other):
        return isinstance(other, Automorphism) and other.group is self.group and other.perm == self.perm

    def __hash__(self):
        return hash((id(self.group), self.perm))


def identity_automorphism(G: FiniteSubgroup) -> Automorphism:
    return Automorphism(G, tuple(range(G.order)))


def validate_automorphism(G: FiniteSubgroup, perm: Sequence[int]) -> Automorphism:
    """Accept ``perm`` iff it is a bijection with ``perm[a*b] == perm[a]*perm[b]``."""
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(G.order)):
        raise GroupError(f"not a permutation of the {G.order} element indices")
    if perm[0] != 0:
        raise GroupError("automorphism must fix the identity")
    p = np.array(perm)
    lhs = p[G.cayley]
    rhs = G.cayley[p[:, None], p[None, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        a, b = (int(t) for t in bad[0])
        raise GroupError(
            f"not a homomorphism: phi({a}*{b}) = {lhs[a, b]} but phi({a})*phi({b}) = {rhs[a, b]}"
        )
    return Automorphism(G, perm)


def cyclic_automorphism(G: FiniteSubgroup, r: int) -> Automorphism:
    """The power map ``g -> g**r`` on a cyclic group, ``gcd(r, |G|) = 1``."""
    m = G.order
    if not G.is_cyclic():
        raise GroupError(f"{G.name} is not cyclic")
    if math.gcd(r, m) != 1:
        raise GroupError(f"gcd({r}, {m}) != 1: g -> g^{r} is not an automorphism")
    return Automorphism(G, tuple(G.power(a, r) for a in range(m)))


def automorphism_from_spec(G: FiniteSubgroup, spec: dict | None) -> Automorphism:
    """``{"type": "power", "r": r}``, ``{"type": "table", "perm": [...]}`` or identity."""
    if spec is None or spec.get("type", "identity") == "identity":
        return identity_automorphism(G)
    if spec["type"] == "power":
        return cyclic_automorphism(G, int(spec["r"]))
    if spec["type"] == "table":
        return validate_automorphism(G, spec["perm"])
    raise GroupError(f"unknown automorphism type {spec['type']!r}")


# --- cosets ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CosetDecomposition:
    """Left cosets ``g_l H`` of a subgroup ``H`` (given by indices into ``group``)."""

    group: FiniteSubgroup
    subgroup_indices: tuple[int, ...]
    representatives: tuple[int, ...]
    subgroup: FiniteSubgroup = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.representatives)

    def coset(self, ell: int) -> tuple[int, ...]:
        """Indices ``g_l * h`` in the order of ``subgroup_indices``."""
        g = self.representatives[ell]
        return tuple(self.group.mul(g, h) for h in self.subgroup_indices)


def cosets(G: FiniteSubgroup, H_indices: Sequence[int]) -> CosetDecomposition:
    """Left coset decomposition with the smallest element index as representative."""
    H = sorted(set(int(h) for h in H_indices))
    if not G.is_subgroup(H):
        raise GroupError(f"indices {H} do not form a subgroup of {G.name}")
    seen: set[int] = set()
    reps = []
    for g in range(G.order):
        if g in seen:
            continue
        reps.append(g)
        seen.update(G.mul(g, h) for h in H)
    return CosetDecomposition(G, tuple(H), tuple(reps), G.subgroup(H))
