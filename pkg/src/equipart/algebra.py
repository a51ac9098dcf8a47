"""Scalar arithmetic over R, C and H.

Every scalar is stored as a float64 vector of real coordinates in the
standard basis: ``(1,)`` for R, ``(1, i)`` for C, ``(1, i, j, k)`` for H.
Complex numbers are the two-coordinate case of the same code path, so the
array kernels below (``fmul``, ``fconj``, ...) are written once and
dispatch on the size of the trailing axis.

The array kernels broadcast over leading axes and are what the partition
and solver code uses in hot loops. :class:`FScalar` and :class:`FVector`
are thin immutable wrappers for the public, one-value-at-a-time API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

ALGEBRAS = {"R": 1, "C": 2, "H": 4}


class AlgebraMismatch(ValueError):
    """Operands live in different algebras or have incompatible shapes."""


def dim_of(algebra: str) -> int:
    try:
        return ALGEBRAS[algebra]
    except KeyError:
        raise ValueError(f"unknown algebra {algebra!r}; expected one of R, C, H") from None


def algebra_of_dim(d: int) -> str:
    for tag, size in ALGEBRAS.items():
        if size == d:
            return tag
    raise ValueError(f"no algebra of real dimension {d}")


# --- array kernels --------------------------------------------------------

def fmul(a, b) -> np.ndarray:
    """Product ``a * b`` of scalar arrays of shape ``(..., d)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = a.shape[-1]
    if b.shape[-1] != d:
        raise AlgebraMismatch(f"cannot multiply dimension {d} by {b.shape[-1]}")
    if d == 1:
        return a * b
    if d == 2:
        a0, a1 = a[..., 0], a[..., 1]
        b0, b1 = b[..., 0], b[..., 1]
        return np.stack([a0 * b0 - a1 * b1, a0 * b1 + a1 * b0], axis=-1)
    if d == 4:
        a0, a1, a2, a3 = (a[..., t] for t in range(4))
        b0, b1, b2, b3 = (b[..., t] for t in range(4))
        return np.stack(
            [
                a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
                a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
                a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
                a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
            ],
            axis=-1,
        )
    raise AlgebraMismatch(f"unsupported scalar dimension {d}")


def fconj(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a[..., 1:] *= -1.0
    return a


def fnorm(a) -> np.ndarray:
    return np.linalg.norm(np.asarray(a, dtype=float), axis=-1)


def finv(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return fconj(a) / np.sum(a * a, axis=-1, keepdims=True)


def left_matrix(q) -> np.ndarray:
    """Real matrix ``L`` with ``L @ y == fmul(q, y)`` (works for stacks of q)."""
    q = np.asarray(q, dtype=float)
    d = q.shape[-1]
    basis = np.eye(d)
    # column t is q * e_t
    cols = fmul(q[..., None, :], basis)
    return np.swapaxes(cols, -1, -2)


def right_matrix(q) -> np.ndarray:
    """Real matrix ``R`` with ``R @ y == fmul(y, q)``."""
    q = np.asarray(q, dtype=float)
    d = q.shape[-1]
    cols = fmul(np.eye(d), q[..., None, :])
    return np.swapaxes(cols, -1, -2)


def finner(u, v) -> np.ndarray:
    """F-valued inner product ``sum_i u_i * conj(v_i)`` over axis -2."""
    return fmul(u, fconj(v)).sum(axis=-2)


# --- value types ----------------------------------------------------------

@dataclass(frozen=True)
class FScalar:
    """A single element of R, C or H."""

    algebra: str
    coords: tuple[float, ...]

    def __post_init__(self):
        d = dim_of(self.algebra)
        coords = tuple(float(c) for c in self.coords)
        if len(coords) != d:
            raise ValueError(
                f"{self.algebra} scalar needs {d} coordinates, got {len(coords)}"
            )
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, algebra: str, value) -> FScalar:
        """Build from a real number, a Python complex, or a coordinate list.

        Lower-dimensional values are embedded (``2 -> 2+0i``, ``i -> i`` in H).
        """
        d = dim_of(algebra)
        if isinstance(value, FScalar):
            coords = value.coords
        elif isinstance(value, complex):
            coords = (value.real, value.imag)
        elif np.isscalar(value):
            coords = (float(value),)
        else:
            coords = tuple(np.asarray(value, dtype=float).ravel())
        if len(coords) > d:
            if any(c != 0.0 for c in coords[d:]):
                raise ValueError(f"value {value!r} does not lie in {algebra}")
            coords = coords[:d]
        return cls(algebra, tuple(coords) + (0.0,) * (d - len(coords)))

    @classmethod
    def one(cls, algebra: str) -> FScalar:
        return cls.of(algebra, 1.0)

    @classmethod
    def zero(cls, algebra: str) -> FScalar:
        return cls.of(algebra, 0.0)

    @property
    def d(self) -> int:
        return len(self.coords)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)

    @property
    def real(self) -> float:
        return self.coords[0]

    def _check(self, other: FScalar):
        if not isinstance(other, FScalar):
            return FScalar.of(self.algebra, other)
        if other.algebra != self.algebra:
            raise AlgebraMismatch(f"{self.algebra} vs {other.algebra}")
        return other

    def __mul__(self, other) -> FScalar:
        return mul(self, self._check(other))

    def __rmul__(self, other) -> FScalar:
        return mul(self._check(other), self)

    def __add__(self, other) -> FScalar:
        other = self._check(other)
        return FScalar(self.algebra, tuple(self.array + other.array))

    __radd__ = __add__

    def __sub__(self, other) -> FScalar:
        other = self._check(other)
        return FScalar(self.algebra, tuple(self.array - other.array))

    def __neg__(self) -> FScalar:
        return FScalar(self.algebra, tuple(-self.array))

    def __truediv__(self, other) -> FScalar:
        if np.isscalar(other):
            return FScalar(self.algebra, tuple(self.array / float(other)))
        return self * self._check(other).inverse()

    def conj(self) -> FScalar:
        return FScalar(self.algebra, tuple(fconj(self.array)))

    def norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.coords))

    def inverse(self) -> FScalar:
        n2 = sum(c * c for c in self.coords)
        if n2 == 0.0:
            raise ZeroDivisionError("inverse of zero")
        return FScalar(self.algebra, tuple(fconj(self.array) / n2))

    def isclose(self, other, tol: float = 1e-12) -> bool:
        other = self._check(other)
        return float(np.max(np.abs(self.array - other.array))) <= tol

    def __repr__(self):
        if self.algebra == "R":
            return f"FScalar(R, {self.coords[0]:g})"
        names = ("", "i", "j", "k")
        body = " + ".join(f"{c:g}{names[t]}" for t, c in enumerate(self.coords))
        return f"FScalar({self.algebra}, {body})"


@dataclass(frozen=True)
class FVector:
    """A vector in F^n, stored as a tuple of same-algebra scalars."""

    algebra: str
    entries: tuple[FScalar, ...]

    def __post_init__(self):
        entries = tuple(FScalar.of(self.algebra, e) if not isinstance(e, FScalar) else e
                        for e in self.entries)
        for e in entries:
            if e.algebra != self.algebra:
                raise AlgebraMismatch(f"entry in {e.algebra} inside {self.algebra} vector")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_array(cls, algebra: str, arr) -> FVector:
        arr = np.asarray(arr, dtype=float)
        d = dim_of(algebra)
        if arr.ndim == 1 and d == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[1] != d:
            raise ValueError(f"expected array of shape (n, {d}), got {arr.shape}")
        return cls(algebra, tuple(FScalar(algebra, tuple(row)) for row in arr))

    @classmethod
    def of(cls, algebra: str, values: Iterable) -> FVector:
        return cls(algebra, tuple(FScalar.of(algebra, v) for v in values))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def array(self) -> np.ndarray:
        """Shape ``(n, d)`` real coordinates."""
        return np.array([e.coords for e in self.entries], dtype=float).reshape(
            self.n, dim_of(self.algebra)
        )

    def norm(self) -> float:
        return float(np.linalg.norm(self.array))

    def scale(self, lam: FScalar) -> FVector:
        """Left scalar multiplication ``lam * u``."""
        return FVector.from_array(self.algebra, fmul(lam.array, self.array))

    def __getitem__(self, i) -> FScalar:
        return self.entries[i]

    def __len__(self):
        return self.n


# --- operations -----------------------------------------------------------

def mul(x: FScalar, y: FScalar) -> FScalar:
    """Product in F; noncommutative for H."""
    if x.algebra != y.algebra:
        raise AlgebraMismatch(f"cannot multiply {x.algebra} by {y.algebra}")
    return FScalar(x.algebra, tuple(fmul(x.array, y.array)))


def inner_f(u: FVector, v: FVector) -> FScalar:
    """``<u, v>_F = sum_i u_i * conj(v_i)``; left F-linear in ``u``."""
    if u.algebra != v.algebra:
        raise AlgebraMismatch(f"inner product of {u.algebra} and {v.algebra} vectors")
    if u.n != v.n:
        raise AlgebraMismatch(f"length mismatch {u.n} vs {v.n}")
    return FScalar(u.algebra, tuple(finner(u.array, v.array)))


def from_polar(theta: float, axis: Sequence[float] | FScalar) -> FScalar:
    """Unit quaternion ``cos(theta) + sin(theta) * axis`` for a unit imaginary axis."""
    x = axis.array if isinstance(axis, FScalar) else np.asarray(axis, dtype=float)
    if x.shape == (3,):
        x = np.concatenate([[0.0], x])
    if x.shape != (4,):
        raise ValueError("axis must be a quaternion or a 3-vector of imaginary parts")
    if abs(x[0]) > 1e-12:
        raise ValueError("axis must be purely imaginary")
    if abs(np.linalg.norm(x) - 1.0) > 1e-12:
        raise ValueError("axis must have unit norm")
    out = math.sin(theta) * x
    out[0] = math.cos(theta)
    return FScalar("H", tuple(out))


def unit_root(m: int, k: int = 1, algebra: str = "C") -> FScalar:
    """``exp(2 pi i k / m)`` embedded in the given algebra (R only for +-1)."""
    ang = 2.0 * math.pi * k / m
    c, s = math.cos(ang), math.sin(ang)
    if algebra == "R":
        if abs(s) > 1e-12:
            raise ValueError(f"exp(2 pi i {k}/{m}) is not real")
        return FScalar("R", (round(c),))
    return FScalar.of(algebra, (c, s))
