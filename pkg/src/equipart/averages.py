"""(G, phi)-averages of region measures and the equipartition checks built on them.

All averages multiply the group scalar on the LEFT of the measure value,
``sum_g phi(g)^-1 * mu(R_g)``. Over H the order matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import FScalar, left_matrix
from .groups import Automorphism, CosetDecomposition, FiniteSubgroup, cyclic_automorphism
from .measures import RegionMeasures


class CheckError(ValueError):
    """The requested check does not apply to this group or these measures."""


@dataclass(frozen=True)
class AverageReport:
    """Per-condition averages, their norms, and the overall residual."""

    averages: tuple[FScalar, ...]
    labels: tuple[str, ...] = ()

    @property
    def residuals(self) -> tuple[float, ...]:
        return tuple(a.norm() for a in self.averages)

    @property
    def aggregate(self) -> float:
        return math.sqrt(sum(sum(c * c for c in a.coords) for a in self.averages))

    def to_json(self) -> dict:
        return {
            "averages": [list(a.coords) for a in self.averages],
            "labels": list(self.labels),
            "residuals": list(self.residuals),
            "aggregate": self.aggregate,
        }


@dataclass(frozen=True)
class EquipartitionCheck:
    kind: str
    deviations: tuple[float, ...]
    tau: float
    labels: tuple[str, ...] = field(default=())

    @property
    def max_deviation(self) -> float:
        return max(self.deviations, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tau

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "deviations": list(self.deviations),
            "labels": list(self.labels),
            "max_deviation": self.max_deviation,
            "tau": self.tau,
            "pass": self.passed,
        }


def inverse_coefficients(phi: Automorphism) -> np.ndarray:
    """Left-multiplication matrices of ``phi(g)^-1``, shape ``(|G|, d, d)``."""
    G = phi.group
    images = G.inverses[np.array(phi.perm)]
    return left_matrix(G.elements[images])


def g_average(rm: RegionMeasures, phi: Automorphism) -> FScalar:
    """``sum_g phi(g)^-1 * mu(R_g)``."""
    if phi.group is not rm.group:
        raise CheckError("region measures and automorphism refer to different groups")
    out = np.einsum("gij,gj->i", inverse_coefficients(phi), rm.values)
    return FScalar(rm.group.algebra, tuple(out))


def zm_average(rm: RegionMeasures, r: int) -> FScalar:
    """``sum_k zeta_m^(-r k) mu(S_k)`` for a cyclic group of order ``m``."""
    return g_average(rm, cyclic_automorphism(rm.group, r))


def coset_average(rm: RegionMeasures, decomposition: CosetDecomposition,
                  phis: Sequence[Automorphism]) -> list[FScalar]:
    """``sum_{h in H} phi_l(h)^-1 mu(R_{g_l h})`` for each coset representative ``g_l``.

    ``phis[l]`` is an automorphism of ``decomposition.subgroup``, whose element
    ``t`` is group element ``decomposition.subgroup_indices[t]``.
    """
    if decomposition.group is not rm.group:
        raise CheckError("decomposition belongs to a different group")
    if len(phis) != decomposition.k:
        raise CheckError(f"need one automorphism per coset ({decomposition.k}), got {len(phis)}")
    out = []
    for ell, phi in enumerate(phis):
        coeff = _coset_coefficients(decomposition, ell, phi)
        out.append(FScalar(rm.group.algebra, tuple(np.einsum("gij,gj->i", coeff, rm.values))))
    return out


def _coset_coefficients(decomposition: CosetDecomposition, ell: int, phi: Automorphism) -> np.ndarray:
    H = decomposition.subgroup
    if len(phi.perm) != H.order:
        raise CheckError(f"automorphism acts on {len(phi.perm)} elements, subgroup has {H.order}")
    G = decomposition.group
    coeff = np.zeros((G.order, G.d, G.d))
    local = left_matrix(H.elements[H.inverses[np.array(phi.perm)]])
    for t, g in enumerate(decomposition.coset(ell)):
        coeff[g] = local[t]
    return coeff


# --- checks ---------------------------------------------------------------

def default_tau(rms: Sequence[RegionMeasures]) -> float:
    scale = max((float(np.linalg.norm(rm.total)) for rm in rms), default=0.0)
    return 1e-6 * (1.0 + scale)


def _real_values(rm: RegionMeasures) -> np.ndarray:
    scale = 1.0 + float(np.abs(rm.values).max(initial=0.0))
    if rm.values.shape[1] > 1 and np.abs(rm.values[:, 1:]).max() > 1e-12 * scale:
        raise CheckError("full equipartition is defined for real (signed) measures")
    return rm.values[:, 0]


def check_full_equipartition(rms: Sequence[RegionMeasures], tau: float | None = None) -> EquipartitionCheck:
    """Every region carries ``1/|G|`` of the total mass."""
    tau = default_tau(rms) if tau is None else tau
    devs, labels = [], []
    for i, rm in enumerate(rms):
        vals = _real_values(rm)
        mean = vals.sum() / len(vals)
        devs.extend(float(abs(v - mean)) for v in vals)
        labels.extend(f"measure {i} region {g}" for g in range(len(vals)))
    return EquipartitionCheck("full", tuple(devs), tau, tuple(labels))


def check_mod_k(rms: Sequence[RegionMeasures], k: int, tau: float | None = None) -> EquipartitionCheck:
    """``mu(S_i) == mu(S_{i+k})`` around a regular ``km``-fan."""
    tau = default_tau(rms) if tau is None else tau
    devs, labels = [], []
    for i, rm in enumerate(rms):
        order = rm.group.order
        if k < 1 or order % k:
            raise CheckError(f"k = {k} does not divide the number of sectors {order}")
        for s in range(order):
            t = (s + k) % order
            devs.append(float(np.linalg.norm(rm.values[s] - rm.values[t])))
            labels.append(f"measure {i} sectors {s},{t}")
    return EquipartitionCheck("mod_k", tuple(devs), tau, tuple(labels))


def check_opposite_pairs(rms: Sequence[RegionMeasures], tau: float | None = None) -> EquipartitionCheck:
    """``mu(R_g) == mu(R_{-g})`` for every ``g``."""
    tau = default_tau(rms) if tau is None else tau
    devs, labels = [], []
    for i, rm in enumerate(rms):
        neg = rm.group.negation
        if neg is None:
            raise CheckError(f"-1 is not an element of {rm.group.name}")
        for g in range(rm.group.order):
            devs.append(float(np.linalg.norm(rm.values[g] - rm.values[neg[g]])))
            labels.append(f"measure {i} regions {g},{int(neg[g])}")
    return EquipartitionCheck("opposite_pairs", tuple(devs), tau, tuple(labels))


def check_coset(rms: Sequence[RegionMeasures], decomposition: CosetDecomposition,
                phis: Sequence[Sequence[Automorphism]], tau: float | None = None) -> EquipartitionCheck:
    """All coset averages vanish; ``phis[i][l]`` is used for measure ``i`` and coset ``l``."""
    tau = default_tau(rms) if tau is None else tau
    devs, labels = [], []
    for i, rm in enumerate(rms):
        for ell, avg in enumerate(coset_average(rm, decomposition, phis[i])):
            devs.append(avg.norm())
            labels.append(f"measure {i} coset {ell}")
    return EquipartitionCheck("coset", tuple(devs), tau, tuple(labels))


def character_sums(values: Sequence[float], p: int) -> np.ndarray:
    """Cosine and sine sums ``sum_k cos|sin(2 pi k r / p) values[k]`` for ``r = 1 .. (p-1)/2``."""
    values = np.asarray(values, dtype=float)
    k = np.arange(p)
    r = np.arange(1, (p - 1) // 2 + 1)[:, None]
    ang = 2.0 * np.pi * k * r / p
    return np.concatenate([np.cos(ang) @ values, np.sin(ang) @ values])
