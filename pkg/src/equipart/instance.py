"""Instance and report files.

An instance is a JSON object::

    {
      "algebra": "C",
      "n": 1,
      "group": {"kind": "cyclic", "m": 3},
      "measures": [{"kind": "points", "points": [{"x": [[0.5, 1.0]], "w": 1}, ...]}],
      "automorphisms": [{"type": "power", "r": 1}],
      "coset": {"subgroup": [0, 2], "automorphisms": [[{"type": "identity"}, ...]]},
      "config": {"restarts": 64, "tol": 1e-8, "seed": 7},
      "checks": [{"kind": "full"}, {"kind": "mod_k", "k": 2}]
    }

``coset`` and ``checks`` are optional. A measure may be ``{"same_as": i}``
to reuse measure ``i`` with another automorphism. Group elements are
referred to by their index in the canonical ordering printed by
``equipart groups``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .averages import (
    CheckError,
    EquipartitionCheck,
    check_coset,
    check_full_equipartition,
    check_mod_k,
    check_opposite_pairs,
    default_tau,
)
from .groups import (
    Automorphism,
    CosetDecomposition,
    FiniteSubgroup,
    GroupError,
    automorphism_from_spec,
    cosets,
    cyclic_automorphism,
    group_from_spec,
)
from .measures import (
    MassDistribution,
    MassError,
    distribution_from_json,
    distribution_to_json,
    measure_regions,
)
from .partition import PartitionParams
from .solver import (
    Problem,
    SolveConfig,
    SolveResult,
    effective_tol,
    average_problem,
    coset_problem,
)


class InstanceError(ValueError):
    """Malformed or inconsistent instance file."""


@dataclass(eq=False)
class Instance:
    algebra: str
    n: int
    group: FiniteSubgroup
    measures: list
    automorphisms: list[Automorphism]
    decomposition: CosetDecomposition | None
    coset_automorphisms: list[list[Automorphism]] | None
    config: SolveConfig
    checks: list[dict] | None
    raw: bytes = b""

    @property
    def input_hash(self) -> str:
        return hashlib.sha256(self.raw).hexdigest()

    def problem(self) -> Problem:
        if self.decomposition is not None:
            return coset_problem(self.measures, self.decomposition, self.coset_automorphisms)
        return average_problem(self.measures, self.automorphisms)

    def params_from(self, data: dict) -> PartitionParams:
        """Parameters from a report or a bare ``{"u": ...}`` object."""
        if "result" in data:
            data = data["result"]["params"]
        elif "params" in data:
            data = data["params"]
        if "u" not in data:
            raise InstanceError("no parameters found (expected a report or {\"u\": ...})")
        u = np.array(data["u"], dtype=float)
        d = self.group.d
        if u.ndim == 1 and d == 1:
            u = u[:, None]
        if u.shape != (self.n + 1, d):
            raise InstanceError(f"parameters have shape {u.shape}, instance needs ({self.n + 1}, {d})")
        try:
            return PartitionParams(self.algebra, u)
        except ValueError as exc:
            raise InstanceError(str(exc)) from exc


def _parse_automorphism(G, spec) -> Automorphism:
    return automorphism_from_spec(G, spec)


def parse_instance(raw: bytes | str) -> Instance:
    """Build an :class:`Instance`; raises ``json.JSONDecodeError`` or ``InstanceError``."""
    if isinstance(raw, str):
        raw = raw.encode()
    data = json.loads(raw)
    if not isinstance(data, dict):
        raise InstanceError("instance must be a JSON object")
    try:
        return _build(data, raw)
    except (GroupError, MassError, CheckError) as exc:
        raise InstanceError(str(exc)) from exc
    except KeyError as exc:
        raise InstanceError(f"missing field {exc.args[0]!r}") from exc
    except TypeError as exc:
        raise InstanceError(f"bad value: {exc}") from exc


def _build(data: dict, raw: bytes) -> Instance:
    algebra = data.get("algebra")
    if algebra not in ("R", "C", "H"):
        raise InstanceError(f"algebra must be R, C or H, got {algebra!r}")
    n = data.get("n")
    if not isinstance(n, int) or n < 1:
        raise InstanceError(f"n must be a positive integer, got {n!r}")
    gspec = dict(data["group"])
    gspec.setdefault("algebra", algebra)
    if gspec["algebra"] != algebra:
        raise InstanceError(f"group lives in {gspec['algebra']}, instance algebra is {algebra}")
    G = group_from_spec(gspec)

    specs = data["measures"]
    if not isinstance(specs, list) or not specs:
        raise InstanceError("measures must be a non-empty list")
    measures: list[MassDistribution] = []
    for i, spec in enumerate(specs):
        if "same_as" in spec:
            j = spec["same_as"]
            if not isinstance(j, int) or not 0 <= j < i:
                raise InstanceError(f"measure {i}: same_as must refer to an earlier measure")
            measures.append(measures[j])
            continue
        try:
            measures.append(distribution_from_json(spec, algebra, n))
        except MassError as exc:
            raise InstanceError(f"measure {i}: {exc}") from exc
    cloud_n = {m.cloud().n for m in measures}
    if cloud_n != {n}:
        raise InstanceError(f"measures live in F^{sorted(cloud_n)}, instance says n = {n}")

    decomposition = coset_phis = None
    autos = []
    if "coset" in data:
        cs = data["coset"]
        decomposition = cosets(G, cs["subgroup"])
        H = decomposition.subgroup
        rows = cs.get("automorphisms")
        if rows is None:
            rows = [[None] * decomposition.k for _ in measures]
        if len(rows) != len(measures):
            raise InstanceError(f"coset automorphisms: {len(rows)} rows for {len(measures)} measures")
        coset_phis = []
        for i, row in enumerate(rows):
            if len(row) != decomposition.k:
                raise InstanceError(f"coset automorphisms row {i}: need {decomposition.k} entries")
            coset_phis.append([_parse_automorphism(H, s) for s in row])
        if len(measures) > n:
            raise InstanceError(f"{len(measures)} measures for a coset problem on F^{n}")
    else:
        aspecs = data.get("automorphisms")
        if aspecs is None:
            aspecs = [None] * len(measures)
        if len(aspecs) != len(measures):
            raise InstanceError(f"{len(aspecs)} automorphisms for {len(measures)} measures")
        autos = [_parse_automorphism(G, s) for s in aspecs]
        if len(measures) != n:
            raise InstanceError(f"{len(measures)} measures on F^{n}; expected exactly n")

    cfg = dict(data.get("config", {}))
    if "eps_X" in cfg:
        cfg["margin_floor"] = cfg.pop("eps_X")
    try:
        config = SolveConfig.from_json(cfg)
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"config: {exc}") from exc
    checks = data.get("checks")
    if checks is not None and not isinstance(checks, list):
        raise InstanceError("checks must be a list")
    return Instance(algebra, n, G, measures, autos, decomposition, coset_phis, config, checks, raw)


def load_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_bytes())


# --- checks ---------------------------------------------------------------

def _real_measures(inst: Instance) -> bool:
    return all(np.abs(m.cloud().weights[:, 1:]).max(initial=0.0) == 0.0 for m in inst.measures)


def _is_prime(p: int) -> bool:
    return p > 1 and all(p % q for q in range(2, int(p**0.5) + 1))


def _power_of(phi: Automorphism) -> int | None:
    """``min(r, p - r)`` when ``phi`` is the power map ``g -> g^r``, else None."""
    G = phi.group
    p = G.order
    for r in range(1, p):
        if np.gcd(r, p) == 1 and cyclic_automorphism(G, r) == phi:
            return min(r, p - r)
    return None


def _full_character_set(measures, phis, p: int) -> bool:
    """Each distinct measure is paired with every ``r = 1 .. (p-1)/2``."""
    want = set(range(1, (p - 1) // 2 + 1))
    seen: dict[int, set] = {}
    for m, phi in zip(measures, phis):
        r = _power_of(phi)
        if r is None:
            return False
        seen.setdefault(id(m), set()).add(r)
    return all(s >= want for s in seen.values())


def implied_checks(inst: Instance) -> list[dict]:
    """Checks whose passing follows from vanishing averages for this instance."""
    out = [{"kind": "averages"}]
    G = inst.group
    real = _real_measures(inst)
    if inst.decomposition is not None:
        out.append({"kind": "coset"})
        H = inst.decomposition.subgroup
        if real and G.kind == "cyclic" and G.algebra == "C" and _is_prime(H.order):
            rows_ok = all(
                _full_character_set([inst.measures[i]] * len(row), row, H.order)
                for i, row in enumerate(inst.coset_automorphisms)
            )
            if rows_ok:
                out.append({"kind": "mod_k", "k": inst.decomposition.k})
        return out
    if real and G.kind == "cyclic" and G.algebra == "C" and _is_prime(G.order):
        if _full_character_set(inst.measures, inst.automorphisms, G.order):
            out.append({"kind": "full"})
    if real and G.kind == "cyclic" and G.algebra == "R":
        out.append({"kind": "full"})
    if real and G.algebra == "H" and G.order == 8 and G.minus_one is not None:
        out.append({"kind": "opposite_pairs"})
    return out


def _distinct(inst: Instance) -> list:
    seen, out = set(), []
    for m in inst.measures:
        if id(m) not in seen:
            seen.add(id(m))
            out.append(m)
    return out


def run_checks(inst: Instance, params: PartitionParams, tol: float | None = None) -> list[EquipartitionCheck]:
    """Evaluate the instance's checks (or the implied ones) at ``params``."""
    problem = inst.problem()
    eff = effective_tol(problem, inst.config) if tol is None else tol
    rms = [measure_regions(m, params, inst.group) for m in _distinct(inst)]
    tau = max(default_tau(rms), 10.0 * eff)
    specs = inst.checks if inst.checks is not None else implied_checks(inst)
    results = []
    for spec in specs:
        kind = spec.get("kind")
        t = float(spec.get("tau", tau))
        if kind == "averages":
            report = problem.report(params)
            results.append(EquipartitionCheck("averages", report.residuals, max(t, eff), report.labels))
        elif kind == "full":
            results.append(check_full_equipartition(rms, t))
        elif kind == "mod_k":
            results.append(check_mod_k(rms, int(spec["k"]), t))
        elif kind == "opposite_pairs":
            results.append(check_opposite_pairs(rms, t))
        elif kind == "coset":
            if inst.decomposition is None:
                raise CheckError('coset check needs a "coset" field in the instance')
            all_rms = [measure_regions(m, params, inst.group) for m in inst.measures]
            results.append(check_coset(all_rms, inst.decomposition, inst.coset_automorphisms, t))
        else:
            raise CheckError(f"unknown check kind {kind!r}")
    return results


# --- reports --------------------------------------------------------------

def build_report(inst: Instance, result: SolveResult, config: SolveConfig,
                 checks: list[EquipartitionCheck], wall_time: float | None = None) -> dict:
    report = {
        "tool": "equipart",
        "version": __version__,
        "input_sha256": inst.input_hash,
        "config": config.to_json(),
        "result": result.to_json(),
        "checks": [c.to_json() for c in checks],
    }
    if wall_time is not None:
        report["timing"] = {"wall_time_s": wall_time}
    return report


def dump_json(data: dict) -> str:
    """Stable text form; floats are written with ``repr`` so they round-trip exactly."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def instance_dict(group_spec: dict, measures, automorphisms=None, coset: dict | None = None,
                  config: dict | None = None, checks: list | None = None) -> dict:
    """Instance JSON object for in-memory clouds; repeated objects become ``same_as`` links."""
    first = measures[0].cloud()
    specs, seen = [], {}
    for i, m in enumerate(measures):
        if id(m) in seen:
            specs.append({"same_as": seen[id(m)]})
        else:
            seen[id(m)] = i
            specs.append(distribution_to_json(m))
    data = {"algebra": first.algebra, "n": first.n, "group": dict(group_spec), "measures": specs}
    if automorphisms is not None:
        data["automorphisms"] = list(automorphisms)
    if coset is not None:
        data["coset"] = coset
    if config is not None:
        data["config"] = config
    if checks is not None:
        data["checks"] = checks
    return data
