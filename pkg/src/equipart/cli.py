"""Command-line front end.

    equipart solve  INSTANCE [-o REPORT]
    equipart verify INSTANCE PARAMS
    equipart oracle INSTANCE [--resolution N]
    equipart plot   INSTANCE PARAMS -o OUT.svg
    equipart groups KIND [--m M] [--algebra F]

Exit codes: 0 success, 1 search or check failure, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from .averages import CheckError
from .groups import GroupError, group_from_spec
from .instance import Instance, InstanceError, build_report, dump_json, load_instance, run_checks
from .measures import MassError
from .partition import cell_adjacency
from .solver import SolverError, oracle_problem, resolve_threads, solve_problem
from .svg import PlotError, render_svg

log = logging.getLogger("equipart")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Anything that should end the command with exit code 2."""


def _load(path: str) -> Instance:
    try:
        return load_instance(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except (InstanceError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_params(inst: Instance, path: str):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        return inst.params_from(data), data
    except (InstanceError, ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _config(inst: Instance, args):
    over = {}
    for flag, key in (("tol", "tol"), ("restarts", "restarts"), ("seed", "seed")):
        value = getattr(args, flag, None)
        if value is not None:
            over[key] = value
    over["threads"] = resolve_threads(getattr(args, "threads", None))
    try:
        return replace(inst.config, **over)
    except SolverError as exc:
        raise InputError(str(exc)) from exc


def _print_checks(checks, out=None):
    out = out or sys.stdout
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{check.kind:16s} {status}  max deviation {check.max_deviation:.3e}  tau {check.tau:.3e}", file=out)
        for label, dev in zip(check.labels, check.deviations):
            print(f"    {label:32s} {dev:.3e}", file=out)


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    config = _config(inst, args)
    t0 = time.perf_counter()
    try:
        result = solve_problem(inst.problem(), config)
        checks = run_checks(inst, result.params, result.tol)
    except (SolverError, CheckError) as exc:
        raise InputError(str(exc)) from exc
    wall = time.perf_counter() - t0
    report = build_report(inst, result, config, checks, wall if args.timing else None)
    text = dump_json(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    log.info("restart %d, residual %.3e, %.2fs", result.restart, result.residual, wall)
    if not result.converged:
        print(f"search failed: best residual {result.residual:.3e} > tol {result.tol:.1e}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load(args.instance)
    params, data = _load_params(inst, args.params)
    try:
        checks = run_checks(inst, params)
        report = inst.problem().report(params)
    except (CheckError, SolverError, MassError) as exc:
        raise InputError(str(exc)) from exc
    print(f"residual {report.aggregate:.6e}")
    _print_checks(checks)
    ok = all(c.passed for c in checks)
    recorded = data.get("result", {}).get("report", {}).get("residuals") if isinstance(data, dict) else None
    if recorded is not None:
        drift = max((abs(a - b) for a, b in zip(recorded, report.residuals)), default=0.0)
        if len(recorded) != len(report.residuals) or drift > 1e-12:
            print(f"recorded residuals not reproduced (drift {drift:.3e})")
            ok = False
    if args.out:
        Path(args.out).write_text(dump_json({"residual": report.aggregate,
                                             "checks": [c.to_json() for c in checks]}))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    try:
        result = oracle_problem(inst.problem(), args.resolution)
    except SolverError as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(dump_json(result.to_json()))
    return EXIT_OK


def cmd_plot(args) -> int:
    inst = _load(args.instance)
    params, _ = _load_params(inst, args.params)
    try:
        text = render_svg(list(dict.fromkeys(inst.measures)), params, inst.group)
    except PlotError as exc:
        raise InputError(str(exc)) from exc
    Path(args.out).write_text(text)
    return EXIT_OK


def cmd_groups(args) -> int:
    spec = {"kind": args.kind}
    if args.m is not None:
        spec["m"] = args.m
    if args.algebra:
        spec["algebra"] = args.algebra
    try:
        G = group_from_spec(spec)
    except (GroupError, KeyError, ValueError) as exc:
        raise InputError(f"cannot build group: {exc}") from exc
    out = {
        "name": G.name,
        "algebra": G.algebra,
        "order": G.order,
        "elements": G.elements.tolist(),
        "inverses": [int(i) for i in G.inverses],
        "cayley": G.table(),
    }
    if G.algebra == "H" and G.order >= 3:
        out["facet_neighbours"] = [int(c) for c in cell_adjacency(G)]
    sys.stdout.write(dump_json(out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="equipart", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def search_flags(p):
        p.add_argument("--tol", type=float)
        p.add_argument("--restarts", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int,
                       help="worker threads (0 = all cores); default $EQUIPART_THREADS or 1")

    p = sub.add_parser("solve", help="search for an equipartition")
    p.add_argument("instance")
    p.add_argument("-o", "--out")
    p.add_argument("--timing", action="store_true", help="record wall time in the report")
    search_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="recompute averages and run the equipartition checks")
    p.add_argument("instance")
    p.add_argument("params", help="a solve report or a {\"u\": ...} file")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="scan a grid of the parameter sphere")
    p.add_argument("instance")
    p.add_argument("--resolution", type=int, default=100_000)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("plot", help="draw a planar partition as SVG")
    p.add_argument("instance")
    p.add_argument("params")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("groups", help="print a group's elements and Cayley table")
    p.add_argument("kind", help="cyclic, binary_dihedral, T*, O* or I*")
    p.add_argument("--m", type=int)
    p.add_argument("--algebra", choices=["R", "C", "H"])
    p.set_defaults(func=cmd_groups)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
