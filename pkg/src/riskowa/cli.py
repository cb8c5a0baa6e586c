"""Command-line front end: ``riskowa <command> ...``.

Exit codes: 0 success, 2 bad usage or input, 3 a solve stopped at its node
budget with a nonzero gap (results are still written).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .core import RiskParams, evaluate_h
from .enumeration import AlternativeSet, solve_enumeration, sweep
from .export import build_lp_model, write_lp_text
from .knapsack import (
    ExperimentConfig,
    KnapsackInstance,
    compute_deltas,
    generate_instance,
    run_experiment,
    solve_msp,
    solve_naive,
    write_report_csv,
)

EXIT_USAGE = 2
EXIT_GAP = 3


class InputError(ValueError):
    pass


def _floats(text: str, what: str) -> list:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if not parts:
        raise InputError(f"{what} list is empty")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise InputError(f"{what}: cannot parse {text!r} as numbers") from None


def _ints(text: str, what: str) -> list:
    """Comma list of integers or inclusive ranges, e.g. ``0-9,20``."""
    out = []
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        try:
            if "-" in part:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise InputError(f"{what}: cannot parse {part!r}") from None
    if not out:
        raise InputError(f"{what} list is empty")
    return out


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str, what: str) -> dict:
    try:
        data = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"{what} must be a JSON object")
    return data


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _risk(args) -> RiskParams:
    return RiskParams(args.beta, args.r)


def cmd_eval(args) -> int:
    try:
        rows = [r for r in csv.reader(io.StringIO(_read_text(args.matrix))) if r]
        m = np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise InputError(f"matrix: {exc}") from None
    if m.ndim != 2 or m.size == 0:
        raise InputError("matrix must be a non-empty table with equal-length rows")
    k, j = m.shape
    probs = _floats(args.probs, "probs") if args.probs else np.full(j, 1.0 / j)
    imps = _floats(args.importances, "importances") if args.importances else np.full(k, 1.0 / k)
    rp = _risk(args)
    ev = evaluate_h(m, probs, imps, rp)
    for i, g in enumerate(ev.g, 1):
        print(f"g{i} {g:.6f}")
    print(f"h {ev.h:.6f}")
    return 0


def _alternatives(args) -> AlternativeSet:
    return AlternativeSet.from_dict(_read_json(args.alternatives, "alternatives file"))


def cmd_rank(args) -> int:
    alts = _alternatives(args)
    res = solve_enumeration(alts, _risk(args), normalize_first=args.normalize)
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["rank", "name", "h", "tied", "chosen"])
    order = sorted(range(len(alts)), key=lambda i: (res.h[i], i))
    for pos, i in enumerate(order, 1):
        out.writerow([pos, alts.names[i], repr(float(res.h[i])),
                      int(i in res.argmin), int(i == res.representative)])
    _emit(buf.getvalue(), args.output)
    return 0


def cmd_sweep(args) -> int:
    alts = _alternatives(args)
    betas = _floats(args.betas, "betas")
    rs = _floats(args.rs, "rs")
    for b in betas:
        RiskParams(b, 1.0)
    for r in rs:
        RiskParams(1.0, r)
    grid = sweep(alts, betas, rs, normalize_first=args.normalize)
    _emit(grid.to_csv(), args.output)
    return 0


def cmd_gen(args) -> int:
    inst = generate_instance(args.items, args.scenarios, args.criteria, args.seed,
                             capacity=args.capacity)
    _emit(inst.to_json(), args.output)
    return 0


def _instance(path: str) -> KnapsackInstance:
    try:
        return KnapsackInstance.from_dict(_read_json(path, "instance file"))
    except KeyError as exc:
        raise InputError(f"instance file: missing field {exc}") from None


def cmd_solve(args) -> int:
    inst = _instance(args.instance)
    which = args.model or "msp"
    rp = None
    if which != "naive":
        if args.beta is None or args.r is None:
            raise InputError("--beta and --r are required for the msp model")
        rp = _risk(args)
    result = {}
    sols = {}
    if which in ("msp", "both"):
        sols["msp"] = solve_msp(inst, rp, node_limit=args.node_limit, rel_gap=args.rel_gap)
    if which in ("naive", "both"):
        sols["naive"] = solve_naive(inst, node_limit=args.node_limit)
    for name, sol in sols.items():
        result[name] = sol.to_dict()
        chosen = " ".join(str(i + 1) for i in np.flatnonzero(sol.x)) or "-"
        print(f"{name} objective {sol.objective:.6f} gap {sol.gap:.6f} "
              f"nodes {sol.nodes} items {chosen}")
    if which == "both":
        d = compute_deltas(inst, rp, sols["msp"], sols["naive"])
        result["deltas"] = {"delta_avg": d.delta_avg, "delta_tail": d.delta_tail}
        print(f"delta_avg {d.delta_avg:.6f} delta_tail {d.delta_tail:.6f}")
    if rp is not None:
        result["beta"], result["r"] = rp.beta, rp.r
    if args.output:
        Path(args.output).write_text(json.dumps(result, indent=1) + "\n")
    return EXIT_GAP if any(s.gap > 0 for s in sols.values()) else 0


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig(
        n_items=_ints(args.items, "items"),
        n_scenarios=_ints(args.scenarios, "scenarios"),
        n_criteria=_ints(args.criteria, "criteria"),
        betas=[RiskParams(b, 1.0).beta for b in _floats(args.betas, "betas")],
        rs=[RiskParams(1.0, r).r for r in _floats(args.rs, "rs")],
        seeds=_ints(args.seeds, "seeds"),
        exact_cap=args.exact_cap,
        node_limit=args.node_limit,
        rel_gap=args.rel_gap,
        capacity=args.capacity,
        workers=args.workers,
    )
    rows = run_experiment(cfg)
    buf = io.StringIO()
    write_report_csv(rows, buf, include_timings=not args.no_timings)
    _emit(buf.getvalue(), args.output)
    return EXIT_GAP if any(row["gap"] > 0 for row in rows) else 0


def cmd_export(args) -> int:
    inst = _instance(args.instance)
    _emit(write_lp_text(build_lp_model(inst, _risk(args))), args.output)
    return 0


def _add_risk(p, required=True):
    p.add_argument("--beta", type=float, required=required, help="scenario tail level in (0,1]")
    p.add_argument("--r", type=float, required=required, help="criteria tail level in (0,1]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riskowa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="beta-averages and h of one criteria x scenarios matrix")
    p.add_argument("matrix", help="CSV file, one row per criterion ('-' for stdin)")
    p.add_argument("--probs", help="comma-separated scenario probabilities (default uniform)")
    p.add_argument("--importances", help="comma-separated criterion importances (default uniform)")
    _add_risk(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("rank", help="rank the alternatives of a JSON file by h")
    p.add_argument("alternatives")
    _add_risk(p)
    p.add_argument("--normalize", action="store_true", help="min-max scale each criterion first")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("sweep", help="winner and optimal h over a (beta, r) grid, as CSV")
    p.add_argument("alternatives")
    p.add_argument("--betas", required=True, help="comma-separated list")
    p.add_argument("--rs", required=True, help="comma-separated list")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen", help="generate a random knapsack instance (JSON)")
    p.add_argument("--items", type=int, required=True)
    p.add_argument("--scenarios", type=int, required=True)
    p.add_argument("--criteria", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--capacity", type=float, help="default: number of items")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve a knapsack instance exactly")
    p.add_argument("instance")
    group = p.add_mutually_exclusive_group()
    for name in ("msp", "naive", "both"):
        group.add_argument(f"--{name}", dest="model", action="store_const", const=name)
    _add_risk(p, required=False)
    p.add_argument("--node-limit", type=int)
    p.add_argument("--rel-gap", type=float, default=0.0)
    p.add_argument("-o", "--output", help="write the solutions as JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", help="factorial comparison of both models, as CSV")
    p.add_argument("--items", default="30", help="list, e.g. 20,30")
    p.add_argument("--scenarios", default="10")
    p.add_argument("--criteria", default="3")
    p.add_argument("--betas", default="0.1")
    p.add_argument("--rs", default="0.5")
    p.add_argument("--seeds", default="0", help="list or range, e.g. 0-29")
    p.add_argument("--exact-cap", type=int, default=30,
                   help="larger instances are solved under --node-limit")
    p.add_argument("--node-limit", type=int, default=200_000)
    p.add_argument("--rel-gap", type=float, default=0.0)
    p.add_argument("--capacity", type=float)
    p.add_argument("--workers", type=int, default=1, help="capped by RISKOWA_THREADS")
    p.add_argument("--no-timings", action="store_true", help="omit the timing columns")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("export", help="write the MILP in CPLEX LP format")
    p.add_argument("instance")
    _add_risk(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"riskowa {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
