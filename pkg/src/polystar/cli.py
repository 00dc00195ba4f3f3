"""Command-line front end: evaluate single quantities, run the verification
suite, fuzz identities, and benchmark evaluation strategies.

Exit codes: 0 success (passes and skips only), 1 identity failure, 2 usage
error, 3 convergence failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import catalog, exact, polylog
from .chains import FactorSpec, dp_chain_sum, naive_chain_sum
from .compositions import Composition, ShapeBlocks, shape_composition
from .kernel import DEFAULT_PRECISION, DomainError, EvalResult, binomial

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3


def _read_config(path):
    """Simple key=value overrides; unknown keys are ignored."""
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _resolve_run_config(args):
    cfg = {}
    if getattr(args, "config", None):
        cfg = _read_config(args.config)
    precision = DEFAULT_PRECISION
    if "precision" in cfg:
        precision = int(cfg["precision"])
    env = os.environ.get("POLYSTAR_PRECISION")
    if env:
        precision = int(env)
    if getattr(args, "precision", None):
        precision = args.precision
    tol = float(cfg["tolerance"]) if "tolerance" in cfg else None
    if getattr(args, "tol", None) is not None:
        tol = args.tol
    seed = int(cfg.get("seed", 0))
    if getattr(args, "seed", None) is not None:
        seed = args.seed
    jobs = int(cfg.get("jobs", 1))
    if getattr(args, "jobs", None):
        jobs = args.jobs
    return precision, tol, seed, jobs


def _fmt_numeric(result: EvalResult, digits=12):
    err = result.error_estimate.to_str(3)
    return f"{result.value.to_str(digits)} (err <= {err})"


def _parse_params(entry, pairs):
    types = entry.descriptor.param_types
    params = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise DomainError(f"--param expects key=value, got {pair!r}")
        key, text = pair.split("=", 1)
        if key not in types:
            raise DomainError(f"unknown parameter {key!r} for {entry.descriptor.id}")
        kind = types[key]
        if kind == "int":
            params[key] = int(text)
        elif kind == "rational":
            params[key] = Fraction(text)
        elif kind == "float":
            params[key] = float(Fraction(text))
        elif kind == "composition":
            params[key] = Composition.parse(text)
        elif kind == "shape":
            params[key] = ShapeBlocks.parse(text)
        elif kind == "intlist":
            params[key] = tuple(int(v) for v in text.split(",") if v != "")
        else:
            params[key] = text
    return params


def cmd_list(args):
    descriptors = catalog.list_identities()
    if args.mode:
        descriptors = [d for d in descriptors if d.mode.lower() == args.mode.lower()]
    if args.json:
        payload = [{"id": d.id, "mode": d.mode, "anchor": d.anchor,
                    "constraint": d.constraint_id,
                    "params": d.param_types} for d in descriptors]
        print(json.dumps(payload, indent=2))
    else:
        for d in descriptors:
            print(f"{d.id:16s} {d.mode:10s} {d.anchor}")
        print(f"{len(descriptors)} identities")
    return EXIT_OK


def cmd_eval(args):
    precision, tol, _, _ = _resolve_run_config(args)
    tol = tol if tol is not None else 1e-9
    kind = args.kind
    try:
        if kind == "mhsv":
            value = exact.mhsv(args.k, Composition.parse(args.s), Fraction(args.a))
            print(value)
        elif kind == "mneimneh":
            value = exact.mneimneh_lhs(args.n, Composition.parse(args.s),
                                       Fraction(args.a), Fraction(args.p))
            print(value)
        elif kind == "li":
            res = polylog.li(int(args.s), float(Fraction(args.x)), tol, precision)
            print(_fmt_numeric(res))
        elif kind == "listar":
            xs = tuple(float(Fraction(v)) for v in args.x.split(","))
            res = polylog.li_star(Composition.parse(args.s), xs, tol, precision)
            print(_fmt_numeric(res))
            if not res.converged:
                return EXIT_NOT_CONVERGED
        elif kind == "zetastar":
            res = polylog.zeta_star(Composition.parse(args.s), tol, precision)
            print(_fmt_numeric(res))
            if not res.converged:
                return EXIT_NOT_CONVERGED
        elif kind == "mean":
            lhs = exact.mean_lhs(args.n, Composition.parse(args.s), Fraction(args.a))
            print(lhs)
        else:
            raise DomainError(f"unknown eval kind {kind!r}")
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _verify_task(task):
    identity, params, tol, outside = task
    report = catalog.verify(identity, params, tol, outside=outside)
    return report


def _report_key(report):
    return (report.id, json.dumps({k: str(v) for k, v in report.params.items()},
                                  sort_keys=True))


def cmd_verify(args):
    precision, tol_override, seed, jobs = _resolve_run_config(args)
    del precision, seed
    ids = args.ids
    if args.all:
        ids = [d.id for d in catalog.list_identities()]
    if not ids:
        print("error: give identity ids or --all", file=sys.stderr)
        return EXIT_USAGE
    try:
        entries = [catalog.get_entry(i) for i in ids]
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    tasks = []
    for entry in entries:
        ident = entry.descriptor.id
        if args.param:
            params = _parse_params(entry, args.param)
            tasks.append((ident, params, tol_override, args.outside))
        else:
            for params, grid_tol in entry.grid():
                tol = tol_override if tol_override is not None else grid_tol
                tasks.append((ident, params, tol, args.outside))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_verify_task, tasks, chunksize=8))
    else:
        reports = [_verify_task(t) for t in tasks]
    reports.sort(key=_report_key)

    counts = {"pass": 0, "fail": 0, "skip": 0, "not_converged": 0}
    for report in reports:
        counts[report.status] += 1
        if args.json:
            print(json.dumps(report.to_json_dict()))
        elif report.status != "pass" or args.verbose:
            print(f"{report.status.upper():14s} {report.id} {report.params}"
                  + ("" if report.abs_diff is None else f" |diff|={report.abs_diff}"))
    if not args.json:
        print(f"summary: {counts['pass']} pass, {counts['fail']} fail, "
              f"{counts['skip']} skipped, {counts['not_converged']} not converged "
              f"({len(reports)} total)")
    if counts["fail"]:
        return EXIT_FAIL
    if counts["not_converged"]:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_fuzz(args):
    _, tol, seed, _ = _resolve_run_config(args)
    try:
        reports = catalog.fuzz(args.id, seed, args.trials, tol, outside=args.outside)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    fails = 0
    ncs = 0
    for report in reports:
        if args.json:
            print(json.dumps(report.to_json_dict()))
        elif report.status != "pass":
            print(f"{report.status.upper():14s} {report.id} {report.params}")
        fails += report.status == "fail"
        ncs += report.status == "not_converged"
    if not args.json:
        print(f"fuzz {args.id}: {len(reports) - fails - ncs}/{len(reports)} pass")
    if fails:
        return EXIT_FAIL
    if ncs:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_bench(args):
    rows = []
    if args.scenario == "dp-vs-naive":
        L, N = args.L, args.N
        bases = tuple(Fraction(1, 2) if i % 2 == 0 else Fraction(2) for i in range(L))
        spec = FactorSpec(bases, (1,) * L)
        t0 = time.perf_counter()
        naive_value = naive_chain_sum(spec, N)
        t_naive = time.perf_counter() - t0
        t0 = time.perf_counter()
        dp_value = dp_chain_sum(spec, N)
        t_dp = time.perf_counter() - t0
        rows.append({
            "scenario": "dp-vs-naive", "L": L, "N": N,
            "naive_terms": binomial(N + L - 1, L), "dp_terms": N * L,
            "naive_ms": round(t_naive * 1e3, 3), "dp_ms": round(t_dp * 1e3, 3),
            "values_equal": naive_value == dp_value,
        })
    elif args.scenario == "depth-reduction":
        shape = ShapeBlocks.parse(args.shape)
        tol = args.tol if args.tol is not None else 1e-8
        t0 = time.perf_counter()
        lhs, rhs = polylog.li_identity_sides("LI1_RED1" if shape.family == "A"
                                             else "LI2_RED1", shape, 1, args.p, tol)
        wall = time.perf_counter() - t0
        comp = shape_composition(shape)
        rows.append({
            "scenario": "depth-reduction", "shape": str(shape), "p": args.p,
            "full_depth": comp.weight, "reduced_depth": comp.depth,
            "terms_full_side": lhs.terms_used, "terms_reduced_side": rhs.terms_used,
            "abs_diff": float(abs(lhs.value.value - rhs.value.value)),
            "wall_ms": round(wall * 1e3, 3),
        })
    else:
        print(f"error: unknown scenario {args.scenario}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        for row in rows:
            for key, value in row.items():
                print(f"  {key:20s} {value}")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--precision", type=int, help="working precision in bits")
    common.add_argument("--tol", type=float, help="tolerance override")
    common.add_argument("--seed", type=int, help="fuzzing seed")
    common.add_argument("--jobs", type=int, help="parallel verification workers")

    parser = argparse.ArgumentParser(
        prog="polystar",
        description="Evaluate nested harmonic sums and multiple polylogarithms, "
                    "and verify their transformation identities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="list the identity catalog", parents=[common])
    p_list.add_argument("--json", action="store_true")
    p_list.add_argument("--mode", choices=["exact", "numeric", "quadrature"])
    p_list.set_defaults(fn=cmd_list)

    p_eval = sub.add_parser("eval", parents=[common], help="evaluate a single quantity")
    p_eval.add_argument("kind", choices=["mhsv", "mneimneh", "li", "listar",
                                         "zetastar", "mean"])
    p_eval.add_argument("--k", type=int)
    p_eval.add_argument("--n", type=int)
    p_eval.add_argument("--s", required=True)
    p_eval.add_argument("--a", default="1")
    p_eval.add_argument("--p", default="1")
    p_eval.add_argument("--x", default="1")
    p_eval.set_defaults(fn=cmd_eval)

    p_verify = sub.add_parser("verify", parents=[common], help="verify identities on their grids")
    p_verify.add_argument("ids", nargs="*")
    p_verify.add_argument("--all", action="store_true")
    p_verify.add_argument("--param", action="append",
                          help="key=value; run a single instance instead of the grid")
    p_verify.add_argument("--outside", action="store_true",
                          help="skip domain gating; rejections count as failures")
    p_verify.add_argument("--json", action="store_true")
    p_verify.add_argument("--verbose", action="store_true")
    p_verify.set_defaults(fn=cmd_verify)

    p_fuzz = sub.add_parser("fuzz", parents=[common], help="deterministically sample and verify")
    p_fuzz.add_argument("id")
    p_fuzz.add_argument("--trials", type=int, default=20)
    p_fuzz.add_argument("--outside", action="store_true")
    p_fuzz.add_argument("--json", action="store_true")
    p_fuzz.set_defaults(fn=cmd_fuzz)

    p_bench = sub.add_parser("bench", parents=[common], help="benchmark evaluation strategies")
    p_bench.add_argument("scenario", choices=["dp-vs-naive", "depth-reduction"])
    p_bench.add_argument("--L", type=int, default=4)
    p_bench.add_argument("--N", type=int, default=20)
    p_bench.add_argument("--shape", default="A:m=3;u=")
    p_bench.add_argument("--p", type=float, default=0.5)
    p_bench.add_argument("--json", action="store_true")
    p_bench.set_defaults(fn=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
