"""Command-line front end.

Exit codes: 0 success, 2 invalid instance, 3 time limit without a feasible
path, 64 bad flags.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path as FsPath

import numpy as np

from . import bench, graph, oracle, risk
from .errors import ParseError, ResidualZeroArc, ValidationError
from .generator import Family, GenSpec, derive_tau, generate_with_stats
from .srcspp import DEFAULT_TIME_LIMIT, Status

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_INCUMBENT = 3
EXIT_USAGE = 64

log = logging.getLogger("stochroute")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(cast):
    def parse(text):
        try:
            return [cast(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    return parse


def _add_risk_flags(p):
    p.add_argument("--risk", choices=("ptau", "cvar", "var", "mean", "stepcost"), required=True)
    p.add_argument("--tau", type=int, help="threshold of P(X >= tau)")
    p.add_argument("--p", type=float, help="derive tau as the p-quantile of the SOTA bound at the origin")
    p.add_argument("--beta", type=float, help="level of VaR / CVaR")
    p.add_argument("--breakpoints", help="JSON [[t, f(t)], ...] or 't value' lines for stepcost")


def _add_bound_flags(p):
    p.add_argument("--trivial-bounds", action="store_true", help="use Z = 0 as lower bounds (ablation)")
    p.add_argument("--no-ublists", action="store_true", help="skip the upper-bound path lists")


def _add_format(p):
    p.add_argument("--format", choices=("md", "csv"), default="md")
    p.add_argument("-o", "--output", help="write the table here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="stochroute", description="Stochastic shortest path solvers.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a grid instance")
    g.add_argument("--width", type=int, required=True)
    g.add_argument("--family", choices=[f.value for f in Family], default="generic")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--eps", type=float, default=1e-4)
    g.add_argument("-o", "--output", required=True)

    s = sub.add_parser("sota", help="on-time-arrival bounds and statistics")
    s.add_argument("instance")
    s.add_argument("--dump-cdf", nargs=2, metavar=("VERTEX", "FILE"))
    _add_format(s)

    p = sub.add_parser("sspp", help="minimise a risk measure over paths")
    p.add_argument("instance")
    _add_risk_flags(p)
    _add_bound_flags(p)
    p.add_argument("--time-limit", type=float, default=None)
    _add_format(p)

    c = sub.add_parser("srcspp", help="cheapest path under a risk constraint")
    c.add_argument("instance")
    _add_risk_flags(c)
    _add_bound_flags(c)
    c.add_argument("--alpha", type=float, help="rho0 = alpha rho(Z_o) + (1 - alpha) rho(X_Q)")
    c.add_argument("--rho0", type=float)
    c.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    _add_format(c)

    b = sub.add_parser("bench", help="generate grids and run the full parameter sweep")
    b.add_argument("--widths", type=_csv_list(int), default=[10, 40])
    b.add_argument("--families", type=_csv_list(Family), default=list(bench.DEFAULT_FAMILIES))
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--eps", type=float, default=1e-4)
    b.add_argument("--time-limit", type=float, default=bench.BENCH_TIME_LIMIT,
                   help="per-cell limit in seconds")
    _add_bound_flags(b)
    _add_format(b)

    o = sub.add_parser("oracle", help="brute-force references (small instances)")
    o.add_argument("what", choices=("paths", "sspp", "srcspp", "sota"))
    o.add_argument("instance")
    o.add_argument("--risk", choices=("ptau", "cvar", "var", "mean", "stepcost"))
    o.add_argument("--tau", type=int)
    o.add_argument("--beta", type=float)
    o.add_argument("--breakpoints")
    o.add_argument("--rho0", type=float)
    o.add_argument("--horizon", type=int, default=None)
    return ap


# ---------------------------------------------------------------- helpers


def _read_breakpoints(path):
    text = FsPath(path).read_text()
    try:
        pairs = json.loads(text)
    except json.JSONDecodeError:
        pairs = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return [(int(t), float(v)) for t, v in pairs]


def _risk_from(args, result=None) -> tuple:
    """(RiskMeasure, p or None) from the flags; ``result`` feeds ``--p``."""
    kind = args.risk
    if kind is None:
        raise UsageError("--risk is required")
    if kind == "ptau":
        p = getattr(args, "p", None)
        if (args.tau is None) == (p is None):
            raise UsageError("ptau needs exactly one of --tau and --p")
        if args.tau is not None:
            return risk.prob_geq(args.tau), None
        if not 0 < p <= 1:
            raise UsageError("--p must lie in (0, 1]")
        return risk.prob_geq(derive_tau(result, p)), p
    if kind in ("cvar", "var"):
        if args.beta is None or not 0 <= args.beta <= 1:
            raise UsageError(f"{kind} needs --beta in [0, 1]")
        return (risk.cvar if kind == "cvar" else risk.value_at_risk)(args.beta), None
    if kind == "mean":
        return risk.mean(), None
    if not args.breakpoints:
        raise UsageError("stepcost needs --breakpoints FILE")
    try:
        return risk.step_cost(_read_breakpoints(args.breakpoints)), None
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"bad breakpoints file: {exc}") from exc


def _load(path) -> graph.Instance:
    try:
        raw = FsPath(path).read_bytes()
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    inst = graph.load(raw)
    report = graph.validate(inst)
    for w in report.warnings:
        log.warning(w)
    return report.instance


def _emit(args, text: str):
    if getattr(args, "output", None):
        FsPath(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _without_zero_arcs(inst):
    if not any(a.is_zero for a in inst.arcs):
        return inst
    log.info("bypassing arcs with P(X = 0) = 1")
    return graph.zero_arc_transform(inst)


def _name(path) -> str:
    return FsPath(path).stem


# ---------------------------------------------------------------- commands


def cmd_generate(args) -> int:
    spec = GenSpec(args.width, Family(args.family), args.seed, args.eps)
    inst, stats = generate_with_stats(spec)
    graph.validate(inst)
    graph.save_file(inst, args.output)
    log.info("%s: %d vertices, %d arcs, %d redraws", spec.name, inst.n_vertices, inst.n_arcs, stats.redraws)
    return EXIT_OK


def cmd_sota(args) -> int:
    inst = _load(args.instance)
    prep = bench.prepare(inst, _name(args.instance), ub_lists=False)
    st = prep.result.stats
    header = ("Instance", "|V|", "|A|", "ℓ", "Upd.", "Exp.", "CPU time (s)")
    row = (prep.name, inst.n_vertices, inst.n_arcs, prep.result.support_size(inst.origin),
           st.updates, st.expansions, f"{st.wall_time:.4f}")
    _emit(args, bench.render(header, [row], args.format))
    if args.dump_cdf:
        v, out = int(args.dump_cdf[0]), args.dump_cdf[1]
        if not 0 <= v < inst.n_vertices:
            raise UsageError(f"no vertex {v}")
        z = prep.result.Z[v]
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("t", "p", "cdf"))
            if not z.is_infinite:
                ts = np.arange(z.offset, z.max_support + 1)
                for t, p, f in zip(ts, z.pmf, z.cdf_array):
                    w.writerow((int(t), repr(float(p)), repr(float(f))))
    return EXIT_OK


def cmd_sspp(args) -> int:
    inst = _without_zero_arcs(_load(args.instance))
    prep = bench.prepare(inst, _name(args.instance), trivial_bounds=args.trivial_bounds,
                         ub_lists=not args.no_ublists)
    rho, p = _risk_from(args, prep.result)
    if rho.kind is risk.RiskKind.PROB_GEQ:
        header = bench.TABLE_SSPP_TAU
    else:
        header = ("Instance", "β") + bench.TABLE_SSPP_CVAR[2:]
        if rho.kind is not risk.RiskKind.CVAR:
            header = tuple(h.replace("CVaR", rho.name) for h in header)
    row = bench.sspp_row(prep, rho, p, time_limit=args.time_limit)
    _emit(args, bench.render(header, [row], args.format))
    return EXIT_OK


def cmd_srcspp(args) -> int:
    if (args.alpha is None) == (args.rho0 is None):
        raise UsageError("give exactly one of --alpha and --rho0")
    if args.alpha is not None and not 0 <= args.alpha <= 1:
        raise UsageError("--alpha must lie in [0, 1]")
    inst = _load(args.instance)
    prep = bench.prepare(inst, _name(args.instance), trivial_bounds=args.trivial_bounds,
                         ub_lists=not args.no_ublists)
    rho, _ = _risk_from(args, prep.result)
    row, res = bench.srcspp_row(prep, rho, args.alpha, args.rho0, time_limit=args.time_limit)
    header = bench.TABLE_SRCSPP_TAU if rho.kind is risk.RiskKind.PROB_GEQ else bench.TABLE_SRCSPP_CVAR
    _emit(args, bench.render(header, [row], args.format))
    if res.status is Status.TIME_LIMIT and res.path is None:
        return EXIT_NO_INCUMBENT
    return EXIT_OK


def cmd_bench(args) -> int:
    tabs = bench.run_bench(
        args.widths, args.families, args.seed, eps=args.eps, time_limit=args.time_limit,
        trivial_bounds=args.trivial_bounds, ub_lists=not args.no_ublists, log=log.info,
    )
    _emit(args, tabs.render(args.format))
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    if args.what == "paths":
        for p in oracle.enumerate_elementary_paths(inst):
            print(" ".join(map(str, p.vertices)))
        return EXIT_OK
    if args.what == "sota":
        horizon = args.horizon
        if horizon is None:
            horizon = int(graph.dijkstra_to_destination(inst, "max_support").dist[inst.origin])
        F = oracle.oracle_sota(inst, horizon)
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["v"] + [str(t) for t in range(horizon + 1)])
        for v in range(inst.n_vertices):
            w.writerow([v] + [repr(float(x)) for x in F[v]])
        return EXIT_OK
    rho, _ = _risk_from(args)
    if args.what == "sspp":
        val, p = oracle.oracle_sspp(inst, rho)
        print(f"{val!r} {' '.join(map(str, p.vertices))}")
        return EXIT_OK
    if args.rho0 is None:
        raise UsageError("oracle srcspp needs --rho0")
    try:
        cost, p = oracle.oracle_srcspp(inst, rho, args.rho0)
    except oracle.Infeasible:
        print("INFEAS.")
        return EXIT_OK
    print(f"{cost!r} {' '.join(map(str, p.vertices))}")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "sota": cmd_sota,
    "sspp": cmd_sspp,
    "srcspp": cmd_srcspp,
    "bench": cmd_bench,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.cmd](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"stochroute: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, ParseError, ResidualZeroArc) as exc:
        print(f"stochroute: invalid instance: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
