"""Experiment pipelines and the result tables printed by the CLI.

One instance is preprocessed once (SOTA bounds, upper-bound lists, Dijkstra
potentials); every parameter cell then runs a single solve against it.
"""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass

from . import graph, sota
from .generator import Family, GenSpec, derive_rho0, derive_tau, generate
from .risk import RiskKind, RiskMeasure, cvar, evaluate, prob_geq
from .srcspp import Status, solve_srcspp
from .sspp import solve_sspp

SSPP_P = (0.5, 0.8, 0.95)
SSPP_BETA = (0.25, 0.05, 0.01)
SRCSPP_ALPHA = (0.02, 0.1, 0.5)
SRCSPP_P = 0.95
SRCSPP_BETA = 0.05
BENCH_TIME_LIMIT = 30.0
DEFAULT_FAMILIES = (Family.GENERIC, Family.LOGNORMAL, Family.GAMMA)

TABLE_INSTANCES = ("Instance", "|V|", "|A|", "ℓ", "Dist. type")
TABLE_SOTA = ("Instance", "Upd.", "Exp.", "CPU time (s)")
TABLE_SSPP_TAU = (
    "Instance", "p", "τ", "SOTA P(≥τ)", "ESP P(≥τ)", "SOTA CPU (s)",
    "λ treat.", "λ exp.", "SSPP CPU (s)", "Opt. sol. P(≥τ)", "Total CPU (s)",
)
TABLE_SSPP_CVAR = (
    "Instance", "β", "SOTA CVaR", "ESP CVaR", "SOTA CPU (s)",
    "λ treat.", "λ exp.", "SSPP CPU (s)", "Opt. sol. CVaR", "Total CPU (s)",
)
TABLE_SRCSPP_TAU = (
    "Inst.", "τ", "α", "SP cost", "ρ0", "SOTA CPU (s)", "λ treat.", "λ exp.",
    "SRCSP CPU (s)", "ρ(P)", "LB", "c_P", "gap %", "Total CPU (s)",
)
TABLE_SRCSPP_CVAR = (
    "Inst.", "α", "SP cost", "ρ0", "SOTA CPU (s)", "λ treat.", "λ exp.",
    "SRCSP CPU (s)", "ρ(P)", "LB", "c_P", "gap %", "Total CPU (s)",
)


@dataclass
class Prepared:
    name: str
    instance: graph.Instance
    result: sota.SotaResult
    bounds: list
    ub_lists: list | None
    sota_cpu: float  # SOTA plus list construction
    cost_dj: graph.DijkstraResult


def prepare(instance, name: str = "instance", *, trivial_bounds=False, ub_lists=True, k: int = 3) -> Prepared:
    t0 = time.process_time()
    res = sota.solve_sota(instance)
    lists = sota.build_upper_bound_lists(instance, res, k) if ub_lists else None
    bounds = sota.trivial_lower_bounds(instance) if trivial_bounds else sota.extract_lower_bounds(res)
    cpu = time.process_time() - t0
    return Prepared(name, instance, res, bounds, lists, cpu, graph.dijkstra_to_destination(instance, "cost"))


def _f(x, nd=3):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, float) and math.isinf(x):
        return "∞"
    if isinstance(x, int):
        return str(x)
    return f"{x:.{nd}f}"


# ---------------------------------------------------------------- rows


def instance_row(prep: Prepared, family: Family | None = None) -> tuple:
    inst = prep.instance
    kind = family.label if family is not None else ""
    return (prep.name, inst.n_vertices, inst.n_arcs, prep.result.support_size(inst.origin), kind)


def sota_row(prep: Prepared) -> tuple:
    st = prep.result.stats
    # timing covers the bound computation alone
    return (prep.name, st.updates, st.expansions, _f(st.wall_time, 4))


def sspp_row(prep: Prepared, rho: RiskMeasure, p=None, *, time_limit=None) -> tuple:
    t0 = time.process_time()
    z = prep.result.Z[prep.instance.origin]
    sol = solve_sspp(prep.instance, rho, prep.bounds, prep.ub_lists, time_limit=time_limit)
    total = prep.sota_cpu + time.process_time() - t0
    value = _f(sol.value, 4) if sol.optimal else f"≤{sol.value:.4f}"
    head = (prep.name, _f(p), rho.tau) if rho.kind is RiskKind.PROB_GEQ else (prep.name, _f(rho.beta, 3))
    return head + (
        _f(evaluate(rho, z), 4), _f(sol.initial_value, 4), _f(prep.sota_cpu),
        sol.stats.labels_treated, sol.stats.labels_expanded, _f(sol.stats.cpu_time),
        value, _f(total),
    )


def srcspp_cells(prep: Prepared, rho: RiskMeasure, alpha: float, rho0: float | None = None,
                 *, time_limit: float) -> tuple:
    """(row tail, result) for one constrained solve; ``rho0`` overrides ``alpha``."""
    t0 = time.process_time()
    inst = prep.instance
    q = prep.cost_dj.path_from(inst, inst.origin)
    sp_cost = graph.path_cost(inst, q)
    if rho0 is None:
        rho0 = derive_rho0(rho, prep.result, graph.path_distribution(inst, q), alpha)
    lists = None
    if prep.ub_lists is not None:
        lists = sota.add_cost_paths(inst, prep.ub_lists, prep.cost_dj)
    res = solve_srcspp(inst, rho, rho0, prep.bounds, prep.cost_dj.dist, lists, time_limit=time_limit)
    total = prep.sota_cpu + time.process_time() - t0
    st = res.stats
    if res.status is Status.INFEASIBLE:
        tail = ("", "", "INFEAS.", "")
    elif res.cost is None:
        tail = ("-", _f(res.lower_bound), "∞", "∞")
    else:
        lb = "" if res.status is Status.OPTIMAL else _f(res.lower_bound)
        tail = (_f(res.risk, 3), lb, _f(res.cost), _f(100.0 * res.gap, 1))
    row = (_f(alpha if alpha is not None else None, 2), _f(sp_cost), _f(rho0, 3), _f(prep.sota_cpu),
           st.labels_treated, st.labels_expanded, _f(st.cpu_time)) + tail + (_f(total),)
    return row, res


def srcspp_row(prep: Prepared, rho: RiskMeasure, alpha, rho0=None, *, time_limit) -> tuple:
    cells, res = srcspp_cells(prep, rho, alpha, rho0, time_limit=time_limit)
    head = (prep.name, rho.tau) if rho.kind is RiskKind.PROB_GEQ else (prep.name,)
    return head + cells, res


# ---------------------------------------------------------------- emitters


def render(header: tuple, rows: list, fmt: str = "md") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    def cells(xs):
        return "| " + " | ".join(str(x).replace("|", "\\|") for x in xs) + " |"

    lines = [cells(header), "|" + "|".join("---" for _ in header) + "|"]
    lines.extend(cells(r) for r in rows)
    return "\n".join(lines) + "\n"


@dataclass
class BenchTables:
    instances: list
    sota: list
    sspp_tau: list
    sspp_cvar: list
    srcspp_tau: list
    srcspp_cvar: list

    def sections(self):
        yield "Instances", TABLE_INSTANCES, self.instances
        yield "SOTA", TABLE_SOTA, self.sota
        yield "SSPP, P(X >= tau)", TABLE_SSPP_TAU, self.sspp_tau
        yield "SSPP, CVaR", TABLE_SSPP_CVAR, self.sspp_cvar
        yield f"SRCSPP, P(X >= tau), p = {SRCSPP_P}", TABLE_SRCSPP_TAU, self.srcspp_tau
        yield f"SRCSPP, CVaR_{SRCSPP_BETA}", TABLE_SRCSPP_CVAR, self.srcspp_cvar

    def render(self, fmt: str = "md") -> str:
        out = []
        for title, header, rows in self.sections():
            out.append(f"## {title}\n" if fmt == "md" else f"# {title}\n")
            out.append(render(header, rows, fmt))
        return "\n".join(out)


def run_bench(widths, families=DEFAULT_FAMILIES, seed: int = 1, *, eps: float = 1e-4,
              time_limit: float = BENCH_TIME_LIMIT, trivial_bounds=False, ub_lists=True,
              log=None) -> BenchTables:
    tabs = BenchTables([], [], [], [], [], [])
    for w in widths:
        for fam in families:
            spec = GenSpec(int(w), fam, seed, eps)
            inst = graph.validate(generate(spec)).instance
            prep = prepare(inst, spec.name, trivial_bounds=trivial_bounds, ub_lists=ub_lists)
            tabs.instances.append(instance_row(prep, fam))
            tabs.sota.append(sota_row(prep))
            for p in SSPP_P:
                tabs.sspp_tau.append(sspp_row(prep, prob_geq(derive_tau(prep.result, p)), p, time_limit=time_limit))
            for beta in SSPP_BETA:
                tabs.sspp_cvar.append(sspp_row(prep, cvar(beta), time_limit=time_limit))
            rho = prob_geq(derive_tau(prep.result, SRCSPP_P))
            for a in SRCSPP_ALPHA:
                tabs.srcspp_tau.append(srcspp_row(prep, rho, a, time_limit=time_limit)[0])
            for a in SRCSPP_ALPHA:
                tabs.srcspp_cvar.append(srcspp_row(prep, cvar(SRCSPP_BETA), a, time_limit=time_limit)[0])
            if log is not None:
                log(f"{spec.name} done")
    return tabs
