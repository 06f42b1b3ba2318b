"""Label algorithm for the risk-constrained cheapest path.

Minimise the deterministic cost of an o-d path P subject to
``rho(X_P) <= rho0``.  Labels carry (vertex, distribution, cost) and are
extracted by the admissible key ``cost + pi_v``.  The search is anytime: a
time limit returns the incumbent with a lower bound taken from the queue.
"""
from __future__ import annotations

import enum
import heapq
import math
import time
from dataclasses import dataclass, field

from .distribution import ZERO, convolve
from .errors import PreconditionViolated
from .graph import Instance, Path, dijkstra_to_destination, path_cost, path_distribution, remove_cycles
from .risk import RiskMeasure, evaluate, evaluate_sum
from .sspp import Label

DEFAULT_TIME_LIMIT = 300.0
# Bound tests may prune only when rho(Y + Z) exceeds rho0 by more than this.
# Fast-path sums and explicit convolutions can differ in the last bits, and an
# exact test would then cut a path that is feasible at equality.  Incumbents
# are still accepted on the exact test against the recomputed path law.
PRUNE_SLACK = 1e-12


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    TIME_LIMIT = "TimeLimit"


@dataclass
class SrcsppStats:
    labels_treated: int = 0
    labels_expanded: int = 0
    labels_created: int = 0
    cpu_time: float = 0.0
    ub_history: list = field(default_factory=list)


@dataclass
class SrcsppResult:
    status: Status
    cost: float | None
    path: Path | None
    risk: float | None
    lower_bound: float
    final_ub: float
    stats: SrcsppStats

    @property
    def gap(self) -> float:
        if self.cost is None:
            return math.inf
        if self.cost == 0:
            return 0.0
        return (self.cost - self.lower_bound) / self.cost


def solve_srcspp(
    instance: Instance,
    rho: RiskMeasure,
    rho0: float,
    bounds: list | None = None,
    pi=None,
    ub_lists: list | None = None,
    *,
    time_limit: float = DEFAULT_TIME_LIMIT,
    max_labels: int | None = None,
    prune_feasibility: bool = True,
    prune_cost: bool = True,
    check_every: int = 1024,
) -> SrcsppResult:
    """Cheapest elementary o-d path with ``rho(X_P) <= rho0``.

    ``bounds``: per-vertex stochastic lower bounds (default Z = 0).
    ``pi``: per-vertex least cost to the destination (default: cost Dijkstra).
    ``ub_lists``: per-vertex entries with ``dist``, ``cost`` and ``path``.
    ``max_labels`` stops after that many extractions, like a time limit.
    """
    for i, a in enumerate(instance.arcs):
        if a.cost == 0 and a.is_zero:
            raise PreconditionViolated(f"arc {i} has zero cost and P(X = 0) = 1")
    wall0 = time.perf_counter()
    cpu0 = time.process_time()
    o, d = instance.origin, instance.destination
    n = instance.n_vertices
    if bounds is None:
        bounds = [ZERO] * n
    if pi is None:
        pi = dijkstra_to_destination(instance, "cost").dist
    ub = 1.0 + instance.total_cost
    if rho0 >= rho.sup:
        # every path is feasible and cycles never become infeasible, so the
        # label search need not stop; the cheapest path is the answer
        p = dijkstra_to_destination(instance, "cost").path_from(instance, o)
        stats = SrcsppStats(ub_history=[ub], cpu_time=time.process_time() - cpu0)
        if p is None:
            return SrcsppResult(Status.INFEASIBLE, None, None, None, math.inf, ub, stats)
        c = path_cost(instance, p)
        return SrcsppResult(Status.OPTIMAL, c, p, evaluate(rho, path_distribution(instance, p)), c, c, stats)
    ub0 = ub
    best_arcs = None
    stats = SrcsppStats(ub_history=[ub])
    arcs = instance.arcs

    def lower_risk(y, v):
        return evaluate(rho, y) if v == d else evaluate_sum(rho, y, bounds[v])

    heap: list = []
    seq = 0
    if math.isfinite(pi[o]) and not bounds[o].is_infinite:
        heap.append((pi[o], seq, Label(o, ZERO, key=lower_risk(ZERO, o), cost=0.0)))
    stopped = False
    while heap:
        if stats.labels_treated % check_every == 0 and time.perf_counter() - wall0 >= time_limit:
            stopped = True
            break
        if max_labels is not None and stats.labels_treated >= max_labels:
            stopped = True
            break
        _, _, lab = heapq.heappop(heap)
        stats.labels_treated += 1
        v, c = lab.vertex, lab.cost
        if v == d:
            if lab.key <= rho0 and c < ub:
                ub, best_arcs = c, lab.arcs()
                stats.ub_history.append(ub)
            continue
        if prune_feasibility and not lab.key <= rho0 + PRUNE_SLACK:
            continue
        if prune_cost and not c + pi[v] < ub:
            continue
        stats.labels_expanded += 1
        if ub_lists is not None:
            for e in ub_lists[v]:
                if c + e.cost < ub and evaluate_sum(rho, lab.dist, e.dist) <= rho0 + PRUNE_SLACK:
                    arcs_p = lab.arcs() + e.path.arcs
                    law = path_distribution(instance, Path.from_arcs(instance, arcs_p, start=o))
                    if evaluate(rho, law) <= rho0:
                        ub, best_arcs = c + e.cost, arcs_p
                        stats.ub_history.append(ub)
        for i in instance.out_arcs[v]:
            a = arcs[i]
            u = a.head
            if bounds[u].is_infinite or not math.isfinite(pi[u]):
                continue
            c2 = c + a.cost
            if prune_cost and not c2 + pi[u] < ub:
                continue
            y = convolve(lab.dist, a.travel)
            if u == d or prune_feasibility:
                key = lower_risk(y, u)
                if not key <= (rho0 if u == d else rho0 + PRUNE_SLACK):
                    continue
            else:
                key = -math.inf
            seq += 1
            stats.labels_created += 1
            heapq.heappush(heap, (c2 + pi[u], seq, Label(u, y, lab, i, key, c2)))
        lab.dist = None

    stats.cpu_time = time.process_time() - cpu0
    path = risk = cost = None
    if best_arcs is not None:
        path = Path.from_arcs(instance, best_arcs, start=o)
        reduced = remove_cycles(instance, path)
        if reduced != path and evaluate(rho, path_distribution(instance, reduced)) <= rho0:
            path = reduced
        cost = path_cost(instance, path)
        risk = evaluate(rho, path_distribution(instance, path))
    if stopped:
        live = min((k for k, _, _ in heap), default=math.inf)
        lb = min(live, cost) if cost is not None else live
        return SrcsppResult(Status.TIME_LIMIT, cost, path, risk, lb, ub, stats)
    if path is None:
        return SrcsppResult(Status.INFEASIBLE, None, None, None, math.inf, ub0, stats)
    return SrcsppResult(Status.OPTIMAL, cost, path, risk, cost, ub, stats)
