"""Stochastic on-time-arrival fixed point by label correcting on distributions.

Each vertex v carries a working distribution Z'_v (initially +inf) and a scan
frontier t'_v.  Extracting u from the queue relaxes every in-arc (v, u):
when Z'_v is not <=st X_(v,u) + Z'_u, t'_v drops to the first violating t and
Z'_v becomes the meet of the two.  At termination Z_v solves

    Z_d = 0,   Z_v = meet over (v, u) of X_(v,u) + Z_u,

so F_{Z_v}(t) is the best probability of reaching the target from v within t.
"""
from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .distribution import (
    PLUS_INFINITY,
    TOL,
    ZERO,
    Distribution,
    cdf,
    convolve,
    expectation,
    first_violation,
    from_cdf,
    leq_st,
)
from .errors import BudgetExceeded, ZeroCircuit
from .graph import Instance, Path, _find_zero_circuit, dijkstra_to_destination

INF_T = math.inf


@dataclass
class SotaStats:
    updates: int = 0
    expansions: int = 0
    wall_time: float = 0.0
    n_vertices: int = 0

    @property
    def gamma(self) -> float:
        return self.expansions / self.n_vertices if self.n_vertices else 0.0


@dataclass
class SotaResult:
    instance: Instance
    target: int
    Z: list
    stats: SotaStats
    # arcs that improved Z'_v, in order of first improvement
    successors: list
    # vertices ordered by their first update (target first)
    reach_order: list
    _policy: dict = field(default_factory=dict, repr=False)

    def support_size(self, v: int) -> int:
        z = self.Z[v]
        return 0 if z.is_infinite else len(z)

    def policy_table(self, v: int) -> list:
        """Intervals ``(t_lo, t_hi, arcs)`` of budgets t where ``arcs`` attain the max.

        ``t_hi`` of the last interval is ``math.inf``.
        """
        if v not in self._policy:
            self._policy[v] = _policy_table(self, v)
        return self._policy[v]

    def policy_arc(self, v: int, t: int) -> int:
        """Arc to take at v with remaining budget t; ties go to the lowest arc index."""
        if v == self.target:
            raise ValueError("no decision at the target")
        for lo, hi, arcs in self.policy_table(v):
            if lo <= t <= hi:
                return arcs[0]
        raise ValueError(f"vertex {v} has no out-arc towards the target")


def solve_sota(
    instance: Instance,
    target: int | None = None,
    *,
    tol: float = TOL,
    mass_limit: int = 10**8,
) -> SotaResult:
    """Compute the fixed point Z_v for every vertex; unreachable vertices stay +inf.

    Queue order: smallest t'_u, then largest F_{Z'_u}(t'_u), then smallest
    vertex id.
    """
    cyc = _find_zero_circuit(instance)
    if cyc is not None:
        raise ZeroCircuit(cyc)
    target = instance.destination if target is None else target
    start = time.perf_counter()
    n = instance.n_vertices
    arcs = instance.arcs
    Z: list = [PLUS_INFINITY] * n
    Z[target] = ZERO
    tprime = [INF_T] * n
    tprime[target] = 0
    stamp = [0] * n
    in_queue = [False] * n
    in_queue[target] = True
    successors: list = [[] for _ in range(n)]
    reach_order = [target]
    stats = SotaStats(n_vertices=n)
    mass = 1
    heap = [(0, -1.0, target, 0)]
    while heap:
        _, _, u, s = heapq.heappop(heap)
        if s != stamp[u] or not in_queue[u]:
            continue
        in_queue[u] = False
        tprime[u] = INF_T
        stats.expansions += 1
        zu = Z[u]
        for i in instance.in_arcs[u]:
            a = arcs[i]
            v = a.tail
            if v == target:
                continue
            y = convolve(a.travel, zu)
            zv = Z[v]
            if zv.is_infinite:
                t = first_violation(zv, y, tol)
                if t is None:
                    continue
                new = y
                reach_order.append(v)
            else:
                t, lo, merged = kernels.relax(zv.cdf_array, zv.offset, y.cdf_array, y.offset, tol)
                if t < 0:
                    continue
                new = from_cdf(lo, merged)
                mass -= len(zv)
            mass += len(new)
            if mass > mass_limit:
                raise BudgetExceeded(f"working distributions exceed {mass_limit} mass points")
            Z[v] = new
            stats.updates += 1
            if i not in successors[v]:
                successors[v].append(i)
            if t < tprime[v]:
                tprime[v] = t
            stamp[v] += 1
            in_queue[v] = True
            heapq.heappush(heap, (tprime[v], -cdf(new, tprime[v]), v, stamp[v]))
    stats.wall_time = time.perf_counter() - start
    return SotaResult(instance, target, Z, stats, successors, reach_order)


def extract_lower_bounds(result: SotaResult) -> list:
    """Per-vertex stochastic lower bounds Z_v (PLUS_INFINITY where no path exists)."""
    return list(result.Z)


def trivial_lower_bounds(instance: Instance) -> list:
    """Z_v = 0 everywhere: valid but uninformative bounds."""
    return [ZERO] * instance.n_vertices


def _arc_cdfs(result: SotaResult, v: int):
    inst = result.instance
    rows = []
    for i in inst.out_arcs[v]:
        zu = result.Z[inst.arcs[i].head]
        if zu.is_infinite:
            continue
        rows.append((i, convolve(inst.arcs[i].travel, zu)))
    return rows


def _policy_table(result: SotaResult, v: int) -> list:
    rows = _arc_cdfs(result, v)
    if not rows:
        return []
    top = max(g.max_support for _, g in rows)
    ts = np.arange(0, top + 1)
    vals = np.empty((len(rows), ts.shape[0]))
    for r, (_, g) in enumerate(rows):
        idx = ts - g.offset
        col = g.cdf_array[np.clip(idx, 0, len(g) - 1)]
        vals[r] = np.where(idx < 0, 0.0, np.where(idx >= len(g), 1.0, col))
    best = vals.max(axis=0)
    ids = [i for i, _ in rows]
    order = np.argsort(ids, kind="stable")
    table = []
    for k, t in enumerate(ts):
        winners = tuple(ids[r] for r in order if vals[r, k] >= best[k] - TOL)
        if table and table[-1][2] == winners:
            table[-1][1] = int(t)
        else:
            table.append([int(t), int(t), winners])
    table[-1][1] = math.inf
    return [tuple(x) for x in table]


def fixed_point_residual(result: SotaResult) -> float:
    """max over v, t of |F_{Z_v}(t) - max_(v,u) sum_k P(X = k) F_{Z_u}(t - k)|.

    Evaluated with direct summation, independently of the solver's FFT path.
    """
    inst = result.instance
    worst = 0.0
    for v in range(inst.n_vertices):
        zv = result.Z[v]
        if v == result.target:
            worst = max(worst, 0.0 if zv == ZERO else 1.0)
            continue
        rows = []
        for i in inst.out_arcs[v]:
            zu = result.Z[inst.arcs[i].head]
            if zu.is_infinite:
                continue
            x = inst.arcs[i].travel
            pmf = np.convolve(x.pmf, zu.pmf)
            rows.append((x.offset + zu.offset, np.cumsum(pmf)))
        if zv.is_infinite:
            if rows:
                worst = max(worst, 1.0)
            continue
        if not rows:
            return math.inf
        ts = np.arange(0, zv.max_support + 1)
        rhs = np.zeros(ts.shape[0])
        for off, c in rows:
            idx = ts - off
            col = c[np.clip(idx, 0, c.shape[0] - 1)]
            rhs = np.maximum(rhs, np.where(idx < 0, 0.0, np.where(idx >= c.shape[0], 1.0, col)))
        idx = ts - zv.offset
        lhs = np.where(idx < 0, 0.0, zv.cdf_array[np.clip(idx, 0, len(zv) - 1)])
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def horizon_bounds(instance: Instance, target: int | None = None) -> np.ndarray:
    """T-bar_v: least, over v-target paths, of the path's largest possible length."""
    return dijkstra_to_destination(instance, "max_support", target).dist


# ---------------------------------------------------------------- upper-bound lists


@dataclass(frozen=True)
class UpperBoundEntry:
    path: Path
    dist: Distribution
    cost: float


def _non_dominated(cands: list, k: int) -> list:
    cands.sort(key=lambda e: (expectation(e.dist), e.cost, e.path.arcs))
    kept: list = []
    for e in cands:
        if any(leq_st(f.dist, e.dist) for f in kept):
            continue
        kept.append(e)
        if len(kept) == k:
            break
    return kept


def build_upper_bound_lists(instance: Instance, result: SotaResult, k: int = 3, passes: int = 2) -> list:
    """Per vertex, up to ``k`` elementary v-target paths, mutually non-dominated.

    Paths are assembled along the successor arcs recorded while solving: a
    candidate at v is an improving arc (v, u) followed by an entry of u's
    list that does not revisit v.  Vertices are visited in first-reach order;
    a second pass lets early vertices use lists built after them.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    target = result.target
    lists: list = [[] for _ in range(instance.n_vertices)]
    lists[target] = [UpperBoundEntry(Path(target, (), (target,)), ZERO, 0.0)]
    for _ in range(passes):
        for v in result.reach_order:
            if v == target:
                continue
            cands = {e.path.arcs: e for e in lists[v]}
            for i in result.successors[v]:
                a = instance.arcs[i]
                for e in lists[a.head]:
                    if v in e.path.vertices:
                        continue
                    arcs = (i,) + e.path.arcs
                    if arcs in cands:
                        continue
                    cands[arcs] = UpperBoundEntry(
                        Path(v, arcs, (v,) + e.path.vertices),
                        convolve(a.travel, e.dist),
                        a.cost + e.cost,
                    )
            lists[v] = _non_dominated(list(cands.values()), k)
    return lists


def add_cost_paths(instance: Instance, lists: list, cost_dj=None) -> list:
    """Append each vertex's cheapest path to its list (used by the constrained solver).

    SOTA-derived paths are fast but often expensive; the cheapest suffix gives
    the cost-constrained search an incumbent as soon as it is feasible.
    """
    if cost_dj is None:
        cost_dj = dijkstra_to_destination(instance, "cost", lists_target(lists))
    out = []
    for v, entries in enumerate(lists):
        p = cost_dj.path_from(instance, v) if math.isfinite(cost_dj.dist[v]) else None
        if p is None or any(e.path.arcs == p.arcs for e in entries):
            out.append(list(entries))
            continue
        dist = ZERO
        for i in p.arcs:
            dist = convolve(dist, instance.arcs[i].travel)
        out.append(list(entries) + [UpperBoundEntry(p, dist, float(cost_dj.dist[v]))])
    return out


def lists_target(lists: list) -> int:
    for v, entries in enumerate(lists):
        if any(not e.path.arcs for e in entries):
            return v
    raise ValueError("lists carry no empty path at the target")
