"""Brute-force references for tests: path enumeration and direct value iteration.

Nothing here imports the solvers; only the Distribution type is shared.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distribution import ZERO, Distribution, convolve
from .errors import BudgetExceeded, NoPath, ZeroMassAtZero


@dataclass(frozen=True)
class OracleBudget:
    max_vertices: int = 12
    max_paths: int = 10**6
    max_horizon: int = 10**6


@dataclass(frozen=True)
class OraclePath:
    vertices: tuple
    arcs: tuple


class Infeasible(Exception):
    """No elementary o-d path satisfies the risk constraint."""


def _check_size(instance, budget: OracleBudget):
    if instance.n_vertices > budget.max_vertices:
        raise BudgetExceeded(f"{instance.n_vertices} vertices exceed the oracle budget")


def enumerate_elementary_paths(instance, budget: OracleBudget = OracleBudget()) -> list:
    """All elementary origin-destination paths, depth first, out-arcs in index order."""
    _check_size(instance, budget)
    o, d = instance.origin, instance.destination
    if o == d:
        return [OraclePath((o,), ())]
    out: dict = {}
    for i, a in enumerate(instance.arcs):
        out.setdefault(a.tail, []).append(i)
    found = []
    verts, arcs = [o], []
    on_path = {o}
    # explicit stack of (vertex, next out-arc position)
    stack = [(o, 0)]
    while stack:
        v, k = stack.pop()
        succ = out.get(v, [])
        if k >= len(succ):
            on_path.discard(v)
            verts.pop()
            if arcs:
                arcs.pop()
            continue
        stack.append((v, k + 1))
        i = succ[k]
        w = instance.arcs[i].head
        if w in on_path:
            continue
        if w == d:
            found.append(OraclePath(tuple(verts) + (d,), tuple(arcs) + (i,)))
            if len(found) > budget.max_paths:
                raise BudgetExceeded(f"more than {budget.max_paths} paths")
            continue
        verts.append(w)
        arcs.append(i)
        on_path.add(w)
        stack.append((w, 0))
    return found


def path_law(instance, path: OraclePath) -> Distribution:
    x = ZERO
    for i in path.arcs:
        x = convolve(x, instance.arcs[i].travel)
    return x


def oracle_sspp(instance, rho, budget: OracleBudget = OracleBudget()) -> tuple:
    """(min rho(X_P), P) over elementary paths; ties go to the smallest vertex sequence."""
    best = None
    for p in enumerate_elementary_paths(instance, budget):
        key = (rho(path_law(instance, p)), p.vertices)
        if best is None or key < best[0]:
            best = (key, p)
    if best is None:
        raise NoPath("no elementary origin-destination path")
    return best[0][0], best[1]


def oracle_srcspp(instance, rho, rho0: float, budget: OracleBudget = OracleBudget()) -> tuple:
    """(min cost, P) over elementary paths with rho(X_P) <= rho0."""
    best = None
    for p in enumerate_elementary_paths(instance, budget):
        if not rho(path_law(instance, p)) <= rho0:
            continue
        cost = sum(instance.arcs[i].cost for i in p.arcs)
        key = (cost, p.vertices)
        if best is None or key < best[0]:
            best = (key, p)
    if best is None:
        raise Infeasible("no feasible elementary path")
    return best[0][0], best[1]


def oracle_sota(instance, horizon: int, target: int | None = None,
                budget: OracleBudget = OracleBudget()) -> np.ndarray:
    """F[v, t] = best probability of reaching the target from v within t, t = 0..horizon.

    F_target = 1 and F_v(t) = max over (v, u) of sum_k P(X = k) F_u(t - k),
    filled by increasing t.  Needs every arc's minimum delay >= 1.
    """
    if horizon > budget.max_horizon:
        raise BudgetExceeded(f"horizon {horizon} exceeds the oracle budget")
    for i, a in enumerate(instance.arcs):
        if a.travel.min_support < 1:
            raise ZeroMassAtZero(f"arc {i} has P(X = 0) > 0")
    target = instance.destination if target is None else target
    n = instance.n_vertices
    F = np.zeros((n, horizon + 1))
    F[target, :] = 1.0
    out = [[a for a in instance.arcs if a.tail == v] for v in range(n)]
    for t in range(horizon + 1):
        for v in range(n):
            if v == target:
                continue
            best = 0.0
            for a in out[v]:
                x = a.travel
                acc = 0.0
                for j, p in enumerate(x.pmf):
                    k = x.offset + j
                    if k > t:
                        break
                    acc += p * F[a.head, t - k]
                best = max(best, acc)
            F[v, t] = best
    return F
