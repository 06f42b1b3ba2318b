"""Label-setting solver for the risk-minimising stochastic shortest path.

A label is a partial o-v path with the exact distribution of its length.
Labels whose ``rho(Y + Z_v^LB)`` cannot beat the incumbent are discarded,
which is exact whenever ``rho`` is monotone for the usual stochastic order.
"""
from __future__ import annotations

import heapq
import math
import time
from collections import deque
from dataclasses import dataclass, field

from .distribution import ZERO, convolve
from .errors import NoPath, ZeroArcPresent
from .graph import Instance, Path, dijkstra_to_destination, path_distribution, remove_cycles
from .risk import RiskMeasure, evaluate, evaluate_sum


class Label:
    __slots__ = ("vertex", "dist", "parent", "arc", "key", "cost")

    def __init__(self, vertex, dist, parent=None, arc=-1, key=0.0, cost=0.0):
        self.vertex = vertex
        self.dist = dist
        self.parent = parent
        self.arc = arc
        self.key = key
        self.cost = cost

    def arcs(self) -> tuple:
        out = []
        lab = self
        while lab.parent is not None:
            out.append(lab.arc)
            lab = lab.parent
        return tuple(reversed(out))

    def path(self, instance: Instance, start: int) -> Path:
        return Path.from_arcs(instance, self.arcs(), start=start)


@dataclass
class SsppStats:
    labels_treated: int = 0
    labels_expanded: int = 0
    labels_created: int = 0
    cpu_time: float = 0.0
    ub_history: list = field(default_factory=list)


@dataclass
class SsppResult:
    value: float
    path: Path
    initial_value: float  # rho of the expectation-shortest path P0
    initial_path: Path
    stats: SsppStats
    # False when a label or time budget stopped the search early
    optimal: bool = True


def _check_arcs(instance: Instance):
    for i, a in enumerate(instance.arcs):
        if a.is_zero:
            raise ZeroArcPresent(
                f"arc {i} has P(X = 0) = 1; apply graph.zero_arc_transform first"
            )


def solve_sspp(
    instance: Instance,
    rho: RiskMeasure,
    bounds: list | None = None,
    ub_lists: list | None = None,
    *,
    order: str = "key",
    max_labels: int | None = None,
    time_limit: float | None = None,
    check_every: int = 1024,
) -> SsppResult:
    """Minimise ``rho(X_P)`` over elementary origin-destination paths.

    ``bounds`` are per-vertex stochastic lower bounds (``None`` means Z = 0);
    ``ub_lists`` are per-vertex lists of :class:`~stochroute.sota.UpperBoundEntry`.
    ``order`` is ``"key"`` (priority on rho(Y + Z^LB)) or ``"fifo"``.
    ``max_labels`` (expansions) and ``time_limit`` (wall-clock seconds) stop
    the search early; the result then carries ``optimal=False``.
    """
    if order not in ("key", "fifo"):
        raise ValueError("order must be 'key' or 'fifo'")
    _check_arcs(instance)
    started = time.process_time()
    wall0 = time.perf_counter()
    optimal = True
    o, d = instance.origin, instance.destination
    if bounds is None:
        bounds = [ZERO] * instance.n_vertices
    dj = dijkstra_to_destination(instance, "expectation")
    p0 = dj.path_from(instance, o)
    if p0 is None:
        raise NoPath(f"no path from {o} to {d}")
    ub = evaluate(rho, path_distribution(instance, p0))
    initial_value = ub
    best_arcs = p0.arcs
    stats = SsppStats(ub_history=[ub])

    root = Label(o, ZERO)
    root.key = evaluate(rho, bounds[o]) if not bounds[o].is_infinite else math.inf
    seq = 0
    if order == "key":
        queue: list = [(root.key, seq, root)]
        pop = lambda: heapq.heappop(queue)[2]  # noqa: E731
        push = lambda lab: heapq.heappush(queue, (lab.key, seq, lab))  # noqa: E731
    else:
        queue = deque([root])
        pop = queue.popleft
        push = queue.append

    arcs = instance.arcs
    while queue:
        if (
            time_limit is not None
            and stats.labels_treated % check_every == 0
            and time.perf_counter() - wall0 >= time_limit
        ):
            optimal = False
            break
        lab = pop()
        stats.labels_treated += 1
        v = lab.vertex
        if v == d:
            val = lab.key
            if val < ub:
                ub, best_arcs = val, lab.arcs()
                stats.ub_history.append(ub)
            continue
        if not lab.key < ub:
            continue
        stats.labels_expanded += 1
        if max_labels is not None and stats.labels_expanded > max_labels:
            optimal = False
            break
        if ub_lists is not None:
            for e in ub_lists[v]:
                val = evaluate_sum(rho, lab.dist, e.dist)
                if val < ub:
                    ub, best_arcs = val, lab.arcs() + e.path.arcs
                    stats.ub_history.append(ub)
        for i in instance.out_arcs[v]:
            u = arcs[i].head
            zu = bounds[u]
            if zu.is_infinite:
                continue
            y = convolve(lab.dist, arcs[i].travel)
            key = evaluate(rho, y) if u == d else evaluate_sum(rho, y, zu)
            if key >= ub:
                continue
            seq += 1
            stats.labels_created += 1
            push(Label(u, y, lab, i, key))
        # children hold their own copies; the parent only serves path recovery
        lab.dist = None

    path = remove_cycles(instance, Path.from_arcs(instance, best_arcs, start=o))
    value = evaluate(rho, path_distribution(instance, path))
    stats.cpu_time = time.process_time() - started
    return SsppResult(value, path, initial_value, p0, stats, optimal)
