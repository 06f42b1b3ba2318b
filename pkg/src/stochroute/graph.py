"""Instance model: directed graph with random travel times and deterministic costs."""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .distribution import ZERO, Distribution, convolve, expectation, from_pmf
from .errors import (
    DistributionError,
    InvalidChain,
    Loop,
    NoPathToDestination,
    ParseError,
    ResidualZeroArc,
    ValidationError,
    ZeroCircuit,
)


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    travel: Distribution
    cost: float = 0.0

    @property
    def is_zero(self) -> bool:
        """P(X = 0) = 1."""
        return self.travel.offset == 0 and len(self.travel) == 1


@dataclass(frozen=True, eq=False)
class Instance:
    n_vertices: int
    arcs: tuple
    origin: int
    destination: int
    out_arcs: tuple = field(init=False, repr=False)
    in_arcs: tuple = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(self.arcs))
        out = [[] for _ in range(self.n_vertices)]
        inc = [[] for _ in range(self.n_vertices)]
        for i, a in enumerate(self.arcs):
            if not (0 <= a.tail < self.n_vertices and 0 <= a.head < self.n_vertices):
                raise ValidationError(f"arc {i} ({a.tail}, {a.head}) has an unknown endpoint")
            out[a.tail].append(i)
            inc[a.head].append(i)
        for v in (self.origin, self.destination):
            if not 0 <= v < self.n_vertices:
                raise ValidationError(f"vertex {v} out of range")
        object.__setattr__(self, "out_arcs", tuple(tuple(x) for x in out))
        object.__setattr__(self, "in_arcs", tuple(tuple(x) for x in inc))

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    @property
    def total_cost(self) -> float:
        return float(sum(a.cost for a in self.arcs))

    def replace(self, **changes) -> "Instance":
        kw = dict(
            n_vertices=self.n_vertices,
            arcs=self.arcs,
            origin=self.origin,
            destination=self.destination,
        )
        kw.update(changes)
        return Instance(**kw)


@dataclass(frozen=True)
class Path:
    """Arc sequence chained head-to-tail, starting at ``start``."""

    start: int
    arcs: tuple = ()
    vertices: tuple = ()

    @classmethod
    def from_arcs(cls, instance: Instance, arcs: Sequence[int], start: int | None = None) -> "Path":
        arcs = tuple(int(a) for a in arcs)
        if start is None:
            if not arcs:
                raise InvalidChain("an empty path needs an explicit start vertex")
            start = instance.arcs[arcs[0]].tail
        verts = [start]
        for i in arcs:
            a = instance.arcs[i]
            if a.tail != verts[-1]:
                raise InvalidChain(f"arc {i} starts at {a.tail}, expected {verts[-1]}")
            verts.append(a.head)
        return cls(start, arcs, tuple(verts))

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def is_elementary(self) -> bool:
        return len(set(self.vertices)) == len(self.vertices)

    def __len__(self):
        return len(self.arcs)


def path_distribution(instance: Instance, path: Path) -> Distribution:
    """Left fold of arc convolutions; repeated arcs are independent copies."""
    _check_chain(instance, path)
    y = ZERO
    for i in path.arcs:
        y = convolve(y, instance.arcs[i].travel)
    return y


def path_cost(instance: Instance, path: Path) -> float:
    _check_chain(instance, path)
    return float(sum(instance.arcs[i].cost for i in path.arcs))


def _check_chain(instance, path):
    v = path.start
    for i in path.arcs:
        a = instance.arcs[i]
        if a.tail != v:
            raise InvalidChain(f"arc {i} starts at {a.tail}, expected {v}")
        v = a.head


def remove_cycles(instance: Instance, path: Path) -> Path:
    """Elementary path obtained by cutting every closed sub-walk."""
    verts = [path.start]
    arcs: list[int] = []
    pos = {path.start: 0}
    for i in path.arcs:
        h = instance.arcs[i].head
        if h in pos:
            k = pos[h]
            for v in verts[k + 1 :]:
                del pos[v]
            del verts[k + 1 :]
            del arcs[k:]
        else:
            arcs.append(i)
            verts.append(h)
            pos[h] = len(verts) - 1
    return Path(path.start, tuple(arcs), tuple(verts))


# ---------------------------------------------------------------- JSON


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save(instance: Instance) -> bytes:
    """Canonical JSON: arcs sorted by (tail, head, insertion order), 17 significant digits."""
    order = sorted(range(instance.n_arcs), key=lambda i: (instance.arcs[i].tail, instance.arcs[i].head, i))
    lines = []
    for i in order:
        a = instance.arcs[i]
        pmf = ", ".join(_fmt(p) for p in a.travel.pmf)
        lines.append(
            f'    {{"tail": {a.tail}, "head": {a.head}, "cost": {_fmt(a.cost)}, '
            f'"travel": {{"offset": {a.travel.offset}, "pmf": [{pmf}]}}}}'
        )
    body = ",\n".join(lines)
    text = (
        "{\n"
        f'  "vertices": {instance.n_vertices},\n'
        f'  "origin": {instance.origin},\n'
        f'  "destination": {instance.destination},\n'
        f'  "arcs": [\n{body}\n  ]\n'
        "}\n"
    )
    return text.encode("ascii")


def from_json_obj(data: dict) -> Instance:
    try:
        n = int(data["vertices"])
        o = int(data["origin"])
        d = int(data["destination"])
        raw_arcs = data["arcs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed instance header: {exc}") from exc
    arcs = []
    for k, ra in enumerate(raw_arcs):
        try:
            tail, head = int(ra["tail"]), int(ra["head"])
            cost = float(ra.get("cost", 0.0))
            offset = int(ra["travel"]["offset"])
            pmf = [float(p) for p in ra["travel"]["pmf"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed arc {k}: {exc}") from exc
        try:
            travel = from_pmf(offset, pmf)
        except DistributionError as exc:
            raise ValidationError(f"arc {k}: {type(exc).__name__}: {exc}") from exc
        arcs.append(Arc(tail, head, travel, cost))
    return Instance(n, tuple(arcs), o, d)


def load(data: Union[bytes, str]) -> Instance:
    """Parse and validate an instance file; the returned instance is not pruned."""
    try:
        obj = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(str(exc)) from exc
    if not isinstance(obj, dict):
        raise ParseError("instance JSON must be an object")
    instance = from_json_obj(obj)
    validate(instance)
    return instance


def load_file(path) -> Instance:
    with open(path, "rb") as fh:
        return load(fh.read())


def save_file(instance: Instance, path) -> None:
    with open(path, "wb") as fh:
        fh.write(save(instance))


# ---------------------------------------------------------------- validation


@dataclass
class ValidationReport:
    instance: Instance  # arcs touching pruned vertices removed
    pruned: list
    warnings: list


def _find_zero_circuit(instance: Instance):
    succ = [[] for _ in range(instance.n_vertices)]
    for a in instance.arcs:
        if a.is_zero:
            succ[a.tail].append(a.head)
    color = [0] * instance.n_vertices
    parent = [-1] * instance.n_vertices
    for root in range(instance.n_vertices):
        if color[root]:
            continue
        stack = [(root, iter(succ[root]))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[v] = 2
                stack.pop()
            elif color[nxt] == 0:
                color[nxt] = 1
                parent[nxt] = v
                stack.append((nxt, iter(succ[nxt])))
            elif color[nxt] == 1:
                cyc = [v]
                while cyc[-1] != nxt:
                    cyc.append(parent[cyc[-1]])
                return cyc[::-1]
    return None


def reaches(instance: Instance, target: int) -> np.ndarray:
    """Boolean mask of vertices having a path to ``target``."""
    seen = np.zeros(instance.n_vertices, dtype=bool)
    seen[target] = True
    stack = [target]
    while stack:
        u = stack.pop()
        for i in instance.in_arcs[u]:
            v = instance.arcs[i].tail
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return seen


def validate(instance: Instance) -> ValidationReport:
    """Check the model invariants and prune vertices that cannot reach the destination."""
    for i, a in enumerate(instance.arcs):
        if a.tail == a.head:
            raise Loop(f"arc {i} is a loop on vertex {a.tail}")
        if not (a.cost >= 0.0 and math.isfinite(a.cost)):
            raise ValidationError(f"arc {i} has invalid cost {a.cost!r}")
        if a.travel.is_infinite or a.travel.offset < 0:
            raise ValidationError(f"arc {i} has an invalid travel distribution")
    cyc = _find_zero_circuit(instance)
    if cyc is not None:
        raise ZeroCircuit(cyc)
    alive = reaches(instance, instance.destination)
    if not alive[instance.origin]:
        raise NoPathToDestination(
            f"no path from origin {instance.origin} to destination {instance.destination}"
        )
    pruned = [int(v) for v in np.flatnonzero(~alive)]
    warnings = [f"{v} unreachable-to-d, pruned" for v in pruned]
    if pruned:
        keep = tuple(a for a in instance.arcs if alive[a.tail] and alive[a.head])
        instance = instance.replace(arcs=keep)
    return ValidationReport(instance, pruned, warnings)


# ---------------------------------------------------------------- Dijkstra

ArcWeight = Union[str, Callable[[Arc], float]]

_WEIGHTS = {
    "cost": lambda a: a.cost,
    "expectation": lambda a: expectation(a.travel),
    "min_support": lambda a: float(a.travel.min_support),
    "max_support": lambda a: float(a.travel.max_support),
}


@dataclass
class DijkstraResult:
    dist: np.ndarray
    succ: list  # arc index leaving v on a least-weight v-target path, -1 if none
    target: int

    def path_from(self, instance: Instance, v: int) -> Path | None:
        if not math.isfinite(self.dist[v]):
            return None
        start, arcs = v, []
        while v != self.target:
            i = self.succ[v]
            arcs.append(i)
            v = instance.arcs[i].head
        return Path.from_arcs(instance, arcs, start=start)


def dijkstra_to_destination(instance: Instance, weight: ArcWeight = "cost", target: int | None = None) -> DijkstraResult:
    """Least total weight of a v-target path for every v (+inf when none).

    Among tight arcs the successor is the lowest arc index whose head was
    settled earlier, so successor pointers never cycle.
    """
    target = instance.destination if target is None else target
    w = _WEIGHTS[weight] if isinstance(weight, str) else weight
    weights = np.array([w(a) for a in instance.arcs], dtype=np.float64)
    if np.any(weights < 0):
        raise ValidationError("Dijkstra needs nonnegative weights")
    n = instance.n_vertices
    dist = np.full(n, math.inf)
    rank = np.full(n, -1)
    dist[target] = 0.0
    heap = [(0.0, target)]
    settled = 0
    while heap:
        d, u = heapq.heappop(heap)
        if rank[u] >= 0 or d > dist[u]:
            continue
        rank[u] = settled
        settled += 1
        for i in instance.in_arcs[u]:
            v = instance.arcs[i].tail
            nd = d + weights[i]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    succ = [-1] * n
    for v in range(n):
        if v == target or not math.isfinite(dist[v]):
            continue
        for i in instance.out_arcs[v]:
            u = instance.arcs[i].head
            if rank[u] >= 0 and rank[u] < rank[v]:
                slack = abs(weights[i] + dist[u] - dist[v])
                if slack <= 1e-9 * max(1.0, abs(dist[v])):
                    succ[v] = i
                    break
    return DijkstraResult(dist, succ, target)


# ---------------------------------------------------------------- zero arcs


def zero_arc_transform(instance: Instance, max_rounds: int = 10_000) -> Instance:
    """Rewrite away arcs with P(X = 0) = 1 by bypassing them.

    Arc (u, v) is removed and replaced by (w, v) copying (w, u) for each
    in-arc of u, and (u, x) copying (v, x) for each out-arc of v; costs add
    along the bypassed pair.  Parallel arcs are kept.  A remaining zero arc
    from origin to destination cannot be bypassed and raises
    :class:`ResidualZeroArc` carrying the rewritten instance.
    """
    cyc = _find_zero_circuit(instance)
    if cyc is not None:
        raise ZeroCircuit(cyc)
    if not any(a.is_zero for a in instance.arcs):
        return instance
    arcs = list(instance.arcs)
    o, d = instance.origin, instance.destination
    for _ in range(max_rounds):
        k = next(
            (i for i, a in enumerate(arcs) if a.is_zero and not (a.tail == o and a.head == d)),
            None,
        )
        if k is None:
            break
        z = arcs.pop(k)
        u, v = z.tail, z.head
        added = []
        for a in arcs:
            if a.head == u and a.tail != v:
                added.append(Arc(a.tail, v, a.travel, a.cost + z.cost))
            if a.tail == v and a.head != u:
                added.append(Arc(u, a.head, a.travel, z.cost + a.cost))
        arcs.extend(added)
    else:  # pragma: no cover - zero-circuit freedom bounds the rewriting
        raise ValidationError("zero-arc rewriting did not reach a fixpoint")
    out = instance.replace(arcs=tuple(arcs))
    if any(a.is_zero for a in arcs):
        raise ResidualZeroArc("deterministic-zero origin-destination arc remains", out)
    alive = reaches(out, d)
    keep = tuple(a for a in out.arcs if alive[a.tail] and alive[a.head])
    return out.replace(arcs=keep)
