"""Test-side builders, kept independent of the package's own random helpers."""
from __future__ import annotations

import numpy as np

from stochroute.distribution import Distribution, from_pmf, point_mass
from stochroute.graph import Arc, Instance

D1 = from_pmf(1, [0.5, 0.0, 0.5])
D2 = point_mass(2)
D3 = from_pmf(1, [0.25, 0.25, 0.25, 0.25])


def diamond() -> Instance:
    """o=0, a=1, b=2, d=3; arcs o->a, a->d, o->b, b->d."""
    return Instance(
        4,
        (
            Arc(0, 1, point_mass(1), 1.0),
            Arc(1, 3, D1, 1.0),
            Arc(0, 2, point_mass(2), 5.0),
            Arc(2, 3, point_mass(1), 5.0),
        ),
        0,
        3,
    )


def rand_dist(rng, max_len=10, max_offset=6, zero_ok=True, sparse=0.3) -> Distribution:
    n = int(rng.integers(1, max_len + 1))
    p = rng.random(n)
    p[rng.random(n) < sparse] = 0.0
    if p.sum() == 0:
        p[-1] = 1.0
    lo = 0 if zero_ok else 1
    return from_pmf(int(rng.integers(lo, max_offset + 1)), p / p.sum())


def cdf_table(x, ts) -> np.ndarray:
    """P(X <= t) by explicit summation."""
    out = []
    for t in ts:
        out.append(sum(p for k, p in enumerate(x.pmf) if x.offset + k <= t))
    return np.array(out)


def naive_convolve(x, y) -> dict:
    out: dict = {}
    for i, p in enumerate(x.pmf):
        for j, q in enumerate(y.pmf):
            k = x.offset + i + y.offset + j
            out[k] = out.get(k, 0.0) + p * q
    return out


def as_dict(x) -> dict:
    return {x.offset + i: float(p) for i, p in enumerate(x.pmf) if p > 0}


def ordered_pair(rng):
    """(X, Y) with X <=st Y by construction."""
    how = int(rng.integers(0, 4))
    x = rand_dist(rng)
    if how == 0:
        w = rand_dist(rng, max_len=5, max_offset=3)
        y = naive_convolve(x, w)
        ks = sorted(y)
        return x, from_pmf(ks[0], [y.get(k, 0.0) for k in range(ks[0], ks[-1] + 1)])
    if how == 1:
        # lower the CDF: move mass from each point to a later one
        pm = as_dict(x)
        moved: dict = {}
        for k, p in pm.items():
            f = float(rng.random())
            moved[k] = moved.get(k, 0.0) + p * (1 - f)
            k2 = k + int(rng.integers(0, 4))
            moved[k2] = moved.get(k2, 0.0) + p * f
        ks = sorted(moved)
        return x, from_pmf(ks[0], [moved.get(k, 0.0) for k in range(ks[0], ks[-1] + 1)])
    if how == 2:
        # max of X and an independent copy-ish variable is >= X
        z = rand_dist(rng)
        ts = np.arange(min(x.offset, z.offset), max(x.max_support, z.max_support) + 1)
        f = cdf_table(x, ts) * cdf_table(z, ts)
        pmf = np.diff(np.concatenate([[0.0], f]))
        return x, from_pmf(int(ts[0]), np.clip(pmf, 0, None) / pmf.sum())
    return x, Distribution(x.offset + int(rng.integers(0, 4)), x.pmf.copy())


def random_instance(rng, n=None, *, min_one=False, p_arc=0.35, max_len=4, zero_arcs=False,
                    cost_max=10) -> Instance:
    """Random digraph on <= 12 vertices with an o-d path, o=0, d=n-1."""
    if n is None:
        n = int(rng.integers(3, 13))
    arcs = []
    # a backbone guarantees an o-d path
    perm = [0] + list(rng.permutation(np.arange(1, n - 1))) + [n - 1]
    k = int(rng.integers(1, n))
    chain = perm[:k] + [n - 1]
    pairs = set(zip(chain, chain[1:]))
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p_arc:
                pairs.add((u, v))
    for u, v in sorted(pairs):
        if zero_arcs and rng.random() < 0.15:
            x = point_mass(0)
        else:
            x = rand_dist(rng, max_len=max_len, max_offset=4, zero_ok=not min_one)
            if x.max_support == 0:
                x = point_mass(1)
        arcs.append(Arc(int(u), int(v), x, float(rng.integers(0, cost_max + 1))))
    return Instance(n, tuple(arcs), 0, n - 1)


def same_law(x, y, atol=1e-12) -> bool:
    """Equal support bounds and pmfs within ``atol`` (summation order may differ)."""
    if x.is_infinite or y.is_infinite:
        return x.is_infinite and y.is_infinite
    return x.offset == y.offset and len(x) == len(y) and bool(np.allclose(x.pmf, y.pmf, rtol=0, atol=atol))


# acceptance verdicts, echoed again in the terminal summary (see conftest)
VERDICTS: list = []


def verdict(number: int, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}"
    VERDICTS.append(line)
    print(line, flush=True)
    return ok
