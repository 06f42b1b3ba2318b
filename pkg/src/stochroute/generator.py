"""Grid benchmark instances with random discrete arc delays.

An ``n x n`` grid has vertex ``r * n + c`` at row r, column c, and one arc in
each direction per grid edge.  The origin is the upper-left corner (0), the
destination the lower-right corner (n*n - 1).

Every arc draws a minimum delay t0 ~ U{0..50}; its law is then
``P(X = t0 + t) = r_t / sum(r_t)`` with ``r_t`` given by the family:

* generic: support size U{1..2 t0}; each r_t uniform on an interval picked at
  random among ``GENERIC_INTERVALS`` (mixing scales gives very different
  variances across arcs);
* lognormal / gamma: r_t is the mass of a lognormal or gamma law with mean
  mu ~ U[1, M] and variance ~ U[M - mu, 2M - mu] on the cell around t, set to
  0 below ``eps`` times the peak cell.

Each arc uses its own random stream keyed by (seed, arc index, attempt), so
the content of one arc does not depend on how the others were drawn.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .distribution import Distribution, from_pmf
from .errors import DegenerateArc
from .graph import Arc, Instance
from .risk import RiskMeasure, evaluate, var_of

T0_MAX = 50
GENERIC_INTERVALS = ((0.0, 1.0), (0.0, 10.0), (0.0, 1000.0))
MAX_ATTEMPTS = 100
# lognormal tails are long; cap the evaluated horizon
HORIZON_CAP = 100_000


class Family(enum.Enum):
    GENERIC = "generic"
    LOGNORMAL = "lognormal"
    LOGNORMAL_LONG = "lognormal-long"
    GAMMA = "gamma"

    @property
    def tag(self) -> str:
        return {"generic": "R", "lognormal": "Ls", "lognormal-long": "Ll", "gamma": "G"}[self.value]

    @property
    def label(self) -> str:
        return {
            "generic": "Generic",
            "lognormal": "Lognormal",
            "lognormal-long": "Lognormal - long",
            "gamma": "Gamma",
        }[self.value]


@dataclass(frozen=True)
class GenSpec:
    width: int
    family: Family = Family.GENERIC
    seed: int = 0
    eps: float = 1e-4

    def __post_init__(self):
        if self.width < 2:
            raise ValueError("grid width must be >= 2")
        if not self.eps > 0:
            raise ValueError("eps must be > 0")
        if not isinstance(self.family, Family):
            object.__setattr__(self, "family", Family(self.family))

    @property
    def name(self) -> str:
        return f"g{self.width}{self.family.tag}"


@dataclass
class GenStats:
    redraws: int = 0
    redrawn_arcs: list = field(default_factory=list)


def grid_edges(n: int) -> list:
    """(tail, head) pairs of the bidirected n x n grid, in a fixed order."""
    out = []
    for r in range(n):
        for c in range(n):
            v = r * n + c
            if c + 1 < n:
                out.append((v, v + 1))
            if c > 0:
                out.append((v, v - 1))
            if r + 1 < n:
                out.append((v, v + n))
            if r > 0:
                out.append((v, v - n))
    return out


def _generic_weights(rng: np.random.Generator, t0: int) -> np.ndarray:
    size = int(rng.integers(1, max(1, 2 * t0) + 1))
    picks = rng.integers(0, len(GENERIC_INTERVALS), size=size)
    lo = np.array([GENERIC_INTERVALS[k][0] for k in picks])
    hi = np.array([GENERIC_INTERVALS[k][1] for k in picks])
    return rng.uniform(lo, hi)


def moment_cdf(family: Family, mu: float, var: float):
    """(cdf, isf) of the law with the given mean and variance, as vectorised callables."""
    if family is Family.GAMMA:
        a, scale = mu * mu / var, var / mu
        return (
            lambda x: special.gammainc(a, np.maximum(x, 0.0) / scale),
            lambda q: special.gammainccinv(a, q) * scale,
        )
    s2 = math.log1p(var / (mu * mu))
    s, m = math.sqrt(s2), math.log(mu) - s2 / 2

    def cdf(x):
        with np.errstate(divide="ignore"):
            return special.ndtr((np.log(np.maximum(x, 0.0)) - m) / s)

    return cdf, lambda q: math.exp(m - s * special.ndtri(q))


def _continuous_weights(rng: np.random.Generator, family: Family, t0: int, eps: float) -> np.ndarray:
    if family is Family.GAMMA:
        top = 10.0
    else:
        top = float((4 if family is Family.LOGNORMAL_LONG else 2) * t0)
    # t0 = 0 (or 1 for the short lognormal) would leave U[1, M] empty
    top = max(top, 2.0)
    mu = rng.uniform(1.0, top)
    var = max(rng.uniform(top - mu, 2.0 * top - mu), 1e-6)
    cdf, isf = moment_cdf(family, mu, var)
    hi = int(min(math.ceil(isf(eps * 1e-3)) + 2, HORIZON_CAP))
    edges = np.arange(-0.5, hi + 1.0)
    edges[0] = 0.0
    r = np.diff(cdf(edges))
    r[r < eps * r.max()] = 0.0
    return r


def draw_arc(spec: GenSpec, index: int, attempt: int = 0) -> tuple:
    """(travel, cost) for arc ``index``; raises DegenerateArc if P(X = 0) = 1."""
    rng = np.random.default_rng([spec.seed, index, attempt])
    t0 = int(rng.integers(0, T0_MAX + 1))
    if spec.family is Family.GENERIC:
        r = _generic_weights(rng, t0)
    else:
        r = _continuous_weights(rng, spec.family, t0, spec.eps)
    total = r.sum()
    if not total > 0:
        raise DegenerateArc(f"arc {index}: every r_t is zero")
    x = from_pmf(t0, r / total)
    if x.max_support == 0:
        raise DegenerateArc(f"arc {index}: P(X = 0) = 1")
    cost = int(rng.integers(1, max(1, 2 * x.min_support) + 1))
    return x, float(cost)


def generate_with_stats(spec: GenSpec) -> tuple:
    n = spec.width
    arcs = []
    gs = GenStats()
    for i, (u, v) in enumerate(grid_edges(n)):
        for attempt in range(MAX_ATTEMPTS):
            try:
                x, c = draw_arc(spec, i, attempt)
                break
            except DegenerateArc:
                gs.redraws += 1
                gs.redrawn_arcs.append(i)
        else:
            raise DegenerateArc(f"arc {i}: {MAX_ATTEMPTS} degenerate draws")
        arcs.append(Arc(u, v, x, c))
    inst = Instance(n * n, tuple(arcs), 0, n * n - 1)
    return inst, gs


def generate(spec: GenSpec) -> Instance:
    return generate_with_stats(spec)[0]


def derive_tau(result, p: float) -> int:
    """min{t : F_{Z_o}(t) >= p} on the SOTA solution at the origin."""
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    z = result.Z[result.instance.origin]
    return var_of(z, p)


def derive_rho0(rho: RiskMeasure, result, q_dist: Distribution, alpha: float) -> float:
    """alpha * rho(Z_o) + (1 - alpha) * rho(X_Q) for the unconstrained cheapest path Q."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    z = result.Z[result.instance.origin]
    return alpha * evaluate(rho, z) + (1.0 - alpha) * evaluate(rho, q_dist)
