"""Risk measures on travel-time distributions.

The label algorithms are exact for measures that are monotone for the usual
stochastic order.  ``RiskMeasure.consistent`` records whether a kind is;
the literal conditional-tail CVaR is the one shipped kind that is not.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .distribution import (
    TOL,
    Distribution,
    convolve,
    expectation,
    from_cdf,
    from_pmf,
    meet,
)
from .errors import InfiniteOperand


class RiskKind(enum.Enum):
    EXPECTATION_OF_F = "expectation_of_f"
    PROB_GEQ = "prob_geq"
    VAR = "var"
    CVAR = "cvar"
    RHO_MIN = "rho_min"
    RHO_MAX = "rho_max"
    RHO_BAR = "rho_bar"


@dataclass(frozen=True)
class RiskMeasure:
    """A named, parameterised functional Distribution -> float.

    ``breakpoints`` describes the nondecreasing step function of
    ``EXPECTATION_OF_F`` as ``((t0, v0), (t1, v1), ...)``: f(t) = v_i on
    ``[t_i, t_{i+1})`` and 0 before ``t0``.  ``None`` means f(t) = t, i.e. the mean.
    """

    kind: RiskKind
    tau: Optional[int] = None
    beta: Optional[float] = None
    breakpoints: Optional[tuple] = None
    threshold: Optional[int] = None
    weight: Optional[int] = None
    consistent: bool = True

    def __post_init__(self):
        k = self.kind
        if k is RiskKind.PROB_GEQ and (self.tau is None or self.tau < 0):
            raise ValueError("P(X >= tau) needs an integer tau >= 0")
        if k in (RiskKind.VAR, RiskKind.CVAR):
            if self.beta is None or not 0.0 <= self.beta <= 1.0:
                raise ValueError("beta must lie in [0, 1]")
        if k is RiskKind.EXPECTATION_OF_F and self.breakpoints is not None:
            ts = [t for t, _ in self.breakpoints]
            vs = [v for _, v in self.breakpoints]
            if not ts:
                raise ValueError("empty breakpoint table")
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError("breakpoint times must be strictly increasing")
            if vs[0] < 0 or any(b < a for a, b in zip(vs, vs[1:])):
                raise ValueError("step function must be nonnegative and nondecreasing")
        if k in (RiskKind.RHO_MAX, RiskKind.RHO_BAR) and self.threshold is None:
            raise ValueError("rho_max needs the threshold M")
        if k is RiskKind.RHO_BAR and self.weight is None:
            raise ValueError("rho_bar needs the weight W (total arc cost)")

    @property
    def name(self) -> str:
        k = self.kind
        if k is RiskKind.PROB_GEQ:
            return f"P(X>={self.tau})"
        if k is RiskKind.VAR:
            return f"VaR_{self.beta:g}"
        if k is RiskKind.CVAR:
            return f"CVaR_{self.beta:g}"
        if k is RiskKind.EXPECTATION_OF_F:
            return "E[X]" if self.breakpoints is None else "E[f(X)]"
        return k.value

    @property
    def sup(self) -> float:
        """Supremum of the measure over all distributions."""
        if self.kind in (RiskKind.PROB_GEQ, RiskKind.RHO_MAX):
            return 1.0
        if self.kind is RiskKind.EXPECTATION_OF_F and self.breakpoints is not None:
            return float(self.breakpoints[-1][1])
        return math.inf

    def __call__(self, x) -> float:
        return evaluate(self, x)


def mean() -> RiskMeasure:
    return RiskMeasure(RiskKind.EXPECTATION_OF_F)


def step_cost(breakpoints) -> RiskMeasure:
    return RiskMeasure(
        RiskKind.EXPECTATION_OF_F,
        breakpoints=tuple((int(t), float(v)) for t, v in breakpoints),
    )


def prob_geq(tau: int) -> RiskMeasure:
    return RiskMeasure(RiskKind.PROB_GEQ, tau=int(tau))


def value_at_risk(beta: float) -> RiskMeasure:
    return RiskMeasure(RiskKind.VAR, beta=float(beta))


def cvar(beta: float) -> RiskMeasure:
    # E[X | X >= VaR] is not monotone on discrete laws:
    # {0:.4, 1:.1, 10:.5} <=st {1:.5, 10:.5} yet CVaR_.5 is 8.5 vs 5.5
    return RiskMeasure(RiskKind.CVAR, beta=float(beta), consistent=False)


def rho_min() -> RiskMeasure:
    return RiskMeasure(RiskKind.RHO_MIN)


def rho_max(threshold: int) -> RiskMeasure:
    return RiskMeasure(RiskKind.RHO_MAX, threshold=int(threshold))


def rho_bar(threshold: int, weight: int) -> RiskMeasure:
    return RiskMeasure(RiskKind.RHO_BAR, threshold=int(threshold), weight=int(weight))


def var_of(x: Distribution, beta: float) -> int:
    """min{t in Z+ : P(X <= t) >= beta}, with ``TOL`` slack on the comparison."""
    return int(kernels.quantile(x.cdf_array, x.offset, float(beta), TOL))


def _step_values(breakpoints, ts: np.ndarray) -> np.ndarray:
    bt = np.array([t for t, _ in breakpoints])
    bv = np.array([v for _, v in breakpoints], dtype=np.float64)
    idx = np.searchsorted(bt, ts, side="right") - 1
    return np.where(idx < 0, 0.0, bv[np.maximum(idx, 0)])


def evaluate(rho: RiskMeasure, x) -> float:
    if x.is_infinite:
        raise InfiniteOperand("risk of PLUS_INFINITY is undefined")
    k = rho.kind
    if k is RiskKind.PROB_GEQ:
        i = rho.tau - 1 - x.offset
        if i < 0:
            return 1.0
        if i >= len(x):
            return 0.0
        return float(1.0 - x.cdf_array[i])
    if k is RiskKind.VAR:
        return float(var_of(x, rho.beta))
    if k is RiskKind.CVAR:
        return float(kernels.upper_tail_mean(x.pmf, x.offset, var_of(x, rho.beta)))
    if k is RiskKind.EXPECTATION_OF_F:
        if rho.breakpoints is None:
            return expectation(x)
        ts = np.arange(x.offset, x.max_support + 1)
        return float(np.dot(_step_values(rho.breakpoints, ts), x.pmf))
    if k is RiskKind.RHO_MIN:
        return float(x.min_support)
    if k is RiskKind.RHO_MAX:
        return 0.0 if x.max_support <= rho.threshold else 1.0
    if k is RiskKind.RHO_BAR:
        big = 0.0 if x.max_support <= rho.threshold else 1.0
        return float(x.min_support) + rho.weight * big
    raise ValueError(f"unknown risk kind {k}")  # pragma: no cover


def evaluate_sum(rho: RiskMeasure, y: Distribution, z: Distribution) -> float:
    """rho(Y + Z) for independent Y, Z, skipping the convolution when possible."""
    if y.is_infinite or z.is_infinite:
        raise InfiniteOperand("risk of PLUS_INFINITY is undefined")
    k = rho.kind
    if k is RiskKind.PROB_GEQ:
        # the shorter operand drives the dot product
        if len(y) > len(z):
            y, z = z, y
        return float(kernels.tail_of_sum(y.pmf, y.offset, z.cdf_array, z.offset, rho.tau))
    if k is RiskKind.EXPECTATION_OF_F and rho.breakpoints is None:
        return expectation(y) + expectation(z)
    if k is RiskKind.RHO_MIN:
        return float(y.min_support + z.min_support)
    if k in (RiskKind.RHO_MAX, RiskKind.RHO_BAR):
        top = y.max_support + z.max_support
        big = 0.0 if top <= rho.threshold else 1.0
        if k is RiskKind.RHO_MAX:
            return big
        return float(y.min_support + z.min_support) + rho.weight * big
    return evaluate(rho, convolve(y, z))


# ---------------------------------------------------------------- property helper


def _random_distribution(rng: np.random.Generator, max_len: int = 12, max_offset: int = 8):
    n = int(rng.integers(1, max_len + 1))
    p = rng.random(n)
    if rng.random() < 0.3:
        p[rng.random(n) < 0.4] = 0.0
    if p.sum() == 0.0:
        p[0] = 1.0
    return from_pmf(int(rng.integers(0, max_offset + 1)), p / p.sum())


def random_ordered_pair(rng: np.random.Generator):
    """Draw (X, Y) with X <=st Y by construction."""
    how = int(rng.integers(0, 4))
    y = _random_distribution(rng)
    if how == 0:
        # X + W with W >= 0
        x = _random_distribution(rng)
        return x, convolve(x, _random_distribution(rng, max_len=6, max_offset=3))
    if how == 1:
        # meet is below both arguments
        return meet(y, _random_distribution(rng)), y
    if how == 2:
        # the max of k iid copies has CDF F^k <= F
        power = int(rng.integers(2, 4))
        return y, from_cdf(y.offset, y.cdf_array**power)
    # shift to the right
    return y, Distribution(y.offset + int(rng.integers(0, 4)), y.pmf, y.cdf_array)


def find_counterexample(
    rho: Callable[[Distribution], float], trials: int, seed, tol: float = 1e-9
):
    """Return the first constructed pair X <=st Y with rho(X) > rho(Y), or None."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        x, y = random_ordered_pair(rng)
        if rho(x) > rho(y) + tol:
            return x, y
    return None


def check_consistency(rho: Callable[[Distribution], float], trials: int, seed) -> bool:
    """Randomised check that ``rho`` is monotone for the usual stochastic order."""
    return find_counterexample(rho, trials, seed) is None
