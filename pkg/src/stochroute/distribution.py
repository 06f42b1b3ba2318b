"""Finite-support distributions on the nonnegative integers.

A :class:`Distribution` stores a dense pmf starting at an integer offset.
Its CDF is computed once and cached.  :data:`PLUS_INFINITY` is the identity
of :func:`meet`; its CDF is identically 0.
"""
from __future__ import annotations

import numpy as np
import scipy.fft

from . import kernels
from .errors import EmptySupport, InfiniteOperand, NegativeProbability, SumNotOne

#: slack accepted on user-supplied probability vectors
INPUT_TOL = 1e-9
#: tolerance of every internal CDF comparison
TOL = 1e-12
#: direct convolution when the shorter operand is below this length
FFT_THRESHOLD = 64


class Distribution:
    """Immutable pmf over ``offset, offset + 1, ...``.

    The first and last pmf entries are strictly positive.  Use
    :func:`from_pmf` to build one from untrusted input.
    """

    __slots__ = ("offset", "pmf", "_cdf")
    is_infinite = False

    def __init__(self, offset: int, pmf: np.ndarray, cdf: np.ndarray | None = None):
        self.offset = int(offset)
        self.pmf = pmf
        self.pmf.flags.writeable = False
        if cdf is not None:
            cdf.flags.writeable = False
        # built on first use; labels in a queue often never need it
        self._cdf = cdf

    @property
    def cdf_array(self) -> np.ndarray:
        if self._cdf is None:
            cdf = np.minimum(np.cumsum(self.pmf), 1.0)
            cdf[-1] = 1.0
            cdf.flags.writeable = False
            self._cdf = cdf
        return self._cdf

    @property
    def min_support(self) -> int:
        return self.offset

    @property
    def max_support(self) -> int:
        return self.offset + self.pmf.shape[0] - 1

    def __len__(self):
        return self.pmf.shape[0]

    def __repr__(self):
        if len(self) <= 8:
            items = ", ".join(
                f"{self.offset + i}: {p:.6g}" for i, p in enumerate(self.pmf) if p > 0
            )
            return f"Distribution({{{items}}})"
        return f"Distribution(offset={self.offset}, len={len(self)}, mean={expectation(self):.6g})"

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.pmf, other.pmf)

    __hash__ = None

    def cdf(self, t: int) -> float:
        return cdf(self, t)

    def to_dict(self) -> dict:
        return {"offset": self.offset, "pmf": [float(p) for p in self.pmf]}

    @classmethod
    def from_dict(cls, data: dict) -> "Distribution":
        return from_pmf(int(data["offset"]), [float(p) for p in data["pmf"]])


class _PlusInfinity:
    """The meet of the empty collection."""

    __slots__ = ()
    is_infinite = True
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "PLUS_INFINITY"

    def __reduce__(self):
        return (_PlusInfinity, ())

    def cdf(self, t: int) -> float:
        return 0.0


PLUS_INFINITY = _PlusInfinity()


def _trimmed(offset: int, pmf: np.ndarray) -> Distribution:
    nz = np.flatnonzero(pmf > 0.0)
    if nz.shape[0] == 0:
        raise EmptySupport("distribution has no positive mass")
    lo, hi = nz[0], nz[-1]
    return Distribution(offset + int(lo), np.ascontiguousarray(pmf[lo : hi + 1]))


def from_pmf(offset: int, probs) -> Distribution:
    """Validate ``probs`` (probabilities of offset, offset+1, ...) and build a Distribution.

    Leading and trailing zeros are trimmed.  The vector is renormalised when
    its sum is off by more than the internal tolerance.
    """
    pmf = np.array(probs, dtype=np.float64).ravel()
    if pmf.shape[0] == 0:
        raise EmptySupport("empty probability vector")
    if not np.all(np.isfinite(pmf)):
        raise NegativeProbability("probabilities must be finite")
    if np.any(pmf < 0.0):
        raise NegativeProbability(f"negative probability {pmf.min()!r}")
    total = float(pmf.sum())
    if total <= 0.0:
        raise EmptySupport("distribution has no positive mass")
    if abs(total - 1.0) > INPUT_TOL:
        raise SumNotOne(f"probabilities sum to {total!r}")
    if abs(total - 1.0) > TOL:
        pmf = pmf / total
    dist = _trimmed(int(offset), pmf)
    if dist.offset < 0:
        raise NegativeProbability("support must lie in the nonnegative integers")
    return dist


def from_cdf(offset: int, cdf_values: np.ndarray) -> Distribution:
    """Trusted constructor from a nondecreasing CDF ending at exactly 1."""
    cdf_values = np.asarray(cdf_values, dtype=np.float64)
    pmf = np.diff(cdf_values, prepend=0.0)
    nz = np.flatnonzero(pmf > 0.0)
    lo, hi = nz[0], nz[-1]
    return Distribution(
        offset + int(lo),
        np.ascontiguousarray(pmf[lo : hi + 1]),
        np.ascontiguousarray(cdf_values[lo : hi + 1]),
    )


def point_mass(t: int) -> Distribution:
    return Distribution(t, np.ones(1))


ZERO = point_mass(0)


def _finite(x) -> Distribution:
    if x.is_infinite:
        raise InfiniteOperand("operation undefined for PLUS_INFINITY")
    return x


def cdf(x, t: int) -> float:
    """P(X <= t)."""
    if x.is_infinite:
        return 0.0
    i = int(t) - x.offset
    if i < 0:
        return 0.0
    if i >= len(x):
        return 1.0
    return float(x.cdf_array[i])


def first_violation(x, y, tol: float = TOL):
    """Smallest t with F_X(t) < F_Y(t) (beyond ``tol``), or None."""
    if y.is_infinite:
        return None
    if x.is_infinite:
        hits = np.flatnonzero(y.cdf_array > tol)
        return int(y.offset + hits[0]) if hits.shape[0] else None
    t = kernels.first_violation(x.cdf_array, x.offset, y.cdf_array, y.offset, tol)
    return None if t < 0 else int(t)


def leq_st(x, y, tol: float = TOL) -> bool:
    """Usual stochastic order: F_X(t) >= F_Y(t) for every t."""
    return first_violation(x, y, tol) is None


def meet(x, y):
    """Greatest lower bound: the CDF is the pointwise maximum."""
    if x.is_infinite:
        return y
    if y.is_infinite:
        return x
    lo, out = kernels.meet(x.cdf_array, x.offset, y.cdf_array, y.offset)
    return from_cdf(lo, out)


def join(x, y):
    """Least upper bound (pointwise minimum of CDFs); provided for lattice checks."""
    if x.is_infinite or y.is_infinite:
        return PLUS_INFINITY
    lo = min(x.offset, y.offset)
    hi = max(x.max_support, y.max_support)
    ts = np.arange(lo, hi + 1)
    fx = np.array([cdf(x, t) for t in ts])
    fy = np.array([cdf(y, t) for t in ts])
    out = np.minimum(fx, fy)
    out[-1] = 1.0
    return from_cdf(lo, out)


def _fft_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0] + b.shape[0] - 1
    nfft = scipy.fft.next_fast_len(n, real=True)
    out = scipy.fft.irfft(scipy.fft.rfft(a, nfft) * scipy.fft.rfft(b, nfft), nfft)[:n]
    np.maximum(out, 0.0, out=out)
    out /= out.sum()
    return out


def convolve_arrays(a: np.ndarray, b: np.ndarray, method: str = "auto") -> np.ndarray:
    """Convolve two pmf arrays; ``method`` is ``auto``, ``direct`` or ``fft``."""
    if method == "auto":
        method = "direct" if min(a.shape[0], b.shape[0]) < FFT_THRESHOLD else "fft"
    if method == "direct":
        return kernels.conv_direct(a, b)
    return _fft_convolve(a, b)


def convolve(x, y, method: str = "auto") -> Distribution:
    """Distribution of the sum of independent copies of X and Y."""
    x, y = _finite(x), _finite(y)
    if len(x) == 1 and x.pmf[0] == 1.0:
        return Distribution(x.offset + y.offset, y.pmf, y.cdf_array)
    if len(y) == 1 and y.pmf[0] == 1.0:
        return Distribution(x.offset + y.offset, x.pmf, x.cdf_array)
    out = convolve_arrays(x.pmf, y.pmf, method)
    return _trimmed(x.offset + y.offset, out)


def shift(x, k: int) -> Distribution:
    x = _finite(x)
    return Distribution(x.offset + k, x.pmf, x.cdf_array)


def expectation(x) -> float:
    x = _finite(x)
    return float(np.dot(np.arange(x.offset, x.max_support + 1, dtype=np.float64), x.pmf))


def min_support(x) -> int:
    return _finite(x).min_support


def max_support(x) -> int:
    return _finite(x).max_support


def allclose(x, y, tol: float = TOL) -> bool:
    """CDFs agree within ``tol`` at every integer."""
    if x.is_infinite or y.is_infinite:
        return x.is_infinite and y.is_infinite
    lo = min(x.offset, y.offset)
    hi = max(x.max_support, y.max_support)
    return all(abs(cdf(x, t) - cdf(y, t)) <= tol for t in range(lo, hi + 1))
