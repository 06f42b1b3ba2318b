"""Hot numeric kernels, each in a numba and a numpy flavour.

All CDF arrays passed here describe a distribution on ``offset, offset+1, ...``
and are implicitly 0 before the offset and 1 past the last entry.  The
public names at the bottom are bound to one flavour according to
``STOCHROUTE_BACKEND``; ``NUMPY_KERNELS`` and ``NUMBA_KERNELS`` expose both
for benchmarking and parity tests.
"""
import numpy as np

from ._backend import BACKEND, HAS_NUMBA, njit

# ---------------------------------------------------------------- numpy


def _np_conv_direct(a, b):
    return np.convolve(a, b)


def _np_cdf_at(cdf, off, ts):
    idx = ts - off
    out = cdf[np.clip(idx, 0, cdf.shape[0] - 1)]
    out = np.where(idx < 0, 0.0, out)
    return np.where(idx >= cdf.shape[0], 1.0, out)


def _np_first_violation(cdf_x, off_x, cdf_y, off_y, tol):
    ts = np.arange(off_y, off_y + cdf_y.shape[0])
    fx = _np_cdf_at(cdf_x, off_x, ts)
    hits = np.flatnonzero(fx < cdf_y - tol)
    if hits.shape[0] == 0:
        return -1
    return int(ts[hits[0]])


def _np_meet(cdf_x, off_x, cdf_y, off_y):
    lo = min(off_x, off_y)
    hi = min(off_x + cdf_x.shape[0], off_y + cdf_y.shape[0]) - 1
    ts = np.arange(lo, hi + 1)
    out = np.maximum(_np_cdf_at(cdf_x, off_x, ts), _np_cdf_at(cdf_y, off_y, ts))
    out[-1] = 1.0
    return lo, out


def _np_relax(cdf_v, off_v, cdf_y, off_y, tol):
    t = _np_first_violation(cdf_v, off_v, cdf_y, off_y, tol)
    if t < 0:
        return -1, off_v, np.empty(0)
    lo, cdf = _np_meet(cdf_v, off_v, cdf_y, off_y)
    return t, lo, cdf


def _np_tail_of_sum(pmf_y, off_y, cdf_z, off_z, tau):
    # P(Y + Z >= tau) = 1 - sum_k P(Y = k) F_Z(tau - 1 - k)
    ks = np.arange(off_y, off_y + pmf_y.shape[0])
    fz = _np_cdf_at(cdf_z, off_z, tau - 1 - ks)
    return 1.0 - float(np.dot(pmf_y, fz))


def _np_quantile(cdf, off, beta, tol):
    if beta <= tol:
        return 0
    hits = np.flatnonzero(cdf >= beta - tol)
    return int(off + hits[0])


def _np_upper_tail_mean(pmf, off, v):
    start = max(v - off, 0)
    tail = pmf[start:]
    ts = np.arange(off + start, off + pmf.shape[0], dtype=np.float64)
    return float(np.dot(ts, tail) / tail.sum())


NUMPY_KERNELS = {
    "conv_direct": _np_conv_direct,
    "first_violation": _np_first_violation,
    "meet": _np_meet,
    "relax": _np_relax,
    "tail_of_sum": _np_tail_of_sum,
    "quantile": _np_quantile,
    "upper_tail_mean": _np_upper_tail_mean,
}

# ---------------------------------------------------------------- numba


@njit(cache=True)
def _nb_conv_direct(a, b):
    na = a.shape[0]
    nb = b.shape[0]
    out = np.zeros(na + nb - 1)
    for i in range(na):
        ai = a[i]
        if ai == 0.0:
            continue
        for j in range(nb):
            out[i + j] += ai * b[j]
    return out


@njit(cache=True)
def _nb_cdf_at(cdf, off, t):
    i = t - off
    if i < 0:
        return 0.0
    if i >= cdf.shape[0]:
        return 1.0
    return cdf[i]


@njit(cache=True)
def _nb_first_violation(cdf_x, off_x, cdf_y, off_y, tol):
    for i in range(cdf_y.shape[0]):
        t = off_y + i
        if _nb_cdf_at(cdf_x, off_x, t) < cdf_y[i] - tol:
            return t
    return -1


@njit(cache=True)
def _nb_meet(cdf_x, off_x, cdf_y, off_y):
    lo = min(off_x, off_y)
    hi = min(off_x + cdf_x.shape[0], off_y + cdf_y.shape[0]) - 1
    out = np.empty(hi - lo + 1)
    for i in range(out.shape[0]):
        t = lo + i
        out[i] = max(_nb_cdf_at(cdf_x, off_x, t), _nb_cdf_at(cdf_y, off_y, t))
    out[-1] = 1.0
    return lo, out


@njit(cache=True)
def _nb_relax(cdf_v, off_v, cdf_y, off_y, tol):
    t = _nb_first_violation(cdf_v, off_v, cdf_y, off_y, tol)
    if t < 0:
        return -1, off_v, np.empty(0)
    lo, out = _nb_meet(cdf_v, off_v, cdf_y, off_y)
    return t, lo, out


@njit(cache=True)
def _nb_tail_of_sum(pmf_y, off_y, cdf_z, off_z, tau):
    acc = 0.0
    for i in range(pmf_y.shape[0]):
        acc += pmf_y[i] * _nb_cdf_at(cdf_z, off_z, tau - 1 - (off_y + i))
    return 1.0 - acc


@njit(cache=True)
def _nb_quantile(cdf, off, beta, tol):
    if beta <= tol:
        return 0
    for i in range(cdf.shape[0]):
        if cdf[i] >= beta - tol:
            return off + i
    return off + cdf.shape[0] - 1


@njit(cache=True)
def _nb_upper_tail_mean(pmf, off, v):
    num = 0.0
    den = 0.0
    for i in range(max(v - off, 0), pmf.shape[0]):
        num += (off + i) * pmf[i]
        den += pmf[i]
    return num / den


if HAS_NUMBA:
    NUMBA_KERNELS = {
        "conv_direct": _nb_conv_direct,
        "first_violation": _nb_first_violation,
        "meet": _nb_meet,
        "relax": _nb_relax,
        "tail_of_sum": _nb_tail_of_sum,
        "quantile": _nb_quantile,
        "upper_tail_mean": _nb_upper_tail_mean,
    }
else:  # pragma: no cover
    NUMBA_KERNELS = {}

_active = NUMBA_KERNELS if BACKEND == "numba" else NUMPY_KERNELS

conv_direct = _active["conv_direct"]
first_violation = _active["first_violation"]
meet = _active["meet"]
relax = _active["relax"]
tail_of_sum = _active["tail_of_sum"]
quantile = _active["quantile"]
upper_tail_mean = _active["upper_tail_mean"]
