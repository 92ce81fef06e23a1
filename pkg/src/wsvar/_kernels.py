"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Two loops dominate runtime: compensated prefix accumulation of reciprocal
weight sums (millions of terms) and the log-domain weighted-interval
scheduling DP that the length-constrained variation runs thousands of times.
Both are written twice: an @njit scalar version and a vectorized numpy
version.  Set WSVAR_NO_NUMBA=1 to force the fallback (the benchmark in
benchmarks/bench_kernels.py compares the two).
"""

import math
import os

import numpy as np

_NEG_INF = float("-inf")


def _want_numba():
    if os.environ.get("WSVAR_NO_NUMBA", "").strip() not in ("", "0"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USE_NUMBA = _want_numba()


# ---------------------------------------------------------------------------
# compensated prefix sums
#
# Neumaier running sum carried as (s, c); the stored per-index value s + c is
# the true prefix rounded once, so accumulation error does not grow with the
# number of terms.


def _prefix_sums_py(terms, s, c):
    n = terms.shape[0]
    out = np.empty(n, dtype=np.float64)
    # vectorized emulation: short cumsum blocks on top of an fsum-corrected base
    block = 4096
    start = 0
    while start < n:
        stop = min(n, start + block)
        chunk = terms[start:stop]
        out[start:stop] = (s + c) + np.cumsum(chunk)
        t = math.fsum(chunk)
        # two-sum of t into (s, c)
        s2 = s + t
        if abs(s) >= abs(t):
            c += (s - s2) + t
        else:
            c += (t - s2) + s
        s = s2
        start = stop
    return out, s, c


def _prefix_sums_loop(terms, s, c):
    n = terms.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        t = terms[i]
        s2 = s + t
        if abs(s) >= abs(t):
            c += (s - s2) + t
        else:
            c += (t - s2) + s
        s = s2
        out[i] = s + c
    return out, s, c


# ---------------------------------------------------------------------------
# weighted interval scheduling, log-domain gains
#
# Endpoints are indexed 0..E-1 left to right.  gains[i, j] is the log of the
# reward of the interval (i, j) (-inf when the increment vanishes), pred[j]
# is the largest i with x_j - x_i >= L (-1 when none): feasible starts form a
# prefix because endpoints are sorted.  States carry log(sum of rewards); the
# transition adds a reward, i.e. logaddexp, which preserves the max-order.


def _lae(a, b):
    if a == _NEG_INF:
        return b
    if b == _NEG_INF:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def _wis_dp_loop(gains, pred):
    e = pred.shape[0]
    m = np.empty(e, dtype=np.float64)
    sel = np.full(e, -1, dtype=np.int64)
    m[0] = _NEG_INF
    for j in range(1, e):
        best = m[j - 1]
        choice = -1
        for i in range(pred[j] + 1):
            g = gains[i, j]
            prev = m[i]
            if prev == _NEG_INF:
                cand = g
            elif g == _NEG_INF:
                cand = prev
            else:
                hi = prev if prev > g else g
                lo = g if prev > g else prev
                cand = hi + math.log1p(math.exp(lo - hi))
            if cand > best:
                best = cand
                choice = i
        m[j] = best
        sel[j] = choice
    return m, sel


def _wis_dp_py(gains, pred):
    e = pred.shape[0]
    m = np.empty(e, dtype=np.float64)
    sel = np.full(e, -1, dtype=np.int64)
    m[0] = _NEG_INF
    for j in range(1, e):
        best = m[j - 1]
        choice = -1
        p = pred[j]
        if p >= 0:
            a = m[: p + 1]
            g = gains[: p + 1, j]
            hi = np.maximum(a, g)
            lo = np.minimum(a, g)
            with np.errstate(invalid="ignore"):
                cand = hi + np.log1p(np.exp(lo - hi))
            cand = np.where(hi == _NEG_INF, _NEG_INF, cand)
            cand = np.where(lo == _NEG_INF, hi, cand)
            i = int(np.argmax(cand))
            if cand[i] > best:
                best = float(cand[i])
                choice = i
        m[j] = best
        sel[j] = choice
    return m, sel


if USE_NUMBA:
    from numba import njit

    prefix_sums = njit(cache=True)(_prefix_sums_loop)
    wis_dp = njit(cache=True)(_wis_dp_loop)
else:
    prefix_sums = _prefix_sums_py
    wis_dp = _wis_dp_py


def backend():
    return "numba" if USE_NUMBA else "numpy"


def warmup():
    """Trigger JIT compilation so timed sections measure steady state."""
    prefix_sums(np.array([1.0, 0.5]), 0.0, 0.0)
    g = np.full((2, 2), _NEG_INF)
    g[0, 1] = 0.0
    wis_dp(g, np.array([-1, 0], dtype=np.int64))
