"""Length-constrained variation over a finite range of resolution levels.

For each level n the inner problem maximizes sum_k |f(I_k)|^q(n) over
nonoverlapping families whose intervals all have length >= 1/delta(n); the
level value is that maximum to the power 1/q(n), and the result is the max
over n <= horizon.  Gains and running sums are carried as logarithms because
q(n) reaches the hundreds.

The inner maximization is a weighted-interval-scheduling DP over a refined
endpoint grid: the breakpoints of f plus each breakpoint shifted by
+-1/delta(n) (an optimal interval can usually be slid so each endpoint is a
breakpoint or exactly the minimum length away from one; the DP is exact over
this grid, which is the contract).  A small-instance exhaustive oracle with
the same signature cross-checks the DP.
"""

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import GuardExceeded, HorizonTooSmall
from .stepfn import ONE, ZERO, Interval, IntervalFamily

NEG_INF = float("-inf")

DEFAULT_ORACLE_MAX_GRID = 24


@dataclass
class WienerRow:
    n: int
    q: float
    delta: float
    inner_value_log: float
    value: float
    family: IntervalFamily

    def to_dict(self):
        return {"n": self.n, "q": self.q, "delta": self.delta,
                "inner_value_log": self.inner_value_log, "value": self.value,
                "family": self.family.to_lists()}


@dataclass
class WienerReport:
    value: float
    attaining_n: int
    per_n: list
    truncated_at: int

    def to_dict(self):
        return {"value": self.value, "attaining_n": self.attaining_n,
                "truncated_at": self.truncated_at,
                "per_n": [r.to_dict() for r in self.per_n]}

    def csv_rows(self):
        yield ("n", "q", "min_length", "inner_value_log", "value")
        for r in self.per_n:
            yield (r.n, r.q, 1.0 / r.delta, r.inner_value_log, r.value)


def refined_grid(f, min_length):
    """Breakpoints of f plus breakpoints +- min_length, clipped to [0, 1]."""
    pts = set(f.breakpoints)
    for b in f.breakpoints:
        for x in (b - min_length, b + min_length):
            if ZERO <= x <= ONE:
                pts.add(x)
    return sorted(pts)


def _level_inputs(f, q_spec, delta_spec, n):
    qn = q_spec.value_at(n)
    dn = delta_spec.value_at(n)
    min_length = Fraction(1) / Fraction(dn)
    pts = refined_grid(f, min_length)
    vals = [f.evaluate(x) for x in pts]
    return qn, dn, min_length, pts, vals


def _solve_level(f, q_spec, delta_spec, n):
    qn, dn, min_length, pts, vals = _level_inputs(f, q_spec, delta_spec, n)
    e = len(pts)
    varr = np.asarray(vals)
    diff = np.abs(varr[None, :] - varr[:, None])
    with np.errstate(divide="ignore"):
        gains = qn * np.log(diff)
    pred = np.empty(e, dtype=np.int64)
    for j in range(e):
        # rightmost i with pts[i] <= pts[j] - min_length, exact comparison
        pred[j] = bisect_right(pts, pts[j] - min_length) - 1
    m, sel = _kernels.wis_dp(gains, pred)
    inner_log = float(m[e - 1])
    fam = []
    j = e - 1
    while j > 0:
        i = int(sel[j])
        if i >= 0:
            fam.append(Interval(pts[i], pts[j]))
            j = i
        else:
            j -= 1
    return WienerRow(n, qn, dn, inner_log,
                     math.exp(inner_log / qn) if inner_log > NEG_INF else 0.0,
                     IntervalFamily(fam))


def wiener_variation(f, q_spec, delta_spec, horizon):
    """Max over n <= horizon of the level values; reports every level."""
    horizon = int(horizon)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if delta_spec.value_at(1) < 1.0:
        raise HorizonTooSmall("delta(1) < 1 admits no interval inside [0, 1]")
    rows = [_solve_level(f, q_spec, delta_spec, n)
            for n in range(1, horizon + 1)]
    best = max(rows, key=lambda r: r.value)
    return WienerReport(best.value, best.n, rows, horizon)


def wiener_bruteforce(f, q_spec, delta_spec, horizon,
                      max_grid=DEFAULT_ORACLE_MAX_GRID):
    """Exhaustive maximum over every family on the refined grid.

    Independent of the scheduling DP: recursion over the leftmost admitted
    start point with direct exact length tests, no interval sorting and no
    predecessor index.  Guarded by grid size.
    """
    horizon = int(horizon)
    if delta_spec.value_at(1) < 1.0:
        raise HorizonTooSmall("delta(1) < 1 admits no interval inside [0, 1]")
    rows = []
    for n in range(1, horizon + 1):
        qn, dn, min_length, pts, vals = _level_inputs(f, q_spec, delta_spec, n)
        e = len(pts)
        if e > max_grid:
            raise GuardExceeded(f"refined grid has {e} points > {max_grid}")
        # suffix[s] = best log-sum over families whose intervals start at
        # point index >= s; zero-increment intervals are dominated by the
        # skip transition and never help
        suffix = [NEG_INF] * e
        for s in range(e - 2, -1, -1):
            best = suffix[s + 1]
            for j in range(s + 1, e):
                if pts[j] - pts[s] >= min_length and vals[j] != vals[s]:
                    g = qn * math.log(abs(vals[j] - vals[s]))
                    cont = suffix[j]
                    cand = g if cont == NEG_INF else (
                        max(g, cont) + math.log1p(math.exp(-abs(g - cont))))
                    if cand > best:
                        best = cand
            suffix[s] = best
        inner_log = suffix[0]
        rows.append(WienerRow(n, qn, dn, inner_log,
                              math.exp(inner_log / qn) if inner_log > NEG_INF else 0.0,
                              IntervalFamily(())))
    best = max(rows, key=lambda r: r.value)
    return WienerReport(best.value, best.n, rows, horizon)


@dataclass
class DegenerateReport:
    bounded: bool
    sup_value: float
    attaining_n: int
    per_n: list

    def to_dict(self):
        return {"bounded": self.bounded, "sup_value": self.sup_value,
                "attaining_n": self.attaining_n, "per_n": self.per_n}


def is_degenerate_wiener(q_spec, delta_spec, horizon):
    """Evidence that delta(n)^(1/q(n)) stays bounded, which collapses the
    class to all bounded functions."""
    horizon = int(horizon)
    vals = [math.exp(delta_spec.ln_value_at(n) / q_spec.value_at(n))
            for n in range(1, horizon + 1)]
    sup = max(vals)
    at = vals.index(sup) + 1
    quarter = max(1, horizon // 4)
    head = vals[:-quarter] if horizon > quarter else vals
    bounded = max(vals[-quarter:]) <= max(head) * (1 + 1e-12)
    return DegenerateReport(bounded, sup, at, vals)
