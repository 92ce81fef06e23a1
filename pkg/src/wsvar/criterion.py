"""Inclusion indicator and the numeric evidence around it.

The indicator at level n is max over integers 1 <= k <= floor(delta(n)) of
k^(1/q(n)) / H(k)^(1/p), with H the reciprocal weight partial sums.  Its
boundedness over n characterizes when every function of finite weighted
p-variation also has finite length-constrained variation; this module only
ever produces finite-horizon *evidence* for that, never a proof.

Small floor(delta(n)) is scanned exactly.  Past the scan budget the maximum
is approximated on a geometric grid with local refinement: the objective's
logarithm is (1/q) log k - (1/p) log H(k), slowly varying in log k, so
geometric sampling with refinement is effective and the result is a lower
bound of the true maximum by construction.  Approximate rows carry
exact=False.
"""

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import NegativeInput, SortViolation
from .seqspec import validate_spec
from .variation import lambda_p_variation
from .wiener import wiener_variation

DEFAULT_SCAN_BUDGET = 1 << 20
_GRID_POINTS = 512
_REFINE_ROUNDS = 3
_DENSE_REFINE_LIMIT = 4096

_lnk_cache = np.empty(0, dtype=np.float64)


def _lnk(count):
    global _lnk_cache
    if _lnk_cache.shape[0] < count:
        _lnk_cache = np.log(np.arange(1, max(count, 1024) + 1, dtype=np.float64))
    return _lnk_cache[:count]


@dataclass
class IndicatorRow:
    n: int
    k_star: int
    value: float
    value_log: float
    exact: bool

    def to_dict(self):
        return {"n": self.n, "k_star": self.k_star, "value": self.value,
                "value_log": self.value_log, "exact": self.exact}


@dataclass
class IndicatorProfile:
    rows: list
    max_value: float
    attaining_n: int
    tail_slope: float

    def to_dict(self):
        return {"rows": [r.to_dict() for r in self.rows],
                "summary": {"max_value": self.max_value,
                            "attaining_n": self.attaining_n,
                            "tail_slope": self.tail_slope}}

    def csv_rows(self):
        yield ("n", "k_star", "value", "exact")
        for r in self.rows:
            yield (r.n, r.k_star, r.value, r.exact)


def _safe_exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return float("inf")


def _geometric_ints(ln_lo, ln_hi, lo, hi, count):
    """Distinct integers in [lo, hi] spread geometrically, ends included."""
    if hi - lo + 1 <= count:
        return list(range(lo, hi + 1))
    ks = set()
    for u in np.linspace(ln_lo, ln_hi, count):
        if u < 690:
            k = int(round(math.exp(u)))
        else:
            k = int(mpmath.nint(mpmath.exp(u)))
        ks.add(min(max(k, lo), hi))
    ks.add(lo)
    ks.add(hi)
    return sorted(ks)


def _exact_scan(lams, p, qn, d):
    lnh = lams.ln_view(d)
    obj = _lnk(d) / qn - lnh / p
    j = int(np.argmax(obj))
    return j + 1, float(obj[j])


def _grid_scan(lams, p, qn, d, ln_d):
    lo, hi = 1, d
    ln_lo, ln_hi = 0.0, ln_d
    best_k, best_log = 1, None
    for rnd in range(_REFINE_ROUNDS + 1):
        dense = hi - lo + 1 <= _DENSE_REFINE_LIMIT
        if dense:
            ks = list(range(lo, hi + 1))
        else:
            count = _GRID_POINTS if rnd == 0 else _GRID_POINTS // 2
            ks = _geometric_ints(ln_lo, ln_hi, lo, hi, count)
        lnh, _ = lams.ln_partial_sums_batch(ks)
        obj = np.array([math.log(k) for k in ks]) / qn - lnh / p
        j = int(np.argmax(obj))
        if (best_log is None or obj[j] > best_log
                or (obj[j] == best_log and ks[j] < best_k)):
            best_log = float(obj[j])
            best_k = ks[j]
        if dense:
            break
        lo = ks[max(0, j - 1)]
        hi = ks[min(len(ks) - 1, j + 1)]
        ln_lo, ln_hi = math.log(lo), math.log(hi)
    return best_k, best_log


def hps_indicator(lams, p, q_spec, delta_spec, n, scan_budget=DEFAULT_SCAN_BUDGET):
    """One indicator row; exact when floor(delta(n)) is within the budget."""
    d = delta_spec.floor_at(n)
    qn = q_spec.value_at(n)
    if d < 1:
        return IndicatorRow(n, 0, 0.0, float("-inf"), True)
    budget = min(int(scan_budget), lams.cache_budget)
    if d <= budget:
        k_star, value_log = _exact_scan(lams, p, qn, d)
        return IndicatorRow(n, k_star, _safe_exp(value_log), value_log, True)
    k_star, value_log = _grid_scan(lams, p, qn, d, delta_spec.ln_value_at(n))
    return IndicatorRow(n, k_star, _safe_exp(value_log), value_log, False)


_DELTA_POW2 = None


def _delta_pow2():
    global _DELTA_POW2
    if _DELTA_POW2 is None:
        _DELTA_POW2 = validate_spec("2^n", "delta", 64)
    return _DELTA_POW2


def goginava_indicator(lams, q_spec, n, scan_budget=DEFAULT_SCAN_BUDGET):
    """The p=1, delta(n)=2^n special case, by definition a delegation."""
    return hps_indicator(lams, 1.0, q_spec, _delta_pow2(), n, scan_budget)


def limsup_profile(lams, p, q_spec, delta_spec, n_range,
                   scan_budget=DEFAULT_SCAN_BUDGET):
    """Rows for each n plus a max summary and a log-log tail trend slope."""
    ns = list(n_range)
    if not ns:
        raise ValueError("n_range must be nonempty")
    rows = [hps_indicator(lams, p, q_spec, delta_spec, n, scan_budget)
            for n in ns]
    best = max(rows, key=lambda r: r.value_log)
    quarter = max(2, len(rows) // 4)
    tail = rows[-quarter:]
    xs = np.array([math.log(r.n) for r in tail])
    ys = np.array([r.value_log for r in tail])
    good = np.isfinite(ys)
    if good.sum() >= 2 and np.ptp(xs[good]) > 0:
        slope = float(np.polyfit(xs[good], ys[good], 1)[0])
    else:
        slope = 0.0
    return IndicatorProfile(rows, best.value, best.n, slope)


VERDICT_INCLUDED = "evidence_included"
VERDICT_EXCLUDED = "evidence_excluded"
VERDICT_INCONCLUSIVE = "inconclusive"


@dataclass
class InclusionReport:
    verdict: str
    profile: IndicatorProfile
    note: str

    def to_dict(self):
        return {"verdict": self.verdict, "note": self.note,
                "profile": self.profile.to_dict()}


def decide_inclusion(lams, p, q_spec, delta_spec, n_range, bound_factor=2.0,
                     slope_threshold=0.05, scan_budget=DEFAULT_SCAN_BUDGET):
    """Finite-horizon verdict on boundedness of the indicator.

    evidence_included: the last quarter's max stays within bound_factor of
    the first quarter's max and the tail slope is nonpositive.
    evidence_excluded: tail slope above the threshold and the last quarter
    grows monotonically.  Anything else is inconclusive.
    """
    profile = limsup_profile(lams, p, q_spec, delta_spec, n_range, scan_budget)
    rows = profile.rows
    quarter = max(1, len(rows) // 4)
    first_max = max(r.value_log for r in rows[:quarter])
    last_rows = rows[-quarter:]
    last_max = max(r.value_log for r in last_rows)
    slope = profile.tail_slope
    monotone_tail = all(b.value_log >= a.value_log - 1e-9
                        for a, b in zip(last_rows, last_rows[1:]))
    if last_max <= first_max + math.log(bound_factor) and slope <= 0.0:
        verdict = VERDICT_INCLUDED
    elif slope > slope_threshold and monotone_tail:
        verdict = VERDICT_EXCLUDED
    else:
        verdict = VERDICT_INCONCLUSIVE
    note = (f"finite-horizon evidence over n in [{rows[0].n}, {rows[-1].n}]; "
            "boundedness of the indicator is not decided by any finite scan")
    return InclusionReport(verdict, profile, note)


def check_rearrangement_inequality(x, y, exponent):
    """sum x_j^q <= (sum x_j y_j)^q * max_k k / (sum_{j<=k} y_j)^q for
    nonincreasing nonnegative x, y with y_1 > 0 and q >= 0.

    Returns (lhs, rhs, holds) with holds at 1e-12 relative slack.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 1:
        raise ValueError("x and y must be 1-d of equal positive length")
    if exponent < 0:
        raise ValueError("exponent must be >= 0")
    if np.any(x < 0) or np.any(y < 0):
        raise NegativeInput("x and y must be nonnegative")
    if np.any(x[1:] > x[:-1]) or np.any(y[1:] > y[:-1]):
        raise SortViolation("x and y must be sorted nonincreasing")
    if y[0] <= 0:
        raise NegativeInput("y_1 must be positive")
    q = float(exponent)
    lhs = float(np.sum(x**q))
    sxy = float(np.sum(x * y))
    cum = np.cumsum(y)
    rhs = sxy**q * float(np.max(np.arange(1, x.size + 1) / cum**q))
    return lhs, rhs, lhs <= rhs * (1 + 1e-12)


def sufficiency_factor(lams, p, q_spec, delta_spec, horizon,
                       scan_budget=DEFAULT_SCAN_BUDGET):
    """max over n <= horizon of the indicator row, the multiplier that
    bounds the length-constrained variation by the weighted p-variation."""
    rows = [hps_indicator(lams, p, q_spec, delta_spec, n, scan_budget)
            for n in range(1, horizon + 1)]
    return max(r.value_log for r in rows)


def check_sufficiency_bound(f, lams, p, q_spec, delta_spec, horizon,
                            scan_budget=DEFAULT_SCAN_BUDGET):
    """Verify V(f, q; delta) <= V_p(f) * factor at the given horizon."""
    lhs = wiener_variation(f, q_spec, delta_spec, horizon).value
    var = lambda_p_variation(f, lams, p).value
    if var == 0.0:
        rhs = 0.0
    else:
        rhs = var * _safe_exp(sufficiency_factor(
            lams, p, q_spec, delta_spec, horizon, scan_budget))
    return lhs, rhs, lhs <= rhs * (1 + 1e-10)
