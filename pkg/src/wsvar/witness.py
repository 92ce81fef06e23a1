"""Comb witness construction for the unbounded-indicator case.

When the inclusion indicator grows without bound, one can build a function
of finite weighted p-variation whose length-constrained variation is
infinite.  Level k of the construction picks a resolution index n_k with
floor(delta(n_k)) >= 2^(k+2) and indicator value above 2^(2k+(k+1)/q(1)),
takes m_k as the integer attaining the indicator max, and lays a comb of
N_k = min(m_k, s_k) teeth of width 1/floor(delta(n_k)) and height
2^(-k) * Phi_k^(1/p) (Phi_k = 1/H(m_k)) inside [1/2^k, 1/2^(k-1)).  The
level supports are disjoint; each level alone forces the length-constrained
variation above 2^k, while the summed norms stay below 2^(1/p).

Combs are kept parametric (tooth counts can exceed 2^40); evaluation at a
rational point resolves the level from its dyadic range and the tooth by
exact arithmetic.  Verification recomputes every inequality of the chain,
integer ones exactly and real ones in log-domain with 1e-9 relative slack.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .criterion import DEFAULT_SCAN_BUDGET, hps_indicator
from .errors import ChainViolation, GuardExceeded, WitnessNotFound
from .stepfn import ONE, ZERO, StepFunction
from .wiener import wiener_variation

LN2 = math.log(2.0)
LOG_SLACK = 1e-9

DEFAULT_N_SEARCH_LIMIT = 200
MATERIALIZE_MAX_BREAKPOINTS = 10_000


@dataclass(frozen=True)
class WitnessLevel:
    k: int
    n_k: int
    m_k: int
    phi_k: float
    s_k: int
    teeth: int            # N_k = min(m_k, s_k)
    delta_floor: int
    q_nk: float
    indicator_log: float  # ln of the indicator row value at n_k
    exact: bool

    def to_dict(self):
        return {"k": self.k, "n_k": self.n_k, "m_k": self.m_k,
                "phi_k": self.phi_k, "s_k": self.s_k, "teeth": self.teeth,
                "delta_floor": self.delta_floor, "q_nk": self.q_nk,
                "indicator_log": self.indicator_log, "exact": self.exact}


@dataclass
class WitnessParams:
    levels: list
    p: float
    q1: float
    n_search_limit: int

    def to_dict(self):
        return {"p": self.p, "q1": self.q1,
                "n_search_limit": self.n_search_limit,
                "levels": [lv.to_dict() for lv in self.levels]}


def _threshold_log(k, q1):
    return (2 * k + (k + 1) / q1) * LN2


def find_witness_levels(lams, p, q_spec, delta_spec, level_count,
                        n_search_limit=DEFAULT_N_SEARCH_LIMIT,
                        scan_budget=DEFAULT_SCAN_BUDGET):
    """Scan n upward (strictly increasing across levels) for level_count
    admissible levels; WitnessNotFound is evidence the indicator stays
    bounded."""
    if level_count < 1:
        raise ValueError("level_count must be >= 1")
    q1 = q_spec.value_at(1)
    levels = []
    n = 0
    for k in range(1, level_count + 1):
        thr = _threshold_log(k, q1)
        found = None
        while n < n_search_limit:
            n += 1
            d = delta_spec.floor_at(n)
            if d < 2 ** (k + 2):
                continue
            row = hps_indicator(lams, p, q_spec, delta_spec, n, scan_budget)
            if row.value_log > thr:
                m = row.k_star
                phi = 1.0 / lams.partial_sum_extended(m)[0]
                s = (d + 2**k) // 2 ** (k + 1)
                found = WitnessLevel(k, n, m, phi, s, min(m, s), d,
                                     q_spec.value_at(n), row.value_log,
                                     row.exact)
                break
        if found is None:
            raise WitnessNotFound(k, n_search_limit)
        levels.append(found)
    return WitnessParams(levels, float(p), q1, n_search_limit)


@dataclass(frozen=True)
class CombLevel:
    k: int
    start: Fraction
    tooth_width: Fraction
    teeth: int
    height: float

    @property
    def period(self):
        return 2 * self.tooth_width

    @property
    def span_end(self):
        """End of the last tooth (exclusive)."""
        return self.start + (2 * self.teeth - 1) * self.tooth_width

    def to_dict(self):
        return {"k": self.k,
                "start": str(self.start),
                "tooth_width": str(self.tooth_width),
                "period": str(self.period),
                "teeth": self.teeth,
                "height": self.height,
                "start_approx": float(self.start),
                "tooth_width_approx": float(self.tooth_width)}


class CombFunction:
    """Union of per-level combs, evaluated lazily by exact arithmetic."""

    def __init__(self, levels):
        self.levels = sorted(levels, key=lambda lv: lv.k)

    def evaluate(self, x):
        x = x if isinstance(x, Fraction) else Fraction(x)
        if not (ZERO <= x <= ONE):
            raise ValueError(f"{x} outside [0, 1]")
        for lv in self.levels:
            if lv.start <= x < 2 * lv.start:
                u = (x - lv.start) / lv.tooth_width
                j = u.numerator // u.denominator
                if j < 2 * lv.teeth - 1 and j % 2 == 0:
                    return lv.height
                return 0.0
        return 0.0

    def to_dict(self):
        return {"levels": [lv.to_dict() for lv in self.levels]}


def build_witness(params):
    """Parametric comb for the found levels; heights fold in 1/p."""
    levels = []
    for lv in params.levels:
        height = math.exp(-lv.k * LN2 + math.log(lv.phi_k) / params.p)
        levels.append(CombLevel(lv.k, Fraction(1, 2**lv.k),
                                Fraction(1, lv.delta_floor), lv.teeth, height))
    return CombFunction(levels)


@dataclass
class NormChainReport:
    per_level_bound: list
    total_bound: float
    holds: bool

    def to_dict(self):
        return {"per_level_bound": self.per_level_bound,
                "total_bound": self.total_bound, "holds": self.holds}


def verify_witness_norm(params, lams):
    """Recompute the norm chain: each level's variation bound is at most
    2^(-k) * (2 H(N_k) Phi_k)^(1/p) which is at most 2^(-k) * 2^(1/p)."""
    p = params.p
    per_level = []
    for lv in params.levels:
        ln_phi = math.log(lv.phi_k)
        ln_h2n = math.log(lams.partial_sum_extended(2 * lv.teeth)[0])
        ln_hn = math.log(lams.partial_sum_extended(lv.teeth)[0])
        lhs = -lv.k * LN2 + (ln_phi + ln_h2n) / p
        mid = -lv.k * LN2 + (LN2 + ln_hn + ln_phi) / p
        top = -lv.k * LN2 + LN2 / p
        if lhs > mid + LOG_SLACK:
            raise ChainViolation(lv.k, "fold_pairs",
                                 f"H(2N)={math.exp(ln_h2n)} > 2 H(N)")
        if mid > top + LOG_SLACK:
            raise ChainViolation(lv.k, "phi_cancel",
                                 f"H(N) Phi = {math.exp(ln_hn) * lv.phi_k} > 1")
        per_level.append(math.exp(lhs))
    total = sum(per_level)
    cap = 2 ** (1.0 / p) * sum(2.0**-lv.k for lv in params.levels)
    holds = total <= cap * (1 + LOG_SLACK)
    if not holds:
        raise ChainViolation(0, "total", f"sum {total} > {cap}")
    return NormChainReport(per_level, total, holds)


def verify_witness_variation_lowerbound(params, lams, k):
    """Value of the explicit 2N_k - 1 abutting-interval partition, checked
    against 2^k through the integer steps of the chain."""
    lv = next((x for x in params.levels if x.k == k), None)
    if lv is None:
        raise ValueError(f"no level {k} in params")
    p = params.p
    if lv.delta_floor < 2 ** (k + 2):
        raise ChainViolation(k, "delta_floor",
                             f"{lv.delta_floor} < 2^{k + 2}")
    # s_k maximal with 2 s <= delta/2^k + 1, in integers
    if not (2 * lv.s_k * 2**k <= lv.delta_floor + 2**k
            < 2 * (lv.s_k + 1) * 2**k):
        raise ChainViolation(k, "s_def", f"s_k={lv.s_k} not maximal")
    if (2 * lv.s_k - 1) * 2 ** (k + 1) < lv.delta_floor:
        raise ChainViolation(k, "tooth_span",
                             "(2 s - 1)/delta < 2^(-k-1)")
    if (2 * lv.teeth - 1) * 2 ** (k + 1) < lv.m_k:
        raise ChainViolation(k, "tooth_count", "2 N - 1 < m / 2^(k+1)")
    # the indicator value at m_k must clear the admission threshold
    ln_h_m = math.log(lams.partial_sum_extended(lv.m_k)[0])
    v_log = math.log(lv.m_k) / lv.q_nk - ln_h_m / p
    thr = _threshold_log(k, params.q1)
    if v_log <= thr - LOG_SLACK:
        raise ChainViolation(k, "indicator_threshold",
                             f"value ln {v_log} <= threshold ln {thr}")
    lower_log = (math.log(2 * lv.teeth - 1) / lv.q_nk
                 - k * LN2 + math.log(lv.phi_k) / p)
    if lower_log < k * LN2 - LOG_SLACK:
        raise ChainViolation(k, "lower_bound",
                             f"partition value ln {lower_log} < k ln 2")
    return math.exp(lower_log), True


@dataclass
class CrossCheckReport:
    skipped: bool
    reason: str
    dp_value: float
    analytic_bound: float
    holds: bool

    def to_dict(self):
        return {"skipped": self.skipped, "reason": self.reason,
                "dp_value": self.dp_value,
                "analytic_bound": self.analytic_bound, "holds": self.holds}


def materialize_witness(params, max_breakpoints=MATERIALIZE_MAX_BREAKPOINTS):
    """Explicit StepFunction for small combs; GuardExceeded when the tooth
    count would blow up the breakpoint list."""
    comb = build_witness(params)
    total = sum(2 * lv.teeth + 1 for lv in comb.levels) + 2
    if total > max_breakpoints:
        raise GuardExceeded(
            f"materializing needs ~{total} breakpoints > {max_breakpoints}")
    bps = [ZERO]
    vals = []
    cur = ZERO
    for lv in sorted(comb.levels, key=lambda l: l.start):
        for j in range(lv.teeth):
            a = lv.start + 2 * j * lv.tooth_width
            b = a + lv.tooth_width
            if a > cur:
                vals.append(0.0)
                bps.append(a)
            vals.append(lv.height)
            bps.append(b)
            cur = b
    if cur < ONE:
        vals.append(0.0)
        bps.append(ONE)
    return StepFunction(bps, vals, value_at_one=0.0)


def cross_check_witness_small(params, lams, q_spec, delta_spec,
                              max_breakpoints=MATERIALIZE_MAX_BREAKPOINTS):
    """Materialize the comb, run the length-constrained DP over all n_k and
    compare with the analytic per-level lower bounds."""
    if not params.levels:
        return CrossCheckReport(False, "no levels: nothing to check",
                                0.0, 0.0, True)
    try:
        f = materialize_witness(params, max_breakpoints)
    except GuardExceeded as exc:
        return CrossCheckReport(True, str(exc), float("nan"), float("nan"),
                                True)
    horizon = max(lv.n_k for lv in params.levels)
    report = wiener_variation(f, q_spec, delta_spec, horizon)
    bound = max(verify_witness_variation_lowerbound(params, lams, lv.k)[0]
                for lv in params.levels)
    holds = report.value >= bound * (1 - LOG_SLACK)
    if not holds:
        raise ChainViolation(0, "cross_check",
                             f"DP value {report.value} < bound {bound}")
    return CrossCheckReport(False, "", report.value, bound, holds)
