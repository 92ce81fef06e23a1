"""Rank-weighted p-variation of step functions.

The objective over a family of nonoverlapping intervals I_1..I_s is
(sum_r |f(I_(r))|^p / lambda_r)^(1/p) where the increments are matched to
the weights 1/lambda_1 >= 1/lambda_2 >= ... in decreasing order of
magnitude, which is the rearrangement-optimal assignment.  The supremum
over families is computed two ways:

* lambda_p_variation: branch-and-bound over candidate intervals whose
  endpoints realize local extremal values of the piece sequence (the search
  space is validated against the oracle below, not proved minimal);
* lambda_p_variation_bruteforce: exhaustive enumeration over the full
  breakpoint grid, guarded to small functions, in plain (non log-domain)
  arithmetic so the two engines share no numeric path.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, GuardExceeded
from .stepfn import Interval, IntervalFamily

BRUTE_FORCE_MAX_BREAKPOINTS = 12


@dataclass
class VariationReport:
    value: float
    optimal_family: IntervalFamily
    method: str
    nodes_explored: int
    p: float
    lower: float = field(default=None)
    upper: float = field(default=None)

    def to_dict(self):
        d = {"value": self.value,
             "optimal_family": self.optimal_family.to_lists(),
             "method": self.method,
             "nodes_explored": self.nodes_explored,
             "p": self.p}
        if self.lower is not None:
            d["bracket"] = [self.lower, self.upper]
        return d


def _ln_lambdas(lams, count):
    if count == 0:
        return np.empty(0)
    lam = lams.spec.expr.eval_array(np.arange(1, count + 1, dtype=np.float64))
    return np.log(lam)


def _objective_log_domain(sorted_abs_incs, ln_lam, p):
    """(sum |d|^p/lambda_r)^(1/p) with powers taken as exp/log; 0^p := 0."""
    if not sorted_abs_incs:
        return 0.0
    terms = [p * math.log(d) - ln_lam[r]
             for r, d in enumerate(sorted_abs_incs) if d > 0.0]
    if not terms:
        return 0.0
    m = max(terms)
    lse = m + math.log(sum(math.exp(t - m) for t in terms))
    return math.exp(lse / p)


def family_objective(f, family, lams, p):
    """Recompute the variation objective of an explicit interval family."""
    incs = sorted((abs(f.increment(iv)) for iv in family), reverse=True)
    return _objective_log_domain(incs, _ln_lambdas(lams, len(incs)), p)


def _family_key(cands, chosen):
    intervals = sorted((cands[t][1], cands[t][2]) for t in chosen)
    return (len(chosen), intervals)


def lambda_p_variation(f, lams, p, budget=1_000_000):
    """Exact supremum of the weighted p-variation objective.

    Candidate interval endpoints are restricted to
    f.monotone_extrema_points(); moving any endpoint onto the extremal
    plateau it points at never decreases an increment and never creates an
    overlap.  Branch-and-bound explores antichains of the candidate
    intervals in decreasing-increment order; the bound matches the largest
    unplaced increments with the best unused weights, ignoring conflicts.

    Raises BudgetExceeded with (lower, upper) brackets when the node budget
    is hit.  Ties are broken toward the family smallest by (size, endpoint
    list).
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    pts = f.monotone_extrema_points()
    vals = [f.evaluate(x) for x in pts]
    cands = []
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            d = abs(vals[b] - vals[a])
            if d > 0.0:
                cands.append((d, pts[a], pts[b], a, b))
    # big increments first; endpoint order only for determinism
    cands.sort(key=lambda c: (-c[0], c[1], c[2]))
    ln_lam = _ln_lambdas(lams, len(cands))
    rem_incs = [c[0] for c in cands]

    def bound(sorted_incs, t):
        merged = []
        i = 0
        for d in rem_incs[t:]:
            while i < len(sorted_incs) and sorted_incs[i] >= d:
                merged.append(sorted_incs[i])
                i += 1
            merged.append(d)
        merged.extend(sorted_incs[i:])
        return _objective_log_domain(merged, ln_lam, p)

    best_val = 0.0
    best_key = (0, [])
    best_chosen = ()
    nodes = 0
    # stack entries: (next candidate, chosen indices, value, sorted increments)
    stack = [(0, (), 0.0, ())]
    while stack:
        t, chosen, val, incs = stack.pop()
        nodes += 1
        if nodes > budget:
            upper = best_val
            for tt, _, _, iincs in stack:
                upper = max(upper, bound(list(iincs), tt))
            report = VariationReport(best_val, _chosen_family(cands, best_chosen),
                                     "greedy_lower_bound", nodes, p,
                                     lower=best_val, upper=upper)
            raise BudgetExceeded(best_val, upper, report)
        if val > best_val:
            best_val, best_key, best_chosen = val, _family_key(cands, chosen), chosen
        elif val == best_val and chosen:
            key = _family_key(cands, chosen)
            if key < best_key:
                best_key, best_chosen = key, chosen
        if t == len(cands):
            continue
        if bound(list(incs), t) < best_val:
            continue
        stack.append((t + 1, chosen, val, incs))
        _, lo, hi, a, b = cands[t]
        ok = True
        for c in chosen:
            ca, cb = cands[c][3], cands[c][4]
            if not (b <= ca or cb <= a):
                ok = False
                break
        if ok:
            d = cands[t][0]
            pos = 0
            while pos < len(incs) and incs[pos] >= d:
                pos += 1
            new_incs = incs[:pos] + (d,) + incs[pos:]
            new_val = _objective_log_domain(list(new_incs), ln_lam, p)
            stack.append((t + 1, chosen + (t,), new_val, new_incs))
    return VariationReport(best_val, _chosen_family(cands, best_chosen),
                           "extrema_bnb", nodes, p)


def _chosen_family(cands, chosen):
    return IntervalFamily(Interval(cands[t][1], cands[t][2]) for t in chosen)


def lambda_p_variation_bruteforce(f, lams, p, max_intervals=None):
    """Exhaustive maximum over all families on the full breakpoint grid.

    Oracle for the extrema-endpoint search space.  Guarded to small inputs;
    arithmetic is plain float powers, independent of the log-domain engine.
    """
    if len(f.breakpoints) > BRUTE_FORCE_MAX_BREAKPOINTS:
        raise GuardExceeded(
            f"{len(f.breakpoints)} breakpoints > {BRUTE_FORCE_MAX_BREAKPOINTS}")
    pts = list(f.breakpoints)
    vals = [f.evaluate(x) for x in pts]
    npts = len(pts)
    if max_intervals is None:
        max_intervals = npts - 1
    lam = lams.spec.expr.eval_array(np.arange(1, npts, dtype=np.float64))

    def value_of(incs):
        total = 0.0
        for r, d in enumerate(sorted(incs, reverse=True)):
            total += d**p / lam[r]
        return total ** (1.0 / p)

    best = {"val": 0.0, "key": (0, []), "fam": ()}
    nodes = 0

    def rec(start, fam, incs):
        nonlocal nodes
        nodes += 1
        val = value_of(incs) if incs else 0.0
        key = (len(fam), sorted(fam))
        if val > best["val"] or (val == best["val"] and fam and key < best["key"]):
            best["val"], best["key"], best["fam"] = val, key, tuple(fam)
        if len(fam) >= max_intervals:
            return
        for a in range(start, npts):
            for b in range(a + 1, npts):
                fam.append((pts[a], pts[b]))
                incs.append(abs(vals[b] - vals[a]))
                rec(b, fam, incs)
                fam.pop()
                incs.pop()

    rec(0, [], [])
    family = IntervalFamily(Interval(lo, hi) for lo, hi in best["fam"])
    return VariationReport(best["val"], family, "brute_force", nodes, p)


def waterman_shiba_norm(f, lams, p, budget=1_000_000):
    """|f(0)| plus the weighted p-variation."""
    report = lambda_p_variation(f, lams, p, budget=budget)
    return abs(f.evaluate(0)) + report.value
