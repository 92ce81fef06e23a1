import math
from fractions import Fraction as Fr

import numpy as np
import pytest

from wsvar.errors import GuardExceeded, HorizonTooSmall
from wsvar.seqspec import validate_spec
from wsvar.stepfn import StepFunction, random_step_function
from wsvar.wiener import (is_degenerate_wiener, refined_grid,
                          wiener_bruteforce, wiener_variation)

INDICATOR_HALF = StepFunction([0, Fr(1, 2), 1], [0.0, 1.0], value_at_one=1.0)

SPEC_PAIRS = [("n", "n+1"), ("sqrt(n)+1", "2*n"), ("2-1/n", "2^n"),
              ("n*n", "2^n"), ("log(n+2)", "n+3")]


def _pair(q_text, d_text, horizon=16):
    return (validate_spec(q_text, "q", horizon),
            validate_spec(d_text, "delta", horizon))


def test_single_jump_value_one():
    for q_text, d_text in SPEC_PAIRS:
        q, d = _pair(q_text, d_text)
        rep = wiener_variation(INDICATOR_HALF, q, d, 5)
        assert rep.value == pytest.approx(1.0, rel=1e-12)


def test_constant_is_zero():
    q, d = _pair("n", "2^n")
    rep = wiener_variation(StepFunction.constant(2.0), q, d, 4)
    assert rep.value == 0.0
    assert all(r.inner_value_log == float("-inf") for r in rep.per_n)


def test_narrow_teeth_against_oracle():
    # teeth of width 1/20, isolated by wide gaps, against delta(n) = n+3:
    # every feasible interval is wider than a tooth but still captures an edge
    f = StepFunction([0, Fr(4, 20), Fr(5, 20), Fr(10, 20), Fr(11, 20), 1],
                     [0.0, 1.0, 0.0, 0.8, 0.0])
    q, d = _pair("n", "n+3")
    dp = wiener_variation(f, q, d, 6)
    oracle = wiener_bruteforce(f, q, d, 6)
    for a, b in zip(dp.per_n, oracle.per_n):
        assert a.value == pytest.approx(b.value, rel=1e-10, abs=1e-300)
    assert dp.value == pytest.approx(oracle.value, rel=1e-10)


def test_dp_equals_oracle_random():
    from fractions import Fraction
    rng = np.random.default_rng(99)
    pairs = [_pair(qt, dt, horizon=8) for qt, dt in SPEC_PAIRS]
    for _ in range(30):
        f = random_step_function(int(rng.integers(1, 7)), rng_seed=rng)
        for q, d in pairs:
            dp = wiener_variation(f, q, d, 6)
            oracle = wiener_bruteforce(f, q, d, 6)
            for a, b in zip(dp.per_n, oracle.per_n):
                assert a.value == pytest.approx(b.value, rel=1e-10, abs=1e-300)
                min_length = Fraction(1) / Fraction(a.delta)
                assert all(iv.length >= min_length for iv in a.family)


def _enumerate_all_families(pts, vals, min_length, q):
    """Literal recursion over every nonoverlapping family, no memoization."""
    neg = float("-inf")
    best = neg

    def rec(start, acc):
        nonlocal best
        if acc > best:
            best = acc
        for a in range(start, len(pts)):
            for b in range(a + 1, len(pts)):
                if pts[b] - pts[a] >= min_length and vals[b] != vals[a]:
                    g = q * math.log(abs(vals[b] - vals[a]))
                    nxt = g if acc == neg else (
                        max(acc, g) + math.log1p(math.exp(-abs(acc - g))))
                    rec(b, nxt)

    rec(0, neg)
    return best


def test_dp_equals_literal_enumeration_small_grids():
    # exhaustive-by-construction cross-check on grids of <= 10 endpoints
    from wsvar.wiener import _level_inputs
    rng = np.random.default_rng(1234)
    checked = 0
    pairs = [_pair(qt, dt, horizon=8) for qt, dt in SPEC_PAIRS]
    while checked < 40:
        f = random_step_function(int(rng.integers(1, 4)), rng_seed=rng)
        q, d = pairs[int(rng.integers(0, len(pairs)))]
        n = int(rng.integers(1, 7))
        qn, dn, min_length, pts, vals = _level_inputs(f, q, d, n)
        if len(pts) > 10:
            continue
        ref = _enumerate_all_families(pts, vals, min_length, qn)
        got = wiener_variation(f, q, d, n).per_n[n - 1].inner_value_log
        if math.isinf(ref):
            assert math.isinf(got)
        else:
            assert got == pytest.approx(ref, rel=1e-10)
        checked += 1


def test_value_nondecreasing_in_horizon():
    q, d = _pair("sqrt(n)+1", "2*n")
    f = random_step_function(6, rng_seed=1)
    values = [wiener_variation(f, q, d, h).value for h in range(1, 9)]
    assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))


def test_horizon_too_small():
    q, d = _pair("n", "n/2")
    with pytest.raises(HorizonTooSmall):
        wiener_variation(INDICATOR_HALF, q, d, 3)
    with pytest.raises(HorizonTooSmall):
        wiener_bruteforce(INDICATOR_HALF, q, d, 3)


def test_oracle_guard():
    q, d = _pair("n", "2^n")
    f = random_step_function(12, rng_seed=4)
    with pytest.raises(GuardExceeded):
        wiener_bruteforce(f, q, d, 4)


def test_homogeneity():
    q, d = _pair("2-1/n", "2^n")
    rng = np.random.default_rng(13)
    for c in (3.0, -0.2):
        f = random_step_function(5, rng_seed=rng)
        base = wiener_variation(f, q, d, 6).value
        scaled = wiener_variation(f.scaled(c), q, d, 6).value
        assert scaled == pytest.approx(abs(c) * base, rel=1e-12)


def test_bounded_function_estimate():
    # with sup|f| <= C every level value is at most 2 C delta(n)^(1/q(n))
    q, d = _pair("n*n", "2^n")
    rng = np.random.default_rng(21)
    for _ in range(15):
        f = random_step_function(int(rng.integers(1, 8)), rng_seed=rng)
        c = f.sup_abs()
        rep = wiener_variation(f, q, d, 8)
        for row in rep.per_n:
            cap = 2 * c * row.delta ** (1.0 / row.q)
            assert row.value <= cap * (1 + 1e-9)


def test_refined_grid_contents():
    grid = refined_grid(INDICATOR_HALF, Fr(1, 8))
    assert Fr(1, 2) - Fr(1, 8) in grid
    assert Fr(1, 2) + Fr(1, 8) in grid
    assert Fr(1, 8) in grid and Fr(7, 8) in grid
    assert all(Fr(0) <= x <= Fr(1) for x in grid)


def test_degenerate_examples():
    q, d = _pair("n*n", "2^n", horizon=64)
    rep = is_degenerate_wiener(q, d, 64)
    assert rep.bounded
    assert rep.sup_value == pytest.approx(2.0, rel=1e-12)
    assert rep.attaining_n == 1

    q2, d2 = _pair("sqrt(n)", "2^sqrt(n)", horizon=64)
    rep2 = is_degenerate_wiener(q2, d2, 64)
    assert rep2.bounded
    assert rep2.sup_value == pytest.approx(2.0, rel=1e-12)

    q3, d3 = _pair("log(n+2)", "2^n", horizon=64)
    rep3 = is_degenerate_wiener(q3, d3, 64)
    assert not rep3.bounded


def test_report_rows_and_csv():
    q, d = _pair("n", "n+1")
    rep = wiener_variation(INDICATOR_HALF, q, d, 3)
    assert rep.truncated_at == 3
    assert rep.value == max(r.value for r in rep.per_n)
    assert rep.attaining_n in [r.n for r in rep.per_n]
    rows = list(rep.csv_rows())
    assert rows[0] == ("n", "q", "min_length", "inner_value_log", "value")
    assert len(rows) == 4
    # the attaining family straddles the jump
    fam = rep.per_n[rep.attaining_n - 1].family
    assert any(iv.lo < Fr(1, 2) <= iv.hi for iv in fam)
