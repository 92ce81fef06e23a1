import itertools
import math
from fractions import Fraction as Fr

import numpy as np
import pytest

from wsvar.errors import BudgetExceeded, GuardExceeded
from wsvar.seqspec import ReciprocalSums, validate_spec
from wsvar.stepfn import StepFunction, random_step_function
from wsvar.variation import (family_objective, lambda_p_variation,
                             lambda_p_variation_bruteforce,
                             waterman_shiba_norm)

QUARTERS = StepFunction([0, Fr(1, 4), Fr(1, 2), Fr(3, 4), 1], [0, 1, 0.5, 2])


def test_constant_is_zero(lam_i):
    rep = lambda_p_variation(StepFunction.constant(4.2), lam_i, 1.5)
    assert rep.value == 0.0
    assert len(rep.optimal_family) == 0
    assert rep.method == "extrema_bnb"


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0])
def test_single_jump(lam_i, p):
    f = StepFunction([0, Fr(1, 2), 1], [0.0, -1.7])
    rep = lambda_p_variation(f, lam_i, p)
    assert rep.value == pytest.approx(1.7, rel=1e-12)  # lambda_1 = 1
    assert len(rep.optimal_family) == 1


def test_single_jump_scaled_weight():
    lam2 = ReciprocalSums(validate_spec("2", "lambda", 64))
    f = StepFunction([0, Fr(1, 2), 1], [0.0, 3.0])
    assert lambda_p_variation(f, lam2, 2.0).value == pytest.approx(
        3.0 / math.sqrt(2.0), rel=1e-12)


def test_quarters_frozen_value(lam_i):
    # brute-force oracle value for values (0, 1, 0.5, 2) on quarters, p = 1:
    # family {[0,1/4],[1/4,1/2],[1/2,3/4]} gives 1.5/1 + 1/2 + 0.5/3 = 13/6
    rep = lambda_p_variation(QUARTERS, lam_i, 1.0)
    assert rep.value == pytest.approx(13 / 6, rel=1e-12)
    oracle = lambda_p_variation_bruteforce(QUARTERS, lam_i, 1.0)
    assert oracle.value == pytest.approx(13 / 6, rel=1e-15)


def test_monotone_splitting_never_helps(lam_const):
    f = StepFunction([0, Fr(1, 4), Fr(1, 2), Fr(3, 4), 1],
                     [0.0, 0.25, 0.5, 1.0])
    rep2 = lambda_p_variation_bruteforce(f, lam_const, 2.0, max_intervals=2)
    assert rep2.value == pytest.approx(1.0, rel=1e-12)
    rep1 = lambda_p_variation_bruteforce(f, lam_const, 1.0)
    assert rep1.value == pytest.approx(1.0, rel=1e-12)
    # splits tie at p=1; the tie-break picks the single-interval family
    assert len(rep1.optimal_family) == 1


def test_waterman_shiba_norm(lam_i):
    assert waterman_shiba_norm(StepFunction.constant(-3.0), lam_i, 1.0) == 3.0
    assert waterman_shiba_norm(StepFunction.constant(0.0), lam_i, 2.0) == 0.0
    f = StepFunction([0, Fr(1, 2), 1], [0.0, 1.3])
    assert waterman_shiba_norm(f, lam_i, 2.0) == pytest.approx(1.3, rel=1e-12)


def test_oracle_equivalence_random(lam_i, lam_sqrt, lam_const):
    rng = np.random.default_rng(2024)
    for _ in range(40):
        f = random_step_function(int(rng.integers(1, 8)), rng_seed=rng)
        for lams in (lam_i, lam_sqrt, lam_const):
            for p in (1.0, 1.5, 2.0):
                a = lambda_p_variation(f, lams, p).value
                b = lambda_p_variation_bruteforce(f, lams, p).value
                assert a == pytest.approx(b, rel=1e-10, abs=1e-300)


def test_homogeneity(lam_i):
    rng = np.random.default_rng(5)
    for c in (2.5, -3.0, 0.125):
        f = random_step_function(6, rng_seed=rng)
        base = lambda_p_variation(f, lam_i, 1.5).value
        scaled = lambda_p_variation(f.scaled(c), lam_i, 1.5).value
        assert scaled == pytest.approx(abs(c) * base, rel=1e-12)


def test_monotone_in_weights(lam_i, lam_sqrt):
    # sqrt(i) <= i pointwise, so its reciprocal sums are larger and the
    # variation can only grow
    rng = np.random.default_rng(8)
    for _ in range(10):
        f = random_step_function(5, rng_seed=rng)
        v_small = lambda_p_variation(f, lam_sqrt, 2.0).value
        v_big = lambda_p_variation(f, lam_i, 2.0).value
        assert v_small >= v_big - 1e-12


def test_zero_iff_constant(lam_i):
    rng = np.random.default_rng(3)
    for _ in range(20):
        f = random_step_function(int(rng.integers(2, 7)), rng_seed=rng)
        assert lambda_p_variation(f, lam_i, 1.0).value > 0.0


def test_sorted_weight_assignment_is_optimal(lam_i):
    # permuting the sorted matching of increments to weights never wins
    lam = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    rng = np.random.default_rng(12)
    for _ in range(50):
        s = int(rng.integers(2, 6))
        incs = np.sort(rng.uniform(0, 2, size=s))[::-1]
        p = float(rng.choice([1.0, 1.5, 2.0]))
        sorted_val = sum(d**p / w for d, w in zip(incs, lam))
        for perm in itertools.permutations(range(s)):
            val = sum(incs[j]**p / lam[r] for r, j in enumerate(perm))
            assert val <= sorted_val * (1 + 1e-12)


def test_report_value_recomputes(lam_sqrt):
    rep = lambda_p_variation(QUARTERS, lam_sqrt, 1.5)
    recomputed = family_objective(QUARTERS, rep.optimal_family, lam_sqrt, 1.5)
    assert rep.value == pytest.approx(recomputed, rel=1e-12)


def test_budget_exceeded_brackets(lam_i):
    with pytest.raises(BudgetExceeded) as exc:
        lambda_p_variation(QUARTERS, lam_i, 1.0, budget=3)
    err = exc.value
    assert err.lower <= 13 / 6 <= err.upper * (1 + 1e-12)
    assert err.report.method == "greedy_lower_bound"
    assert err.report.to_dict()["bracket"] == [err.lower, err.upper]


def test_bruteforce_guard(lam_i):
    f = random_step_function(14, rng_seed=0)
    with pytest.raises(GuardExceeded):
        lambda_p_variation_bruteforce(f, lam_i, 1.0)


def test_report_serializes(lam_i):
    d = lambda_p_variation(QUARTERS, lam_i, 1.0).to_dict()
    assert d["optimal_family"] == [["0", "1/4"], ["1/4", "1/2"], ["1/2", "1"]]
    assert d["method"] == "extrema_bnb"
