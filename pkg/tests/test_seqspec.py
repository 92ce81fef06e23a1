import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsvar.errors import (DomainError, ExpressionSyntaxError,
                          MonotonicityViolation, NonpositiveValue,
                          ResourceLimit, UnknownIdentifier)
from wsvar.seqspec import (BinOp, Call, Num, ReciprocalSums, Var, eval_at,
                           parse_sequence_expr, partial_sum_reciprocal,
                           validate_spec)


# --- parsing ---------------------------------------------------------------

def test_parse_identity():
    assert parse_sequence_expr("i").root == Var()
    assert parse_sequence_expr("n").root == Var()


def test_parse_referee_delta_shape():
    root = parse_sequence_expr("2^sqrt(n)").root
    assert root == BinOp("^", Num(2.0), Call("sqrt", Var()))


def test_parse_error_offset():
    with pytest.raises(ExpressionSyntaxError) as exc:
        parse_sequence_expr("log(")
    assert exc.value.offset == 4


def test_parse_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as exc:
        parse_sequence_expr("2*foo(n)")
    assert exc.value.name == "foo"


@pytest.mark.parametrize("bad", ["", "   ", "2+", "(n", "n)", "2 3", "sqrt n"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ExpressionSyntaxError):
        parse_sequence_expr(bad)


def test_power_right_associative():
    assert parse_sequence_expr("2^3^2").root == parse_sequence_expr("2^(3^2)").root
    assert parse_sequence_expr("2^3^2").eval(1) == 512
    assert parse_sequence_expr("(2^3)^2").eval(1) == 64


def test_precedence():
    assert parse_sequence_expr("2+3*n").eval(4) == 14
    assert parse_sequence_expr("(2+3)*n").eval(4) == 20
    assert parse_sequence_expr("2-1/n").eval(4) == 1.75
    assert parse_sequence_expr("10-2-3").eval(1) == 5  # left associative


def _random_tree(rng, depth):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Var()
        return Num(float(rng.choice([0, 1, 2, 3, 0.5, 2.5, 10])))
    roll = rng.random()
    if roll < 0.25:
        return Call(rng.choice(["sqrt", "log", "exp"]), _random_tree(rng, depth - 1))
    op = rng.choice(["+", "-", "*", "/", "^"])
    return BinOp(op, _random_tree(rng, depth - 1), _random_tree(rng, depth - 1))


def test_print_parse_roundtrip_1000_trees():
    from wsvar.seqspec import _pretty
    rng = random.Random(42)
    for _ in range(1000):
        tree = _random_tree(rng, 4)
        printed = _pretty(tree, "n")
        reparsed = parse_sequence_expr(printed).root
        assert reparsed == tree, printed
        assert parse_sequence_expr(_pretty(reparsed, "i")).root == tree


_leaf = st.one_of(
    st.just(Var()),
    st.builds(Num, st.floats(0, 100, allow_nan=False).map(lambda v: round(v, 3))))
_tree = st.recursive(
    _leaf,
    lambda kids: st.one_of(
        st.builds(Call, st.sampled_from(["sqrt", "log", "exp"]), kids),
        st.builds(BinOp, st.sampled_from(["+", "-", "*", "/", "^"]), kids, kids)),
    max_leaves=12)


@given(_tree)
@settings(max_examples=300, deadline=None)
def test_print_parse_roundtrip_property(tree):
    from wsvar.seqspec import _pretty
    assert parse_sequence_expr(_pretty(tree, "n")).root == tree


def _oracle_eval(tree, x):
    # independent path: translate to a python expression string and eval it
    def to_src(t):
        if isinstance(t, Num):
            return repr(t.value)
        if isinstance(t, Var):
            return "x"
        if isinstance(t, Call):
            return f"math.{t.func}({to_src(t.arg)})"
        op = "**" if t.op == "^" else t.op
        return f"({to_src(t.left)}){op}({to_src(t.right)})"
    return eval(to_src(tree), {"math": math, "x": x})


def test_eval_matches_independent_oracle():
    rng = random.Random(7)
    checked = 0
    while checked < 400:
        tree = _random_tree(rng, 4)
        x = float(rng.randint(1, 50))
        from wsvar.seqspec import SequenceExpr
        expr = SequenceExpr(tree)
        try:
            mine = expr.eval(x)
        except DomainError:
            continue
        try:
            ref = _oracle_eval(tree, x)
        except (ValueError, ZeroDivisionError, OverflowError):
            continue
        if not (isinstance(ref, float) and math.isfinite(ref)):
            continue
        assert mine == pytest.approx(ref, rel=1e-12)
        checked += 1


# --- validation ------------------------------------------------------------

def test_validate_lambda_identity():
    spec = validate_spec("i", "lambda", 100)
    assert spec.validated_horizon == 100
    assert spec.divergence_ratio > 1.1
    assert not spec.slow_divergence


def test_validate_lambda_decreasing():
    with pytest.raises(MonotonicityViolation) as exc:
        validate_spec("1/i", "lambda", 100)
    assert exc.value.index == 2


def test_validate_q_nonpositive():
    with pytest.raises(NonpositiveValue) as exc:
        validate_spec("n-5", "q", 100)
    assert exc.value.index == 1


def test_validate_constant_q_allowed():
    # weakly increasing is accepted for q (constant exponents are meaningful)
    spec = validate_spec("2", "q", 50)
    assert spec.value_at(10) == 2.0


def test_fast_lambda_growth_warns_slow_divergence():
    spec = validate_spec("2^i", "lambda", 60)
    assert spec.slow_divergence


def test_delta_needs_growth():
    with pytest.raises(MonotonicityViolation):
        validate_spec("2", "delta", 64)
    spec = validate_spec("n+4", "delta", 64)
    assert spec.growth_factor == pytest.approx(68 / 5)


# --- evaluation ------------------------------------------------------------

def test_eval_at_examples():
    lam = validate_spec("i", "lambda", 16)
    assert eval_at(lam, 7) == 7.0
    delta = validate_spec("2^n", "delta", 16)
    assert eval_at(delta, 10) == 1024.0
    assert delta.floor_at(10) == 1024
    q = validate_spec("sqrt(n)", "q", 16)
    assert eval_at(q, 9) == 3.0


def test_floor_at_huge():
    delta = validate_spec("2^n", "delta", 16)
    assert delta.floor_at(100) == 2**100
    assert delta.ln_value_at(100) == pytest.approx(100 * math.log(2), rel=1e-14)


def test_eval_domain_errors():
    expr = parse_sequence_expr("log(n-5)")
    with pytest.raises(DomainError):
        expr.eval(3)
    with pytest.raises(DomainError):
        parse_sequence_expr("1/(n-5)").eval(5)
    with pytest.raises(DomainError):
        parse_sequence_expr("exp(exp(n))").eval(10)


# --- reciprocal sums -------------------------------------------------------

def test_partial_sum_examples(lam_i, lam_const):
    assert partial_sum_reciprocal(lam_i, 4) == pytest.approx(25 / 12, rel=1e-15)
    assert partial_sum_reciprocal(lam_i, 1) == 1.0
    assert partial_sum_reciprocal(lam_const, 10) == pytest.approx(10.0, rel=1e-15)


def test_partial_sums_strictly_increasing(lam_i):
    lam_i.ensure(5000)
    h = lam_i._h[:5000]
    assert np.all(np.diff(h) > 0)


def test_increment_matches_term(lam_sqrt):
    lam_sqrt.ensure(20000)
    for k in (5, 100, 3333, 19998):
        diff = lam_sqrt.partial_sum(k + 1) - lam_sqrt.partial_sum(k)
        assert diff == pytest.approx(lam_sqrt.term(k + 1), rel=1e-6)


def test_resource_limit():
    rs = ReciprocalSums(validate_spec("i", "lambda", 64), cache_budget=1000)
    rs.partial_sum(1000)
    with pytest.raises(ResourceLimit):
        rs.partial_sum(1001)


def test_partial_sums_against_mpmath():
    rs = ReciprocalSums(validate_spec("sqrt(i)", "lambda", 64))
    n = 60_000
    got = rs.partial_sum(n)
    mpmath.mp.prec = 120
    want = mpmath.fsum(1 / mpmath.sqrt(i) for i in range(1, n + 1))
    assert got == pytest.approx(float(want), rel=1e-13)


def test_euler_maclaurin_tail_matches_exact_sum():
    small = ReciprocalSums(validate_spec("i", "lambda", 64), cache_budget=4096)
    big = ReciprocalSums(validate_spec("i", "lambda", 64))
    k = 1 << 14
    approx, exact_flag = small.partial_sum_extended(k)
    assert not exact_flag
    assert approx == pytest.approx(big.partial_sum(k), rel=1e-12)


def test_tail_batch_consistent():
    small = ReciprocalSums(validate_spec("sqrt(i)+1", "lambda", 64),
                           cache_budget=4096)
    ks = [100, 4096, 5000, 12_345, 99_999]
    out, all_exact = small.ln_partial_sums_batch(ks)
    assert not all_exact
    for k, ln_h in zip(ks, out):
        assert ln_h == pytest.approx(small.ln_partial_sum_extended(k)[0],
                                     rel=1e-12)
    big = ReciprocalSums(validate_spec("sqrt(i)+1", "lambda", 64))
    for k, ln_h in zip(ks, out):
        assert math.exp(ln_h) == pytest.approx(big.partial_sum(k), rel=1e-11)
