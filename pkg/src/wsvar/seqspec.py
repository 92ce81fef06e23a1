"""Closed-form sequence specs: the weight sequence lambda(i), the exponent
sequence q(n) and the resolution sequence delta(n).

Expressions live in a tiny grammar (one free variable, + - * / ^, sqrt, log,
exp, decimal literals, parentheses; ^ right-associative).  A validated spec
remembers the horizon its monotonicity/positivity was checked to.  Reciprocal
partial sums H(k) = sum_{i<=k} 1/lambda(i) are cached densely with
compensated accumulation and extended past the cache budget by an
Euler-Maclaurin tail, which is flagged as approximate.
"""

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import _kernels
from .errors import (
    DomainError,
    ExpressionSyntaxError,
    MonotonicityViolation,
    NonpositiveValue,
    ResourceLimit,
    UnknownIdentifier,
)

VAR_NAMES = ("i", "n")
FUNCTIONS = ("sqrt", "log", "exp")

DEFAULT_CACHE_BUDGET = 1 << 22
_CACHE_CHUNK = 1 << 20
_MP_PREC = 120


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch.isdigit() or (ch == "." and pos + 1 < n and text[pos + 1].isdigit()):
            start = pos
            while pos < n and text[pos].isdigit():
                pos += 1
            if pos < n and text[pos] == ".":
                pos += 1
                while pos < n and text[pos].isdigit():
                    pos += 1
            tokens.append(("num", text[start:pos], start))
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < n and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            tokens.append(("name", text[start:pos], start))
            continue
        if ch in "+-*/^()":
            tokens.append((ch, ch, pos))
            pos += 1
            continue
        raise ExpressionSyntaxError(f"unexpected character {ch!r}", pos)
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            raise ExpressionSyntaxError(
                f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2]
            )
        return self.advance()

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "eof":
            raise ExpressionSyntaxError(f"trailing input {tok[1]!r}", tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.power()
        while self.peek()[0] in ("*", "/"):
            op = self.advance()[0]
            node = BinOp(op, node, self.power())
        return node

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            return BinOp("^", base, self.power())
        return base

    def atom(self):
        tok = self.peek()
        if tok[0] == "num":
            self.advance()
            return Num(float(tok[1]))
        if tok[0] == "name":
            self.advance()
            if tok[1] in VAR_NAMES:
                return Var()
            if tok[1] in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(tok[1], arg)
            raise UnknownIdentifier(tok[1], tok[2])
        if tok[0] == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise ExpressionSyntaxError(
            f"expected a value, found {tok[1] or 'end of input'!r}", tok[2]
        )


def _format_number(value):
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _pretty(node, symbol, parent_prec=0):
    if isinstance(node, Num):
        return _format_number(node.value)
    if isinstance(node, Var):
        return symbol
    if isinstance(node, Call):
        return f"{node.func}({_pretty(node.arg, symbol)})"
    prec = _PREC[node.op]
    if node.op == "^":
        # right-associative: parenthesize an equal-precedence left child
        left = _pretty(node.left, symbol, prec)
        right = _pretty(node.right, symbol, prec - 1)
    else:
        left = _pretty(node.left, symbol, prec - 1)
        right = _pretty(node.right, symbol, prec)
    out = f"{left}{node.op}{right}"
    needs_parens = _PREC[node.op] <= parent_prec
    return f"({out})" if needs_parens else out


def _eval_float(node, x):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Call):
        v = _eval_float(node.arg, x)
        if node.func == "sqrt":
            if v < 0:
                raise DomainError(f"sqrt of negative value {v}")
            return math.sqrt(v)
        if node.func == "log":
            if v <= 0:
                raise DomainError(f"log of nonpositive value {v}")
            return math.log(v)
        try:
            return math.exp(v)
        except OverflowError:
            raise DomainError(f"exp overflow at {v}") from None
    a = _eval_float(node.left, x)
    b = _eval_float(node.right, x)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if b == 0:
            raise DomainError("division by zero")
        return a / b
    try:
        r = a**b
    except (OverflowError, ZeroDivisionError, ValueError) as exc:
        raise DomainError(f"power failed: {a}^{b}") from exc
    if isinstance(r, complex):
        raise DomainError(f"power left the reals: {a}^{b}")
    return r


def _eval_numpy(node, xs):
    if isinstance(node, Num):
        return np.full(xs.shape, node.value)
    if isinstance(node, Var):
        return xs
    if isinstance(node, Call):
        v = _eval_numpy(node.arg, xs)
        fn = {"sqrt": np.sqrt, "log": np.log, "exp": np.exp}[node.func]
        return fn(v)
    a = _eval_numpy(node.left, xs)
    b = _eval_numpy(node.right, xs)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return a / b
    return np.power(a, b)


def _eval_mpf(node, x):
    if isinstance(node, Num):
        return mpmath.mpf(node.value)
    if isinstance(node, Var):
        return mpmath.mpf(x)
    if isinstance(node, Call):
        v = _eval_mpf(node.arg, x)
        if node.func == "sqrt":
            if v < 0:
                raise DomainError(f"sqrt of negative value {v}")
            return mpmath.sqrt(v)
        if node.func == "log":
            if v <= 0:
                raise DomainError(f"log of nonpositive value {v}")
            return mpmath.log(v)
        return mpmath.exp(v)
    a = _eval_mpf(node.left, x)
    b = _eval_mpf(node.right, x)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if b == 0:
            raise DomainError("division by zero")
        return a / b
    if a < 0 and b != mpmath.floor(b):
        raise DomainError(f"power left the reals: {a}^{b}")
    if a == 0 and b < 0:
        raise DomainError("division by zero")
    return a**b


@dataclass(frozen=True)
class SequenceExpr:
    """Parsed expression over one free variable; immutable and shareable."""

    root: object

    def pretty(self, symbol="n"):
        return _pretty(self.root, symbol)

    def eval(self, x):
        v = _eval_float(self.root, float(x))
        if not math.isfinite(v):
            raise DomainError(f"non-finite value {v} at argument {x}")
        return v

    def eval_array(self, xs):
        with np.errstate(all="ignore"):
            out = _eval_numpy(self.root, np.asarray(xs, dtype=np.float64))
        return out

    def eval_mpf(self, x):
        return _eval_mpf(self.root, x)


def parse_sequence_expr(text):
    """Parse an expression string; unique parse under the fixed grammar."""
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    return SequenceExpr(_Parser(text).parse())


# ---------------------------------------------------------------------------
# role validation

ROLES = ("lambda", "q", "delta")


@dataclass(frozen=True)
class SequenceSpec:
    """An expression bound to a role, with finite-horizon validation evidence.

    lambda: positive, nondecreasing; a divergence-evidence ratio
    H(horizon)/H(horizon/2) is recorded and `slow_divergence` is set when the
    ratio is close to 1 (reciprocal sum may converge - the criterion then
    rests on a premise the tool cannot check).
    q: positive, nondecreasing.
    delta: positive, nondecreasing, with delta(horizon) >= factor * delta(1)
    as unboundedness evidence.
    """

    expr: SequenceExpr
    role: str
    validated_horizon: int
    divergence_ratio: float = field(default=float("nan"))
    slow_divergence: bool = field(default=False)
    growth_factor: float = field(default=float("nan"))

    @property
    def symbol(self):
        return "i" if self.role == "lambda" else "n"

    def pretty(self):
        return self.expr.pretty(self.symbol)

    def value_at(self, index):
        return eval_at(self, index)

    def ln_value_at(self, index):
        """Natural log of the value, safe for magnitudes beyond float64."""
        mpmath.mp.prec = _MP_PREC
        v = self.expr.eval_mpf(index)
        if v <= 0:
            raise DomainError(f"nonpositive value {v} at index {index}")
        return float(mpmath.log(v))

    def floor_at(self, index):
        """floor(value) as a python int, where the precision represents it."""
        mpmath.mp.prec = _MP_PREC
        v = self.expr.eval_mpf(index)
        if not mpmath.isfinite(v):
            raise DomainError(f"non-finite value at index {index}")
        return int(mpmath.floor(v))

    def to_dict(self):
        return {"expr": self.pretty(), "role": self.role,
                "validated_horizon": self.validated_horizon}


def validate_spec(expr, role, horizon, *, unbounded_factor=2.0,
                  slow_divergence_epsilon=0.05):
    """Check role invariants for indices 1..horizon and return a SequenceSpec.

    Raises NonpositiveValue or MonotonicityViolation naming the first
    offending index.  Monotonicity is checked weakly (nondecreasing) for all
    roles; delta additionally must grow by `unbounded_factor` over the
    horizon as evidence of unboundedness.
    """
    if isinstance(expr, str):
        expr = parse_sequence_expr(expr)
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}, got {role!r}")
    horizon = int(horizon)
    if horizon < 2:
        raise ValueError("horizon must be >= 2")

    values = expr.eval_array(np.arange(1, horizon + 1, dtype=np.float64))
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise DomainError(
            f"non-finite value at index {int(bad[0]) + 1} for role {role}")
    nonpos = np.flatnonzero(values <= 0)
    if nonpos.size:
        i = int(nonpos[0])
        raise NonpositiveValue(i + 1, float(values[i]))
    dec = np.flatnonzero(values[1:] < values[:-1])
    if dec.size:
        i = int(dec[0])
        raise MonotonicityViolation(i + 2, float(values[i + 1]), float(values[i]))

    ratio = float("nan")
    slow = False
    growth = float("nan")
    if role == "lambda":
        recip = np.cumsum(1.0 / values)
        ratio = float(recip[-1] / recip[horizon // 2 - 1])
        slow = ratio < 1.0 + slow_divergence_epsilon
    elif role == "delta":
        growth = float(values[-1] / values[0])
        if growth < unbounded_factor:
            raise MonotonicityViolation(
                horizon, float(values[-1]),
                f"delta grew only {growth:.3g}x over the horizon "
                f"(need {unbounded_factor}x as unboundedness evidence)")
    return SequenceSpec(expr, role, horizon, ratio, slow, growth)


def eval_at(spec, index):
    """Value of the sequence at a positive integer index."""
    if index < 1:
        raise DomainError(f"index must be >= 1, got {index}")
    v = spec.expr.eval(index)
    if v <= 0:
        raise DomainError(f"nonpositive value {v} at index {index}")
    return v


# ---------------------------------------------------------------------------
# reciprocal partial sums


_LEGENDRE_NODES, _LEGENDRE_WEIGHTS = np.polynomial.legendre.leggauss(16)


class ReciprocalSums:
    """Dense cache of H(k) = sum_{i=1}^{k} 1/lambda(i).

    The running sum is carried in compensated double precision so the stored
    H(k) is the true prefix rounded once, not a drifted accumulation.  Within
    the cache budget sums are exact in that sense; `partial_sum_extended`
    continues past the budget with an Euler-Maclaurin tail (integral of
    1/lambda plus endpoint corrections), flagged approximate.

    Not thread-safe: the cache grows in place.  Clone per worker if needed.
    """

    def __init__(self, lambda_spec, cache_budget=DEFAULT_CACHE_BUDGET):
        if isinstance(lambda_spec, str):
            lambda_spec = validate_spec(lambda_spec, "lambda", 64)
        if lambda_spec.role != "lambda":
            raise ValueError("ReciprocalSums needs a lambda-role spec")
        self.spec = lambda_spec
        self.cache_budget = int(cache_budget)
        self._h = np.empty(0, dtype=np.float64)
        self._lnh = np.empty(0, dtype=np.float64)
        self._carry = (0.0, 0.0)
        self._em_cache = {}

    def __len__(self):
        return self._h.shape[0]

    def ensure(self, k):
        k = int(k)
        if k > self.cache_budget:
            raise ResourceLimit(
                f"partial sum index {k} exceeds cache budget {self.cache_budget}")
        top = len(self)
        while top < k:
            stop = min(self.cache_budget, max(k, 2 * top, 1024))
            stop = min(stop, top + _CACHE_CHUNK)
            idx = np.arange(top + 1, stop + 1, dtype=np.float64)
            lam = self.spec.expr.eval_array(idx)
            if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
                raise DomainError("lambda not positive/finite while extending sums")
            s, c = self._carry
            block, s, c = _kernels.prefix_sums(1.0 / lam, s, c)
            self._carry = (s, c)
            self._h = np.concatenate([self._h, block])
            self._lnh = np.concatenate([self._lnh, np.log(block)])
            top = len(self)

    def partial_sum(self, k):
        """H(k); amortized constant per new index for nondecreasing k."""
        if k < 1:
            raise DomainError(f"k must be >= 1, got {k}")
        self.ensure(k)
        return float(self._h[k - 1])

    def ln_partial_sum(self, k):
        self.ensure(k)
        return float(self._lnh[k - 1])

    def ln_view(self, k):
        """Read-only view of (ln H(1), ..., ln H(k))."""
        self.ensure(k)
        return self._lnh[:k]

    def term(self, i):
        """1/lambda(i)."""
        return 1.0 / eval_at(self.spec, i)

    # -- Euler-Maclaurin continuation ------------------------------------
    #
    # sum_{i=a+1}^{b} g(i) = int_a^b g + (g(b)-g(a))/2 + (g'(b)-g'(a))/12
    # + O(g'''), with g = 1/lambda smooth and tiny beyond the cache, so the
    # truncation is far below float noise.  Integrals run on the log axis.

    _TAIL_LN_LIMIT = 690.0  # e^690 ~ 1e299; beyond that floats cannot carry t

    def _g_of(self, t):
        lam = self.spec.expr.eval_array(np.asarray(t, dtype=np.float64))
        return 1.0 / lam

    def _tail_values(self, ks):
        """H at ascending int ks, all > cache_budget, by cumulative EM."""
        b = self.cache_budget
        self.ensure(b)
        base = float(self._h[b - 1])
        us = np.array([math.log(b)] + [math.log(k) for k in ks])
        if us[-1] > self._TAIL_LN_LIMIT:
            raise ResourceLimit(
                f"tail index beyond exp({self._TAIL_LN_LIMIT}) not supported")
        mids, halves, seg_starts = [], [], []
        panel_count = 0
        for u1, u2 in zip(us[:-1], us[1:]):
            seg_starts.append(panel_count)
            npanels = max(1, int(math.ceil((u2 - u1) / 0.5)))
            edges = np.linspace(u1, u2, npanels + 1)
            mids.append(0.5 * (edges[:-1] + edges[1:]))
            halves.append(0.5 * (edges[1:] - edges[:-1]))
            panel_count += npanels
        mids = np.concatenate(mids)
        halves = np.concatenate(halves)
        nodes = mids[:, None] + halves[:, None] * _LEGENDRE_NODES[None, :]
        t = np.exp(nodes)
        integrand = self._g_of(t.ravel()).reshape(t.shape) * t
        panel_ints = halves * (integrand @ _LEGENDRE_WEIGHTS)
        seg_ints = np.add.reduceat(panel_ints, np.array(seg_starts))
        # endpoint corrections telescope, so only b and each k contribute
        pts = np.exp(us)
        g = self._g_of(pts)
        h = 1e-6
        gp = (self._g_of(pts * (1 + h)) - self._g_of(pts * (1 - h))) / (2 * pts * h)
        return (base + np.cumsum(seg_ints)
                + (g[1:] - g[0]) / 2.0 + (gp[1:] - gp[0]) / 12.0)

    def partial_sum_extended(self, k):
        """(H(k), exact); approximate Euler-Maclaurin past the cache budget."""
        k = int(k)
        if k <= self.cache_budget:
            return self.partial_sum(k), True
        if k not in self._em_cache:
            self._em_cache[k] = float(self._tail_values([k])[0])
        return self._em_cache[k], False

    def ln_partial_sum_extended(self, k):
        h, exact = self.partial_sum_extended(k)
        return math.log(h), exact

    def ln_partial_sums_batch(self, ks):
        """ln H for ascending distinct ints; (values, all_exact flag)."""
        ks = [int(k) for k in ks]
        out = np.empty(len(ks), dtype=np.float64)
        split = len(ks)
        for j, k in enumerate(ks):
            if k > self.cache_budget:
                split = j
                break
        if split:
            self.ensure(ks[split - 1])
            out[:split] = self._lnh[np.array(ks[:split]) - 1]
        if split < len(ks):
            out[split:] = np.log(self._tail_values(ks[split:]))
        return out, split == len(ks)


def partial_sum_reciprocal(sums, k):
    """H(k) from the shared cache; ResourceLimit past the budget."""
    return sums.partial_sum(k)
