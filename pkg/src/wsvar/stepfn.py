"""Right-continuous piecewise-constant functions on [0, 1] with exact
rational breakpoints.

f = values[j] on [breakpoints[j], breakpoints[j+1]) and f(1) = value_at_one.
Breakpoints are `fractions.Fraction`s because witness combs have tooth widths
like 1/delta that underflow float64; all comparisons against them must be
exact.  Canonical form merges equal adjacent values, so a breakpoint always
marks a jump.
"""

import bisect
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import OutOfDomain

ZERO = Fraction(0)
ONE = Fraction(1)


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**15)
    return Fraction(x)


@dataclass(frozen=True)
class Interval:
    """Nondegenerate closed subinterval of [0, 1]."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", _as_fraction(self.lo))
        object.__setattr__(self, "hi", _as_fraction(self.hi))
        if not (ZERO <= self.lo < self.hi <= ONE):
            raise OutOfDomain(f"bad interval [{self.lo}, {self.hi}]")

    @property
    def length(self):
        return self.hi - self.lo

    def to_strings(self):
        return [str(self.lo), str(self.hi)]


class IntervalFamily(tuple):
    """Intervals with pairwise disjoint interiors, sorted by left endpoint.

    Shared endpoints are allowed: abutting intervals count as nonoverlapping.
    """

    def __new__(cls, intervals):
        items = sorted(intervals, key=lambda iv: (iv.lo, iv.hi))
        for a, b in zip(items, items[1:]):
            if b.lo < a.hi:
                raise OutOfDomain(
                    f"overlapping interiors: [{a.lo},{a.hi}] and [{b.lo},{b.hi}]")
        return super().__new__(cls, items)

    def to_lists(self):
        return [iv.to_strings() for iv in self]


class StepFunction:
    """Canonical step function: strictly increasing breakpoints 0=t0<...<tm=1,
    one value per piece, explicit value at 1."""

    __slots__ = ("breakpoints", "values", "value_at_one")

    def __init__(self, breakpoints, values, value_at_one=None):
        bps = [_as_fraction(b) for b in breakpoints]
        vals = [float(v) for v in values]
        if len(bps) != len(vals) + 1:
            raise ValueError("need len(breakpoints) == len(values) + 1")
        if bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if value_at_one is None:
            value_at_one = vals[-1]
        # canonical form: drop breakpoints that do not change the value
        cb, cv = [bps[0]], [vals[0]]
        for b, v in zip(bps[1:-1], vals[1:]):
            if v != cv[-1]:
                cb.append(b)
                cv.append(v)
        cb.append(bps[-1])
        self.breakpoints = tuple(cb)
        self.values = tuple(cv)
        self.value_at_one = float(value_at_one)

    @classmethod
    def constant(cls, value):
        return cls([ZERO, ONE], [value])

    def __eq__(self, other):
        return (isinstance(other, StepFunction)
                and self.breakpoints == other.breakpoints
                and self.values == other.values
                and self.value_at_one == other.value_at_one)

    def __hash__(self):
        return hash((self.breakpoints, self.values, self.value_at_one))

    def __repr__(self):
        pieces = ", ".join(f"{v:g}@[{a},{b})" for v, a, b in
                           zip(self.values, self.breakpoints, self.breakpoints[1:]))
        return f"StepFunction({pieces}, f(1)={self.value_at_one:g})"

    @property
    def pieces(self):
        return len(self.values)

    def sup_abs(self):
        return max(max(abs(v) for v in self.values), abs(self.value_at_one))

    def scaled(self, c):
        return StepFunction(self.breakpoints,
                            [c * v for v in self.values],
                            c * self.value_at_one)

    def evaluate(self, x):
        x = _as_fraction(x)
        if not (ZERO <= x <= ONE):
            raise OutOfDomain(f"{x} outside [0, 1]")
        if x == ONE:
            return self.value_at_one
        j = bisect.bisect_right(self.breakpoints, x) - 1
        return self.values[j]

    def increment(self, interval):
        """Change of f over the interval: f(sup) - f(inf)."""
        return self.evaluate(interval.hi) - self.evaluate(interval.lo)

    def monotone_extrema_points(self):
        """Breakpoints where an optimal interval endpoint can sit.

        These are the left endpoints of pieces whose value is a local
        extremum of the piece-value sequence (extended with the value at 1
        when it differs), plus 0 and 1.  Because f is right-continuous, an
        endpoint placed at a piece's left breakpoint realizes that piece's
        value, so increments taken between these points exhaust all
        extremal value pairs.
        """
        w = list(self.values)
        if self.value_at_one != w[-1]:
            w.append(self.value_at_one)
        pts = [self.breakpoints[0]]
        for j in range(1, len(w) - 1):
            if (w[j] > w[j - 1]) != (w[j + 1] > w[j]):
                pts.append(self.breakpoints[j])
        pts.append(self.breakpoints[-1])
        return pts

    def to_dict(self):
        return {"breakpoints": [str(b) for b in self.breakpoints],
                "values": list(self.values),
                "value_at_one": self.value_at_one}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data):
        return cls([Fraction(s) for s in data["breakpoints"]],
                   [float(v) for v in data["values"]],
                   float(data["value_at_one"]))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def evaluate(f, x):
    return f.evaluate(x)


def increment(f, interval):
    return f.increment(interval)


def monotone_extrema_points(f):
    return f.monotone_extrema_points()


def random_step_function(pieces, value_range=(-1.0, 1.0), rng_seed=0,
                         denominator=128):
    """Reproducible random canonical step function with exactly `pieces`
    pieces; breakpoints on the 1/denominator grid."""
    if pieces < 1:
        raise ValueError("pieces must be >= 1")
    if pieces > denominator:
        raise ValueError("not enough grid points for that many pieces")
    rng = (rng_seed if isinstance(rng_seed, np.random.Generator)
           else np.random.default_rng(rng_seed))
    lo, hi = value_range
    cuts = rng.choice(denominator - 1, size=pieces - 1, replace=False) + 1
    bps = [ZERO] + [Fraction(int(c), denominator) for c in sorted(cuts)] + [ONE]
    while True:
        vals = rng.uniform(lo, hi, size=pieces)
        # equal adjacent draws would collapse pieces under canonicalization
        if pieces == 1 or np.all(np.diff(vals) != 0.0):
            break
    return StepFunction(bps, vals.tolist())
