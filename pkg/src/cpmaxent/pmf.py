"""Finite-support probability mass functions on the nonnegative integers.

A :class:`Pmf` is a dense weight vector anchored at an integer offset, plus a
record of how much tail mass was discarded when an infinite-support law was
truncated.  Weights are either plain floats, or exact rationals when every
input weight is an ``int``/``fractions.Fraction``; all operations preserve
exactness in the rational mode, which is what the exact identity checks rely
on.  Values are immutable and every operation is a pure function, so pmfs can
be shared freely between threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    AllZeroError,
    NegativeRateError,
    NegativeWeightError,
    OutOfRangeError,
    ZeroMeanError,
)

# Slop allowed on the unit-mass invariant in floating point.
_MASS_SLOP = 1e-9

# Default truncation mass for infinite-support constructions.
DEFAULT_TAIL_EPS = 1e-12


def _rational(w) -> bool:
    return isinstance(w, Rational) and not isinstance(w, bool)


@dataclass(frozen=True)
class Pmf:
    """Probability mass function with support ``{offset, ..., offset+len-1}``.

    Invariants enforced at construction: all weights are nonnegative, the
    first and last weights are positive (leading/trailing zeros are trimmed
    into the offset), and the total mass lies in ``[1 - tail_eps, 1]`` up to
    floating-point slop.  ``tail_eps`` records mass discarded by truncation.
    """

    offset: int
    weights: tuple = field(repr=False)
    tail_eps: float = 0.0

    def __post_init__(self):
        ws = tuple(self.weights)
        if not ws:
            raise AllZeroError("pmf needs at least one weight")
        if self.offset < 0:
            raise OutOfRangeError("offset must be nonnegative")
        exact = all(_rational(w) for w in ws)
        if exact:
            ws = tuple(Fraction(w) for w in ws)
        else:
            ws = tuple(float(w) for w in ws)
        for w in ws:
            if w < 0:
                raise NegativeWeightError(f"negative weight {w}")
        lo = 0
        hi = len(ws)
        while lo < hi and ws[lo] == 0:
            lo += 1
        while hi > lo and ws[hi - 1] == 0:
            hi -= 1
        if lo == hi:
            raise AllZeroError("all weights are zero")
        ws = ws[lo:hi]
        total = sum(ws)
        if not (1 - self.tail_eps - _MASS_SLOP <= total <= 1 + _MASS_SLOP):
            raise OutOfRangeError(
                f"total mass {float(total)} outside [1 - tail_eps, 1]; "
                "use normalize() for raw weights"
            )
        object.__setattr__(self, "offset", self.offset + lo)
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "tail_eps", float(self.tail_eps))

    # -- accessors ---------------------------------------------------------

    @property
    def support_min(self) -> int:
        return self.offset

    @property
    def support_max(self) -> int:
        return self.offset + len(self.weights) - 1

    @property
    def is_exact(self) -> bool:
        """True when weights are exact rationals."""
        return bool(self.weights) and isinstance(self.weights[0], Fraction)

    def prob(self, x: int):
        """Mass at the integer ``x`` (zero outside the stored support)."""
        i = x - self.offset
        if 0 <= i < len(self.weights):
            return self.weights[i]
        return Fraction(0) if self.is_exact else 0.0

    def items(self) -> Iterator[tuple[int, object]]:
        for i, w in enumerate(self.weights):
            yield self.offset + i, w

    def dense(self, lo: int = 0, hi: int | None = None) -> np.ndarray:
        """Float weights on ``[lo, hi)`` as a dense numpy array."""
        if hi is None:
            hi = self.support_max + 1
        out = np.zeros(hi - lo)
        a = max(lo, self.offset)
        b = min(hi, self.support_max + 1)
        if a < b:
            out[a - lo : b - lo] = [
                float(w) for w in self.weights[a - self.offset : b - self.offset]
            ]
        return out

    def mean(self):
        return moment(self, 1)

    # -- JSON wire format --------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "offset": self.offset,
            "weights": [float(w) for w in self.weights],
            "tail_eps": self.tail_eps,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Pmf":
        return cls(int(d["offset"]), tuple(d["weights"]), float(d.get("tail_eps", 0.0)))

    @classmethod
    def from_json(cls, s: str) -> "Pmf":
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True)
class ShapeVerdict:
    """Outcome of a shape test.

    ``worst_margin`` is the signed value of the tested inequality at
    ``worst_index`` (an absolute support point); ``holds`` is equivalent to
    the worst margin clearing the test's tolerance.  A support gap (interior
    zero) is reported with margin ``-scale`` where ``scale`` is the squared
    maximum weight.
    """

    holds: bool
    worst_index: int
    worst_margin: float


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def normalize(weights: Sequence, offset: int = 0) -> Pmf:
    """Scale raw nonnegative weights into a pmf (exact for rational input)."""
    ws = list(weights)
    if not ws:
        raise AllZeroError("no weights given")
    for w in ws:
        if w < 0:
            raise NegativeWeightError(f"negative weight {w}")
    total = sum(ws)
    if total == 0:
        raise AllZeroError("all weights are zero")
    if all(_rational(w) for w in ws):
        scaled = [Fraction(w) / total for w in ws]
    else:
        total = float(total)
        scaled = [float(w) / total for w in ws]
    return Pmf(offset, tuple(scaled), 0.0)


def delta(k: int) -> Pmf:
    """Point mass at ``k``."""
    return Pmf(k, (Fraction(1),), 0.0)


def poisson(lam: float, tail_eps: float = DEFAULT_TAIL_EPS) -> Pmf:
    """Poisson(lam) truncated when the analytic tail bound drops below
    ``tail_eps``."""
    if lam < 0:
        raise NegativeRateError(f"lam = {lam} < 0")
    if lam == 0:
        return delta(0)
    ws = [math.exp(-lam)]
    k = 0
    bound = 1.0
    while k < 10**6:
        nxt = ws[-1] * lam / (k + 1)
        r = lam / (k + 2)
        if k + 1 > lam and r < 1:
            bound = nxt / (1 - r)
            if bound < tail_eps:
                break
        ws.append(nxt)
        k += 1
    return Pmf(0, tuple(ws), min(bound, tail_eps))


def geometric(a: float, offset: int = 0, tail_eps: float = DEFAULT_TAIL_EPS) -> Pmf:
    """Geometric law ``a (1-a)^(x-offset)`` truncated at mass ``tail_eps``."""
    if not 0 < a <= 1:
        raise OutOfRangeError(f"a = {a} outside (0, 1]")
    if a == 1:
        return delta(offset)
    n = max(1, math.ceil(math.log(tail_eps) / math.log1p(-a)))
    ws = a * np.power(1 - a, np.arange(n))
    return Pmf(offset, tuple(float(w) for w in ws), float((1 - a) ** n))


def uniform(lo: int, hi: int) -> Pmf:
    """Uniform law on the integer interval ``{lo, ..., hi}`` (exact weights)."""
    if hi < lo:
        raise OutOfRangeError(f"empty interval [{lo}, {hi}]")
    n = hi - lo + 1
    return Pmf(lo, (Fraction(1, n),) * n, 0.0)


def binomial(n: int, p) -> Pmf:
    """Binomial(n, p); exact when ``p`` is rational."""
    if n < 0:
        raise OutOfRangeError(f"n = {n} < 0")
    if not 0 <= p <= 1:
        raise OutOfRangeError(f"p = {p} outside [0, 1]")
    q = 1 - p
    ws = [math.comb(n, k) * p**k * q ** (n - k) for k in range(n + 1)]
    return Pmf(0, tuple(ws), 0.0)


def bernoulli(p) -> Pmf:
    return binomial(1, p)


# ---------------------------------------------------------------------------
# arithmetic
# ---------------------------------------------------------------------------


def _conv_exact(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def convolve(p: Pmf, r: Pmf) -> Pmf:
    """Distribution of ``X + Y`` for independent ``X ~ p`` and ``Y ~ r``."""
    tail = p.tail_eps + r.tail_eps
    if p.is_exact and r.is_exact:
        ws = _conv_exact(p.weights, r.weights)
    else:
        ws = np.convolve(
            np.array(p.weights, dtype=float), np.array(r.weights, dtype=float)
        )
        ws = [float(w) for w in ws]
    return Pmf(p.offset + r.offset, tuple(ws), tail)


def convolve_power(p: Pmf, j: int) -> Pmf:
    """``j``-fold self-convolution by repeated squaring; ``j = 0`` is the
    point mass at 0."""
    if j < 0:
        raise OutOfRangeError(f"j = {j} < 0")
    result = delta(0)
    base = p
    while j:
        if j & 1:
            result = convolve(result, base)
        j >>= 1
        if j:
            base = convolve(base, base)
    return result


def moment(p: Pmf, k: int) -> float | Fraction:
    """Raw moment ``sum x^k p(x)``; ``k = 0`` returns the retained mass."""
    if k < 0:
        raise OutOfRangeError(f"k = {k} < 0")
    if p.is_exact:
        return sum(w * Fraction(x) ** k for x, w in p.items())
    xs = np.arange(p.offset, p.support_max + 1, dtype=float)
    return float(np.sum(np.array(p.weights, dtype=float) * xs**k))


def falling_factorial_moment(p: Pmf, n: int) -> float | Fraction:
    """``E[X (X-1) ... (X-n+1)]``."""
    if n < 1:
        raise OutOfRangeError(f"n = {n} < 1")
    total = Fraction(0) if p.is_exact else 0.0
    for x, w in p.items():
        f = 1
        for i in range(n):
            f *= x - i
        total += w * f
    return total


def size_bias(p: Pmf) -> Pmf:
    """Size-biased version ``p#(y) = (y+1) p(y+1) / mean``."""
    m = moment(p, 1)
    if m <= 0:
        raise ZeroMeanError("size bias needs positive mean")
    lo = max(p.offset - 1, 0)
    ws = [(y + 1) * p.prob(y + 1) / m for y in range(lo, p.support_max)]
    return Pmf(lo, tuple(ws), p.tail_eps)


def sup_distance(p: Pmf, r: Pmf) -> float:
    """Sup-norm distance between two pmfs over the union of supports."""
    hi = max(p.support_max, r.support_max) + 1
    return float(np.max(np.abs(p.dense(0, hi) - r.dense(0, hi))))


# ---------------------------------------------------------------------------
# shape tests
# ---------------------------------------------------------------------------


def _interval_gaps(p: Pmf) -> list[int]:
    return [x for x, w in p.items() if w == 0]


def _verdict(candidates: list[tuple[int, object]], cutoff) -> ShapeVerdict:
    """Fold (index, margin) pairs into a verdict; ``cutoff`` is the lowest
    acceptable margin."""
    if not candidates:
        return ShapeVerdict(True, 0, 0.0)
    worst_x, worst_m = min(candidates, key=lambda t: t[1])
    return ShapeVerdict(worst_m >= cutoff, worst_x, float(worst_m))


def is_log_concave(p: Pmf, tol: float = 1e-9) -> ShapeVerdict:
    """Test ``p(x)^2 >= p(x+1) p(x-1)`` on interval support.

    Margins are compared against ``-tol * scale`` with ``scale`` the squared
    maximum weight; pass ``tol=0`` for an exact test on rational pmfs.
    """
    w = p.weights
    scale = max(w) ** 2
    cands: list[tuple[int, object]] = []
    for i in range(1, len(w) - 1):
        cands.append((p.offset + i, w[i] * w[i] - w[i + 1] * w[i - 1]))
    for x in _interval_gaps(p):
        cands.append((x, -scale))
    if not cands:
        return ShapeVerdict(True, p.offset, 0.0)
    return _verdict(cands, -tol * scale)


def is_ultra_log_concave(p: Pmf, tol: float = 1e-9) -> ShapeVerdict:
    """Test ``x p(x)^2 >= (x+1) p(x+1) p(x-1)`` for all x >= 1, plus
    interval support."""
    scale = max(p.weights) ** 2
    cands: list[tuple[int, object]] = []
    for x in range(max(p.offset, 1), p.support_max + 1):
        m = x * p.prob(x) ** 2 - (x + 1) * p.prob(x + 1) * p.prob(x - 1)
        cands.append((x, m))
    for x in _interval_gaps(p):
        cands.append((x, -scale))
    if not cands:
        return ShapeVerdict(True, p.offset, 0.0)
    return _verdict(cands, -tol * scale)


def is_unimodal(p: Pmf) -> ShapeVerdict:
    """Weights must rise (weakly) then fall (weakly); exact comparisons.

    On failure the margin is the most negative re-rise ``w[k-1] - w[k]``
    observed after a strict descent.
    """
    w = p.weights
    fell = False
    worst_x = p.offset + int(np.argmax([float(x) for x in w]))
    worst_m = 0.0
    for i in range(1, len(w)):
        if w[i] < w[i - 1]:
            fell = True
        elif fell and w[i] > w[i - 1]:
            m = float(w[i - 1] - w[i])
            if m < worst_m:
                worst_m = m
                worst_x = p.offset + i
    return ShapeVerdict(worst_m >= 0.0, worst_x, worst_m)
