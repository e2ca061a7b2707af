"""Compound distributions: random sums of i.i.d. jumps.

Everything here builds the law of ``X_1 + ... + X_Y`` where the jump law Q
lives on {1, 2, ...} and the count law P lives on {0, 1, ...}.  The compound
Poisson case is built two independent ways (Poisson mixture and the Panjer
recursion) so each can serve as an oracle for the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import pmf as pm
from .errors import NegativeRateError, OutOfRangeError
from .pmf import DEFAULT_TAIL_EPS, Pmf


@dataclass(frozen=True)
class CompoundingDist:
    """A jump distribution: a pmf with support contained in {1, 2, ...}."""

    pmf: Pmf

    def __post_init__(self):
        if self.pmf.offset < 1:
            raise OutOfRangeError("compounding law must put no mass at 0")

    def prob(self, j: int):
        return self.pmf.prob(j)

    def mean(self):
        return self.pmf.mean()

    @property
    def support_max(self) -> int:
        return self.pmf.support_max

    @classmethod
    def from_pmf(cls, p: Pmf) -> "CompoundingDist":
        return cls(p)

    @classmethod
    def uniform(cls, lo: int = 1, hi: int = 2) -> "CompoundingDist":
        return cls(pm.uniform(lo, hi))

    @classmethod
    def geometric(cls, a: float, tail_eps: float = DEFAULT_TAIL_EPS) -> "CompoundingDist":
        """Geometric jumps ``a (1-a)^(j-1)`` on {1, 2, ...}, truncated."""
        return cls(pm.geometric(a, offset=1, tail_eps=tail_eps))

    @classmethod
    def point(cls, k: int = 1) -> "CompoundingDist":
        return cls(pm.delta(k))

    @classmethod
    def two_point(cls, q2) -> "CompoundingDist":
        """Support {1, 2} with mass ``q2`` at 2 (exact when rational)."""
        if not 0 <= q2 <= 1:
            raise OutOfRangeError(f"q2 = {q2} outside [0, 1]")
        return cls(pm.normalize([1 - q2, q2], offset=1))


@dataclass(frozen=True)
class ParamVector:
    """Bernoulli success probabilities; the induced rate is their sum."""

    p: tuple[float, ...]

    def __post_init__(self):
        ps = tuple(float(x) for x in self.p)
        for x in ps:
            if not 0 <= x <= 1:
                raise OutOfRangeError(f"parameter {x} outside [0, 1]")
        object.__setattr__(self, "p", ps)

    @property
    def lam(self) -> float:
        return float(sum(self.p))

    def __len__(self) -> int:
        return len(self.p)


def _as_params(p) -> ParamVector:
    return p if isinstance(p, ParamVector) else ParamVector(tuple(p))


# ---------------------------------------------------------------------------
# compounding
# ---------------------------------------------------------------------------


def compound(q: CompoundingDist, p: Pmf) -> Pmf:
    """Mixture ``sum_y p(y) q^{*y}`` over the finite support of ``p``."""
    exact = p.is_exact and q.pmf.is_exact
    ymax = p.support_max
    out_len = ymax * q.support_max + 1
    if exact:
        acc = [Fraction(0)] * out_len
        power = [Fraction(1)]  # q^{*0} anchored at 0
    else:
        acc = np.zeros(out_len)
        power = np.array([1.0])
    qoff = q.pmf.offset
    if exact:
        qw = list(q.pmf.weights)
    else:
        qw = np.array(q.pmf.weights, dtype=float)
    off = 0  # offset of the current convolution power
    for y in range(ymax + 1):
        w = p.prob(y)
        if w:
            if exact:
                for i, v in enumerate(power):
                    acc[off + i] += w * v
            else:
                acc[off : off + len(power)] += float(w) * power
        if y == ymax:
            break
        if exact:
            power = pm._conv_exact(power, qw)
        else:
            power = np.convolve(power, qw)
        off += qoff
    tail = p.tail_eps + float(p.mean()) * q.pmf.tail_eps
    if exact:
        return Pmf(0, tuple(acc), tail)
    return Pmf(0, tuple(float(v) for v in acc), tail)


def bernoulli_sum(p) -> Pmf:
    """Law of a sum of independent Bernoulli(p_i) variables."""
    params = _as_params(p)
    out = pm.delta(0)
    for x in params.p:
        out = pm.convolve(out, pm.bernoulli(x))
    return out


def compound_bernoulli(p: float, q: CompoundingDist) -> Pmf:
    """Mass ``1-p`` at 0 and ``p q(x)`` elsewhere."""
    if not 0 <= p <= 1:
        raise OutOfRangeError(f"p = {p} outside [0, 1]")
    if p == 0:
        return pm.delta(0)
    exact = q.pmf.is_exact and isinstance(p, (int, Fraction)) and not isinstance(p, float)
    one = Fraction(1) if exact else 1.0
    ws = [one - p] + [0] * (q.pmf.offset - 1) + [p * w for w in q.pmf.weights]
    return Pmf(0, tuple(ws), q.pmf.tail_eps)


def compound_binomial(n: int, p: float, q: CompoundingDist) -> Pmf:
    """n-fold convolution power of the compound Bernoulli law."""
    if n < 0:
        raise OutOfRangeError(f"n = {n} < 0")
    return pm.convolve_power(compound_bernoulli(p, q), n)


def compound_poisson_mixture(
    lam: float, q: CompoundingDist, tail_eps: float = DEFAULT_TAIL_EPS
) -> Pmf:
    """Compound Poisson via the mixture formula with the Poisson index
    truncated at ``tail_eps``."""
    if lam < 0:
        raise NegativeRateError(f"lam = {lam} < 0")
    return compound(q, pm.poisson(lam, tail_eps))


def compound_poisson_panjer(
    lam: float,
    q: CompoundingDist,
    n_max: int | None = None,
    tail_eps: float = DEFAULT_TAIL_EPS,
) -> Pmf:
    """Compound Poisson via the Panjer recursion
    ``k p_k = lam * sum_j j q(j) p_{k-j}``.

    With ``n_max=None`` the recursion runs until the accumulated mass
    reaches ``1 - tail_eps`` (capped at 10**6 terms).  All terms are
    positive, so the recursion is stable in plain floating point; for large
    ``lam`` raise ``n_max`` until the retained mass is acceptable.
    """
    if lam < 0:
        raise NegativeRateError(f"lam = {lam} < 0")
    jq = [(j, float(w)) for j, w in q.pmf.items() if w]
    p = [math.exp(-lam)]
    total = p[0]
    cap = 10**6 if n_max is None else n_max
    k = 0
    while k < cap:
        if n_max is None and total >= 1 - tail_eps:
            break
        k += 1
        s = 0.0
        for j, w in jq:
            if j > k:
                break
            s += j * w * p[k - j]
        p.append(lam * s / k)
        total += p[-1]
    return Pmf(0, tuple(p), max(0.0, 1.0 - total))


def third_moment_bound(lam: float, q: CompoundingDist) -> float:
    """Upper bound ``lam q3 + 3 lam^2 q1 q2 + lam^3 q1^3`` on the third
    moment of a compound law with ultra-log-concave count distribution."""
    if lam < 0:
        raise NegativeRateError(f"lam = {lam} < 0")
    q1 = float(pm.moment(q.pmf, 1))
    q2 = float(pm.moment(q.pmf, 2))
    q3 = float(pm.moment(q.pmf, 3))
    return lam * q3 + 3 * lam**2 * q1 * q2 + lam**3 * q1**3


# ---------------------------------------------------------------------------
# exact convolution-split identity for two-point jumps
# ---------------------------------------------------------------------------


def _binom0(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def two_point_split_identity(
    r: int, x: int, y: int, k: int, q2: Fraction
) -> tuple[Fraction, int] | None:
    """Both sides of the exact split identity for jumps on {1, 2}.

    For ``q`` with mass ``q2`` at 2 and ``z = r - y``, the ratio
    ``C(r, y) q^{*y}(k) q^{*z}(2x - k) / q^{*r}(2x)`` collapses to the
    integer ``C(2x - r, k - y) C(2r - 2x, 2y - k)`` for every rational
    ``q2``.  Returns ``(lhs, rhs)``, or ``None`` when the denominator
    vanishes and the ratio is undefined.
    """
    q = CompoundingDist.two_point(Fraction(q2))
    z = r - y
    if z < 0:
        raise OutOfRangeError("need y <= r")
    denom = pm.convolve_power(q.pmf, r).prob(2 * x)
    if denom == 0:
        return None
    lhs = (
        Fraction(math.comb(r, y))
        * pm.convolve_power(q.pmf, y).prob(k)
        * pm.convolve_power(q.pmf, z).prob(2 * x - k)
        / denom
    )
    rhs = _binom0(2 * x - r, k - y) * _binom0(2 * r - 2 * x, 2 * y - k)
    return lhs, rhs


def iter_two_point_cases(r_max: int):
    """All (r, x, y, k) tuples with a defined split ratio, for r <= r_max."""
    for r in range(1, r_max + 1):
        for x in range(math.ceil(r / 2), r + 1):
            for y in range(r + 1):
                for k in range(0, 2 * x + 1):
                    yield r, x, y, k
