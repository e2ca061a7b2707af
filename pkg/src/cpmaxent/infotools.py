"""Entropy, relative entropy, analytic bounds, and the random
ultra-log-concave instance generator used by the verification sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InfeasibleError, NegativeRateError, OutOfRangeError, SupportMismatchError
from .pmf import Pmf

_LN2 = math.log(2.0)


class Base(str, Enum):
    NAT = "nat"
    BIT = "bit"


def _as_base(base) -> Base:
    return base if isinstance(base, Base) else Base(str(base))


def _convert(nats: float, base: Base) -> float:
    # single conversion site: bits are nats / ln 2
    return nats / _LN2 if base is Base.BIT else nats


@dataclass(frozen=True)
class EntropyValue:
    """An entropy (or divergence) together with its logarithm base."""

    value: float
    base: Base

    def in_base(self, base) -> "EntropyValue":
        base = _as_base(base)
        if base is self.base:
            return self
        nats = self.value * _LN2 if self.base is Base.BIT else self.value
        return EntropyValue(_convert(nats, base), base)


def entropy(p: Pmf, base=Base.NAT) -> EntropyValue:
    """Shannon entropy ``-sum p(x) log p(x)`` with ``0 log 0 = 0``."""
    base = _as_base(base)
    w = np.array([float(v) for v in p.weights])
    w = w[w > 0]
    nats = float(-np.sum(w * np.log(w)))
    return EntropyValue(_convert(nats, base), base)


def relative_entropy(p: Pmf, r: Pmf, base=Base.NAT) -> EntropyValue:
    """Kullback-Leibler divergence ``sum p(x) log(p(x)/r(x))``.

    Raises ``SupportMismatchError`` when ``p`` puts mass above 1e-12 at a
    point where ``r`` is below 1e-14; points carrying less mass than that
    are skipped as truncation dust.
    """
    base = _as_base(base)
    nats = 0.0
    for x, w in p.items():
        pw = float(w)
        if pw == 0.0:
            continue
        rw = float(r.prob(x))
        if pw > 1e-12 and rw < 1e-14:
            raise SupportMismatchError(f"mass {pw} at x={x} where reference has {rw}")
        if rw > 0.0:
            nats += pw * math.log(pw / rw)
    return EntropyValue(_convert(nats, base), base)


def poisson_entropy_upper(lam: float) -> float:
    """Closed-form bound ``0.5 log(2 pi e (lam + 1/12))`` in nats."""
    if lam <= 0:
        raise NegativeRateError(f"lam = {lam} must be positive")
    return 0.5 * math.log(2 * math.pi * math.e * (lam + 1.0 / 12.0))


def sample_ulc(max_support: int, lam: float, seed: int, curvature: float = 0.5) -> Pmf:
    """Random ultra-log-concave pmf on {0..max_support} with mean ``lam``.

    Draws a concave perturbation (second differences uniform on
    ``[-curvature, 0]``), multiplies in a Poisson skeleton, and exponentially
    tilts until the mean matches ``lam`` to 1e-12 by monotone bisection.
    Tilting adds a linear term to the concave log-ratio, so ultra-log-
    concavity survives by construction.  Deterministic given ``seed``.
    """
    if lam <= 0:
        raise OutOfRangeError(f"lam = {lam} must be positive")
    if max_support < 1:
        raise OutOfRangeError("max_support must be at least 1")
    if lam >= max_support:
        raise InfeasibleError(f"mean {lam} unreachable on {{0..{max_support}}}")
    rng = np.random.default_rng(seed)
    d2 = rng.uniform(-curvature, 0.0, size=max(max_support - 1, 0))
    slopes = np.concatenate([[0.0], np.cumsum(d2)])
    phi = np.concatenate([[0.0], np.cumsum(slopes)])
    xs = np.arange(max_support + 1)
    log_skeleton = phi - np.array([math.lgamma(x + 1) for x in xs])

    def mean_at(log_s: float) -> float:
        logw = log_skeleton + xs * log_s
        logw -= logw.max()
        w = np.exp(logw)
        return float(np.sum(w * xs) / np.sum(w))

    lo = hi = math.log(lam)
    while mean_at(lo) >= lam:
        lo -= 1.0
    while mean_at(hi) <= lam:
        hi += 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        m = mean_at(mid)
        if abs(m - lam) <= 1e-12:
            lo = hi = mid
            break
        if m < lam:
            lo = mid
        else:
            hi = mid
    log_s = 0.5 * (lo + hi)
    logw = log_skeleton + xs * log_s
    logw -= logw.max()
    w = np.exp(logw)
    w /= w.sum()
    return Pmf(0, tuple(float(v) for v in w), 0.0)
