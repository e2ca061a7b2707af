"""Interpolation semigroup, score function, and energy functionals.

``u_alpha`` interpolates a count law toward the Poisson of the same mean by
binomial thinning plus an independent Poisson top-up; composing with the
compounding operation interpolates a compound law toward the compound
Poisson.  The energy of a path point is the expected negative log of a fixed
reference pmf; under the hypotheses checked in :mod:`cpmaxent.verify` these
energies are non-increasing along the path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import pmf as pm
from .compound import CompoundingDist, ParamVector, _as_params, bernoulli_sum, compound, compound_poisson_panjer
from .errors import AlphaZeroError, HypothesisFailedError, OutOfRangeError, ZeroMeanError
from .pmf import DEFAULT_TAIL_EPS, Pmf, ShapeVerdict

# Points where the reference pmf is below this are dropped from energy sums;
# -log of truncated tail values is numerically meaningless.
REF_THRESHOLD = 1e-14


def thin(p: Pmf, alpha: float) -> Pmf:
    """Binomial thinning: each unit of ``X ~ p`` survives with prob ``alpha``."""
    if not 0 <= alpha <= 1:
        raise OutOfRangeError(f"alpha = {alpha} outside [0, 1]")
    if alpha == 1:
        return p
    if alpha == 0:
        return pm.delta(0)
    n = p.support_max
    out = np.zeros(n + 1)
    for x, w in p.items():
        wf = float(w)
        if wf == 0.0:
            continue
        for k in range(x + 1):
            out[k] += wf * math.comb(x, k) * alpha**k * (1 - alpha) ** (x - k)
    return Pmf(0, tuple(float(v) for v in out), p.tail_eps)


def u_alpha(p: Pmf, alpha: float, tail_eps: float = DEFAULT_TAIL_EPS) -> Pmf:
    """Thin by ``alpha`` and add an independent Poisson making up the mean."""
    if not 0 <= alpha <= 1:
        raise OutOfRangeError(f"alpha = {alpha} outside [0, 1]")
    lam = float(p.mean())
    return pm.convolve(thin(p, alpha), pm.poisson(lam * (1 - alpha), tail_eps))


def u_alpha_q(
    p: Pmf, q: CompoundingDist, alpha: float, tail_eps: float = DEFAULT_TAIL_EPS
) -> Pmf:
    """Compound the interpolated count law: at ``alpha=0`` this is the
    compound Poisson, at ``alpha=1`` the plain compound of ``p``."""
    return compound(q, u_alpha(p, alpha, tail_eps))


def u_alpha_derivative(p: Pmf, alpha: float, tail_eps: float = DEFAULT_TAIL_EPS) -> np.ndarray:
    """Pointwise alpha-derivative of ``u_alpha(p)`` for y = 0..max+1.

    Uses the closed form
    ``(1/alpha) * (lam (U(y) - U(y-1)) - ((y+1) U(y+1) - y U(y)))``,
    which telescopes to zero when summed over the full range.
    """
    if alpha > 1:
        raise OutOfRangeError(f"alpha = {alpha} outside (0, 1]")
    if alpha <= 0:
        raise AlphaZeroError("derivative formula divides by alpha")
    lam = float(p.mean())
    u = u_alpha(p, alpha, tail_eps)
    hi = u.support_max + 1
    vals = np.zeros(hi + 1)
    for y in range(hi + 1):
        uy = float(u.prob(y))
        d = lam * (uy - float(u.prob(y - 1))) - ((y + 1) * float(u.prob(y + 1)) - y * uy)
        vals[y] = d / alpha
    return vals


class Score(NamedTuple):
    """Score values on the points where the compound pmf is above threshold."""

    xs: np.ndarray
    values: np.ndarray


def score(p: Pmf, q: CompoundingDist, threshold: float = 1e-14) -> Score:
    """Ratio score ``C_Q(p#)(x) / C_Q(p)(x) - 1``.

    Zero-mean under ``C_Q(p)`` and identically zero when ``p`` is Poisson
    (up to truncation; see the package notes on truncation of the far tail).
    """
    cp = compound(q, p)
    cps = compound(q, pm.size_bias(p))
    xs = [x for x, w in cp.items() if float(w) > threshold]
    values = [float(cps.prob(x)) / float(cp.prob(x)) - 1.0 for x in xs]
    return Score(np.array(xs, dtype=int), np.array(values))


def check_score_decreasing(
    p: Pmf, q: CompoundingDist, tol: float = 1e-9, threshold: float = 1e-14
) -> ShapeVerdict:
    """Verify the score is non-increasing where defined.

    Hypotheses are enforced up front: ``p`` must be ultra-log-concave and the
    jump law log-concave, otherwise ``HypothesisFailedError`` names the
    culprit.
    """
    if not pm.is_ultra_log_concave(p, tol).holds:
        raise HypothesisFailedError("p_ultra_log_concave")
    if not pm.is_log_concave(q.pmf, tol).holds:
        raise HypothesisFailedError("q_log_concave")
    sc = score(p, q, threshold)
    worst_x, worst_m = 0, 0.0
    found = False
    for i in range(len(sc.xs) - 1):
        if sc.xs[i + 1] != sc.xs[i] + 1:
            continue
        m = sc.values[i] - sc.values[i + 1]
        if not found or m < worst_m:
            worst_x, worst_m, found = int(sc.xs[i]), float(m), True
    return ShapeVerdict(worst_m >= -tol, worst_x, worst_m)


# ---------------------------------------------------------------------------
# energy paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlphaPath:
    """Energies along the interpolation toward the compound Poisson."""

    alphas: tuple[float, ...]
    energies: tuple[float, ...]
    reference: Pmf
    monotone_ok: bool
    discarded: tuple[float, ...]

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.alphas, self.alphas[1:])):
            raise OutOfRangeError("alphas must be strictly increasing")


@dataclass(frozen=True)
class TPath:
    """Energies along the two-parameter equalization path."""

    ts: tuple[float, ...]
    energies: tuple[float, ...]
    reference: Pmf
    monotone_ok: bool
    discarded: tuple[float, ...]

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.ts, self.ts[1:])):
            raise OutOfRangeError("ts must be strictly increasing")


def _restricted_energy(w: Pmf, log_ref: np.ndarray, keep: np.ndarray) -> tuple[float, float]:
    dense = w.dense(0, len(log_ref))
    kept = dense[keep]
    energy = float(-np.sum(kept * log_ref[keep]))
    discarded = float(1.0 - kept.sum())
    return energy, discarded


def _monotone(energies: Sequence[float], slack: float) -> bool:
    e = np.asarray(energies)
    allowed = slack * max(1.0, float(np.max(np.abs(e))))
    return bool(np.all(np.diff(e) <= allowed))


def energy_poisson_path(
    p: Pmf,
    q: CompoundingDist,
    alphas: Sequence[float] | None = None,
    tail_eps: float = DEFAULT_TAIL_EPS,
    threshold: float = REF_THRESHOLD,
    slack: float = 1e-9,
) -> AlphaPath:
    """Expected negative log of the compound Poisson reference along the
    interpolation path, on a grid of alphas (default 21 points)."""
    lam = float(p.mean())
    if lam <= 0:
        raise ZeroMeanError("path needs a positive-mean count law")
    if alphas is None:
        alphas = np.linspace(0.0, 1.0, 21)
    alphas = tuple(float(a) for a in alphas)
    if any(not 0 <= a <= 1 for a in alphas):
        raise OutOfRangeError("alphas must lie in [0, 1]")
    ws = [u_alpha_q(p, q, a, tail_eps) for a in alphas]
    hi = max(w.support_max for w in ws) + 1
    ref = compound_poisson_panjer(lam, q, n_max=hi - 1)
    ref_dense = ref.dense(0, hi)
    keep = ref_dense > threshold
    log_ref = np.zeros(hi)
    log_ref[keep] = np.log(ref_dense[keep])
    energies, discarded = [], []
    for w in ws:
        e, d = _restricted_energy(w, log_ref, keep)
        energies.append(e)
        discarded.append(d)
    return AlphaPath(
        alphas,
        tuple(energies),
        ref,
        _monotone(energies, slack),
        tuple(discarded),
    )


def bernoulli_path_params(p, t: float) -> ParamVector:
    """Replace the first two parameters by ``(s/2 + t, s/2 - t)`` with
    ``s = p1 + p2``; the parameter sum is invariant in ``t``."""
    params = _as_params(p)
    if len(params) < 2:
        raise OutOfRangeError("need at least two parameters")
    s = params.p[0] + params.p[1]
    if abs(t) > s / 2 + 1e-15:
        raise OutOfRangeError(f"t = {t} outside [-(p1+p2)/2, (p1+p2)/2]")
    t = min(max(t, -s / 2), s / 2)
    return ParamVector((s / 2 + t, s / 2 - t) + params.p[2:])


def compound_bernoulli_path_derivative(p, q: CompoundingDist, t: float) -> np.ndarray:
    """Pointwise t-derivative of the compound Bernoulli-sum pmf along the
    equalization path:
    ``-2t * sum_y b(y) (q^{*(y+2)} - 2 q^{*(y+1)} + q^{*y})(x)``
    with ``b`` the Bernoulli sum of the untouched parameters."""
    params = _as_params(p)
    if len(params) < 2:
        raise OutOfRangeError("need at least two parameters")
    rest = bernoulli_sum(ParamVector(params.p[2:])) if len(params) > 2 else pm.delta(0)
    n = len(params)
    hi = n * q.support_max + 1
    out = np.zeros(hi)
    power = np.array([1.0])
    off = 0
    qw = np.array(q.pmf.weights, dtype=float)
    # accumulate q^{*y}, q^{*(y+1)}, q^{*(y+2)} contributions per y
    powers = {}
    for y in range(rest.support_max + 3):
        powers[y] = (off, power.copy())
        power = np.convolve(power, qw)
        off += q.pmf.offset
    for y, w in rest.items():
        wf = float(w)
        for shift, coef in ((2, 1.0), (1, -2.0), (0, 1.0)):
            o, arr = powers[y + shift]
            end = min(o + len(arr), hi)
            if end > o:
                out[o:end] += wf * coef * arr[: end - o]
    return -2.0 * t * out


def energy_binomial_path(
    p,
    q: CompoundingDist,
    ts: Sequence[float] | None = None,
    threshold: float = REF_THRESHOLD,
    slack: float = 1e-9,
) -> TPath:
    """Energies along the path that equalizes the two largest parameters.

    Parameters are sorted descending first; the path runs from the
    equalized pair at ``t = 0`` to the original vector at
    ``t = (p1 - p2)/2``.  The reference is the compound law of the
    equal-parameter vector with the same total rate.
    """
    params = _as_params(p)
    if len(params) < 2:
        raise OutOfRangeError("need at least two parameters")
    lam = params.lam
    if lam <= 0:
        raise OutOfRangeError("parameter sum must be positive")
    ordered = ParamVector(tuple(sorted(params.p, reverse=True)))
    t_hi = (ordered.p[0] - ordered.p[1]) / 2
    if ts is None:
        ts = [0.0] if t_hi == 0 else np.linspace(0.0, t_hi, 21)
    ts = tuple(float(t) for t in ts)
    if any(t < 0 or t > t_hi + 1e-15 for t in ts):
        raise OutOfRangeError(f"ts must lie in [0, {t_hi}]")
    n = len(ordered)
    pbar = ParamVector((lam / n,) * n)
    ref = compound(q, bernoulli_sum(pbar))
    hi = n * q.support_max + 1
    ref_dense = ref.dense(0, hi)
    keep = ref_dense > threshold
    log_ref = np.zeros(hi)
    log_ref[keep] = np.log(ref_dense[keep])
    energies, discarded = [], []
    for t in ts:
        w = compound(q, bernoulli_sum(bernoulli_path_params(ordered, t)))
        e, d = _restricted_energy(w, log_ref, keep)
        energies.append(e)
        discarded.append(d)
    return TPath(ts, tuple(energies), ref, _monotone(energies, slack), tuple(discarded))
