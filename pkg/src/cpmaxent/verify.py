"""Numerical verification of the maximum-entropy and log-concavity claims.

Each check returns a :class:`VerificationReport`: the hypotheses actually
evaluated (with signed margins), whether the conclusion held, and the margins
observed.  A report whose hypotheses fail is *vacuous*, never a failure --
counterexamples outside the hypotheses are expected behavior and are surfaced
through the margins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import pmf as pm
from .compound import (
    CompoundingDist,
    ParamVector,
    _as_params,
    bernoulli_sum,
    compound,
    compound_binomial,
    compound_poisson_panjer,
)
from .errors import BadSupportError, InfeasibleError, OutOfRangeError, ZeroQ1Error
from .infotools import entropy, relative_entropy, sample_ulc
from .pmf import Pmf, ShapeVerdict

# LC scans of a compound Poisson look at least this far even when the mass
# criterion is met earlier.
MIN_SCAN_POINTS = 50


@dataclass(frozen=True)
class Hypothesis:
    name: str
    holds: bool
    margin: float


@dataclass(frozen=True)
class VerificationReport:
    claim_id: str
    hypotheses: tuple[Hypothesis, ...]
    conclusion_holds: bool
    margins: dict[str, float] = field(default_factory=dict)
    instances_run: int = 1

    @property
    def vacuous(self) -> bool:
        return not all(h.holds for h in self.hypotheses)

    @property
    def status(self) -> str:
        if self.vacuous:
            return "vacuous"
        return "pass" if self.conclusion_holds else "fail"

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "hypotheses": [
                {"name": h.name, "holds": h.holds, "margin": h.margin}
                for h in self.hypotheses
            ],
            "conclusion_holds": self.conclusion_holds,
            "margins": dict(self.margins),
            "instances_run": self.instances_run,
        }


def _hyp(name: str, verdict: ShapeVerdict) -> Hypothesis:
    return Hypothesis(name, verdict.holds, verdict.worst_margin)


def cpo_scan_pmf(lam: float, q: CompoundingDist, n_min: int = MIN_SCAN_POINTS) -> Pmf:
    """Compound Poisson pmf long enough for a shape scan: mass-complete and
    at least ``n_min`` points."""
    p = compound_poisson_panjer(lam, q)
    if p.support_max < n_min:
        p = compound_poisson_panjer(lam, q, n_max=n_min)
    return p


# ---------------------------------------------------------------------------
# maximum-entropy sweeps
# ---------------------------------------------------------------------------


def _map_trials(fn, count: int, jobs: int) -> list:
    """Run independent trials, optionally on a thread pool; results come
    back in trial order either way."""
    if jobs <= 1:
        return [fn(i) for i in range(count)]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, range(count)))


def verify_maxent_poisson(
    q: CompoundingDist,
    lam: float,
    trials: int = 100,
    seed: int = 0,
    max_support: int = 30,
    tol: float = 1e-9,
    jobs: int = 1,
) -> VerificationReport:
    """Sweep random ultra-log-concave count laws with mean ``lam`` and check
    the compound Poisson dominates in entropy, including the relative-entropy
    strengthening ``D(C_Q P || C_Q Po) <= H(C_Q Po) - H(C_Q P)``."""
    if trials < 1:
        raise OutOfRangeError("trials must be >= 1")
    hyps = (
        _hyp("q_log_concave", pm.is_log_concave(q.pmf, tol)),
        _hyp("compound_poisson_log_concave", pm.is_log_concave(cpo_scan_pmf(lam, q), tol)),
    )
    ref = compound_poisson_panjer(lam, q, n_max=max_support * q.support_max)
    h_ref = entropy(ref).value

    def trial(i: int) -> tuple[float, float]:
        p = sample_ulc(max_support, lam, seed + i)
        cqp = compound(q, p)
        gap = h_ref - entropy(cqp).value
        strong = gap - relative_entropy(cqp, ref).value
        return gap, strong

    results = _map_trials(trial, trials, jobs)
    min_gap = min(g for g, _ in results)
    min_strong_gap = min(s for _, s in results)
    ok = min_gap >= -tol and min_strong_gap >= -tol
    return VerificationReport(
        "compound-poisson-max-entropy",
        hyps,
        ok,
        {
            "reference_entropy_nats": h_ref,
            "min_entropy_gap": min_gap,
            "min_relative_entropy_gap": min_strong_gap,
        },
        trials,
    )


def sample_rate_vector(n: int, lam: float, rng: np.random.Generator) -> ParamVector:
    """Uniform point of the simplex scaled to total ``lam``, rejecting
    vectors with an entry above 1."""
    for _ in range(10000):
        p = rng.dirichlet(np.ones(n)) * lam
        if np.all(p <= 1.0):
            return ParamVector(tuple(float(x) for x in p))
    raise InfeasibleError(f"could not sample a valid vector for n={n}, lam={lam}")


def verify_maxent_binomial(
    q: CompoundingDist,
    n: int,
    lam: float,
    grid: int = 100,
    seed: int = 0,
    tol: float = 1e-9,
    jobs: int = 1,
) -> VerificationReport:
    """Sweep random parameter vectors with sum ``lam`` and check the
    equal-parameter compound law dominates in entropy.

    Jump laws enter as finite pmfs (truncations included), so the
    finite-support tail condition holds by construction; the margin of the
    ``q_finite_support`` hypothesis records the truncated mass.
    """
    if not 0 < lam <= n:
        raise OutOfRangeError(f"need 0 < lam <= n, got lam={lam}, n={n}")
    cbin = compound_binomial(n, lam / n, q)
    hyps = (
        _hyp("q_log_concave", pm.is_log_concave(q.pmf, tol)),
        _hyp("compound_binomial_log_concave", pm.is_log_concave(cbin, tol)),
        Hypothesis("q_finite_support", True, -q.pmf.tail_eps),
    )
    h_ref = entropy(cbin).value

    def trial(i: int) -> tuple[float, tuple[float, ...]]:
        p = sample_rate_vector(n, lam, np.random.default_rng((seed, i)))
        gap = h_ref - entropy(compound(q, bernoulli_sum(p))).value
        return gap, p.p

    results = _map_trials(trial, grid, jobs)
    min_gap, worst_p = min(results, key=lambda t: t[0])
    margins = {"reference_entropy_nats": h_ref, "min_entropy_gap": min_gap}
    for i, x in enumerate(worst_p):
        margins[f"worst_p_{i}"] = x
    return VerificationReport(
        "compound-binomial-max-entropy", hyps, min_gap >= -tol, margins, grid
    )


def chi_counterexample() -> VerificationReport:
    """Reproduce the base-2 entropy counterexample for jumps uniform on
    {1, 2}, parameters (0.00125, 0.00875), total rate 0.01.

    The three strict inequalities are evaluated in bits; the published
    bracketing constants are only reproducible in base 2.
    """
    q = CompoundingDist.uniform(1, 2)
    lam = 0.01
    h_cbin = entropy(compound_binomial(2, lam / 2, q), "bit").value
    h_bp = entropy(compound(q, bernoulli_sum((0.00125, 0.00875))), "bit").value
    h_cpo = entropy(compound_poisson_panjer(lam, q), "bit").value
    margins = {
        "compound_binomial_bits": h_cbin,
        "bernoulli_sum_bits": h_bp,
        "compound_poisson_bits": h_cpo,
        "compound_binomial_margin": 0.090798 - h_cbin,
        "bernoulli_sum_margin": h_bp - 0.090804,
        "compound_poisson_margin": 0.090765 - h_cpo,
    }
    ok = (
        margins["compound_binomial_margin"] > 0
        and margins["bernoulli_sum_margin"] > 0
        and margins["compound_poisson_margin"] > 0
    )
    return VerificationReport(
        "compound-binomial-entropy-counterexample", (), ok, margins, 1
    )


# ---------------------------------------------------------------------------
# log-concavity conditions
# ---------------------------------------------------------------------------


def check_bernoulli_sum_lc(p, q: CompoundingDist, tol: float = 1e-9) -> VerificationReport:
    """Parameters all above ``Q(2) / (Q(2) + Q(1)^2)`` and a log-concave jump
    law force a log-concave compound Bernoulli sum; the direct shape test is
    reported either way."""
    params = _as_params(p)
    q1 = float(q.prob(1))
    q2 = float(q.prob(2))
    thr = q2 / (q2 + q1 * q1) if (q2 + q1 * q1) > 0 else 1.0
    margin = (min(params.p) - thr) if params.p else -thr
    hyps = (
        _hyp("q_log_concave", pm.is_log_concave(q.pmf, tol)),
        Hypothesis("parameters_above_threshold", margin >= -tol, margin),
    )
    lc = pm.is_log_concave(compound(q, bernoulli_sum(params)), tol)
    return VerificationReport(
        "compound-bernoulli-sum-log-concavity",
        hyps,
        lc.holds,
        {"parameter_threshold": thr, "compound_lc_margin": lc.worst_margin},
        1,
    )


def check_necessary_condition(lam: float, q: CompoundingDist, tol: float = 1e-9) -> VerificationReport:
    """Log-concavity of the compound Poisson forces
    ``lam >= 2 Q(2) / Q(1)^2``; verified as the contrapositive."""
    q1 = float(q.prob(1))
    if q1 == 0:
        raise ZeroQ1Error("compound Poisson with Q(1)=0 is never log-concave")
    rate_margin = lam - 2 * float(q.prob(2)) / (q1 * q1)
    lc = pm.is_log_concave(cpo_scan_pmf(lam, q), tol)
    violated = rate_margin < -tol and lc.holds
    return VerificationReport(
        "compound-poisson-log-concavity-necessary",
        (),
        not violated,
        {"rate_margin": rate_margin, "compound_poisson_lc_margin": lc.worst_margin},
        1,
    )


def _hansen_identity_residual(p: list[float], r: list[float], m_max: int) -> float:
    """Largest relative residual of the quadratic recursion identity
    ``m(m+2)(p_{m+1}^2 - p_m p_{m+2}) = p_{m+1}(r_0 p_m - p_{m+1}) + double sum``.

    Residuals are scaled by the largest product magnitude entering either
    side before cancellation, so catastrophic cancellation of equal terms
    does not masquerade as an identity failure.
    """

    def pv(i: int) -> float:
        return p[i] if 0 <= i < len(p) else 0.0

    def rv(i: int) -> float:
        return r[i] if 0 <= i < len(r) else 0.0

    worst = 0.0
    for m in range(0, m_max + 1):
        lhs = m * (m + 2) * (pv(m + 1) ** 2 - pv(m) * pv(m + 2))
        first = pv(m + 1) * (rv(0) * pv(m) - pv(m + 1))
        total = first
        scale = max(
            m * (m + 2) * pv(m + 1) ** 2,
            m * (m + 2) * pv(m) * pv(m + 2),
            pv(m + 1) * rv(0) * pv(m),
            pv(m + 1) ** 2,
        )
        for l in range(m + 1):
            for k in range(l + 1):
                term = (pv(m - l) * pv(m - k - 1) - pv(m - k) * pv(m - l - 1)) * (
                    rv(k + 1) * rv(l) - rv(l + 1) * rv(k)
                )
                total += term
                scale = max(
                    scale,
                    pv(m - l) * pv(m - k - 1) * rv(k + 1) * rv(l),
                    pv(m - k) * pv(m - l - 1) * rv(l + 1) * rv(k),
                )
        if scale == 0.0:
            continue
        worst = max(worst, abs(lhs - total) / scale)
    return worst


def check_hansen(
    lam: float,
    q: CompoundingDist,
    n_scan: int = 200,
    m_identity: int = 50,
    tol: float = 1e-9,
) -> VerificationReport:
    """Log-concave size-biased jumps plus ``lam Q(1)^2 >= 2 Q(2)`` force a
    log-concave compound Poisson; also validates Hansen's recursion identity
    as a floating-point residual."""
    q1 = float(q.prob(1))
    if q1 == 0:
        raise ZeroQ1Error("check needs Q(1) > 0")
    rate_margin = lam * q1 * q1 - 2 * float(q.prob(2))
    hyps = (
        _hyp("q_size_biased_log_concave", pm.is_log_concave(pm.size_bias(q.pmf), tol)),
        Hypothesis("rate_condition", rate_margin >= -tol, rate_margin),
    )
    p = compound_poisson_panjer(lam, q, n_max=n_scan)
    lc = pm.is_log_concave(p, tol)
    dense = [float(w) for w in p.dense(0, p.support_max + 1)]
    r = [lam * (j + 1) * float(q.prob(j + 1)) for j in range(q.support_max)]
    m_max = min(m_identity, len(dense) - 2)
    residual = _hansen_identity_residual(dense, r, m_max) if m_max >= 0 else 0.0
    ok = lc.holds and residual <= tol
    return VerificationReport(
        "compound-poisson-log-concavity-sufficient",
        hyps,
        ok,
        {
            "rate_margin": rate_margin,
            "compound_poisson_lc_margin": lc.worst_margin,
            "identity_residual_max": residual,
        },
        1,
    )


def check_q2pt(p: Pmf, q: CompoundingDist, tol: float = 1e-9) -> VerificationReport:
    """For jumps on {1, 2}: an ultra-log-concave count law whose ratio
    ``(x+1) p(x+1)/p(x)`` stays above ``2 Q(2)/Q(1)^2`` gives a log-concave
    compound law.

    The ratio condition is evaluated cross-multiplied,
    ``(x+1) p(x+1) Q(1)^2 - 2 Q(2) p(x) >= 0``, so a vanishing ``Q(1)``
    degrades to a plainly failed hypothesis instead of a division error.
    """
    if q.pmf.offset != 1 or q.support_max > 2:
        raise BadSupportError("jump law must be supported on {1, 2}")
    q1 = float(q.prob(1))
    q2 = float(q.prob(2))
    scale = max(float(w) for w in p.weights)
    margins = [
        (x + 1) * float(p.prob(x + 1)) * q1 * q1 - 2 * q2 * float(p.prob(x))
        for x in range(p.offset, p.support_max)
    ]
    ratio_margin = min(margins) if margins else 0.0
    hyps = (
        _hyp("p_ultra_log_concave", pm.is_ultra_log_concave(p, tol)),
        Hypothesis("ratio_condition", ratio_margin >= -tol * max(scale, 1.0), ratio_margin),
    )
    lc = pm.is_log_concave(compound(q, p), tol)
    return VerificationReport(
        "two-point-compound-log-concavity",
        hyps,
        lc.holds,
        {"ratio_margin": ratio_margin, "compound_lc_margin": lc.worst_margin},
        1,
    )


def check_geometric_compound(
    p: Pmf, a: float, tol: float = 1e-9, tail_eps: float = pm.DEFAULT_TAIL_EPS
) -> VerificationReport:
    """Geometric jumps: a log-concave count law satisfying the three-point
    ratio condition gives a log-concave compound law."""
    if not 0 < a < 1:
        raise OutOfRangeError(f"a = {a} outside (0, 1)")
    q = CompoundingDist.geometric(a, tail_eps)
    p0, p1, p2 = (float(p.prob(x)) for x in (0, 1, 2))
    defined = p0 > 0 and p1 > 0
    if defined:
        ratio_margin = (p1 * p1 - p0 * p2) / (p0 * p1) - (1 - a) / a
        ratio_ok = ratio_margin >= -tol
    else:
        ratio_margin, ratio_ok = 0.0, False
    hyps = (
        _hyp("p_log_concave", pm.is_log_concave(p, tol)),
        Hypothesis("ratio_condition", ratio_ok, ratio_margin),
    )
    lc = pm.is_log_concave(compound(q, p), tol)
    return VerificationReport(
        "geometric-compound-log-concavity",
        hyps,
        lc.holds,
        {"ratio_margin": ratio_margin, "compound_lc_margin": lc.worst_margin},
        1,
    )


def check_weak_condition(r: Pmf, q: CompoundingDist, tol: float = 1e-9) -> ShapeVerdict:
    """Whether ``x -> log r(x) - sum_v q(v) log r(x+v)`` is non-decreasing.

    Points where any needed value of ``r`` vanishes are skipped; this is the
    weakest reference property under which the energy argument still runs.
    """
    vs = [(v, float(w)) for v, w in q.pmf.items() if w]
    xs = []
    gs = []
    for x in range(r.offset, r.support_max + 1):
        rx = float(r.prob(x))
        if rx <= 0:
            continue
        terms = []
        ok = True
        for v, w in vs:
            rv = float(r.prob(x + v))
            if rv <= 0:
                ok = False
                break
            terms.append(w * math.log(rv))
        if ok:
            xs.append(x)
            gs.append(math.log(rx) - sum(terms))
    if len(xs) < 2:
        return ShapeVerdict(True, r.offset, 0.0)
    worst_x, worst_m = xs[1], gs[1] - gs[0]
    for i in range(1, len(xs) - 1):
        m = gs[i + 1] - gs[i]
        if m < worst_m:
            worst_x, worst_m = xs[i + 1], m
    return ShapeVerdict(worst_m >= -tol, worst_x, worst_m)
