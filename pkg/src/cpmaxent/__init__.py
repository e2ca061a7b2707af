"""Discrete compound distributions, entropies, interpolation semigroups,
and numerical verification of maximum-entropy and log-concavity properties
at desk scale."""

from . import combinatorics, compound, infotools, pmf, semigroup, verify
from .compound import (
    CompoundingDist,
    ParamVector,
    bernoulli_sum,
    compound as compound_pmf,
    compound_bernoulli,
    compound_binomial,
    compound_poisson_mixture,
    compound_poisson_panjer,
    third_moment_bound,
)
from .errors import (
    AllZeroError,
    AlphaZeroError,
    BadSupportError,
    DomainError,
    HypothesisFailedError,
    InfeasibleError,
    NegativeRateError,
    NegativeWeightError,
    NotAMatroidError,
    OutOfRangeError,
    SupportMismatchError,
    TooLargeError,
    ZeroMeanError,
    ZeroQ1Error,
)
from .infotools import Base, EntropyValue, entropy, poisson_entropy_upper, relative_entropy, sample_ulc
from .pmf import (
    Pmf,
    ShapeVerdict,
    bernoulli,
    binomial,
    convolve,
    convolve_power,
    delta,
    falling_factorial_moment,
    geometric,
    is_log_concave,
    is_ultra_log_concave,
    is_unimodal,
    moment,
    normalize,
    poisson,
    size_bias,
    sup_distance,
    uniform,
)
from .semigroup import (
    AlphaPath,
    TPath,
    bernoulli_path_params,
    check_score_decreasing,
    energy_binomial_path,
    energy_poisson_path,
    score,
    u_alpha,
    u_alpha_derivative,
    u_alpha_q,
)
from .verify import Hypothesis, VerificationReport

__version__ = "0.1.0"
