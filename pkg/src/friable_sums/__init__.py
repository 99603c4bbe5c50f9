"""Exponential sums over smooth (friable) integers.

Exact evaluation of smooth exponential sums and their relatives, the
combinatorial decompositions behind them as verifiable computations,
closed-form bound envelopes with empirical ratio reports, and the
piecewise-linear exponent optimization with its relevance-region chart.
"""

from .arith import divisor_count, e_frac, eq_phase, pow_mod
from .bounds import (
    BoundReport,
    LFactor,
    envelope_e,
    envelope_ft,
    envelope_thm1,
    l_factor,
    nontrivial_range_cor14,
    report,
)
from .decomp import (
    ArithTables,
    BuchstabExpansion,
    RegroupWeights,
    WSplit,
    bilinear_regroup,
    buchstab_expand,
    heath_brown_lambda_check,
    split_partition_sums,
    vaughan_lambda_check,
    w_split,
)
from .optimizer import (
    ExponentPoint,
    PeakRegime,
    RegionSet,
    TrivialRegimeError,
    eta,
    figure1_regions,
    kappa,
    optimal_omega,
    optimal_point,
    oracle_optimal_omega,
    saving_exponents,
    two_peaks_regime,
)
from .sieve import FactorSieve, SmoothSet, build_sieve, psi, smooth_members
from .sums import (
    SumParams,
    SumValue,
    complete_monomial_sum,
    moment_count,
    sum_bilinear,
    sum_linear,
    sum_power,
    sum_prime_convolution,
    sum_theta,
    sum_twisted,
)

__version__ = "0.1.0"

__all__ = [
    "ArithTables",
    "BoundReport",
    "BuchstabExpansion",
    "ExponentPoint",
    "FactorSieve",
    "LFactor",
    "PeakRegime",
    "RegionSet",
    "RegroupWeights",
    "SmoothSet",
    "SumParams",
    "SumValue",
    "TrivialRegimeError",
    "WSplit",
    "bilinear_regroup",
    "buchstab_expand",
    "build_sieve",
    "complete_monomial_sum",
    "divisor_count",
    "e_frac",
    "envelope_e",
    "envelope_ft",
    "envelope_thm1",
    "eq_phase",
    "eta",
    "figure1_regions",
    "heath_brown_lambda_check",
    "kappa",
    "l_factor",
    "moment_count",
    "nontrivial_range_cor14",
    "optimal_omega",
    "optimal_point",
    "oracle_optimal_omega",
    "pow_mod",
    "psi",
    "report",
    "saving_exponents",
    "smooth_members",
    "split_partition_sums",
    "sum_bilinear",
    "sum_linear",
    "sum_power",
    "sum_prime_convolution",
    "sum_theta",
    "sum_twisted",
    "two_peaks_regime",
    "vaughan_lambda_check",
    "w_split",
]
