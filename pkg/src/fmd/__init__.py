"""Frequency-mimicking predictive distributions.

Build a predictive vector ``p[a,N] = P(E_{N+1} | S_N = a)`` from a
frequency-mimicking assertion and a completion rule, invert it to the mass
function of ``S_{N+1}``, reduce or extend it, and compare it with its
incomplete-beta limit as ``N`` grows.
"""

from .calculus import (
    ExtensionScenario,
    concurrency_check,
    extend_assertion,
    forced_extension,
    interior_mass,
    line_system,
    theorem1_bound,
    theorem1_mass,
    theorem2_sum_bound_check,
    verify_theorem3,
)
from .completions import CompletionKind, PaNAssertion, build_predictive, completion_values, parse_assertion
from .core import (
    DensityHistogram,
    MassFunction,
    PredictiveVector,
    density_histogram,
    harmonic_sum,
    invert_to_mass,
    mass_to_predictive,
    reduce_mass_one,
    reduce_mass_to,
    reduce_predictive,
    roundtrip_check,
)
from .errors import FMDError, PrecisionError
from .limits import (
    IncompleteBetaParams,
    compare_to_limit,
    fm_assertion,
    fm_window,
    incomplete_beta_mixture_mass,
)

__version__ = "0.1.0"

__all__ = [
    "CompletionKind",
    "DensityHistogram",
    "ExtensionScenario",
    "FMDError",
    "IncompleteBetaParams",
    "MassFunction",
    "PaNAssertion",
    "PrecisionError",
    "PredictiveVector",
    "build_predictive",
    "compare_to_limit",
    "completion_values",
    "concurrency_check",
    "density_histogram",
    "extend_assertion",
    "fm_assertion",
    "fm_window",
    "forced_extension",
    "harmonic_sum",
    "incomplete_beta_mixture_mass",
    "interior_mass",
    "invert_to_mass",
    "line_system",
    "mass_to_predictive",
    "parse_assertion",
    "reduce_mass_one",
    "reduce_mass_to",
    "reduce_predictive",
    "roundtrip_check",
    "theorem1_bound",
    "theorem1_mass",
    "theorem2_sum_bound_check",
    "verify_theorem3",
]
