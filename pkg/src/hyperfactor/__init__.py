"""F-factors in randomly perturbed k-uniform hypergraphs at desk scale.

Exact density parameters of small patterns, seeded random k-graphs, an exact
factor decider, the absorbing machinery, and Monte Carlo experiments.
"""

__version__ = "0.1.0"

from .exceptions import (
    AbsorberBuildError,
    AbsorptionError,
    GuardError,
    HyperfactorError,
    InvalidArityError,
    InvalidHypergraphError,
    KhgFormatError,
    UndefinedParameterError,
)
from .hypergraph import Hypergraph, complete, empty, parse_khg, format_khg, read_khg, write_khg
from .pattern import Pattern, d_star, phi, phi_exact, is_strictly_balanced, alpha_is_zero
from .random_models import SeededSampler, sample_binomial, sample_coupled, perturb
from .factor import Tiling, has_factor, max_tiling, brute_force_oracle

__all__ = [
    "AbsorberBuildError",
    "AbsorptionError",
    "GuardError",
    "HyperfactorError",
    "InvalidArityError",
    "InvalidHypergraphError",
    "KhgFormatError",
    "UndefinedParameterError",
    "Hypergraph",
    "complete",
    "empty",
    "parse_khg",
    "format_khg",
    "read_khg",
    "write_khg",
    "Pattern",
    "d_star",
    "phi",
    "phi_exact",
    "is_strictly_balanced",
    "alpha_is_zero",
    "SeededSampler",
    "sample_binomial",
    "sample_coupled",
    "perturb",
    "Tiling",
    "has_factor",
    "max_tiling",
    "brute_force_oracle",
]
