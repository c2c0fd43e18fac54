"""nilspec: a numerical laboratory for the large-scale geometry of nilmanifolds.

Builds periodic metrics on nilpotent groups, solves the periodic corrector
problem for the effective (Albanese) tensor, computes rescaled-ball Dirichlet
spectra, Carnot-Caratheodory balls and Kohn sub-Laplacian eigenvalues, stable
norms and asymptotic volumes, and cross-checks the inequalities tying them
together.
"""

__version__ = "0.1.0"

from . import errors
from .algebra import (
    GradedNilpotentAlgebra,
    dilate,
    graded_limit,
    graded_limit_bracket,
    group_inverse,
    group_multiply,
    group_power,
    heisenberg,
    left_invariant_frame,
    named_algebra,
    torus,
    validate_algebra,
)
from .expr import check_lattice_periodicity, evaluate, parse, pretty
from .metric import (
    MetricField,
    left_invariant_metric,
    metric_at,
    metric_field,
    pseudo_left_invariant_metric,
    reduce_to_fundamental_domain,
    rescaled_coefficients,
)

__all__ = [
    "GradedNilpotentAlgebra",
    "MetricField",
    "check_lattice_periodicity",
    "dilate",
    "errors",
    "evaluate",
    "graded_limit",
    "graded_limit_bracket",
    "group_inverse",
    "group_multiply",
    "group_power",
    "heisenberg",
    "left_invariant_frame",
    "left_invariant_metric",
    "metric_at",
    "metric_field",
    "named_algebra",
    "parse",
    "pretty",
    "pseudo_left_invariant_metric",
    "reduce_to_fundamental_domain",
    "rescaled_coefficients",
    "torus",
    "validate_algebra",
]
