"""Circulant Riemannian metrics on R^4 and their almost product structure.

Given coefficient functions A, B, C, builds the metric with circulant
matrix (A, B, C, B), the structure P = Q^2 from the cyclic shift Q, the
Levi-Civita connection, the fundamental tensor F = nabla g~, the Lee form
theta, and decides membership in the classes W0, W1 (= W3bar + W6bar), W2
and W1 + W2.
"""

__version__ = "0.1.0"

from .classifier import SamplePlan, Tolerances, classify, identity_residuals
from .connection import (christoffel_closed, christoffel_generic,
                         covariant_derivative_02, covariant_derivative_11)
from .corpus import builtin, corpus
from .errors import (CirculantError, DomainError, DomainViolation,
                     EmptySampleError, ExprSyntaxError, MetricFileError)
from .expr import ScalarField, eval_expr, eval_jet, parse, satisfies
from .fundamental import (f_closed, f_oracle, nijenhuis, theta_closed,
                          theta_oracle, theta_tilde)
from .manifold import (MetricSpec, PointJetBundle, associated_metric_at,
                       bundle_at, inverse_closed, load_metric, metric_at,
                       p_matrix, parse_metric, q_matrix)

__all__ = [
    "SamplePlan", "Tolerances", "classify", "identity_residuals",
    "christoffel_closed", "christoffel_generic", "covariant_derivative_02",
    "covariant_derivative_11", "builtin", "corpus", "CirculantError",
    "DomainError", "DomainViolation", "EmptySampleError", "ExprSyntaxError",
    "MetricFileError", "ScalarField", "eval_expr", "eval_jet", "parse",
    "satisfies", "f_closed", "f_oracle", "nijenhuis", "theta_closed",
    "theta_oracle", "theta_tilde", "MetricSpec", "PointJetBundle",
    "associated_metric_at", "bundle_at", "inverse_closed", "load_metric",
    "metric_at", "p_matrix", "parse_metric", "q_matrix",
]
