"""Group-invariant rank-bounded linear regression.

Closed-form optimizers for hard-wired, regularized, and data-augmented
invariant regression, regularization-path tracing, exhaustive critical-point
enumeration, gradient-descent training harnesses, and tangent-kernel checks
for shallow nonlinear networks.
"""

from . import activations, errors, groups, linalg, ntk, solvers, tolerances, training

__all__ = [
    "activations",
    "errors",
    "groups",
    "linalg",
    "ntk",
    "solvers",
    "tolerances",
    "training",
]

__version__ = "0.1.0"
