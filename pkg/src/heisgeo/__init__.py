"""Heisenberg group H_{2p+1}: left-invariant metrics, geodesics, distributions.

The group carries a pseudo-Riemannian metric of signature (p, p+1) and a
Riemannian sibling; geodesics of the former are known in closed form, and the
constant 1-form theta = sum(dx_i - dy_i) cuts out a codimension-1 completely
integrable distribution that is totally geodesic for the pseudo metric but
not for the Riemannian one. This package computes all of it and verifies the
claims numerically against an independent finite-difference/RK4 oracle.
"""

from .core import (
    GroupPoint,
    MetricKind,
    MetricSpec,
    TangentVector,
    group_inverse,
    group_multiply,
    identity,
    left_translation_differential,
    metric_components,
    metric_eval,
    signature,
)
from .errors import (
    DegenerateMetricError,
    DimensionMismatchError,
    GeometryError,
    NonFiniteStateError,
    RangeExceededError,
)
from .forms import (
    OneForm,
    contact_form,
    dx_form,
    exterior_derivative_fd,
    frobenius_involutivity_check,
    leaf_form,
    leaf_value,
    theta_eval,
    theta_transport_factor,
)
from .geodesics import (
    GeodesicState,
    InitialConditions,
    Trajectory,
    alpha,
    christoffel_fd,
    closed_form_display_state,
    closed_form_state,
    closed_form_states,
    euler_lagrange_residual,
    geodesic_ode_rhs,
    integrate_geodesic,
    lagrangian,
)
from .kernels import backend_name
from .rng import SplitMix64, child_rng, child_seed
from .verify import (
    Counterexample,
    SearchResult,
    VerificationReport,
    riemannian_counterexample_search,
    run_verification_suite,
    search_tangency_violation,
    totally_geodesic_verify,
)

__version__ = "0.1.0"

__all__ = [
    "GroupPoint",
    "TangentVector",
    "MetricKind",
    "MetricSpec",
    "identity",
    "group_multiply",
    "group_inverse",
    "metric_components",
    "metric_eval",
    "signature",
    "left_translation_differential",
    "InitialConditions",
    "GeodesicState",
    "Trajectory",
    "alpha",
    "lagrangian",
    "closed_form_state",
    "closed_form_states",
    "closed_form_display_state",
    "euler_lagrange_residual",
    "christoffel_fd",
    "geodesic_ode_rhs",
    "integrate_geodesic",
    "OneForm",
    "leaf_form",
    "dx_form",
    "contact_form",
    "theta_eval",
    "theta_transport_factor",
    "exterior_derivative_fd",
    "frobenius_involutivity_check",
    "leaf_value",
    "VerificationReport",
    "Counterexample",
    "SearchResult",
    "totally_geodesic_verify",
    "search_tangency_violation",
    "riemannian_counterexample_search",
    "run_verification_suite",
    "SplitMix64",
    "child_seed",
    "child_rng",
    "backend_name",
    "GeometryError",
    "DimensionMismatchError",
    "DegenerateMetricError",
    "RangeExceededError",
    "NonFiniteStateError",
    "__version__",
]
