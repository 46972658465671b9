"""Differential 1-forms on H_{2p+1} and the distributions they cut out.

The central object is the constant-coefficient form

    theta = sum_i (dx_i - dy_i),

whose kernel is a codimension-1 distribution of the tangent bundle. theta is
exact: it is the differential of leaf_value f = sum (x_i - y_i), so the level
sets of f foliate the group and ker(theta) is completely integrable. Along
pseudo-Riemannian geodesics theta(velocity) evolves by the factor exp(alpha t)
(see theta_transport_factor), hence vanishes identically once it vanishes at
one parameter value: ker(theta) is totally geodesic for that metric.

General forms carry either constant coefficients or a coefficient function of
the point; the exterior derivative of the latter is taken by central finite
differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import exp
from typing import Callable, Iterable, Optional

import numpy as np

from .core import GroupPoint, TangentVector
from .errors import DimensionMismatchError

__all__ = [
    "OneForm",
    "leaf_form",
    "dx_form",
    "contact_form",
    "theta_eval",
    "theta_transport_factor",
    "exterior_derivative_fd",
    "frobenius_involutivity_check",
    "theta_wedge_dtheta_max",
    "leaf_value",
    "batch_theta",
]


@dataclass(frozen=True)
class OneForm:
    """A 1-form in the coordinate cobasis (dx_1..dx_p, dy_1..dy_p, dz).

    Either ``const`` holds the 2p+1 constant coefficients, or ``fn`` maps
    point coordinates to the coefficient vector at that point.
    """

    p: int
    name: str
    const: Optional[np.ndarray] = None
    fn: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.p < 1:
            raise DimensionMismatchError("p must be >= 1")
        if (self.const is None) == (self.fn is None):
            raise ValueError("exactly one of const/fn must be given")
        if self.const is not None:
            c = np.asarray(self.const, dtype=float)
            if c.shape != (2 * self.p + 1,):
                raise DimensionMismatchError(
                    f"constant coefficients must have length {2 * self.p + 1}"
                )
            if not np.any(c):
                raise ValueError("a 1-form must not be identically zero")
            c.setflags(write=False)
            object.__setattr__(self, "const", c)

    @property
    def is_constant(self) -> bool:
        return self.const is not None

    @property
    def coeff_x(self) -> np.ndarray:
        return self.coefficients_at(None)[: self.p]

    @property
    def coeff_y(self) -> np.ndarray:
        return self.coefficients_at(None)[self.p : 2 * self.p]

    @property
    def coeff_z(self) -> float:
        return float(self.coefficients_at(None)[2 * self.p])

    def coefficients_at(self, at: GroupPoint | np.ndarray | None) -> np.ndarray:
        """Coefficient vector at a point (any point for constant forms)."""
        if self.const is not None:
            return self.const
        if at is None:
            raise ValueError(f"form {self.name!r} has point-dependent coefficients")
        coords = at.coords() if isinstance(at, GroupPoint) else np.asarray(at, dtype=float)
        c = np.asarray(self.fn(coords), dtype=float)
        if c.shape != (2 * self.p + 1,):
            raise DimensionMismatchError("coefficient function returned a wrong-length vector")
        return c


def leaf_form(p: int) -> OneForm:
    """theta = sum (dx_i - dy_i): the differential of leaf_value."""
    return OneForm(
        p, "theta", const=np.concatenate([np.ones(p), -np.ones(p), [0.0]])
    )


def dx_form(p: int, i: int = 1) -> OneForm:
    """The single coordinate form dx_i (1-based i)."""
    if not 1 <= i <= p:
        raise DimensionMismatchError(f"i must be in 1..{p}")
    c = np.zeros(2 * p + 1)
    c[i - 1] = 1.0
    return OneForm(p, f"dx{i}", const=c)


def contact_form(p: int) -> OneForm:
    """dz + sum x_i dy_i: nowhere integrable (theta ^ dtheta != 0)."""

    def coeffs(coords: np.ndarray) -> np.ndarray:
        out = np.zeros(2 * p + 1)
        out[p : 2 * p] = coords[:p]
        out[2 * p] = 1.0
        return out

    return OneForm(p, "contact", fn=coeffs)


def theta_eval(form: OneForm, at: GroupPoint, u: TangentVector) -> float:
    """Apply the form at a point to a tangent vector."""
    if form.p != u.p or form.p != at.p:
        raise DimensionMismatchError(
            f"theta_eval: form p = {form.p}, point p = {at.p}, vector p = {u.p}"
        )
    c = form.coefficients_at(at)
    return float(np.dot(c, u.coords()))


def theta_transport_factor(alpha: float, t: float) -> float:
    """cosh(alpha t) + sinh(alpha t) = exp(alpha t).

    The factor by which theta(velocity) is transported along pseudo-Riemannian
    geodesics; equals 1 identically when alpha = 0.
    """
    return exp(alpha * t)


def exterior_derivative_fd(form: OneForm, at: GroupPoint, h: float = 1e-5) -> np.ndarray:
    """(dtheta)_ij = d_i theta_j - d_j theta_i, antisymmetric (n, n).

    Central differences for point-dependent coefficients; constant forms are
    closed, so their result is the zero matrix exactly.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if form.p != at.p:
        raise DimensionMismatchError(f"exterior_derivative_fd: p = {form.p} vs {at.p}")
    n = 2 * form.p + 1
    if form.is_constant:
        return np.zeros((n, n))
    coords = at.coords()
    J = np.empty((n, n))  # J[i, j] = d_i theta_j
    for d in range(n):
        cp = coords.copy()
        cm = coords.copy()
        cp[d] += h
        cm[d] -= h
        J[d] = (form.coefficients_at(cp) - form.coefficients_at(cm)) / (2.0 * h)
    return J - J.T


def theta_wedge_dtheta_max(
    form: OneForm, points: Iterable[GroupPoint], h: float = 1e-5
) -> float:
    """Largest |(theta ^ dtheta)_{ijk}| over the sample points.

    Components on i < j < k: theta_i dtheta_jk - theta_j dtheta_ik
    + theta_k dtheta_ij. Zero everywhere iff ker(theta) is involutive
    (codimension 1), by the Frobenius criterion.
    """
    n = 2 * form.p + 1
    worst = 0.0
    for pt in points:
        c = form.coefficients_at(pt)
        d = exterior_derivative_fd(form, pt, h)
        for i, j, k in combinations(range(n), 3):
            comp = c[i] * d[j, k] - c[j] * d[i, k] + c[k] * d[i, j]
            worst = max(worst, abs(float(comp)))
    return worst


def frobenius_involutivity_check(
    form: OneForm,
    points: Iterable[GroupPoint],
    h: float = 1e-5,
    tol: float = 1e-6,
) -> bool:
    """True iff theta ^ dtheta vanishes (within tol) at every sample point."""
    return theta_wedge_dtheta_max(form, points, h) < tol


def leaf_value(at: GroupPoint) -> float:
    """f = sum (x_i - y_i); level sets are the leaves of ker(theta)."""
    return float(np.sum(at.x) - np.sum(at.y))


def batch_theta(form: OneForm, states: np.ndarray, p: int) -> np.ndarray:
    """form(velocity) for every row of a (..., 2(2p+1)) state array."""
    states = np.asarray(states, dtype=float)
    n = 2 * p + 1
    vel = states[..., n:]
    if form.is_constant:
        return vel @ form.const
    flat = states.reshape(-1, 2 * n)
    out = np.array(
        [float(np.dot(form.coefficients_at(row[:n]), row[n:])) for row in flat]
    )
    return out.reshape(states.shape[:-1])
