"""The Heisenberg group H_{2p+1} and its two left-invariant metrics.

Points are written (x_1..x_p, y_1..y_p, z) and multiply by

    (x, y, z) * (x~, y~, z~) = (x + x~, y + y~, z + z~ - sum_i x_i y~_i),

a 2-step nilpotent (non-commutative) product. Two metric tensors are
supported, both left-invariant:

  * pseudo-Riemannian, signature (p, p+1):
        g = -sum dx_i^2 + sum dy_i^2 + (dz + sum x_i dy_i)^2
  * Riemannian sibling, identical except the dx_i^2 sum enters with +.

The coordinate basis order (d/dx_1..d/dx_p, d/dy_1..d/dy_p, d/dz) is fixed
everywhere in the package: matrices, flattened state vectors, CSV columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateMetricError, DimensionMismatchError

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
]

# A metric eigenvalue below this fraction of the largest magnitude means a
# degenerate matrix, which cannot happen for either supported metric.
DEGENERACY_RTOL = 1e-9


def _as_vector(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class GroupPoint:
    """A point (x, y, z) of H_{2p+1}; x and y have length p >= 1."""

    x: np.ndarray
    y: np.ndarray
    z: float

    def __post_init__(self):
        x = _as_vector(self.x, "x")
        y = _as_vector(self.y, "y")
        if len(x) < 1:
            raise DimensionMismatchError("p must be >= 1 (x is empty)")
        if len(x) != len(y):
            raise DimensionMismatchError(
                f"x and y must have equal length, got {len(x)} and {len(y)}"
            )
        z = float(self.z)
        if not (np.isfinite(x).all() and np.isfinite(y).all() and np.isfinite(z)):
            raise ValueError("point components must be finite")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    @property
    def p(self) -> int:
        return len(self.x)

    def coords(self) -> np.ndarray:
        """Coordinates in basis order (x_1..x_p, y_1..y_p, z)."""
        return np.concatenate([self.x, self.y, [self.z]])

    @classmethod
    def from_coords(cls, coords: np.ndarray) -> "GroupPoint":
        coords = _as_vector(coords, "coords")
        if len(coords) < 3 or len(coords) % 2 == 0:
            raise DimensionMismatchError(f"coordinate vector length {len(coords)} is not 2p+1")
        p = (len(coords) - 1) // 2
        return cls(coords[:p], coords[p : 2 * p], coords[2 * p])


@dataclass(frozen=True)
class TangentVector:
    """A tangent vector in coordinate-basis components (ux, uy, uz)."""

    ux: np.ndarray
    uy: np.ndarray
    uz: float

    def __post_init__(self):
        ux = _as_vector(self.ux, "ux")
        uy = _as_vector(self.uy, "uy")
        if len(ux) < 1 or len(ux) != len(uy):
            raise DimensionMismatchError(
                f"ux and uy must have equal positive length, got {len(ux)} and {len(uy)}"
            )
        uz = float(self.uz)
        if not (np.isfinite(ux).all() and np.isfinite(uy).all() and np.isfinite(uz)):
            raise ValueError("vector components must be finite")
        ux.setflags(write=False)
        uy.setflags(write=False)
        object.__setattr__(self, "ux", ux)
        object.__setattr__(self, "uy", uy)
        object.__setattr__(self, "uz", uz)

    @property
    def p(self) -> int:
        return len(self.ux)

    def coords(self) -> np.ndarray:
        return np.concatenate([self.ux, self.uy, [self.uz]])

    @classmethod
    def from_coords(cls, coords: np.ndarray) -> "TangentVector":
        coords = _as_vector(coords, "coords")
        if len(coords) < 3 or len(coords) % 2 == 0:
            raise DimensionMismatchError(f"component vector length {len(coords)} is not 2p+1")
        p = (len(coords) - 1) // 2
        return cls(coords[:p], coords[p : 2 * p], coords[2 * p])


class MetricKind(Enum):
    PSEUDO_RIEMANNIAN = "pseudo"
    RIEMANNIAN = "riemannian"


@dataclass(frozen=True)
class MetricSpec:
    """Half-dimension p plus the choice of metric."""

    p: int
    kind: MetricKind = MetricKind.PSEUDO_RIEMANNIAN

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 1:
            raise ValueError(f"p must be a positive integer, got {self.p!r}")
        if not isinstance(self.kind, MetricKind):
            object.__setattr__(self, "kind", MetricKind(self.kind))

    @property
    def dim(self) -> int:
        return 2 * self.p + 1

    @property
    def x_sign(self) -> float:
        """Coefficient of the dx_i^2 block: -1 pseudo, +1 Riemannian."""
        return -1.0 if self.kind is MetricKind.PSEUDO_RIEMANNIAN else 1.0


def identity(p: int) -> GroupPoint:
    """The group identity (0, ..., 0)."""
    return GroupPoint(np.zeros(p), np.zeros(p), 0.0)


def _check_same_p(p1: int, p2: int, what: str) -> None:
    if p1 != p2:
        raise DimensionMismatchError(f"{what}: p = {p1} vs p = {p2}")


def group_multiply(a: GroupPoint, b: GroupPoint) -> GroupPoint:
    """Group product a * b."""
    _check_same_p(a.p, b.p, "group_multiply")
    return GroupPoint(
        a.x + b.x,
        a.y + b.y,
        a.z + b.z - float(np.dot(a.x, b.y)),
    )


def group_inverse(a: GroupPoint) -> GroupPoint:
    """The unique b with a * b = b * a = identity."""
    return GroupPoint(-a.x, -a.y, -a.z - float(np.dot(a.x, a.y)))


def metric_components(spec: MetricSpec, at: GroupPoint) -> np.ndarray:
    """Metric matrix at a point, in the fixed coordinate-basis order.

    Nonvanishing entries: g_{x_i x_i} = x_sign, g_{y_i y_j} = delta_ij + x_i x_j,
    g_{y_i z} = x_i, g_{zz} = 1. The matrix depends on the point only through
    its x block and each entry is a polynomial of degree <= 2 in x.
    """
    _check_same_p(spec.p, at.p, "metric_components")
    p, n = spec.p, spec.dim
    x = at.x
    g = np.zeros((n, n))
    g[:p, :p] = spec.x_sign * np.eye(p)
    g[p : 2 * p, p : 2 * p] = np.eye(p) + np.outer(x, x)
    g[p : 2 * p, 2 * p] = x
    g[2 * p, p : 2 * p] = x
    g[2 * p, 2 * p] = 1.0
    return g


def metric_eval(spec: MetricSpec, at: GroupPoint, u: TangentVector, v: TangentVector) -> float:
    """g(u, v) at a point, evaluated directly from the defining quadratic form.

    Agrees with u^T (metric_components) v to roundoff; the direct form avoids
    building the matrix.
    """
    _check_same_p(spec.p, at.p, "metric_eval")
    _check_same_p(spec.p, u.p, "metric_eval")
    _check_same_p(spec.p, v.p, "metric_eval")
    wu = u.uz + float(np.dot(at.x, u.uy))
    wv = v.uz + float(np.dot(at.x, v.uy))
    return (
        spec.x_sign * float(np.dot(u.ux, v.ux))
        + float(np.dot(u.uy, v.uy))
        + wu * wv
    )


def signature(spec: MetricSpec, at: GroupPoint) -> tuple[int, int]:
    """Eigenvalue sign counts (negatives, positives) of the metric matrix.

    (p, p+1) for the pseudo-Riemannian kind, (0, 2p+1) for the Riemannian one,
    at every point. A near-zero eigenvalue raises DegenerateMetricError.
    """
    g = metric_components(spec, at)
    eigvals = np.linalg.eigvalsh(g)
    tol = DEGENERACY_RTOL * float(np.max(np.abs(eigvals)))
    if bool(np.any(np.abs(eigvals) < tol)):
        raise DegenerateMetricError(
            f"metric eigenvalue below {tol:g} at point with x = {at.x!r}"
        )
    return int(np.sum(eigvals < 0.0)), int(np.sum(eigvals > 0.0))


def left_translation_differential(
    a: GroupPoint, at: GroupPoint, u: TangentVector
) -> TangentVector:
    """Pushforward of u at ``at`` under left translation P -> a * P.

    The product is affine in the right factor, so the differential is exact:
    (ux, uy, uz) -> (ux, uy, uz - sum_i a.x_i uy_i). The result lives at
    group_multiply(a, at).
    """
    _check_same_p(a.p, at.p, "left_translation_differential")
    _check_same_p(a.p, u.p, "left_translation_differential")
    return TangentVector(u.ux, u.uy, u.uz - float(np.dot(a.x, u.uy)))
