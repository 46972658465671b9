"""Stable evaluation of the hyperbolic kernels in the closed-form geodesics.

The closed-form solution carries 1/alpha and 1/alpha^2 factors whose
singularities cancel analytically. Rewriting it in terms of

    sinhc(u)  = sinh(u) / u             -> 1    as u -> 0
    coshc(u)  = (cosh(u) - 1) / u^2     -> 1/2
    sinhc3(u) = (sinh(u) - u) / u^3     -> 1/6

with u = alpha * t makes alpha = 0 the exact limit of a single code path.
sinhc and coshc switch to a truncated Taylor series for |u| < 1e-4 and use
hyperbolics otherwise; coshc's hyperbolic branch goes through
2*sinh(u/2)^2 / u^2, which has no cancellation at any u. sinhc3 subtracts
nearly equal quantities for small u, so its series branch extends to
|u| < 0.5 with enough terms for full double precision.
"""

from __future__ import annotations

import numpy as np

SMALL_U = 1e-4
SINHC3_SMALL_U = 0.5

# 1/(2k+1)! for sinh, 1/(2k+2)! for (cosh-1), 1/(2k+3)! for (sinh-u).
_SINHC_COEFFS = (
    1.0,
    1.0 / 6.0,
    1.0 / 120.0,
    1.0 / 5040.0,
    1.0 / 362880.0,
    1.0 / 39916800.0,
)
_COSHC_COEFFS = (
    1.0 / 2.0,
    1.0 / 24.0,
    1.0 / 720.0,
    1.0 / 40320.0,
    1.0 / 3628800.0,
    1.0 / 479001600.0,
)
_SINHC3_COEFFS = (
    1.0 / 6.0,
    1.0 / 120.0,
    1.0 / 5040.0,
    1.0 / 362880.0,
    1.0 / 39916800.0,
    1.0 / 6227020800.0,
    1.0 / 1307674368000.0,
)


def _horner(u2, coeffs):
    acc = coeffs[-1] * np.ones_like(u2) if np.ndim(u2) else coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * u2 + c
    return acc


def sinhc(u: float) -> float:
    """sinh(u)/u, exact limit 1 at u = 0."""
    if abs(u) < SMALL_U:
        return float(_horner(u * u, _SINHC_COEFFS))
    return np.sinh(u) / u


def coshc(u: float) -> float:
    """(cosh(u) - 1)/u^2, exact limit 1/2 at u = 0."""
    if abs(u) < SMALL_U:
        return float(_horner(u * u, _COSHC_COEFFS))
    half = np.sinh(0.5 * u) / (0.5 * u)
    return 0.5 * half * half


def sinhc3(u: float) -> float:
    """(sinh(u) - u)/u^3, exact limit 1/6 at u = 0."""
    if abs(u) < SINHC3_SMALL_U:
        return float(_horner(u * u, _SINHC3_COEFFS))
    return (np.sinh(u) - u) / (u * u * u)


def _masked(u: np.ndarray, small, direct, coeffs) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    mask = np.abs(u) < small
    if mask.any():
        um = u[mask]
        out[mask] = _horner(um * um, coeffs)
    inv = ~mask
    if inv.any():
        out[inv] = direct(u[inv])
    return out


def sinhc_arr(u: np.ndarray) -> np.ndarray:
    return _masked(u, SMALL_U, lambda v: np.sinh(v) / v, _SINHC_COEFFS)


def coshc_arr(u: np.ndarray) -> np.ndarray:
    def direct(v):
        half = np.sinh(0.5 * v) / (0.5 * v)
        return 0.5 * half * half

    return _masked(u, SMALL_U, direct, _COSHC_COEFFS)


def sinhc3_arr(u: np.ndarray) -> np.ndarray:
    return _masked(u, SINHC3_SMALL_U, lambda v: (np.sinh(v) - v) / (v * v * v), _SINHC3_COEFFS)
