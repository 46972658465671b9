"""Geodesics of the Heisenberg group metrics.

Three routes to the same curves, kept deliberately independent so they can
check each other:

  1. ``closed_form_state``: the exact solution of the pseudo-Riemannian
     geodesic equations. The equations reduce to x'' = -alpha y',
     y'' = -alpha x', z' = alpha - sum x_i y'_i with the conserved rate
     alpha = vz(0) + sum x_i(0) vy_i(0); the solution is hyperbolic in
     u = alpha t and is evaluated through the stable kernels of
     ``_stable`` so alpha -> 0 degenerates smoothly to straight lines.
  2. ``integrate_geodesic`` with the analytic right-hand side: classical
     RK4 on the same equations, no closed form involved.
  3. ``integrate_geodesic`` with the Christoffel right-hand side: RK4 on
     x''^k = -Gamma^k_ij x'^i x'^j, with Gamma from central finite
     differences of the metric matrix. This route never sees the geodesic
     equations in analytic form and works for both metric kinds; it is the
     only route for the Riemannian metric.

``closed_form_display_state`` additionally evaluates the raw closed form
with its explicit 1/alpha and 1/alpha^2 coefficients, as a transcription
check against the stable rewrite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    GroupPoint,
    MetricKind,
    MetricSpec,
    TangentVector,
    metric_components,
    metric_eval,
)
from .errors import (
    DegenerateMetricError,
    DimensionMismatchError,
    NonFiniteStateError,
    RangeExceededError,
)

__all__ = [
    "InitialConditions",
    "GeodesicState",
    "Trajectory",
    "alpha",
    "lagrangian",
    "closed_form_state",
    "closed_form_states",
    "closed_form_grid",
    "closed_form_display_state",
    "euler_lagrange_residual",
    "christoffel_fd",
    "geodesic_ode_rhs",
    "integrate_geodesic",
    "batch_first_integral",
    "batch_lagrangian",
    "batch_theta_kernel",
]

# |alpha * t| beyond which cosh/sinh leave the double range (~709); the z
# coordinate involves doubled arguments and is caught by the finite check.
ALPHA_T_LIMIT = 700.0

# Central-difference steps: 1e-5 for metric derivatives, 1e-4 for second
# derivatives of curves. Both balance truncation against roundoff for O(1)
# quantities in double precision.
FD_METRIC_STEP = 1e-5
FD_CURVE_STEP = 1e-4


@dataclass(frozen=True)
class InitialConditions:
    """Starting point and starting velocity of a geodesic."""

    point: GroupPoint
    velocity: TangentVector

    def __post_init__(self):
        if self.point.p != self.velocity.p:
            raise DimensionMismatchError(
                f"point has p = {self.point.p} but velocity has p = {self.velocity.p}"
            )

    @property
    def p(self) -> int:
        return self.point.p

    def state(self) -> np.ndarray:
        """Flat state [x, y, z, vx, vy, vz] of length 2(2p+1)."""
        return np.concatenate([self.point.coords(), self.velocity.coords()])

    @classmethod
    def from_state(cls, state: np.ndarray) -> "InitialConditions":
        state = np.asarray(state, dtype=float)
        n = state.shape[0] // 2
        return cls(
            GroupPoint.from_coords(state[:n]),
            TangentVector.from_coords(state[n:]),
        )


@dataclass(frozen=True)
class GeodesicState:
    """A curve sample: parameter value, point, velocity."""

    t: float
    point: GroupPoint
    velocity: TangentVector

    @property
    def p(self) -> int:
        return self.point.p

    def state(self) -> np.ndarray:
        return np.concatenate([self.point.coords(), self.velocity.coords()])

    def first_integral(self) -> float:
        """vz + sum x_i vy_i, conserved along geodesics of both metrics."""
        return _sequential_alpha(self.point.x, self.velocity.uy, self.velocity.uz)

    @classmethod
    def from_state(cls, t: float, state: np.ndarray) -> "GeodesicState":
        state = np.asarray(state, dtype=float)
        n = state.shape[0] // 2
        return cls(
            float(t),
            GroupPoint.from_coords(state[:n]),
            TangentVector.from_coords(state[n:]),
        )


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled geodesic, parameter values strictly increasing."""

    spec: MetricSpec
    ic: InitialConditions
    step: float
    ts: np.ndarray
    states: np.ndarray  # (len(ts), 2(2p+1))

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if ts.ndim != 1 or states.shape != (len(ts), 2 * self.spec.dim):
            raise ValueError("inconsistent trajectory arrays")
        dt = np.diff(ts)
        if len(dt) and not (
            np.all(dt > 0)
            and np.allclose(dt, self.step, rtol=1e-9, atol=1e-12)
        ):
            raise ValueError("trajectory times must increase uniformly by step")
        ts.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return len(self.ts)

    def sample(self, i: int) -> GeodesicState:
        return GeodesicState.from_state(self.ts[i], self.states[i])

    def __iter__(self):
        return (self.sample(i) for i in range(len(self)))

    @property
    def samples(self) -> list[GeodesicState]:
        return list(self)


def _sequential_alpha(x: np.ndarray, vy: np.ndarray, vz: float) -> float:
    # Left-to-right summation, mirrored by the compiled kernels.
    acc = float(vz)
    for xi, vyi in zip(x, vy):
        acc += float(xi) * float(vyi)
    return acc


def alpha(ic: InitialConditions) -> float:
    """The conserved rate vz(0) + sum x_i(0) vy_i(0)."""
    return _sequential_alpha(ic.point.x, ic.velocity.uy, ic.velocity.uz)


def lagrangian(spec: MetricSpec, s: GeodesicState) -> float:
    """Energy density 0.5 g(velocity, velocity); conserved along geodesics."""
    return 0.5 * metric_eval(spec, s.point, s.velocity, s.velocity)


def _check_alpha_t_range(al: float, ts: np.ndarray) -> None:
    worst = float(np.max(np.abs(al * np.asarray(ts, dtype=float)))) if np.size(ts) else 0.0
    if worst > ALPHA_T_LIMIT:
        raise RangeExceededError(worst, ALPHA_T_LIMIT)


def _check_finite_states(al: float, ts: np.ndarray, states: np.ndarray) -> None:
    bad = ~np.isfinite(states)
    if bad.any():
        idx = int(np.nonzero(bad.any(axis=-1))[0][0])
        raise RangeExceededError(al * float(np.asarray(ts)[idx]), ALPHA_T_LIMIT / 2.0)


def closed_form_states(ic: InitialConditions, ts) -> np.ndarray:
    """Closed-form states (pseudo-Riemannian metric) on a grid of parameter
    values; returns an array of shape (len(ts), 2(2p+1)).

    Total in exact arithmetic for all real t; in doubles the coordinates grow
    exponentially in |alpha t|, and requests outside the representable range
    raise RangeExceededError instead of returning infinities.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    al = alpha(ic)
    _check_alpha_t_range(al, ts)
    # overflow past the |2 alpha t| envelope is caught by the finite check
    with np.errstate(over="ignore", invalid="ignore"):
        out = kernels.closed_form_batch(
            ic.state()[None, :], np.array([al]), ts, ic.p
        )[0]
    _check_finite_states(al, ts, out)
    return out


def closed_form_state(ic: InitialConditions, t: float) -> GeodesicState:
    """Closed-form geodesic state at parameter t (pseudo-Riemannian metric)."""
    return GeodesicState.from_state(t, closed_form_states(ic, [float(t)])[0])


def closed_form_grid(ics: list[InitialConditions], ts) -> np.ndarray:
    """Closed-form states for many initial conditions on a shared time grid.

    Returns (len(ics), len(ts), 2(2p+1)); one kernel call for the whole
    sweep. Range policy as in closed_form_states.
    """
    if not ics:
        raise ValueError("ics must be nonempty")
    p = ics[0].p
    if any(ic.p != p for ic in ics):
        raise DimensionMismatchError("all initial conditions must share one p")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    states0 = np.stack([ic.state() for ic in ics])
    alphas = np.array([alpha(ic) for ic in ics])
    worst = float(np.max(np.abs(alphas))) * float(np.max(np.abs(ts))) if len(ts) else 0.0
    if worst > ALPHA_T_LIMIT:
        raise RangeExceededError(worst, ALPHA_T_LIMIT)
    with np.errstate(over="ignore", invalid="ignore"):
        out = kernels.closed_form_batch(states0, alphas, ts, p)
    if not np.isfinite(out).all():
        raise RangeExceededError(worst, ALPHA_T_LIMIT / 2.0)
    return out


def closed_form_display_state(ic: InitialConditions, t: float) -> GeodesicState:
    """The closed form evaluated raw: explicit 1/alpha, 1/alpha^2 factors.

    Two branches, alpha == 0 (straight lines in x, y with quadratic z) and
    alpha != 0 (hyperbolics). Transcribed literally, with no reformulation;
    unstable for tiny |alpha| and narrower in range than closed_form_state.
    Exists to cross-check that the stable evaluator implements the same
    solution.
    """
    p = ic.p
    t = float(t)
    X, Y, z0 = ic.point.x, ic.point.y, ic.point.z
    a, b = ic.velocity.ux, ic.velocity.uy
    al = alpha(ic)
    if al == 0.0:
        x = a * t + X
        y = b * t + Y
        z = z0 - float(np.sum((a * (t / 2.0) + X) * b)) * t
        vx = a.copy()
        vy = b.copy()
    else:
        _check_alpha_t_range(al, np.array([t, 2.0 * t]))
        ch, sh = math.cosh(al * t), math.sinh(al * t)
        ch2, sh2 = math.cosh(2.0 * al * t), math.sinh(2.0 * al * t)
        x = (sh * a - ch * b + al * X + b) / al
        y = (-ch * a + sh * b + al * Y + a) / al
        z = (
            float(np.sum((al * X + b) * (a * ch - b * sh))) / al**2
            - float(np.sum(a * b)) * ch2 / (2.0 * al**2)
            + float(np.sum(a**2 + b**2)) * sh2 / (4.0 * al**2)
            + (al - float(np.sum(a**2 - b**2)) / (2.0 * al)) * t
            + z0
            - float(np.sum(a * (2.0 * al * X + b))) / (2.0 * al**2)
        )
        vx = ch * a - sh * b
        vy = -sh * a + ch * b
    vz = al - float(np.dot(x, vy))
    state = np.concatenate([x, y, [z], vx, vy, [vz]])
    _check_finite_states(al, np.array([t]), state[None, :])
    return GeodesicState.from_state(t, state)


def euler_lagrange_residual(ic: InitialConditions, t: float, fd_step: float = FD_CURVE_STEP) -> np.ndarray:
    """Residuals of the geodesic equations on the closed-form curve.

    Second derivatives come from central differences of closed-form
    positions, so a correct closed form leaves residuals of size
    O(fd_step^2) plus roundoff. Component order (x block, y block, z):

        x'' + w y',   y'' + w x',   z'' + sum(x' y' + x y'')

    with w = z' + sum x_i y'_i evaluated at t.
    """
    if fd_step <= 0:
        raise ValueError("fd_step must be positive")
    p = ic.p
    n = 2 * p + 1
    t = float(t)
    grid = closed_form_states(ic, [t - fd_step, t, t + fd_step])
    acc = (grid[2, :n] - 2.0 * grid[1, :n] + grid[0, :n]) / fd_step**2
    center = grid[1]
    x = center[:p]
    vx = center[n : n + p]
    vy = center[n + p : n + 2 * p]
    vz = center[2 * n - 1]
    w = vz + float(np.dot(x, vy))
    res = np.empty(n)
    res[:p] = acc[:p] + w * vy
    res[p : 2 * p] = acc[p : 2 * p] + w * vx
    res[2 * p] = acc[2 * p] + float(np.dot(vx, vy)) + float(np.dot(x, acc[p : 2 * p]))
    return res


def christoffel_fd(spec: MetricSpec, at: GroupPoint, h: float = FD_METRIC_STEP) -> np.ndarray:
    """Christoffel symbols Gamma^k_ij from finite-difference metric derivatives.

    Plain Levi-Civita formula with d_m g_ij from central differences of
    metric_components along every coordinate direction; no structure of the
    metric is assumed. Exactly symmetric in the lower index pair. Shape
    (n, n, n), indexed [k, i, j].

    The metric entries are polynomials of degree <= 2 in the coordinates, so
    central differences carry no truncation error here, only roundoff.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if spec.p != at.p:
        raise DimensionMismatchError(f"christoffel_fd: p = {spec.p} vs p = {at.p}")
    n = spec.dim
    coords = at.coords()
    D = np.empty((n, n, n))
    for d in range(n):
        cp = coords.copy()
        cm = coords.copy()
        cp[d] += h
        cm[d] -= h
        gp = metric_components(spec, GroupPoint.from_coords(cp))
        gm = metric_components(spec, GroupPoint.from_coords(cm))
        D[d] = (gp - gm) / (2.0 * h)
    g0 = metric_components(spec, at)
    try:
        ginv = np.linalg.inv(g0)
    except np.linalg.LinAlgError as exc:
        raise DegenerateMetricError(f"metric matrix not invertible: {exc}") from exc
    # T[i,j,l] = d_i g_jl + d_j g_il - d_l g_ij
    T = D + np.einsum("jil->ijl", D) - np.einsum("lij->ijl", D)
    return 0.5 * np.einsum("kl,ijl->kij", ginv, T)


def geodesic_ode_rhs(
    spec: MetricSpec,
    s: GeodesicState,
    fd_step: float = FD_METRIC_STEP,
    path: str = "auto",
) -> tuple[TangentVector, TangentVector]:
    """Time derivative (point_dot, velocity_dot) of a geodesic state.

    path 'analytic' uses the explicit pseudo-Riemannian equations; path
    'christoffel' uses the generic finite-difference form, available for both
    metric kinds. 'auto' picks analytic for the pseudo metric, christoffel for
    the Riemannian one. The two paths agree to O(fd_step^2) on the pseudo
    metric (and to roundoff here, the metric being quadratic in x).
    """
    if spec.p != s.p:
        raise DimensionMismatchError(f"geodesic_ode_rhs: p = {spec.p} vs p = {s.p}")
    if path == "auto":
        path = "analytic" if spec.kind is MetricKind.PSEUDO_RIEMANNIAN else "christoffel"
    if path == "analytic":
        if spec.kind is not MetricKind.PSEUDO_RIEMANNIAN:
            raise ValueError("the analytic right-hand side exists only for the pseudo metric")
        out = kernels.rhs_analytic_batch(s.state()[None, :], spec.p)[0]
    elif path == "christoffel":
        out = kernels.rhs_christoffel_batch(
            s.state()[None, :], spec.p, spec.x_sign, fd_step
        )[0]
    else:
        raise ValueError(f"unknown rhs path {path!r}")
    n = spec.dim
    return TangentVector.from_coords(out[:n]), TangentVector.from_coords(out[n:])


def _resolve_steps(t_end: float, step: float) -> tuple[int, float]:
    if step <= 0:
        raise ValueError("step must be positive")
    if t_end == 0:
        raise ValueError("t_end must be nonzero (sign selects the direction)")
    n_steps = int(round(abs(t_end) / step))
    if n_steps < 1 or abs(n_steps * step - abs(t_end)) > 1e-6 * step:
        raise ValueError(f"t_end = {t_end!r} is not an integer multiple of step = {step!r}")
    return n_steps, math.copysign(step, t_end)


def integrate_geodesic(
    spec: MetricSpec,
    ic: InitialConditions,
    t_end: float,
    step: float,
    rhs: str = "auto",
    fd_step: float = FD_METRIC_STEP,
) -> Trajectory:
    """Integrate the geodesic equations with classical fixed-step RK4.

    Samples at t = 0, +-step, ..., t_end (negative t_end integrates
    backward; samples are returned in increasing parameter order either
    way). Fixed step keeps the output deterministic. rhs as in
    geodesic_ode_rhs.
    """
    if spec.p != ic.p:
        raise DimensionMismatchError(f"integrate_geodesic: p = {spec.p} vs p = {ic.p}")
    n_steps, signed_step = _resolve_steps(t_end, step)
    if rhs == "auto":
        rhs = "analytic" if spec.kind is MetricKind.PSEUDO_RIEMANNIAN else "christoffel"
    state0 = ic.state()[None, :]
    # a diverging state is reported via the finite check below, not warnings
    with np.errstate(over="ignore", invalid="ignore"):
        if rhs == "analytic":
            if spec.kind is not MetricKind.PSEUDO_RIEMANNIAN:
                raise ValueError(
                    "the analytic right-hand side exists only for the pseudo metric"
                )
            res = kernels.rk4_analytic_batch(state0, spec.p, signed_step, n_steps)[0]
        elif rhs == "christoffel":
            res = kernels.rk4_christoffel_batch(
                state0, spec.p, spec.x_sign, fd_step, signed_step, n_steps
            )[0]
        else:
            raise ValueError(f"unknown rhs path {rhs!r}")
    ts = signed_step * np.arange(n_steps + 1)
    bad = ~np.isfinite(res)
    if bad.any():
        idx = int(np.nonzero(bad.any(axis=1))[0][0])
        raise NonFiniteStateError(float(ts[idx]))
    if t_end < 0:
        ts = ts[::-1].copy()
        res = res[::-1].copy()
    return Trajectory(spec=spec, ic=ic, step=step, ts=ts, states=res)


def batch_first_integral(states: np.ndarray, p: int) -> np.ndarray:
    """vz + sum x_i vy_i for every row of a (..., 2(2p+1)) state array."""
    states = np.asarray(states, dtype=float)
    n = 2 * p + 1
    return states[..., 2 * n - 1] + np.einsum(
        "...i,...i->...", states[..., :p], states[..., n + p : n + 2 * p]
    )


def batch_lagrangian(states: np.ndarray, p: int, x_sign: float) -> np.ndarray:
    """0.5 g(v, v) for every row of a state array, given the dx^2 sign."""
    states = np.asarray(states, dtype=float)
    n = 2 * p + 1
    vx = states[..., n : n + p]
    vy = states[..., n + p : n + 2 * p]
    w = batch_first_integral(states, p)
    return 0.5 * (
        x_sign * np.einsum("...i,...i->...", vx, vx)
        + np.einsum("...i,...i->...", vy, vy)
        + w * w
    )


def batch_theta_kernel(states: np.ndarray, p: int) -> np.ndarray:
    """sum(vx_i - vy_i) for every row: the leaf form applied to velocities."""
    states = np.asarray(states, dtype=float)
    n = 2 * p + 1
    return np.einsum("...i->...", states[..., n : n + p]) - np.einsum(
        "...i->...", states[..., n + p : n + 2 * p]
    )
