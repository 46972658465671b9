"""Pure-numpy compute kernels (fallback backend).

Same contract as the compiled backend in ``_kernels_cy``: batched state
arrays of shape (m, 2n) with n = 2p+1, laid out as

    [x_1..x_p, y_1..y_p, z, vx_1..vx_p, vy_1..vy_p, vz].

Hot loops are vectorized over the batch axis; the step loop stays in Python,
which is why the compiled backend exists. No argument guards beyond shape
checks: callers in ``geodesics``/``verify`` own validation and overflow
policy.
"""

from __future__ import annotations

import numpy as np

from ._stable import coshc_arr, sinhc3_arr, sinhc_arr

BACKEND = "python"


def _prep(states: np.ndarray, p: int) -> np.ndarray:
    states = np.ascontiguousarray(states, dtype=float)
    n = 2 * p + 1
    if states.ndim != 2 or states.shape[1] != 2 * n:
        raise ValueError(f"states must have shape (m, {2 * n}), got {states.shape}")
    return states


def closed_form_batch(
    states0: np.ndarray, alphas: np.ndarray, ts: np.ndarray, p: int
) -> np.ndarray:
    """Closed-form geodesic states for every initial state at every time.

    ``alphas`` holds the conserved rate vz + sum x_i vy_i of each row,
    precomputed by the caller. Returns (m, k, 2n).
    """
    states0 = _prep(states0, p)
    alphas = np.ascontiguousarray(alphas, dtype=float)
    ts = np.ascontiguousarray(ts, dtype=float)
    n = 2 * p + 1
    m, k = states0.shape[0], ts.shape[0]

    X = states0[:, :p]
    Y = states0[:, p : 2 * p]
    z0 = states0[:, 2 * p]
    a = states0[:, n : n + p]
    b = states0[:, n + p : n + 2 * p]

    u = alphas[:, None] * ts[None, :]
    S = sinhc_arr(u)
    C = coshc_arr(u)
    C2 = coshc_arr(2.0 * u)
    V = sinhc3_arr(u)
    V2 = sinhc3_arr(2.0 * u)
    ch = np.cosh(u)
    sh = np.sinh(u)

    tS = ts[None, :] * S
    atC = alphas[:, None] * ts[None, :] ** 2 * C

    out = np.empty((m, k, 2 * n))
    x = X[:, None, :] + a[:, None, :] * tS[:, :, None] - b[:, None, :] * atC[:, :, None]
    y = Y[:, None, :] + b[:, None, :] * tS[:, :, None] - a[:, None, :] * atC[:, :, None]
    out[:, :, :p] = x
    out[:, :, p : 2 * p] = y

    A1 = np.einsum("mi,mi->m", X, b)
    A2 = np.einsum("mi,mi->m", X, a)
    A3 = np.einsum("mi,mi->m", a, b)
    bb = np.einsum("mi,mi->m", b, b)
    A4 = np.einsum("mi,mi->m", a, a) + bb
    t2 = ts[None, :] ** 2
    t3 = ts[None, :] ** 3
    al = alphas[:, None]
    out[:, :, 2 * p] = z0[:, None] + al * ts[None, :] - (
        A1[:, None] * tS
        - A2[:, None] * atC
        + A3[:, None] * t2 * (2.0 * C2 - C)
        - 2.0 * A4[:, None] * al * t3 * V2
        + bb[:, None] * al * t3 * V
    )

    vx = a[:, None, :] * ch[:, :, None] - b[:, None, :] * sh[:, :, None]
    vy = b[:, None, :] * ch[:, :, None] - a[:, None, :] * sh[:, :, None]
    out[:, :, n : n + p] = vx
    out[:, :, n + p : n + 2 * p] = vy
    # vz(t) = vz0 + sum(x(0) vy(0) - x(t) vy(t)); the per-component grouping
    # cancels exactly at t = 0, so the state there reproduces the inputs
    vz0 = states0[:, 2 * n - 1]
    terms = X[:, None, :] * b[:, None, :] - x * vy
    out[:, :, 2 * n - 1] = vz0[:, None] + np.einsum("mkc->mk", terms)
    return out


def rhs_analytic_batch(states: np.ndarray, p: int) -> np.ndarray:
    """Geodesic equations of the pseudo-Riemannian metric, first-order form."""
    states = _prep(states, p)
    n = 2 * p + 1
    x = states[:, :p]
    vx = states[:, n : n + p]
    vy = states[:, n + p : n + 2 * p]
    vz = states[:, 2 * n - 1]
    w = vz + np.einsum("mi,mi->m", x, vy)
    out = np.empty_like(states)
    out[:, :n] = states[:, n:]
    out[:, n : n + p] = -w[:, None] * vy
    out[:, n + p : n + 2 * p] = -w[:, None] * vx
    out[:, 2 * n - 1] = -np.einsum("mi,mi->m", vx, vy) + w * np.einsum("mi,mi->m", x, vx)
    return out


def _metric_batch(xs: np.ndarray, xsign: float) -> np.ndarray:
    m, p = xs.shape
    n = 2 * p + 1
    g = np.zeros((m, n, n))
    idx = np.arange(p)
    g[:, idx, idx] = xsign
    g[:, p + idx[:, None], p + idx[None, :]] = xs[:, :, None] * xs[:, None, :]
    g[:, p + idx, p + idx] += 1.0
    g[:, p + idx, 2 * p] = xs
    g[:, 2 * p, p + idx] = xs
    g[:, 2 * p, 2 * p] = 1.0
    return g


def rhs_christoffel_batch(
    states: np.ndarray, p: int, xsign: float, fd_step: float
) -> np.ndarray:
    """Generic geodesic equations: acceleration from finite-difference
    Christoffel symbols of either metric kind.

    The metric depends on the point only through its x block, so central
    differences along the remaining p+1 directions are differences of
    identical matrices: exactly zero. They are skipped, which changes no
    value.
    """
    states = _prep(states, p)
    n = 2 * p + 1
    m = states.shape[0]
    xs = states[:, :p]
    v = states[:, n:]

    D = np.zeros((m, n, n, n))
    for d in range(p):
        xp = xs.copy()
        xm = xs.copy()
        xp[:, d] += fd_step
        xm[:, d] -= fd_step
        D[:, d] = (_metric_batch(xp, xsign) - _metric_batch(xm, xsign)) / (2.0 * fd_step)

    ginv = np.linalg.inv(_metric_batch(xs, xsign))
    # T[m,i,j,l] = d_i g_jl + d_j g_il - d_l g_ij
    T = D + D.transpose(0, 2, 1, 3) - D.transpose(0, 2, 3, 1)
    U = np.einsum("mijl,mi,mj->ml", T, v, v)
    acc = -0.5 * np.einsum("mkl,ml->mk", ginv, U)

    out = np.empty_like(states)
    out[:, :n] = v
    out[:, n:] = acc
    return out


def _rk4(states0, rhs, step, n_steps, record_stride):
    if n_steps % record_stride != 0:
        raise ValueError("n_steps must be a multiple of record_stride")
    m, width = states0.shape
    out = np.empty((m, n_steps // record_stride + 1, width))
    out[:, 0] = states0
    s = states0.copy()
    half = 0.5 * step
    sixth = step / 6.0
    for i in range(1, n_steps + 1):
        k1 = rhs(s)
        k2 = rhs(s + half * k1)
        k3 = rhs(s + half * k2)
        k4 = rhs(s + step * k3)
        s = s + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if i % record_stride == 0:
            out[:, i // record_stride] = s
    return out


def rk4_analytic_batch(
    states0: np.ndarray, p: int, step: float, n_steps: int, record_stride: int = 1
) -> np.ndarray:
    """Classical fixed-step RK4 on the analytic pseudo-Riemannian equations."""
    states0 = _prep(states0, p)
    return _rk4(states0, lambda s: rhs_analytic_batch(s, p), step, n_steps, record_stride)


def rk4_christoffel_batch(
    states0: np.ndarray,
    p: int,
    xsign: float,
    fd_step: float,
    step: float,
    n_steps: int,
    record_stride: int = 1,
) -> np.ndarray:
    """Classical fixed-step RK4 on the finite-difference Christoffel equations."""
    states0 = _prep(states0, p)
    return _rk4(
        states0,
        lambda s: rhs_christoffel_batch(s, p, xsign, fd_step),
        step,
        n_steps,
        record_stride,
    )
