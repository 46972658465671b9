# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled compute kernels; contract identical to ``_kernels_py``.

State rows are [x_1..x_p, y_1..y_p, z, vx_1..vx_p, vy_1..vy_p, vz] of
length 2n, n = 2p+1. Stable hyperbolic kernels replicate the series
thresholds and Horner ordering of ``_stable``; summation orders elsewhere
may differ from the numpy backend by roundoff.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cosh, fabs, sinh

BACKEND = "cython"

cdef double SMALL_U = 1e-4
cdef double SINHC3_SMALL_U = 0.5


cdef inline double _sinhc(double u) noexcept nogil:
    cdef double u2
    if fabs(u) < SMALL_U:
        u2 = u * u
        return ((((u2 / 39916800.0 + 1.0 / 362880.0) * u2 + 1.0 / 5040.0) * u2
                 + 1.0 / 120.0) * u2 + 1.0 / 6.0) * u2 + 1.0
    return sinh(u) / u


cdef inline double _coshc(double u) noexcept nogil:
    cdef double u2, half
    if fabs(u) < SMALL_U:
        u2 = u * u
        return ((((u2 / 479001600.0 + 1.0 / 3628800.0) * u2 + 1.0 / 40320.0) * u2
                 + 1.0 / 720.0) * u2 + 1.0 / 24.0) * u2 + 0.5
    half = sinh(0.5 * u) / (0.5 * u)
    return 0.5 * half * half


cdef inline double _sinhc3(double u) noexcept nogil:
    cdef double u2
    if fabs(u) < SINHC3_SMALL_U:
        u2 = u * u
        return (((((u2 / 1307674368000.0 + 1.0 / 6227020800.0) * u2
                   + 1.0 / 39916800.0) * u2 + 1.0 / 362880.0) * u2
                 + 1.0 / 5040.0) * u2 + 1.0 / 120.0) * u2 + 1.0 / 6.0
    return (sinh(u) - u) / (u * u * u)


def _c64(arr):
    # contiguous, writable float64 (memoryviews reject read-only buffers)
    out = np.ascontiguousarray(arr, dtype=np.float64)
    return out if out.flags.writeable else out.copy()


def _shape_check(states, int p):
    cdef int n = 2 * p + 1
    states = _c64(states)
    if states.ndim != 2 or states.shape[1] != 2 * n:
        raise ValueError(f"states must have shape (m, {2 * n}), got {states.shape}")
    return states


def closed_form_batch(states0, alphas, ts, int p):
    """Closed-form geodesic states: (m, len(ts), 2n)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] S0 = _shape_check(states0, p)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] AL = _c64(alphas)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] TS = _c64(ts)
    cdef Py_ssize_t m = S0.shape[0], k = TS.shape[0]
    cdef int n = 2 * p + 1
    cdef cnp.ndarray[cnp.float64_t, ndim=3] OUT = np.empty((m, k, 2 * n))
    cdef double[:, ::1] s0 = S0
    cdef double[::1] al = AL
    cdef double[::1] tgrid = TS
    cdef double[:, :, ::1] out = OUT

    cdef Py_ssize_t i, j, c
    cdef double a_, t, u, Sf, Cf, C2f, Vf, V2f, ch, sh, tS, atC
    cdef double A1, A2, A3, A4, A5, z0, zval, vzval, xc, vyc

    for i in range(m):
        a_ = al[i]
        z0 = s0[i, 2 * p]
        A1 = 0.0; A2 = 0.0; A3 = 0.0; A4 = 0.0; A5 = 0.0
        for c in range(p):
            A1 += s0[i, c] * s0[i, n + p + c]
            A2 += s0[i, c] * s0[i, n + c]
            A3 += s0[i, n + c] * s0[i, n + p + c]
            A4 += s0[i, n + c] * s0[i, n + c] + s0[i, n + p + c] * s0[i, n + p + c]
            A5 += s0[i, n + p + c] * s0[i, n + p + c]
        for j in range(k):
            t = tgrid[j]
            u = a_ * t
            Sf = _sinhc(u)
            Cf = _coshc(u)
            C2f = _coshc(2.0 * u)
            Vf = _sinhc3(u)
            V2f = _sinhc3(2.0 * u)
            ch = cosh(u)
            sh = sinh(u)
            tS = t * Sf
            atC = a_ * t * t * Cf
            for c in range(p):
                out[i, j, c] = s0[i, c] + s0[i, n + c] * tS - s0[i, n + p + c] * atC
                out[i, j, p + c] = s0[i, p + c] + s0[i, n + p + c] * tS - s0[i, n + c] * atC
                out[i, j, n + c] = s0[i, n + c] * ch - s0[i, n + p + c] * sh
                out[i, j, n + p + c] = s0[i, n + p + c] * ch - s0[i, n + c] * sh
            zval = z0 + a_ * t - (
                A1 * tS
                - A2 * atC
                + A3 * t * t * (2.0 * C2f - Cf)
                - 2.0 * A4 * a_ * t * t * t * V2f
                + A5 * a_ * t * t * t * Vf
            )
            out[i, j, 2 * p] = zval
            # vz(t) = vz0 + sum(x(0) vy(0) - x(t) vy(t)); per-component
            # grouping cancels exactly at t = 0
            vzval = s0[i, 2 * n - 1]
            for c in range(p):
                xc = out[i, j, c]
                vyc = out[i, j, n + p + c]
                vzval += s0[i, c] * s0[i, n + p + c] - xc * vyc
            out[i, j, 2 * n - 1] = vzval
    return OUT


cdef void _rhs_analytic_row(double[::1] s, double[::1] out, int p) noexcept nogil:
    cdef int n = 2 * p + 1
    cdef Py_ssize_t c
    cdef double w, dvz, xvx
    w = s[2 * n - 1]
    for c in range(p):
        w += s[c] * s[n + p + c]
    for c in range(n):
        out[c] = s[n + c]
    dvz = 0.0
    xvx = 0.0
    for c in range(p):
        out[n + c] = -w * s[n + p + c]
        out[n + p + c] = -w * s[n + c]
        dvz -= s[n + c] * s[n + p + c]
        xvx += s[c] * s[n + c]
    out[2 * n - 1] = dvz + w * xvx


def rhs_analytic_batch(states, int p):
    """Geodesic equations of the pseudo-Riemannian metric, first-order form."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] S = _shape_check(states, p)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] OUT = np.empty_like(S)
    cdef double[:, ::1] sv = S
    cdef double[:, ::1] ov = OUT
    cdef Py_ssize_t i
    for i in range(S.shape[0]):
        _rhs_analytic_row(sv[i], ov[i], p)
    return OUT


cdef void _metric_fill(double[::1] x, int p, double xsign, double[:, ::1] g) noexcept nogil:
    cdef int n = 2 * p + 1
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            g[i, j] = 0.0
    for i in range(p):
        g[i, i] = xsign
        for j in range(p):
            g[p + i, p + j] = x[i] * x[j]
        g[p + i, p + i] += 1.0
        g[p + i, 2 * p] = x[i]
        g[2 * p, p + i] = x[i]
    g[2 * p, 2 * p] = 1.0


cdef int _invert(double[:, ::1] A, double[:, ::1] inv, int n) noexcept nogil:
    """Gauss-Jordan with partial pivoting; A is destroyed. 0 on success."""
    cdef Py_ssize_t i, j, k, piv
    cdef double best, factor, tmp
    for i in range(n):
        for j in range(n):
            inv[i, j] = 1.0 if i == j else 0.0
    for k in range(n):
        piv = k
        best = fabs(A[k, k])
        for i in range(k + 1, n):
            if fabs(A[i, k]) > best:
                best = fabs(A[i, k])
                piv = i
        if best == 0.0:
            return 1
        if piv != k:
            for j in range(n):
                tmp = A[k, j]; A[k, j] = A[piv, j]; A[piv, j] = tmp
                tmp = inv[k, j]; inv[k, j] = inv[piv, j]; inv[piv, j] = tmp
        factor = A[k, k]
        for j in range(n):
            A[k, j] /= factor
            inv[k, j] /= factor
        for i in range(n):
            if i == k:
                continue
            factor = A[i, k]
            if factor != 0.0:
                for j in range(n):
                    A[i, j] -= factor * A[k, j]
                    inv[i, j] -= factor * inv[k, j]
    return 0


cdef int _rhs_christoffel_row(
    double[::1] s,
    double[::1] out,
    int p,
    double xsign,
    double fd_step,
    double[::1] xt,
    double[:, ::1] gp,
    double[:, ::1] gm,
    double[:, ::1] g0,
    double[:, ::1] ginv,
    double[:, :, ::1] D,
    double[::1] U,
) noexcept nogil:
    # The metric depends on the point only through the x block; difference
    # planes for the other directions are identically zero (D is pre-zeroed).
    cdef int n = 2 * p + 1
    cdef Py_ssize_t c, d, i, j, l
    cdef double acc, vi
    for c in range(p):
        xt[c] = s[c]
    for d in range(p):
        xt[d] = s[d] + fd_step
        _metric_fill(xt, p, xsign, gp)
        xt[d] = s[d] - fd_step
        _metric_fill(xt, p, xsign, gm)
        xt[d] = s[d]
        for i in range(n):
            for j in range(n):
                D[d, i, j] = (gp[i, j] - gm[i, j]) / (2.0 * fd_step)
    for c in range(p):
        xt[c] = s[c]
    _metric_fill(xt, p, xsign, g0)
    if _invert(g0, ginv, n):
        return 1
    # U[l] = sum_ij (d_i g_jl + d_j g_il - d_l g_ij) v_i v_j
    for l in range(n):
        acc = 0.0
        for i in range(n):
            vi = s[n + i]
            if vi == 0.0:
                continue
            for j in range(n):
                acc += (D[i, j, l] + D[j, i, l] - D[l, i, j]) * vi * s[n + j]
        U[l] = acc
    for c in range(n):
        out[c] = s[n + c]
    for i in range(n):
        acc = 0.0
        for l in range(n):
            acc += ginv[i, l] * U[l]
        out[n + i] = -0.5 * acc
    return 0


def rhs_christoffel_batch(states, int p, double xsign, double fd_step):
    """Generic geodesic equations from finite-difference Christoffel symbols."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] S = _shape_check(states, p)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] OUT = np.empty_like(S)
    cdef int n = 2 * p + 1
    cdef double[:, ::1] sv = S
    cdef double[:, ::1] ov = OUT
    cdef double[::1] xt = np.empty(p)
    cdef double[:, ::1] gp = np.empty((n, n))
    cdef double[:, ::1] gm = np.empty((n, n))
    cdef double[:, ::1] g0 = np.empty((n, n))
    cdef double[:, ::1] ginv = np.empty((n, n))
    cdef double[:, :, ::1] D = np.zeros((n, n, n))
    cdef double[::1] U = np.empty(n)
    cdef Py_ssize_t i
    for i in range(S.shape[0]):
        if _rhs_christoffel_row(sv[i], ov[i], p, xsign, fd_step, xt, gp, gm, g0, ginv, D, U):
            raise ArithmeticError("metric matrix not invertible")
    return OUT


def rk4_analytic_batch(states0, int p, double step, int n_steps, int record_stride=1):
    """Classical fixed-step RK4 on the analytic pseudo-Riemannian equations."""
    if record_stride < 1 or n_steps % record_stride != 0:
        raise ValueError("n_steps must be a multiple of record_stride")
    cdef cnp.ndarray[cnp.float64_t, ndim=2] S0 = _shape_check(states0, p)
    cdef Py_ssize_t m = S0.shape[0]
    cdef int width = S0.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=3] OUT = np.empty(
        (m, n_steps // record_stride + 1, width)
    )
    cdef double[:, :, ::1] out = OUT
    cdef double[:, ::1] s = S0.copy()
    cdef double[:, ::1] stage = np.empty_like(S0)
    cdef double[:, ::1] k1 = np.empty_like(S0)
    cdef double[:, ::1] k2 = np.empty_like(S0)
    cdef double[:, ::1] k3 = np.empty_like(S0)
    cdef double[:, ::1] k4 = np.empty_like(S0)
    cdef Py_ssize_t i, c, step_i
    cdef double half = 0.5 * step, sixth = step / 6.0

    for i in range(m):
        for c in range(width):
            out[i, 0, c] = s[i, c]
    for step_i in range(1, n_steps + 1):
        for i in range(m):
            _rhs_analytic_row(s[i], k1[i], p)
            for c in range(width):
                stage[i, c] = s[i, c] + half * k1[i, c]
            _rhs_analytic_row(stage[i], k2[i], p)
            for c in range(width):
                stage[i, c] = s[i, c] + half * k2[i, c]
            _rhs_analytic_row(stage[i], k3[i], p)
            for c in range(width):
                stage[i, c] = s[i, c] + step * k3[i, c]
            _rhs_analytic_row(stage[i], k4[i], p)
            for c in range(width):
                s[i, c] = s[i, c] + sixth * (
                    k1[i, c] + 2.0 * k2[i, c] + 2.0 * k3[i, c] + k4[i, c]
                )
        if step_i % record_stride == 0:
            for i in range(m):
                for c in range(width):
                    out[i, step_i // record_stride, c] = s[i, c]
    return OUT


def rk4_christoffel_batch(states0, int p, double xsign, double fd_step,
                          double step, int n_steps, int record_stride=1):
    """Classical fixed-step RK4 on the finite-difference Christoffel equations."""
    if record_stride < 1 or n_steps % record_stride != 0:
        raise ValueError("n_steps must be a multiple of record_stride")
    cdef cnp.ndarray[cnp.float64_t, ndim=2] S0 = _shape_check(states0, p)
    cdef Py_ssize_t m = S0.shape[0]
    cdef int width = S0.shape[1]
    cdef int n = 2 * p + 1
    cdef cnp.ndarray[cnp.float64_t, ndim=3] OUT = np.empty(
        (m, n_steps // record_stride + 1, width)
    )
    cdef double[:, :, ::1] out = OUT
    cdef double[:, ::1] s = S0.copy()
    cdef double[:, ::1] stage = np.empty_like(S0)
    cdef double[:, ::1] k1 = np.empty_like(S0)
    cdef double[:, ::1] k2 = np.empty_like(S0)
    cdef double[:, ::1] k3 = np.empty_like(S0)
    cdef double[:, ::1] k4 = np.empty_like(S0)
    cdef double[::1] xt = np.empty(p)
    cdef double[:, ::1] gp = np.empty((n, n))
    cdef double[:, ::1] gm = np.empty((n, n))
    cdef double[:, ::1] g0 = np.empty((n, n))
    cdef double[:, ::1] ginv = np.empty((n, n))
    cdef double[:, :, ::1] D = np.zeros((n, n, n))
    cdef double[::1] U = np.empty(n)
    cdef Py_ssize_t i, c, step_i
    cdef double half = 0.5 * step, sixth = step / 6.0
    cdef int bad = 0

    for i in range(m):
        for c in range(width):
            out[i, 0, c] = s[i, c]
    for step_i in range(1, n_steps + 1):
        for i in range(m):
            bad |= _rhs_christoffel_row(s[i], k1[i], p, xsign, fd_step,
                                        xt, gp, gm, g0, ginv, D, U)
            for c in range(width):
                stage[i, c] = s[i, c] + half * k1[i, c]
            bad |= _rhs_christoffel_row(stage[i], k2[i], p, xsign, fd_step,
                                        xt, gp, gm, g0, ginv, D, U)
            for c in range(width):
                stage[i, c] = s[i, c] + half * k2[i, c]
            bad |= _rhs_christoffel_row(stage[i], k3[i], p, xsign, fd_step,
                                        xt, gp, gm, g0, ginv, D, U)
            for c in range(width):
                stage[i, c] = s[i, c] + step * k3[i, c]
            bad |= _rhs_christoffel_row(stage[i], k4[i], p, xsign, fd_step,
                                        xt, gp, gm, g0, ginv, D, U)
            for c in range(width):
                s[i, c] = s[i, c] + sixth * (
                    k1[i, c] + 2.0 * k2[i, c] + 2.0 * k3[i, c] + k4[i, c]
                )
            if bad:
                raise ArithmeticError("metric matrix not invertible")
        if step_i % record_stride == 0:
            for i in range(m):
                for c in range(width):
                    out[i, step_i // record_stride, c] = s[i, c]
    return OUT
