"""Closed-form geodesics: examples, stability, residuals, conservation."""

import numpy as np
import pytest

from heisgeo import (
    GroupPoint,
    InitialConditions,
    MetricSpec,
    RangeExceededError,
    TangentVector,
    alpha,
    closed_form_display_state,
    closed_form_state,
    closed_form_states,
    euler_lagrange_residual,
    integrate_geodesic,
    lagrangian,
)
from heisgeo.geodesics import GeodesicState, batch_lagrangian, closed_form_grid
from heisgeo.rng import child_rng
from heisgeo.sampling import random_ic

PSEUDO1 = MetricSpec(1)


def make_ic(x, y, z, vx, vy, vz):
    return InitialConditions(
        GroupPoint(np.atleast_1d(np.asarray(x, dtype=float)),
                   np.atleast_1d(np.asarray(y, dtype=float)), z),
        TangentVector(np.atleast_1d(np.asarray(vx, dtype=float)),
                      np.atleast_1d(np.asarray(vy, dtype=float)), vz),
    )


# --- alpha -----------------------------------------------------------------

def test_alpha_zero_velocity():
    ic = make_ic([2.0, -1.0], [0.5, 0.5], 3.0, [0, 0], [0, 0], 0.0)
    assert alpha(ic) == 0.0


def test_alpha_hand_example():
    ic = make_ic(2.0, 0.0, 0.0, 0.0, 3.0, 1.0)
    assert alpha(ic) == 7.0


def test_alpha_cancellation():
    ic = make_ic([1.0, -1.0], [0, 0], 0.0, [0, 0], [1.0, 1.0], 0.0)
    assert alpha(ic) == 0.0


# --- lagrangian ------------------------------------------------------------

def test_lagrangian_zero_velocity():
    s = GeodesicState(0.0, GroupPoint([1.0], [2.0], 3.0), TangentVector([0.0], [0.0], 0.0))
    assert lagrangian(PSEUDO1, s) == 0.0


def test_lagrangian_dx_is_minus_half():
    s = GeodesicState(0.0, GroupPoint([0.5], [0.0], 0.0), TangentVector([1.0], [0.0], 0.0))
    assert lagrangian(PSEUDO1, s) == -0.5


def test_lagrangian_null_velocity():
    s = GeodesicState(0.0, GroupPoint([0.0], [0.0], 0.0), TangentVector([1.0], [1.0], 0.0))
    assert lagrangian(PSEUDO1, s) == 0.0


# --- closed form -----------------------------------------------------------

def test_straight_line_alpha0():
    ic = make_ic(0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
    assert alpha(ic) == 0.0
    for t in (-3.0, 0.5, 2.0, 1e6):
        s = closed_form_state(ic, t)
        assert s.point.x[0] == t
        assert s.point.y[0] == 0.0 and s.point.z == 0.0
        assert s.velocity.ux[0] == 1.0 and s.velocity.uy[0] == 0.0
        assert s.velocity.uz == 0.0


def test_t0_returns_exact_ic():
    for i in range(20):
        ic = random_ic(child_rng(42, i), 1 + i % 3)
        s = closed_form_state(ic, 0.0)
        assert np.array_equal(s.state(), ic.state())


def test_closed_form_vs_rk4_alpha1():
    ic = make_ic(0.0, 0.0, 0.0, 0.0, 1.0, 1.0)
    assert alpha(ic) == 1.0
    s = closed_form_state(ic, 1.0)
    traj = integrate_geodesic(PSEUDO1, ic, 1.0, 1e-4)
    assert np.max(np.abs(traj.states[-1] - s.state())) < 1e-8


def test_velocity_is_derivative_of_position():
    # central difference of positions reproduces the stored velocity
    ic = random_ic(child_rng(7, 0), 2)
    h = 1e-6
    for t in (-2.0, 0.3, 4.0):
        grid = closed_form_states(ic, [t - h, t, t + h])
        n = 5
        fd = (grid[2, :n] - grid[0, :n]) / (2 * h)
        assert np.max(np.abs(fd - grid[1, n:])) < 1e-7


def test_display_form_matches_stable_form():
    worst = 0.0
    for i in range(50):
        ic = random_ic(child_rng(1001, i), 1 + i % 3, alpha_range=2.0)
        if abs(alpha(ic)) < 1e-3:
            continue
        for t in (-3.0, -0.5, 0.7, 2.0):
            stable = closed_form_state(ic, t).state()
            display = closed_form_display_state(ic, t).state()
            scale = np.max(np.abs(stable)) + 1.0
            worst = max(worst, float(np.max(np.abs(stable - display)) / scale))
    assert worst < 1e-12


def test_display_form_alpha0_branch():
    # x = (c, -c) against vy = (d, d) cancels exactly, so alpha == 0.0
    ic = make_ic([0.7, -0.7], [0.5, -0.5], 0.25, [0.3, -0.3], [0.9, 0.9], 0.0)
    assert alpha(ic) == 0.0
    s = closed_form_state(ic, 1.5).state()
    d = closed_form_display_state(ic, 1.5).state()
    assert np.max(np.abs(s - d)) < 1e-14


# --- Euler-Lagrange residual ------------------------------------------------

def test_el_residual_straight_line():
    ic = make_ic(0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
    for t in (0.0, 0.25, 0.5, 1.0):
        assert np.max(np.abs(euler_lagrange_residual(ic, t, 1e-4))) < 1e-8


def test_el_residual_constant_curve():
    ic = make_ic([1.0, -2.0], [0.5, 0.5], 3.0, [0, 0], [0, 0], 0.0)
    res = euler_lagrange_residual(ic, 1.0, 1e-4)
    assert np.array_equal(res, np.zeros(5))


def test_el_residual_random_ics():
    # fd_step 1e-4 puts the roundoff floor at eps * |coords| / h^2, about
    # 1e-7 per unit of coordinate size; modest ic scale keeps 1e-6 meaningful
    worst = 0.0
    for i in range(30):
        ic = random_ic(child_rng(31337, i), 1 + i % 3, scale=0.5, alpha_range=0.4)
        if alpha(ic) == 0.0:
            continue
        for t in (-2.0, 0.5, 3.0):
            worst = max(worst, float(np.max(np.abs(euler_lagrange_residual(ic, t, 1e-4)))))
    assert worst < 1e-6


def test_el_residual_scales_quadratically():
    ic = make_ic(0.3, -0.2, 0.1, 0.8, 0.5, 0.85)
    r1 = np.max(np.abs(euler_lagrange_residual(ic, 1.0, 1e-3)))
    r2 = np.max(np.abs(euler_lagrange_residual(ic, 1.0, 1e-2)))
    assert r2 / r1 == pytest.approx(100.0, rel=0.2)


def test_el_residual_rejects_bad_step():
    ic = make_ic(0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        euler_lagrange_residual(ic, 0.0, 0.0)


# --- conservation ----------------------------------------------------------

def test_energy_and_alpha_conserved_closed_form():
    ts = np.arange(-100, 101) * 0.1
    for i in range(40):
        p = 1 + i % 3
        ic = random_ic(child_rng(2024, i), p)
        states = closed_form_states(ic, ts)
        al = alpha(ic)
        spec = MetricSpec(p)
        L = batch_lagrangian(states, p, spec.x_sign)
        L0 = lagrangian(spec, GeodesicState(0.0, ic.point, ic.velocity))
        assert np.max(np.abs(L - L0)) < 1e-9 * (1.0 + abs(L0))
        n = 2 * p + 1
        w = states[:, 2 * n - 1] + np.einsum(
            "ki,ki->k", states[:, :p], states[:, n + p : n + 2 * p]
        )
        assert np.max(np.abs(w - al)) < 1e-9 * (1.0 + abs(al))


# --- alpha -> 0 continuity ---------------------------------------------------

def test_branch_continuity_alpha_to_zero():
    rng = child_rng(5150, 0)
    for p in (1, 2, 3):
        base = random_ic(rng, p)
        # make sum x_i vy_i = 0 so that vz alone controls alpha
        x = base.point.x - (
            np.dot(base.point.x, base.velocity.uy)
            / np.dot(base.velocity.uy, base.velocity.uy)
        ) * base.velocity.uy
        point = GroupPoint(x, base.point.y, base.point.z)

        def with_vz(vz):
            return InitialConditions(
                point, TangentVector(base.velocity.ux, base.velocity.uy, vz)
            )

        ref_ic = with_vz(0.0)
        assert abs(alpha(ref_ic)) < 5e-16  # orthogonalization leaves roundoff
        ref = closed_form_state(ref_ic, 1.0).state()
        prev = np.inf
        for k in range(1, 13):
            err = float(np.max(np.abs(closed_form_state(with_vz(10.0 ** -k), 1.0).state() - ref)))
            assert err < prev
            prev = err
        assert prev < 1e-6


# --- completeness / range policy --------------------------------------------

def test_finite_at_huge_t_when_alpha_zero():
    ic = make_ic([0.7, -0.7], [-0.3, 0.1], 0.2, [0.4, 0.2], [0.9, 0.9], 0.0)
    assert alpha(ic) == 0.0
    for t in (1e6, -1e6):
        s = closed_form_state(ic, t)
        assert np.isfinite(s.state()).all()


def test_range_error_at_huge_alpha_t():
    ic = make_ic(0.0, 0.0, 0.0, 0.0, 1.0, 1.0)  # alpha = 1
    with pytest.raises(RangeExceededError):
        closed_form_state(ic, 1e6)
    with pytest.raises(RangeExceededError):
        closed_form_state(ic, -1e6)


def test_range_error_never_returns_nonfinite():
    # z overflows before x does (doubled hyperbolic argument)
    ic = make_ic(0.0, 0.0, 0.0, 1.0, 1.0, 1.0)
    for t in (500.0, 690.0):
        with pytest.raises(RangeExceededError):
            closed_form_state(ic, t)
    s = closed_form_state(ic, 150.0)
    assert np.isfinite(s.state()).all()


def test_transport_velocities_match_proof_formulas():
    # vx(t) = cosh(u) vx0 - sinh(u) vy0, vy(t) = cosh(u) vy0 - sinh(u) vx0
    ic = random_ic(child_rng(33, 4), 2, alpha_range=1.0)
    al = alpha(ic)
    for t in (-2.0, 0.5, 1.5):
        s = closed_form_state(ic, t)
        ch, sh = np.cosh(al * t), np.sinh(al * t)
        assert np.allclose(s.velocity.ux, ch * ic.velocity.ux - sh * ic.velocity.uy,
                           rtol=1e-12, atol=1e-12)
        assert np.allclose(s.velocity.uy, ch * ic.velocity.uy - sh * ic.velocity.ux,
                           rtol=1e-12, atol=1e-12)


def test_closed_form_grid_batches_match_single():
    ics = [random_ic(child_rng(8, i), 2) for i in range(5)]
    ts = np.linspace(-2, 2, 9)
    grid = closed_form_grid(ics, ts)
    for i, ic in enumerate(ics):
        single = closed_form_states(ic, ts)
        assert np.array_equal(grid[i], single)
