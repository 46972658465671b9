"""Finite-difference Christoffel symbols and the dual right-hand-side paths."""

import numpy as np
import pytest

from heisgeo import (
    GroupPoint,
    InitialConditions,
    MetricKind,
    MetricSpec,
    TangentVector,
    christoffel_fd,
    geodesic_ode_rhs,
    integrate_geodesic,
)
from heisgeo.geodesics import GeodesicState
from heisgeo.rng import child_rng
from heisgeo.sampling import random_ic, random_point

PSEUDO1 = MetricSpec(1)
RIEM1 = MetricSpec(1, MetricKind.RIEMANNIAN)


def state_of(ic):
    return GeodesicState(0.0, ic.point, ic.velocity)


def test_lower_index_symmetry_exact():
    for i in range(10):
        rng = child_rng(9000, i)
        p = 1 + i % 3
        kind = MetricKind.PSEUDO_RIEMANNIAN if i % 2 else MetricKind.RIEMANNIAN
        gamma = christoffel_fd(MetricSpec(p, kind), random_point(rng, p))
        assert np.array_equal(gamma, gamma.transpose(0, 2, 1))


def test_z_direction_flat():
    for i in range(10):
        rng = child_rng(9050, i)
        p = 1 + i % 3
        gamma = christoffel_fd(MetricSpec(p), random_point(rng, p), h=1e-5)
        n = 2 * p + 1
        assert np.max(np.abs(gamma[:, n - 1, n - 1])) < 1e-9


def test_analytic_vs_generic_rhs():
    # the metric is quadratic in x, so central differences are exact up to
    # roundoff and the two acceleration paths agree far below O(h^2)
    worst = 0.0
    for i in range(30):
        ic = random_ic(child_rng(9100, i), 1 + i % 3)
        s = state_of(ic)
        spec = MetricSpec(ic.p)
        _, acc_a = geodesic_ode_rhs(spec, s, path="analytic")
        _, acc_c = geodesic_ode_rhs(spec, s, fd_step=1e-5, path="christoffel")
        worst = max(worst, float(np.max(np.abs(acc_a.coords() - acc_c.coords()))))
    assert worst < 1e-7


def test_generic_rhs_at_origin_p1():
    # at x = 0 the only curvature couplings are through w = vz
    ic = InitialConditions(
        GroupPoint([0.0], [0.0], 0.0), TangentVector([0.25], [-0.5], 0.75)
    )
    _, acc = geodesic_ode_rhs(PSEUDO1, state_of(ic), path="christoffel")
    w = 0.75
    expected = np.array([-w * (-0.5), -w * 0.25, -(-0.5 * 0.25) + 0.0])
    # z'' = -(vx*vy) + w*(x . vx); x = 0 kills the second term
    assert np.allclose(acc.coords(), expected, atol=1e-9)


def test_zero_velocity_zero_acceleration():
    ic = InitialConditions(
        GroupPoint([0.3, -0.4], [0.1, 0.2], 1.0),
        TangentVector([0.0, 0.0], [0.0, 0.0], 0.0),
    )
    for spec in (MetricSpec(2), MetricSpec(2, MetricKind.RIEMANNIAN)):
        path = "christoffel" if spec.kind is MetricKind.RIEMANNIAN else "analytic"
        vel, acc = geodesic_ode_rhs(spec, state_of(ic), path=path)
        assert np.array_equal(vel.coords(), np.zeros(5))
        assert np.max(np.abs(acc.coords())) < 1e-12


def test_riemannian_z_line_is_geodesic():
    # metric is z-independent with g_zz = 1, so d/dz is geodesic
    ic = InitialConditions(
        GroupPoint([0.8], [-0.2], 0.0), TangentVector([0.0], [0.0], 1.0)
    )
    _, acc = geodesic_ode_rhs(RIEM1, state_of(ic), path="christoffel")
    assert np.max(np.abs(acc.coords())) < 1e-10
    traj = integrate_geodesic(RIEM1, ic, 2.0, 0.01)
    assert np.max(np.abs(traj.states[-1][:2] - [0.8, -0.2])) < 1e-9
    assert traj.states[-1][2] == pytest.approx(2.0, abs=1e-9)


def test_riemannian_rotation_matches_analytic_solution():
    # Riemannian geodesic equations rotate (vx, vy) at rate alpha; with
    # theta(v0) = 0 the imbalance grows as (vx0 + vy0) sin(alpha t)
    ic = InitialConditions(
        GroupPoint([1.0], [0.0], 0.0), TangentVector([1.0], [1.0], 0.0)
    )
    traj = integrate_geodesic(RIEM1, ic, 3.0, 0.01, rhs="christoffel")
    idx = np.searchsorted(traj.ts, [0.5, 1.0, 1.6, 3.0])
    for i in idx:
        t = traj.ts[i]
        theta = traj.states[i][3] - traj.states[i][4]
        assert theta == pytest.approx(2.0 * np.sin(t), abs=1e-6)


def test_analytic_path_rejected_for_riemannian():
    ic = random_ic(child_rng(1, 1), 1)
    with pytest.raises(ValueError):
        geodesic_ode_rhs(RIEM1, state_of(ic), path="analytic")
    with pytest.raises(ValueError):
        integrate_geodesic(RIEM1, ic, 1.0, 0.01, rhs="analytic")


def test_christoffel_h_validation():
    with pytest.raises(ValueError):
        christoffel_fd(PSEUDO1, GroupPoint([0.0], [0.0], 0.0), h=0.0)


def test_christoffel_known_entry_p1():
    # Gamma^z_{x1 y1} at the origin: from the pseudo equations,
    # z'' = -sum(vx vy) + w sum(x vx) gives -Gamma^z_{xy} v^x v^y ... with
    # the cross term coefficient 1/2 on each of (x,y) and (y,x)
    gamma = christoffel_fd(PSEUDO1, GroupPoint([0.0], [0.0], 0.0))
    assert gamma[2, 0, 1] == pytest.approx(0.5, abs=1e-9)
    assert gamma[2, 1, 0] == pytest.approx(0.5, abs=1e-9)
