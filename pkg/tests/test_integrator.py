"""RK4 integrator: accuracy against closed forms, order, error handling."""

import numpy as np
import pytest

from heisgeo import (
    GroupPoint,
    InitialConditions,
    MetricSpec,
    NonFiniteStateError,
    TangentVector,
    closed_form_state,
    closed_form_states,
    integrate_geodesic,
)
from heisgeo.geodesics import batch_first_integral
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


STRAIGHT = make_ic(0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
BOOSTED = make_ic(0.3, -0.2, 0.1, 0.8, 0.5, 0.85)  # alpha = 1


def test_straight_line_integrates_nearly_exactly():
    traj = integrate_geodesic(PSEUDO1, STRAIGHT, 5.0, 1e-3)
    endpoint = closed_form_state(STRAIGHT, 5.0).state()
    assert np.max(np.abs(traj.states[-1] - endpoint)) < 1e-10


def test_alpha1_endpoint_accuracy():
    ic = make_ic(0.0, 0.0, 0.0, 0.0, 1.0, 1.0)
    traj = integrate_geodesic(PSEUDO1, ic, 1.0, 1e-3)
    endpoint = closed_form_state(ic, 1.0).state()
    assert np.max(np.abs(traj.states[-1] - endpoint)) < 1e-8


def test_convergence_order_ratio():
    exact = closed_form_state(BOOSTED, 2.0).state()

    def endpoint_error(step):
        traj = integrate_geodesic(PSEUDO1, BOOSTED, 2.0, step)
        return float(np.max(np.abs(traj.states[-1] - exact)))

    ratio = endpoint_error(0.05) / endpoint_error(0.025)
    assert 12.0 <= ratio <= 20.0


def test_backward_integration():
    ic = make_ic(0.1, 0.2, -0.3, 0.5, -0.4, 0.6)
    traj = integrate_geodesic(PSEUDO1, ic, -2.0, 1e-3)
    assert traj.ts[0] == -2.0 and traj.ts[-1] == 0.0
    assert np.all(np.diff(traj.ts) > 0)
    assert np.array_equal(traj.states[-1], ic.state())
    exact = closed_form_state(ic, -2.0).state()
    assert np.max(np.abs(traj.states[0] - exact)) < 1e-9


def test_trajectory_shape_and_sampling():
    traj = integrate_geodesic(PSEUDO1, BOOSTED, 1.0, 0.25)
    assert len(traj) == 5
    assert np.allclose(traj.ts, [0.0, 0.25, 0.5, 0.75, 1.0])
    s = traj.sample(2)
    assert s.t == 0.5
    assert s.p == 1
    mid = closed_form_state(BOOSTED, 0.5).state()
    assert np.max(np.abs(s.state() - mid)) < 1e-3  # step 0.25 is coarse
    assert len(traj.samples) == 5


def test_first_integral_preserved_along_rk4():
    from heisgeo import kernels

    for p in (1, 2, 3):
        ics = [random_ic(child_rng(606, 10 * p + i), p) for i in range(10)]
        states0 = np.stack([ic.state() for ic in ics])
        traj = kernels.rk4_analytic_batch(states0, p, 1e-3, 5000, record_stride=50)
        w = batch_first_integral(traj, p)
        assert np.max(np.abs(w - w[:, [0]])) < 1e-9


def test_oracle_equivalence_sampled():
    for i in range(10):
        p = 1 + i % 3
        ic = random_ic(child_rng(607, i), p)
        traj = integrate_geodesic(MetricSpec(p), ic, 5.0, 1e-3)
        closed = closed_form_states(ic, traj.ts)
        assert np.max(np.abs(closed - traj.states)) < 1e-6


def test_christoffel_route_agrees_too():
    ic = random_ic(child_rng(608, 0), 1)
    traj = integrate_geodesic(PSEUDO1, ic, 2.0, 1e-3, rhs="christoffel")
    closed = closed_form_states(ic, traj.ts)
    assert np.max(np.abs(closed - traj.states)) < 1e-6


def test_bad_arguments():
    with pytest.raises(ValueError):
        integrate_geodesic(PSEUDO1, STRAIGHT, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate_geodesic(PSEUDO1, STRAIGHT, 1.0, -0.1)
    with pytest.raises(ValueError):
        integrate_geodesic(PSEUDO1, STRAIGHT, 0.0, 0.1)
    with pytest.raises(ValueError):
        integrate_geodesic(PSEUDO1, STRAIGHT, 1.05, 0.1)  # not a multiple
    with pytest.raises(ValueError):
        integrate_geodesic(PSEUDO1, STRAIGHT, 1.0, 0.1, rhs="nope")


def test_nonfinite_detected():
    # huge alpha makes cosh blow past the double range mid-integration
    ic = make_ic(0.0, 0.0, 0.0, 0.0, 1.0, 500.0)
    with pytest.raises(NonFiniteStateError) as err:
        integrate_geodesic(PSEUDO1, ic, 5.0, 0.01)
    assert 0.0 < err.value.t <= 5.0
