"""Totally-geodesic verification sweeps and the tangency-violation search."""

import numpy as np
import pytest

from heisgeo import (
    GroupPoint,
    InitialConditions,
    MetricKind,
    MetricSpec,
    TangentVector,
    dx_form,
    leaf_form,
    riemannian_counterexample_search,
    run_verification_suite,
    search_tangency_violation,
    theta_eval,
    totally_geodesic_verify,
)
from heisgeo.geodesics import alpha, closed_form_states
from heisgeo.rng import child_rng
from heisgeo.sampling import tangent_ic

GRID = np.arange(-100, 101) * 0.1


@pytest.mark.parametrize("p", [1, 2, 3])
def test_pseudo_metric_preserves_tangency(p):
    report = totally_geodesic_verify(
        MetricSpec(p), leaf_form(p), n_samples=100, time_grid=GRID, tol=1e-9, seed=0
    )
    assert report.passed
    assert report.max_abs_theta < 1e-9
    assert report.n_samples == 100
    assert report.worst_ic is not None


def test_sampler_produces_tangent_starts():
    # exact 0.0 for most draws; never beyond one rounding of the adjusted slot
    exact = 0
    for i in range(200):
        p = 1 + i % 3
        form = leaf_form(p)
        ic = tangent_ic(child_rng(0, i), p, form)
        residual = abs(theta_eval(form, ic.point, ic.velocity))
        assert residual <= 2.3e-16
        exact += residual == 0.0
    assert exact >= 180


def test_dx_form_not_totally_geodesic_pseudo():
    # velocity d/dy at x(0)=1 with alpha = 1: vx(t) = -sinh(t)
    p = 1
    ic = InitialConditions(
        GroupPoint([1.0], [0.0], 0.0), TangentVector([0.0], [1.0], 0.0)
    )
    assert alpha(ic) == 1.0
    assert theta_eval(dx_form(p), ic.point, ic.velocity) == 0.0
    ts = np.linspace(0.0, 2.0, 21)
    states = closed_form_states(ic, ts)
    vx = states[:, 3]
    assert np.max(np.abs(vx + np.sinh(ts))) < 1e-12

    report = totally_geodesic_verify(
        MetricSpec(p), dx_form(p), n_samples=50, time_grid=GRID, tol=1e-9, seed=3
    )
    assert not report.passed
    assert report.max_abs_theta > 0.1


def test_riemannian_metric_fails_verification():
    report = totally_geodesic_verify(
        MetricSpec(1, MetricKind.RIEMANNIAN), leaf_form(1),
        n_samples=25, time_grid=GRID, tol=1e-9, seed=0,
    )
    assert not report.passed
    assert report.max_abs_theta > 0.1


def test_verify_input_validation():
    spec = MetricSpec(1)
    with pytest.raises(ValueError):
        totally_geodesic_verify(spec, leaf_form(1), 10, [], 1e-9, 0)
    with pytest.raises(ValueError):
        totally_geodesic_verify(spec, leaf_form(1), 0, GRID, 1e-9, 0)


def test_search_finds_riemannian_witness():
    result = riemannian_counterexample_search(1, seed=0)
    assert result.found
    assert result.n_tried <= 10
    ce = result.counterexample
    assert ce.t_star <= 5.0
    assert abs(ce.theta_at_t_star) > 0.1
    assert abs(ce.theta_start) < 1e-12


def test_search_witness_reproducible():
    r1 = riemannian_counterexample_search(1, seed=11)
    r2 = riemannian_counterexample_search(1, seed=11)
    assert r1.to_dict() == r2.to_dict()


def test_search_not_found_at_huge_threshold():
    result = riemannian_counterexample_search(1, n_tries=8, threshold=1e9, seed=0)
    assert not result.found
    assert result.counterexample is None
    assert result.n_tried == 8


def test_search_pseudo_sanity_inversion():
    # the same harness on the pseudo metric finds nothing at threshold 1e-6
    result = search_tangency_violation(
        MetricSpec(1), leaf_form(1), n_tries=50, threshold=1e-6, seed=0
    )
    assert not result.found
    assert result.n_tried == 50


def test_search_threshold_validation():
    with pytest.raises(ValueError):
        riemannian_counterexample_search(1, threshold=0.0)
    with pytest.raises(ValueError):
        riemannian_counterexample_search(1, threshold=-0.5)
    with pytest.raises(ValueError):
        riemannian_counterexample_search(1, n_tries=0)


def test_search_counterexample_to_dict_roundtrip():
    result = riemannian_counterexample_search(1, seed=0)
    d = result.to_dict()
    assert d["found"] is True
    assert set(d["counterexample"]["ic"]) == {"x", "y", "z", "vx", "vy", "vz"}
    assert d["counterexample"]["t_star"] == result.counterexample.t_star


def test_suite_pseudo_passes():
    report = run_verification_suite([1], MetricKind.PSEUDO_RIEMANNIAN,
                                    seed=0, n_samples=10, tg_samples=20)
    assert report["passed"]
    names = {c["name"] for c in report["checks"]}
    assert "oracle_equivalence_p1" in names
    assert "totally_geodesic_p1" in names


def test_suite_riemannian_fails_with_counterexample():
    report = run_verification_suite([1], MetricKind.RIEMANNIAN,
                                    seed=0, n_samples=10, tg_samples=20)
    assert not report["passed"]
    assert len(report["counterexamples"]) == 1
    failing = [c for c in report["checks"] if not c["passed"]]
    assert [c["name"] for c in failing] == ["totally_geodesic_p1"]
