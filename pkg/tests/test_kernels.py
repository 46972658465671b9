"""Backend agreement: compiled kernels against the pure-numpy fallback."""

import importlib.util

import numpy as np
import pytest

from heisgeo import _kernels_py
from heisgeo import kernels as active
from heisgeo.geodesics import alpha
from heisgeo.rng import child_rng
from heisgeo.sampling import random_ic

HAVE_CY = importlib.util.find_spec("heisgeo._kernels_cy") is not None
if HAVE_CY:
    from heisgeo import _kernels_cy

needs_cy = pytest.mark.skipif(not HAVE_CY, reason="compiled backend not built")


def _batch(p, m, seed):
    ics = [random_ic(child_rng(seed, i), p) for i in range(m)]
    states0 = np.stack([ic.state() for ic in ics])
    alphas = np.array([alpha(ic) for ic in ics])
    return states0, alphas


def test_active_backend_reports_name():
    assert active.backend_name() in ("cython", "python")


@needs_cy
@pytest.mark.parametrize("p", [1, 2, 3])
def test_closed_form_backends_agree(p):
    states0, alphas = _batch(p, 20, 101)
    ts = np.linspace(-5.0, 5.0, 41)
    a = _kernels_py.closed_form_batch(states0, alphas, ts, p)
    b = _kernels_cy.closed_form_batch(states0, alphas, ts, p)
    scale = 1.0 + np.abs(a)
    assert np.max(np.abs(a - b) / scale) < 1e-12


@needs_cy
@pytest.mark.parametrize("p", [1, 2, 3])
def test_rhs_backends_agree(p):
    states0, _ = _batch(p, 20, 102)
    a = _kernels_py.rhs_analytic_batch(states0, p)
    b = _kernels_cy.rhs_analytic_batch(states0, p)
    assert np.max(np.abs(a - b)) < 1e-13
    for xsign in (-1.0, 1.0):
        a = _kernels_py.rhs_christoffel_batch(states0, p, xsign, 1e-5)
        b = _kernels_cy.rhs_christoffel_batch(states0, p, xsign, 1e-5)
        assert np.max(np.abs(a - b)) < 1e-9


@needs_cy
def test_rk4_backends_agree():
    states0, _ = _batch(2, 10, 103)
    a = _kernels_py.rk4_analytic_batch(states0, 2, 1e-2, 200)
    b = _kernels_cy.rk4_analytic_batch(states0, 2, 1e-2, 200)
    assert np.max(np.abs(a - b)) < 1e-10
    a = _kernels_py.rk4_christoffel_batch(states0, 2, 1.0, 1e-5, 1e-2, 100)
    b = _kernels_cy.rk4_christoffel_batch(states0, 2, 1.0, 1e-5, 1e-2, 100)
    assert np.max(np.abs(a - b)) < 1e-9


@needs_cy
def test_record_stride_consistency():
    states0, _ = _batch(1, 3, 104)
    for mod in (_kernels_py, _kernels_cy):
        full = mod.rk4_analytic_batch(states0, 1, 1e-2, 100, 1)
        strided = mod.rk4_analytic_batch(states0, 1, 1e-2, 100, 10)
        assert strided.shape[1] == 11
        assert np.array_equal(strided, full[:, ::10])
        with pytest.raises(ValueError):
            mod.rk4_analytic_batch(states0, 1, 1e-2, 101, 10)


@pytest.mark.parametrize("mod", [_kernels_py] + ([_kernels_cy] if HAVE_CY else []))
def test_shape_validation(mod):
    with pytest.raises(ValueError):
        mod.rhs_analytic_batch(np.zeros((2, 5)), 1)


def test_negative_step_supported_everywhere():
    states0, alphas = _batch(1, 4, 105)
    back = active.rk4_analytic_batch(states0, 1, -1e-2, 100)
    ts = -1e-2 * np.arange(101)
    closed = active.closed_form_batch(states0, alphas, ts, 1)
    assert np.max(np.abs(back - closed)) < 1e-8
