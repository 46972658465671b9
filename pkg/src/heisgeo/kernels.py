"""Backend selection for the hot compute kernels.

The batched closed-form evaluator and the RK4 integrators dominate the
runtime of verification sweeps, so they exist twice: a Cython extension
(``heisgeo._kernels_cy``) and a pure-numpy fallback (``heisgeo._kernels_py``).
The compiled backend is preferred when importable; set

    HEISGEO_BACKEND=python   force the numpy fallback
    HEISGEO_BACKEND=cython   require the extension (ImportError if missing)

before import to override. Both backends implement the same function
signatures and agree to floating-point roundoff (not bit-for-bit: summation
orders differ). ``benchmarks/bench_kernels.py`` compares their speed.
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("HEISGEO_BACKEND", "auto").strip().lower() or "auto"
if _requested not in ("auto", "cython", "python"):
    raise ValueError(
        f"HEISGEO_BACKEND must be 'auto', 'cython' or 'python', got {_requested!r}"
    )

if _requested == "python":
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "cython":
            raise
        _impl = _kernels_py

closed_form_batch = _impl.closed_form_batch
rhs_analytic_batch = _impl.rhs_analytic_batch
rhs_christoffel_batch = _impl.rhs_christoffel_batch
rk4_analytic_batch = _impl.rk4_analytic_batch
rk4_christoffel_batch = _impl.rk4_christoffel_batch


def backend_name() -> str:
    """Name of the active backend: 'cython' or 'python'."""
    return _impl.BACKEND
