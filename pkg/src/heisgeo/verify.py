"""Verification sweeps: totally geodesic checks and the tangency-violation search.

The positive claim — ker(theta) is totally geodesic for the pseudo-Riemannian
metric — is checked by sampling initial conditions tangent to the
distribution, evaluating theta(velocity) along closed-form geodesics over a
time grid, and bounding the largest deviation. The negative contrast — the
same distribution is NOT totally geodesic for the Riemannian metric — is
established constructively: a search over tangent initial conditions,
integrated with the metric-derived (finite-difference Christoffel) equations,
returns a witness whose velocity leaves the distribution.

``run_verification_suite`` bundles these with the structural checks (group
laws, left invariance, signature, conservation, oracle agreement, Frobenius)
into one machine-readable report for the command line.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import kernels
from .core import (
    GroupPoint,
    MetricKind,
    MetricSpec,
    group_inverse,
    group_multiply,
    identity,
    left_translation_differential,
    metric_components,
    metric_eval,
    signature,
)
from .errors import DimensionMismatchError
from .forms import (
    OneForm,
    batch_theta,
    contact_form,
    leaf_form,
    leaf_value,
    theta_eval,
    theta_wedge_dtheta_max,
)
from .geodesics import (
    FD_METRIC_STEP,
    InitialConditions,
    alpha,
    batch_first_integral,
    batch_lagrangian,
    closed_form_grid,
    geodesic_ode_rhs,
    GeodesicState,
)
from .rng import child_rng
from .sampling import random_ic, random_point, random_velocity, tangent_ic

__all__ = [
    "VerificationReport",
    "Counterexample",
    "SearchResult",
    "totally_geodesic_verify",
    "search_tangency_violation",
    "riemannian_counterexample_search",
    "run_verification_suite",
]

TANGENT_START_TOL = 1e-12


def _ic_dict(ic: InitialConditions) -> dict:
    return {
        "x": list(ic.point.x),
        "y": list(ic.point.y),
        "z": ic.point.z,
        "vx": list(ic.velocity.ux),
        "vy": list(ic.velocity.uy),
        "vz": ic.velocity.uz,
    }


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one totally-geodesic sweep."""

    kind: str
    form: str
    p: int
    n_samples: int
    t_start: float
    t_stop: float
    t_count: int
    tolerance: float
    max_abs_theta: float
    passed: bool
    worst_ic: Optional[dict] = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Counterexample:
    """A geodesic that starts tangent to ker(form) and leaves it.

    Both form evaluations are recomputed on construction: theta at t = 0
    directly from the initial conditions, theta at t_star by re-integrating
    the geodesic.
    """

    kind: str
    form: str
    p: int
    ic: dict
    t_star: float
    theta_start: float
    theta_at_t_star: float
    try_index: int

    def to_dict(self) -> dict:
        return asdict(self)


def _build_counterexample(
    spec: MetricSpec,
    form: OneForm,
    ic: InitialConditions,
    step_index: int,
    step: float,
    threshold: float,
    try_index: int,
    fd_step: float,
) -> Counterexample:
    theta0 = theta_eval(form, ic.point, ic.velocity)
    if abs(theta0) >= TANGENT_START_TOL:
        raise ValueError(f"witness is not tangent at t = 0: theta = {theta0!r}")
    redo = kernels.rk4_christoffel_batch(
        ic.state()[None, :], spec.p, spec.x_sign, fd_step, step, step_index
    )[0, -1]
    t_star = step_index * step
    theta_star = float(batch_theta(form, redo, spec.p))
    if abs(theta_star) <= threshold:
        raise ValueError(
            f"witness does not exceed the threshold on recomputation: {theta_star!r}"
        )
    return Counterexample(
        kind=spec.kind.value,
        form=form.name,
        p=spec.p,
        ic=_ic_dict(ic),
        t_star=t_star,
        theta_start=theta0,
        theta_at_t_star=theta_star,
        try_index=try_index,
    )


@dataclass(frozen=True)
class SearchResult:
    found: bool
    kind: str
    form: str
    p: int
    n_tried: int
    n_tries: int
    threshold: float
    t_max: float
    step: float
    seed: int
    counterexample: Optional[Counterexample] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["counterexample"] = self.counterexample.to_dict() if self.counterexample else None
        return d


def _grid_theta(
    spec: MetricSpec,
    form: OneForm,
    ics: list[InitialConditions],
    ts: np.ndarray,
    rk4_step: float,
    fd_step: float,
) -> np.ndarray:
    """|form(velocity)| on the grid for every ic: (m, len(ts)).

    Closed form for the pseudo metric; RK4 on the Christoffel equations for
    the Riemannian one (which requires a uniform grid containing 0).
    """
    if spec.kind is MetricKind.PSEUDO_RIEMANNIAN:
        states = closed_form_grid(ics, ts)
        return batch_theta(form, states, spec.p)

    dts = np.diff(ts)
    if len(ts) < 2 or not np.allclose(dts, dts[0], rtol=1e-9, atol=1e-12):
        raise ValueError("RK4 evaluation needs a uniform time grid")
    zero = int(np.argmin(np.abs(ts)))
    if abs(ts[zero]) > 1e-12:
        raise ValueError("RK4 evaluation needs a grid containing t = 0")
    grid_step = float(dts[0])
    sub = max(1, int(round(grid_step / rk4_step)))
    internal = grid_step / sub
    states0 = np.stack([ic.state() for ic in ics])
    m = len(ics)
    out = np.empty((m, len(ts)))
    out[:, zero] = batch_theta(form, states0, spec.p)
    n_back, n_fwd = zero, len(ts) - 1 - zero
    if n_back:
        traj = kernels.rk4_christoffel_batch(
            states0, spec.p, spec.x_sign, fd_step, -internal, n_back * sub, sub
        )
        out[:, :zero] = batch_theta(form, traj[:, 1:], spec.p)[:, ::-1]
    if n_fwd:
        traj = kernels.rk4_christoffel_batch(
            states0, spec.p, spec.x_sign, fd_step, internal, n_fwd * sub, sub
        )
        out[:, zero + 1 :] = batch_theta(form, traj[:, 1:], spec.p)
    return out


def totally_geodesic_verify(
    spec: MetricSpec,
    form: OneForm,
    n_samples: int,
    time_grid,
    tol: float,
    seed: int,
    rk4_step: float = 0.01,
    fd_step: float = FD_METRIC_STEP,
) -> VerificationReport:
    """Sample tangent initial conditions and bound |form(velocity)| on the grid.

    Passes iff the largest deviation over all samples and grid times stays
    below tol. Every sample starts exactly in ker(form); per-sample seeds are
    derived from (seed, index) so the sweep is order-independent.
    """
    ts = np.atleast_1d(np.asarray(time_grid, dtype=float))
    if len(ts) == 0:
        raise ValueError("time_grid must be nonempty")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if form.p != spec.p:
        raise DimensionMismatchError(f"form p = {form.p} vs spec p = {spec.p}")
    ics = [tangent_ic(child_rng(seed, i), spec.p, form) for i in range(n_samples)]
    theta = _grid_theta(spec, form, ics, ts, rk4_step, fd_step)
    flat = np.abs(theta)
    worst_ic_idx = int(np.argmax(flat.max(axis=1)))
    max_abs = float(flat.max())
    return VerificationReport(
        kind=spec.kind.value,
        form=form.name,
        p=spec.p,
        n_samples=n_samples,
        t_start=float(ts[0]),
        t_stop=float(ts[-1]),
        t_count=len(ts),
        tolerance=tol,
        max_abs_theta=max_abs,
        passed=bool(max_abs < tol),
        worst_ic=_ic_dict(ics[worst_ic_idx]),
    )


def search_tangency_violation(
    spec: MetricSpec,
    form: OneForm,
    n_tries: int = 1000,
    t_max: float = 5.0,
    step: float = 0.01,
    threshold: float = 0.1,
    seed: int = 0,
    fd_step: float = FD_METRIC_STEP,
    chunk: int = 64,
) -> SearchResult:
    """Look for a geodesic that starts in ker(form) but leaves it.

    Integrates tangent initial conditions forward to t_max with RK4 on the
    finite-difference Christoffel equations (the kind-agnostic route) and
    returns the first sample, in index order, whose |form(velocity)| exceeds
    the threshold at some recorded time. Not finding one is a result, not an
    error.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if n_tries < 1:
        raise ValueError("n_tries must be >= 1")
    if form.p != spec.p:
        raise DimensionMismatchError(f"form p = {form.p} vs spec p = {spec.p}")
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if step <= 0:
        raise ValueError("step must be positive")
    n_steps = int(round(t_max / step))
    if n_steps < 1 or abs(n_steps * step - t_max) > 1e-6 * step:
        raise ValueError("t_max must be an integer multiple of step")

    meta = dict(
        kind=spec.kind.value,
        form=form.name,
        p=spec.p,
        n_tries=n_tries,
        threshold=threshold,
        t_max=t_max,
        step=step,
        seed=seed,
    )
    for start in range(0, n_tries, chunk):
        indices = range(start, min(start + chunk, n_tries))
        ics = [tangent_ic(child_rng(seed, i), spec.p, form) for i in indices]
        states0 = np.stack([ic.state() for ic in ics])
        traj = kernels.rk4_christoffel_batch(
            states0, spec.p, spec.x_sign, fd_step, step, n_steps
        )
        theta = np.abs(batch_theta(form, traj, spec.p))
        theta[:, 0] = 0.0  # tangent by construction; exclude t = 0
        hits = theta > threshold
        for row, idx in enumerate(indices):
            if hits[row].any():
                step_index = int(np.argmax(hits[row]))
                ce = _build_counterexample(
                    spec, form, ics[row], step_index, step, threshold, idx, fd_step
                )
                return SearchResult(found=True, n_tried=idx + 1, counterexample=ce, **meta)
    return SearchResult(found=False, n_tried=n_tries, **meta)


def riemannian_counterexample_search(
    p: int,
    n_tries: int = 1000,
    t_max: float = 5.0,
    step: float = 0.01,
    threshold: float = 0.1,
    seed: int = 0,
) -> SearchResult:
    """Search for the Riemannian failure of total geodesy of ker(theta).

    Riemannian geodesics rotate the (vx, vy) block instead of boosting it,
    so generic tangent starting data leaves the distribution quickly; the
    search normally succeeds within the first handful of tries.
    """
    spec = MetricSpec(p, MetricKind.RIEMANNIAN)
    return search_tangency_violation(
        spec, leaf_form(p), n_tries=n_tries, t_max=t_max, step=step,
        threshold=threshold, seed=seed,
    )


# ---------------------------------------------------------------------------
# Full structural suite (backs the `verify` CLI command)
# ---------------------------------------------------------------------------

# Per-check offsets for deriving independent sample streams from one seed.
_OFF_GROUP = 10_000
_OFF_LEFTINV = 20_000
_OFF_SIGNATURE = 30_000
_OFF_BILINEAR = 40_000
_OFF_CONSERVE = 50_000
_OFF_ORACLE = 60_000
_OFF_RHS = 70_000
_OFF_TRANSPORT = 80_000
_OFF_LEAF = 90_000


def _check(name: str, max_error: float, tolerance: float, **extra) -> dict:
    entry = {
        "name": name,
        "max_error": float(max_error),
        "tolerance": float(tolerance),
        "passed": bool(max_error < tolerance),
    }
    entry.update(extra)
    return entry


def _group_laws_error(p: int, seed: int, n: int) -> float:
    worst = 0.0
    e = identity(p)
    for i in range(n):
        rng = child_rng(seed, _OFF_GROUP + i)
        a, b, c = (random_point(rng, p) for _ in range(3))
        lhs = group_multiply(group_multiply(a, b), c)
        rhs = group_multiply(a, group_multiply(b, c))
        worst = max(worst, float(np.max(np.abs(lhs.coords() - rhs.coords()))))
        worst = max(worst, float(np.max(np.abs(group_multiply(a, e).coords() - a.coords()))))
        worst = max(worst, float(np.max(np.abs(group_multiply(e, a).coords() - a.coords()))))
        for prod in (group_multiply(a, group_inverse(a)), group_multiply(group_inverse(a), a)):
            worst = max(worst, float(np.max(np.abs(prod.coords()))))
    return worst


def _left_invariance_error(spec: MetricSpec, seed: int, n: int) -> float:
    worst = 0.0
    for i in range(n):
        rng = child_rng(seed, _OFF_LEFTINV + i)
        a = random_point(rng, spec.p)
        at = random_point(rng, spec.p)
        u = random_velocity(rng, spec.p)
        v = random_velocity(rng, spec.p)
        before = metric_eval(spec, at, u, v)
        after = metric_eval(
            spec,
            group_multiply(a, at),
            left_translation_differential(a, at, u),
            left_translation_differential(a, at, v),
        )
        worst = max(worst, abs(after - before))
    return worst


def _signature_failures(spec: MetricSpec, seed: int, n: int = 50) -> float:
    expected = (spec.p, spec.p + 1) if spec.kind is MetricKind.PSEUDO_RIEMANNIAN else (0, spec.dim)
    bad = 0
    for i in range(n):
        rng = child_rng(seed, _OFF_SIGNATURE + i)
        if signature(spec, random_point(rng, spec.p, scale=3.0)) != expected:
            bad += 1
    return float(bad)


def _bilinear_agreement_error(spec: MetricSpec, seed: int, n: int) -> float:
    worst = 0.0
    for i in range(n):
        rng = child_rng(seed, _OFF_BILINEAR + i)
        at = random_point(rng, spec.p)
        u = random_velocity(rng, spec.p)
        v = random_velocity(rng, spec.p)
        direct = metric_eval(spec, at, u, v)
        via_matrix = float(u.coords() @ metric_components(spec, at) @ v.coords())
        worst = max(worst, abs(direct - via_matrix))
    return worst


def _conservation_error(spec: MetricSpec, seed: int, n: int, rk4_step: float = 0.005) -> float:
    """Max relative drift of energy and of the first integral along geodesics."""
    ics = [random_ic(child_rng(seed, _OFF_CONSERVE + i), spec.p) for i in range(n)]
    if spec.kind is MetricKind.PSEUDO_RIEMANNIAN:
        ts = np.arange(-100, 101) * 0.1
        states = closed_form_grid(ics, ts)
    else:
        states0 = np.stack([ic.state() for ic in ics])
        n_steps = int(round(5.0 / rk4_step))
        fwd = kernels.rk4_christoffel_batch(
            states0, spec.p, spec.x_sign, FD_METRIC_STEP, rk4_step, n_steps
        )
        back = kernels.rk4_christoffel_batch(
            states0, spec.p, spec.x_sign, FD_METRIC_STEP, -rk4_step, n_steps
        )
        states = np.concatenate([back[:, ::-1], fwd[:, 1:]], axis=1)
    energy = batch_lagrangian(states, spec.p, spec.x_sign)
    w = batch_first_integral(states, spec.p)
    alphas = np.array([alpha(ic) for ic in ics])[:, None]
    l0 = np.array(
        [batch_lagrangian(ic.state()[None, :], spec.p, spec.x_sign)[0] for ic in ics]
    )[:, None]
    drift_l = np.abs(energy - l0) / (1.0 + np.abs(l0))
    drift_w = np.abs(w - alphas) / (1.0 + np.abs(alphas))
    return float(max(drift_l.max(), drift_w.max()))


def _oracle_equivalence_error(spec: MetricSpec, seed: int, n: int, step: float = 0.001) -> float:
    ics = [random_ic(child_rng(seed, _OFF_ORACLE + i), spec.p) for i in range(n)]
    n_steps = int(round(5.0 / step))
    ts = step * np.arange(n_steps + 1)
    closed = closed_form_grid(ics, ts)
    states0 = np.stack([ic.state() for ic in ics])
    rk = kernels.rk4_analytic_batch(states0, spec.p, step, n_steps)
    return float(np.max(np.abs(closed - rk)))


def _rhs_dual_path_error(spec: MetricSpec, seed: int, n: int) -> float:
    worst = 0.0
    for i in range(n):
        rng = child_rng(seed, _OFF_RHS + i)
        ic = random_ic(rng, spec.p)
        s = GeodesicState(0.0, ic.point, ic.velocity)
        _, acc_a = geodesic_ode_rhs(spec, s, path="analytic")
        _, acc_c = geodesic_ode_rhs(spec, s, path="christoffel")
        worst = max(worst, float(np.max(np.abs(acc_a.coords() - acc_c.coords()))))
    return worst


def _transport_identity_error(spec: MetricSpec, seed: int, n: int) -> float:
    """Max of |theta(t) - exp(alpha t) theta(0)| / (1 + exp(|alpha t|))."""
    form = leaf_form(spec.p)
    ics = [random_ic(child_rng(seed, _OFF_TRANSPORT + i), spec.p) for i in range(n)]
    ts = np.arange(-50, 51) * 0.1
    states = closed_form_grid(ics, ts)
    theta = batch_theta(form, states, spec.p)
    alphas = np.array([alpha(ic) for ic in ics])[:, None]
    theta0 = np.array(
        [theta_eval(form, ic.point, ic.velocity) for ic in ics]
    )[:, None]
    u = alphas * ts[None, :]
    err = np.abs(theta - np.exp(u) * theta0) / (1.0 + np.exp(np.abs(u)))
    return float(err.max())


def _leaf_gradient_error(p: int, seed: int, n: int, h: float = 1e-5) -> float:
    form = leaf_form(p)
    worst = 0.0
    for i in range(n):
        rng = child_rng(seed, _OFF_LEAF + i)
        coords = random_point(rng, p).coords()
        for d in range(2 * p + 1):
            cp, cm = coords.copy(), coords.copy()
            cp[d] += h
            cm[d] -= h
            grad = (
                leaf_value(GroupPoint.from_coords(cp))
                - leaf_value(GroupPoint.from_coords(cm))
            ) / (2.0 * h)
            worst = max(worst, abs(grad - form.const[d]))
    return worst


def _leaf_constancy_error(spec: MetricSpec, seed: int, n: int) -> float:
    ics = [tangent_ic(child_rng(seed, _OFF_LEAF + 5000 + i), spec.p) for i in range(n)]
    ts = np.arange(-100, 101) * 0.1
    states = closed_form_grid(ics, ts)
    p = spec.p
    f = np.einsum("mki->mk", states[:, :, :p]) - np.einsum(
        "mki->mk", states[:, :, p : 2 * p]
    )
    f0 = np.array([leaf_value(ic.point) for ic in ics])[:, None]
    return float(np.max(np.abs(f - f0)))


def _frobenius_check(p: int, seed: int, n_points: int = 50) -> dict:
    points = [random_point(child_rng(seed, 95_000 + i), p, scale=2.0) for i in range(n_points)]
    theta_wedge = theta_wedge_dtheta_max(leaf_form(p), points)
    contact_wedge = theta_wedge_dtheta_max(contact_form(p), points)
    ok = theta_wedge < 1e-6 and contact_wedge > 1e-3
    return {
        "name": f"frobenius_p{p}",
        "max_error": theta_wedge,
        "tolerance": 1e-6,
        "contact_wedge_max": contact_wedge,
        "passed": bool(ok),
    }


def run_verification_suite(
    p_values: list[int],
    kind: MetricKind,
    seed: int = 0,
    n_samples: int = 25,
    tg_samples: int = 100,
    tol: float = 1e-9,
    form_factory=leaf_form,
) -> dict:
    """Run every structural and geometric check; returns a JSON-able report.

    ``form_factory(p)`` builds the 1-form whose kernel the totally-geodesic
    sweep (and, on failure, the witness search) examines; the structural
    checks are form-independent. The report's ``passed`` is True iff every
    check passed; when the sweep fails the search runs and the report embeds
    any counterexample it finds.
    """
    checks: list[dict] = []
    counterexamples: list[dict] = []
    for p in p_values:
        spec = MetricSpec(p, kind)
        checks.append(_check(f"group_laws_p{p}", _group_laws_error(p, seed, n_samples), 1e-12))
        checks.append(
            _check(f"left_invariance_p{p}", _left_invariance_error(spec, seed, n_samples), 1e-12)
        )
        checks.append(
            _check(
                f"signature_p{p}",
                _signature_failures(spec, seed),
                0.5,
                expected=list(
                    (p, p + 1) if kind is MetricKind.PSEUDO_RIEMANNIAN else (0, 2 * p + 1)
                ),
            )
        )
        checks.append(
            _check(
                f"metric_bilinear_p{p}", _bilinear_agreement_error(spec, seed, n_samples), 1e-13
            )
        )
        checks.append(
            _check(f"conservation_p{p}", _conservation_error(spec, seed, n_samples), tol)
        )
        if kind is MetricKind.PSEUDO_RIEMANNIAN:
            checks.append(
                _check(
                    f"oracle_equivalence_p{p}",
                    _oracle_equivalence_error(spec, seed, n_samples),
                    1e-6,
                )
            )
            checks.append(
                _check(f"rhs_dual_path_p{p}", _rhs_dual_path_error(spec, seed, n_samples), 1e-7)
            )
            checks.append(
                _check(
                    f"transport_identity_p{p}",
                    _transport_identity_error(spec, seed, n_samples),
                    tol,
                )
            )
            checks.append(
                _check(f"leaf_constancy_p{p}", _leaf_constancy_error(spec, seed, n_samples), 1e-8)
            )
        checks.append(_check(f"leaf_gradient_p{p}", _leaf_gradient_error(p, seed, n_samples), tol))
        checks.append(_frobenius_check(p, seed))

        form = form_factory(p)
        report = totally_geodesic_verify(
            spec,
            form,
            n_samples=tg_samples,
            time_grid=np.arange(-100, 101) * 0.1,
            tol=tol,
            seed=seed,
        )
        entry = {
            "name": f"totally_geodesic_p{p}",
            "form": form.name,
            "max_error": report.max_abs_theta,
            "tolerance": tol,
            "passed": report.passed,
        }
        if not report.passed:
            search = search_tangency_violation(spec, form, seed=seed)
            if search.found:
                counterexamples.append(search.counterexample.to_dict())
                entry["counterexample_try"] = search.counterexample.try_index
        checks.append(entry)

    return {
        "kind": kind.value,
        "p_values": list(p_values),
        "seed": seed,
        "n_samples": n_samples,
        "tg_samples": tg_samples,
        "backend": kernels.backend_name(),
        "checks": checks,
        "counterexamples": counterexamples,
        "passed": bool(all(c["passed"] for c in checks)),
    }
