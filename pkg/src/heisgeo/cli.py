"""Command-line interface.

Subcommands:

    trace    sample one geodesic to CSV or JSON (closed form or RK4)
    verify   run the full verification suite, emit a JSON report
    search   hunt for a Riemannian tangency-violation witness
    metric   dump the metric matrix and Christoffel symbols at a point

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 verification failure,
4 search exhausted without a witness.

Options may come from a JSON config file (--config); explicit flags override
file values. All output is deterministic for a fixed configuration and seed:
numbers are printed with repr (shortest round-trip, at most 17 significant
digits), rows and keys in fixed order, LF line endings.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from .core import GroupPoint, MetricKind, MetricSpec, TangentVector, signature
from .errors import GeometryError
from .forms import OneForm, batch_theta, contact_form, dx_form, leaf_form
from .geodesics import (
    InitialConditions,
    alpha,
    batch_first_integral,
    batch_lagrangian,
    christoffel_fd,
    closed_form_states,
    integrate_geodesic,
)
from .verify import riemannian_counterexample_search, run_verification_suite

__all__ = ["main", "entry_point"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VERIFY_FAILED = 3
EXIT_NOT_FOUND = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we own the codes
        raise UsageError(message)


def _fmt(x: float) -> str:
    return repr(float(x))


def _parse_floats(section: str, field: str) -> list[float]:
    try:
        return [float(tok) for tok in section.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"invalid number in {field}: {exc}") from exc


def parse_ic(text: str, p: Optional[int] = None) -> InitialConditions:
    """Parse "x..;y..;z;vx..;vy..;vz" (or "x..;y..;z" for zero velocity)."""
    sections = [s.strip() for s in text.split(";")]
    if len(sections) not in (3, 6):
        raise UsageError(
            "ic must have 6 sections x;y;z;vx;vy;vz (or 3 for a bare point), "
            f"got {len(sections)}"
        )
    x = _parse_floats(sections[0], "ic.x")
    y = _parse_floats(sections[1], "ic.y")
    z = _parse_floats(sections[2], "ic.z")
    if len(z) != 1:
        raise UsageError("ic.z must be a single number")
    if len(sections) == 6:
        vx = _parse_floats(sections[3], "ic.vx")
        vy = _parse_floats(sections[4], "ic.vy")
        vz = _parse_floats(sections[5], "ic.vz")
        if len(vz) != 1:
            raise UsageError("ic.vz must be a single number")
    else:
        vx, vy, vz = [0.0] * len(x), [0.0] * len(x), [0.0]
    if p is not None and len(x) != p:
        raise UsageError(f"ic has p = {len(x)} but p = {p} was requested")
    try:
        return InitialConditions(
            GroupPoint(np.array(x), np.array(y), z[0]),
            TangentVector(np.array(vx), np.array(vy), vz[0]),
        )
    except (GeometryError, ValueError) as exc:
        raise UsageError(f"invalid ic: {exc}") from exc


def _make_form(name: str, p: int, coeffs: Optional[str]) -> OneForm:
    if name == "theta":
        return leaf_form(p)
    if name == "dx1":
        return dx_form(p, 1)
    if name == "contact":
        return contact_form(p)
    if name == "custom-coeffs":
        if not coeffs:
            raise UsageError("form custom-coeffs requires --form-coeffs \"cx..;cy..;cz\"")
        sections = coeffs.split(";")
        if len(sections) != 3:
            raise UsageError("form-coeffs must have 3 sections cx..;cy..;cz")
        cx = _parse_floats(sections[0], "form-coeffs.cx")
        cy = _parse_floats(sections[1], "form-coeffs.cy")
        cz = _parse_floats(sections[2], "form-coeffs.cz")
        if len(cx) != p or len(cy) != p or len(cz) != 1:
            raise UsageError(f"form-coeffs sections must have lengths {p};{p};1")
        try:
            return OneForm(p, "custom", const=np.array(cx + cy + cz))
        except ValueError as exc:
            raise UsageError(f"invalid form coefficients: {exc}") from exc
    raise UsageError(f"unknown form {name!r}")


def _parse_kind(value: str) -> MetricKind:
    try:
        return MetricKind(value)
    except ValueError:
        raise UsageError(f"kind must be 'pseudo' or 'riemannian', got {value!r}") from None


def _parse_p_list(value: str) -> list[int]:
    try:
        ps = [int(tok) for tok in str(value).split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"invalid p: {exc}") from exc
    if not ps or any(p < 1 for p in ps):
        raise UsageError(f"p must contain positive integers, got {value!r}")
    return ps


def _write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _json_dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "p", "kind", "ic", "t_end", "step", "format", "out", "seed", "tol",
    "oracle", "form", "form_coeffs", "n_samples", "tg_samples", "n_tries",
    "t_max", "threshold", "fd_step",
}


def _merged(args: argparse.Namespace) -> dict:
    """Config-file values overridden by explicitly given flags."""
    merged: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError:
            raise
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(loaded) - _CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        merged.update(loaded)
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None:
            merged[key] = value
    return merged


def _get(cfg: dict, key: str, default=None, cast=None):
    value = cfg.get(key, default)
    if value is None:
        return None
    if cast is not None:
        try:
            return cast(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid {key}: {exc}") from exc
    return value


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _trace_rows(states: np.ndarray, ts: np.ndarray, p: int, spec: MetricSpec,
                form: OneForm, alpha0: float):
    theta = batch_theta(form, states, p)
    energy = batch_lagrangian(states, p, spec.x_sign)
    residual = batch_first_integral(states, p) - alpha0
    return theta, energy, residual


def cmd_trace(cfg: dict) -> int:
    ps = _get(cfg, "p")
    p = None if ps is None else _parse_p_list(ps)[0]
    ic_text = _get(cfg, "ic")
    if ic_text is None:
        raise UsageError("trace requires --ic")
    ic = parse_ic(str(ic_text), p)
    p = ic.p
    kind = _parse_kind(str(_get(cfg, "kind", "pseudo")))
    spec = MetricSpec(p, kind)
    t_end = _get(cfg, "t_end", 5.0, float)
    step = _get(cfg, "step", 0.01, float)
    oracle = str(_get(cfg, "oracle", "closed"))
    fmt = str(_get(cfg, "format", "csv"))
    form = _make_form(str(_get(cfg, "form", "theta")), p, _get(cfg, "form_coeffs"))
    if fmt not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {fmt!r}")
    if oracle not in ("closed", "rk4"):
        raise UsageError(f"oracle must be closed or rk4, got {oracle!r}")
    if oracle == "closed" and kind is not MetricKind.PSEUDO_RIEMANNIAN:
        raise UsageError("oracle closed exists only for kind pseudo; use --oracle rk4")

    if oracle == "closed":
        if step <= 0:
            raise UsageError("step must be positive")
        if t_end == 0:
            raise UsageError("t_end must be nonzero")
        n_steps = int(round(abs(t_end) / step))
        if n_steps < 1 or abs(n_steps * step - abs(t_end)) > 1e-6 * step:
            raise UsageError("t_end must be an integer multiple of step")
        ts = math.copysign(step, t_end) * np.arange(n_steps + 1)
        if t_end < 0:
            ts = ts[::-1].copy()
        states = closed_form_states(ic, ts)
    else:
        try:
            traj = integrate_geodesic(spec, ic, t_end, step)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        ts, states = traj.ts, traj.states

    alpha0 = alpha(ic)
    theta, energy, residual = _trace_rows(states, ts, p, spec, form, alpha0)

    if fmt == "csv":
        cols = (
            ["t"]
            + [f"x{i}" for i in range(1, p + 1)]
            + [f"y{i}" for i in range(1, p + 1)]
            + ["z"]
            + [f"vx{i}" for i in range(1, p + 1)]
            + [f"vy{i}" for i in range(1, p + 1)]
            + ["vz", "theta", "energy", "alpha_residual"]
        )
        lines = [",".join(cols)]
        for i in range(len(ts)):
            row = [ts[i], *states[i], theta[i], energy[i], residual[i]]
            lines.append(",".join(_fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        n = 2 * p + 1
        samples = []
        for i in range(len(ts)):
            s = states[i]
            samples.append(
                {
                    "t": float(ts[i]),
                    "x": [float(v) for v in s[:p]],
                    "y": [float(v) for v in s[p : 2 * p]],
                    "z": float(s[2 * p]),
                    "vx": [float(v) for v in s[n : n + p]],
                    "vy": [float(v) for v in s[n + p : n + 2 * p]],
                    "vz": float(s[2 * n - 1]),
                    "theta": float(theta[i]),
                    "energy": float(energy[i]),
                    "alpha_residual": float(residual[i]),
                }
            )
        text = _json_dump(
            {
                "p": p,
                "kind": kind.value,
                "oracle": oracle,
                "form": form.name,
                "t_end": t_end,
                "step": step,
                "alpha": alpha0,
                "samples": samples,
            }
        )
    _write_text(_get(cfg, "out"), text)
    return EXIT_OK


def cmd_verify(cfg: dict) -> int:
    p_values = _parse_p_list(str(_get(cfg, "p", "1,2,3")))
    kind = _parse_kind(str(_get(cfg, "kind", "pseudo")))
    seed = _get(cfg, "seed", 0, int)
    tol = _get(cfg, "tol", 1e-9, float)
    n_samples = _get(cfg, "n_samples", 25, int)
    tg_samples = _get(cfg, "tg_samples", 100, int)
    if n_samples < 1 or tg_samples < 1:
        raise UsageError("n_samples and tg_samples must be >= 1")
    form_name = str(_get(cfg, "form", "theta"))
    coeffs = _get(cfg, "form_coeffs")
    form_factory = lambda p: _make_form(form_name, p, coeffs)  # noqa: E731
    report = run_verification_suite(
        p_values, kind, seed=seed, n_samples=n_samples, tg_samples=tg_samples,
        tol=tol, form_factory=form_factory,
    )
    _write_text(_get(cfg, "out"), _json_dump(report))
    return EXIT_OK if report["passed"] else EXIT_VERIFY_FAILED


def cmd_search(cfg: dict) -> int:
    kind = _parse_kind(str(_get(cfg, "kind", "riemannian")))
    if kind is not MetricKind.RIEMANNIAN:
        raise UsageError(
            "search applies to kind riemannian; the pseudo metric preserves "
            "tangency (run verify for that claim)"
        )
    p = _parse_p_list(str(_get(cfg, "p", "1")))[0]
    seed = _get(cfg, "seed", 0, int)
    n_tries = _get(cfg, "n_tries", 1000, int)
    t_max = _get(cfg, "t_max", 5.0, float)
    step = _get(cfg, "step", 0.01, float)
    threshold = _get(cfg, "threshold", 0.1, float)
    try:
        result = riemannian_counterexample_search(
            p, n_tries=n_tries, t_max=t_max, step=step, threshold=threshold, seed=seed
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write_text(_get(cfg, "out"), _json_dump(result.to_dict()))
    return EXIT_OK if result.found else EXIT_NOT_FOUND


def cmd_metric(cfg: dict) -> int:
    ps = _get(cfg, "p")
    p = None if ps is None else _parse_p_list(ps)[0]
    ic_text = _get(cfg, "ic")
    if ic_text is None:
        raise UsageError("metric requires --ic (a point: \"x..;y..;z\")")
    ic = parse_ic(str(ic_text), p)
    p = ic.p
    kind = _parse_kind(str(_get(cfg, "kind", "pseudo")))
    spec = MetricSpec(p, kind)
    h = _get(cfg, "fd_step", 1e-5, float)
    if h <= 0:
        raise UsageError("fd_step must be positive")
    from .core import metric_components

    g = metric_components(spec, ic.point)
    gamma = christoffel_fd(spec, ic.point, h)
    payload = {
        "p": p,
        "kind": kind.value,
        "point": {"x": list(ic.point.x), "y": list(ic.point.y), "z": ic.point.z},
        "signature": list(signature(spec, ic.point)),
        "metric": [[float(v) for v in row] for row in g],
        "fd_step": h,
        "christoffel": [
            [[float(v) for v in row] for row in plane] for plane in gamma
        ],
    }
    _write_text(_get(cfg, "out"), _json_dump(payload))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="heisgeo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file; flags override its values")
        sp.add_argument("--p", help="half-dimension p (verify accepts a comma list)")
        sp.add_argument("--kind", help="metric kind: pseudo | riemannian")
        sp.add_argument("--seed", type=int, help="base seed for sampled sweeps")
        sp.add_argument("--out", help="output path (default: stdout)")

    sp = sub.add_parser("trace", help="write one geodesic as CSV or JSON")
    common(sp)
    sp.add_argument("--ic", help='initial conditions "x..;y..;z;vx..;vy..;vz"')
    sp.add_argument("--t-end", dest="t_end", type=float, help="final parameter value")
    sp.add_argument("--step", type=float, help="sample spacing (> 0)")
    sp.add_argument("--format", choices=["csv", "json"], help="output format")
    sp.add_argument("--oracle", choices=["closed", "rk4"], help="evaluation route")
    sp.add_argument("--form", help="theta | dx1 | contact | custom-coeffs")
    sp.add_argument("--form-coeffs", dest="form_coeffs", help='custom coefficients "cx..;cy..;cz"')

    sp = sub.add_parser("verify", help="run the verification suite, emit JSON")
    common(sp)
    sp.add_argument("--tol", type=float, help="totally-geodesic tolerance (default 1e-9)")
    sp.add_argument("--n-samples", dest="n_samples", type=int, help="samples per structural check")
    sp.add_argument("--tg-samples", dest="tg_samples", type=int,
                    help="tangent geodesics per totally-geodesic sweep")
    sp.add_argument("--form", help="distribution to sweep: theta | dx1 | custom-coeffs")
    sp.add_argument("--form-coeffs", dest="form_coeffs", help='custom coefficients "cx..;cy..;cz"')

    sp = sub.add_parser("search", help="find a Riemannian tangency-violation witness")
    common(sp)
    sp.add_argument("--n-tries", dest="n_tries", type=int, help="max sampled starts")
    sp.add_argument("--t-max", dest="t_max", type=float, help="forward search horizon")
    sp.add_argument("--step", type=float, help="integration step")
    sp.add_argument("--threshold", type=float, help="|theta| level that counts as a witness")

    sp = sub.add_parser("metric", help="dump metric matrix and Christoffel symbols")
    common(sp)
    sp.add_argument("--ic", help='point "x..;y..;z" (velocity part optional, ignored)')
    sp.add_argument("--fd-step", dest="fd_step", type=float, help="Christoffel difference step")

    return parser


_COMMANDS = {
    "trace": cmd_trace,
    "verify": cmd_verify,
    "search": cmd_search,
    "metric": cmd_metric,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _merged(args)
        return _COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GeometryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry_point() -> None:
    raise SystemExit(main())
