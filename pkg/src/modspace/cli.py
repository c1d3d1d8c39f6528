"""Command-line entry point: norms, spectrograms, propagators, solves, probes.

Subcommands write machine-readable artifacts under one output directory
(--out, the MODSPACE_OUT variable, or ./modspace_out): JSON for structured
results, CSV for series, SVG for plots, plus exactly one manifest per run.
Exit codes: 0 success, 1 usage error, 2 numerical failure (non-finite values
or a stalled fixed-point iteration).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .grid import (
    GridSpec,
    NumericalFailure,
    SampledField,
    field_to_csv,
    l2_norm,
    sample_builtin,
    save_field,
)
from .norms import ModParams, mod_norm
from .propagators import FAMILIES, PropagatorKind, apply as apply_propagator, bound_ratio
from .report import write_csv, write_json
from .series import RealEntireSeries, preset_series, PRESETS
from .solver import CauchyData, PicardError, SolverConfig, continue_solution
from .stft import stft, tfmatrix_to_csv, tfmatrix_to_svg
from .verify import (
    SUITES,
    analyticity_probe,
    counterexample_probe,
    localization_probe,
    make_battery,
    run_suite,
)

FIELD_CHOICES = ("gaussian", "triangle", "jump", "plane_wave", "random_bandlimited")


def _field_params(args) -> dict:
    params = {}
    if getattr(args, "width", None) is not None:
        params["width"] = args.width
    if getattr(args, "center", None) is not None:
        params["center"] = args.center
    if getattr(args, "mode", None) is not None:
        params["mode"] = args.mode
    if getattr(args, "bandwidth", None) is not None:
        params["bandwidth"] = args.bandwidth
    if getattr(args, "field_seed", None) is not None:
        params["seed"] = args.field_seed
    return params


def _add_grid_flags(p, n_default=512, L_default=32.0):
    p.add_argument("--dim", type=int, default=1, help="spatial dimension (1-3)")
    p.add_argument("--n", type=int, default=n_default, help="samples per axis (power of two)")
    p.add_argument("--L", type=float, default=L_default, help="box side length")


def _add_field_flags(p, name="--fn"):
    p.add_argument(name, dest="fn", required=True, choices=FIELD_CHOICES)
    p.add_argument("--width", type=float, default=None)
    p.add_argument("--center", type=float, default=None)
    p.add_argument("--mode", type=int, default=None, help="plane-wave mode")
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--field-seed", type=int, default=None)


def _add_params_flags(p):
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--s", type=float, default=0.0)


def _mod_params(args) -> ModParams:
    p = math.inf if args.p <= 0 else args.p
    q = math.inf if args.q <= 0 else args.q
    return ModParams(p, q, args.s)


def _outdir(args) -> Path:
    out = args.out or os.environ.get("MODSPACE_OUT") or "modspace_out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _finite(stage: str, *values):
    for v in values:
        arr = np.asarray(v)
        if not np.all(np.isfinite(arr.view(float) if np.iscomplexobj(arr) else arr)):
            raise NumericalFailure(f"non-finite values in stage '{stage}'")


def _manifest(outdir: Path, command: str, config: dict, seed, wall: float, outputs: list):
    echo = {
        k: v
        for k, v in sorted(config.items())
        if isinstance(v, (str, int, float, bool, list, dict, type(None))) and k != "func"
    }
    payload = {
        "command": command,
        "config": echo,
        "version": __version__,
        "seed": seed,
        "wall_time_s": wall,
        "outputs": sorted(str(o) for o in outputs),
    }
    write_json(outdir / "manifest.json", payload)


def _parse_nonlinearity(spec: str) -> RealEntireSeries:
    if spec in PRESETS:
        return preset_series(spec)
    path = Path(spec)
    if not path.exists():
        raise ValueError(f"nonlinearity must be one of {sorted(PRESETS)} or a JSON file path")
    return RealEntireSeries.from_json(path.read_text())


EQ_FAMILIES = {
    "nls": ("schrodinger",),
    "nlw": ("wave_sine", "wave_cosine"),
    "nlkg": ("kg_sine", "kg_cosine"),
}


def _measure_c1(grid: GridSpec, equation: str, params: ModParams, seed: int) -> float:
    """Battery multiplier constant at t = 1, maximized over the flow's kernels."""
    battery = make_battery(grid, seed=seed, size=8)
    worst = 0.0
    for family in EQ_FAMILIES[equation]:
        report = bound_ratio(family, [1.0], battery.fields, params)
        worst = max(worst, report.rows[0][1])
    return max(worst, 1e-12)


# ---------------------------------------------------------------------------
# Subcommand bodies
# ---------------------------------------------------------------------------


def _cmd_norm(args) -> int:
    outdir = _outdir(args)
    t0 = time.time()
    grid = GridSpec(args.dim, args.n, args.L)
    field = sample_builtin(args.fn, grid, _field_params(args))
    params = _mod_params(args)
    value = mod_norm(field, params)
    _finite("norm", value)
    record = {
        "p": "inf" if math.isinf(params.p) else params.p,
        "q": "inf" if math.isinf(params.q) else params.q,
        "s": params.s,
        "N": args.n,
        "L": args.L,
        "fn": args.fn,
        "value": value,
    }
    print(json.dumps(record, sort_keys=True))
    write_json(outdir / "norm.json", record)
    _manifest(outdir, "norm", vars(args) | {"out": str(outdir)}, args.seed, time.time() - t0,
              [outdir / "norm.json"])
    return 0


def _cmd_stft(args) -> int:
    outdir = _outdir(args)
    t0 = time.time()
    grid = GridSpec(args.dim, args.n, args.L)
    field = sample_builtin(args.fn, grid, _field_params(args))
    window = sample_builtin(args.window, grid, {"width": args.window_width})
    tf = stft(field, window)
    _finite("stft", tf.values)
    csv_path = outdir / "stft.csv"
    svg_path = outdir / "stft.svg"
    tfmatrix_to_csv(tf, csv_path, stride=max(1, grid.size // 1024))
    tfmatrix_to_svg(tf, svg_path, title=f"|V_g {args.fn}|")
    print(json.dumps({"fn": args.fn, "window": args.window,
                      "max_abs": float(np.abs(tf.values).max())}, sort_keys=True))
    _manifest(outdir, "stft", vars(args) | {"out": str(outdir)}, args.seed, time.time() - t0,
              [csv_path, svg_path])
    return 0


def _cmd_propagate(args) -> int:
    outdir = _outdir(args)
    t0 = time.time()
    grid = GridSpec(args.dim, args.n, args.L)
    field = sample_builtin(args.fn, grid, _field_params(args))
    if args.sweep:
        t_grid = [float(t) for t in args.sweep.split(",")]
        battery = make_battery(grid, seed=args.seed, size=args.battery_size)
        rep = bound_ratio(args.kind, t_grid, battery.fields, _mod_params(args))
        csv_path = outdir / "bound_ratio.csv"
        svg_path = outdir / "bound_ratio.svg"
        rep.to_csv(csv_path)
        rep.to_svg(svg_path)
        print(json.dumps({"kind": args.kind, "empirical_constant": rep.empirical_constant},
                         sort_keys=True))
        _manifest(outdir, "propagate", vars(args) | {"out": str(outdir)}, args.seed,
                  time.time() - t0, [csv_path, svg_path])
        return 0
    kind = PropagatorKind(args.kind, args.t)
    out = apply_propagator(kind, field)
    out.check_finite("propagate")
    bin_path = outdir / "propagated.bin"
    csv_path = outdir / "propagated.csv"
    save_field(out, bin_path)
    field_to_csv(out, csv_path)
    record = {
        "kind": args.kind,
        "t": args.t,
        "fn": args.fn,
        "l2_in": l2_norm(field),
        "l2_out": l2_norm(out),
        "max_change": float(np.abs(out.values - field.values).max()),
    }
    print(json.dumps(record, sort_keys=True))
    write_json(outdir / "propagate.json", record)
    _manifest(outdir, "propagate", vars(args) | {"out": str(outdir)}, args.seed, time.time() - t0,
              [bin_path, csv_path, outdir / "propagate.json"])
    return 0


def _cmd_solve(args) -> int:
    outdir = _outdir(args)
    t0 = time.time()
    grid = GridSpec(args.dim, args.n, args.L)
    u0 = sample_builtin(args.u0, grid, _field_params(args) | ({"width": args.width} if args.width else {}))
    if args.amplitude != 1.0:
        u0 = SampledField(grid, u0.values * args.amplitude, "space", u0.source)
    u1 = None
    if args.eq in ("nlw", "nlkg"):
        u1 = sample_builtin(args.u1 or "gaussian", grid)
        if args.amplitude != 1.0:
            u1 = SampledField(grid, u1.values * args.amplitude, "space", u1.source)
    params = _mod_params(args)
    F = _parse_nonlinearity(args.nonlinearity)
    c1 = args.c1 if args.c1 is not None else _measure_c1(grid, args.eq, params, args.seed)
    cfg = SolverConfig(
        nonlinearity=F, c1=c1, params=params, quadrature_step=args.dt,
        picard_tol=args.tol, horizon_cap=args.horizon_cap, safety=args.safety,
    )
    data = CauchyData(args.eq, u0, u1)
    sol = continue_solution(data, cfg, args.t_end)
    outputs = []
    rows = []
    norms = sol.state_norms(params)
    for i, (t, s) in enumerate(zip(sol.times, sol.states)):
        u = s[0] if isinstance(s, tuple) else s
        _finite("solve", u.values)
        rec = sol.windows[i - 1] if i > 0 else None
        rows.append([
            float(t), norms[i], l2_norm(u),
            rec.T_used if rec else 0.0,
            rec.contraction_factor if rec else 0.0,
        ])
        if args.save_fields:
            fp = outdir / f"state_{i:04d}.bin"
            save_field(u, fp)
            outputs.append(fp)
    csv_path = outdir / "solution.csv"
    write_csv(csv_path, ["t", "mod_norm", "L2_norm", "T_window", "contraction_factor"], rows)
    outputs.append(csv_path)
    record = {
        "eq": args.eq,
        "t_end": args.t_end,
        "reached": sol.reached_t_end,
        "blow_up": sol.blew_up,
        "windows": len(sol.windows),
        "c1": c1,
        "final_mod_norm": norms[-1],
        "max_contraction": max((w.contraction_factor for w in sol.windows), default=0.0),
    }
    print(json.dumps(record, sort_keys=True))
    write_json(outdir / "solve.json", record)
    outputs.append(outdir / "solve.json")
    _manifest(outdir, "solve", vars(args) | {"out": str(outdir)}, args.seed, time.time() - t0, outputs)
    return 0


def _cmd_verify(args) -> int:
    outdir = _outdir(args)
    t0 = time.time()
    reports = run_suite(args.suite, n=args.n, L=args.L, seed=args.seed,
                        battery_size=args.battery_size, threads=args.threads)
    payload = [r.to_payload() for r in reports]
    report_path = outdir / "report.json"
    write_json(report_path, payload)
    outputs = [report_path]
    for r in reports:
        csv_path = outdir / f"{r.name}.csv"
        write_csv(csv_path, ["key", "value"], _flatten_details(r.details))
        outputs.append(csv_path)
        svg_path = outdir / f"{r.name}.svg"
        if _check_svg(r, svg_path):
            outputs.append(svg_path)
    # battery norms, one row per (function, params)
    battery = make_battery(GridSpec(args.dim, args.n, args.L), seed=args.seed,
                           size=args.battery_size)
    norm_rows = []
    for params in (ModParams(1, 1, 0), ModParams(2, 1, 0), ModParams(math.inf, 1, 0), ModParams(2, 2, 1)):
        norms = battery.norms(params)
        for name in battery.names():
            norm_rows.append([name, params.label(), norms[name]])
    battery_csv = outdir / "battery_norms.csv"
    write_csv(battery_csv, ["function", "params", "value"], norm_rows)
    outputs.append(battery_csv)
    failed = [r.name for r in reports if r.passed is False]
    print(json.dumps({"suite": args.suite, "checks": len(reports), "failed": failed}, sort_keys=True))
    _manifest(outdir, "verify", vars(args) | {"out": str(outdir)}, args.seed, time.time() - t0, outputs)
    return 0 if not failed else 2


def _check_svg(report, path) -> bool:
    """Plot the natural curve of a check, when it has one."""
    from .report import svg_line_plot

    d = report.details
    if "partials" in d:
        svg_line_plot(path, report.params["W"], d["partials"],
                      title=report.name, xlabel="frequency cutoff W")
        return True
    if "errors" in d:
        svg_line_plot(path, report.params["rs"], {"error": d["errors"]},
                      title=report.name, xlabel="mollifier width r", logy=True)
        return True
    if "local_norms" in d and d["local_norms"]:
        svg_line_plot(path, d["lambdas"], {"pinned norm": d["local_norms"]},
                      title=report.name, xlabel="dilation", logy=True)
        return True
    if "ratios" in d and isinstance(d["ratios"], list):
        svg_line_plot(path, report.params["amplitudes"],
                      {"ratio": d["ratios"], "refined": d["ratios_refined"]},
                      title=report.name, xlabel="amplitude")
        return True
    return False


def _flatten_details(details, prefix=""):
    rows = []
    for key, value in sorted(details.items()):
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows.extend(_flatten_details(value, prefix=f"{name}."))
        elif isinstance(value, (list, tuple)):
            rows.append([name, " ".join(repr(v) for v in value)])
        else:
            rows.append([name, repr(value)])
    return rows


def _cmd_probe(args) -> int:
    outdir = _outdir(args)
    t0 = time.time()
    if args.kind == "counterexample":
        report = counterexample_probe()
    elif args.kind == "analyticity":
        report = analyticity_probe(args.alpha)
    else:
        grid = GridSpec(1, args.n, 16.0)
        field = sample_builtin("gaussian", grid)
        report = localization_probe(field, args.x0, args.eps)
    path = outdir / f"probe_{args.kind}.json"
    write_json(path, report.to_payload())
    print(json.dumps({"probe": args.kind, "passed": report.passed}, sort_keys=True))
    _manifest(outdir, "probe", vars(args) | {"out": str(outdir)}, args.seed, time.time() - t0, [path])
    return 0 if report.passed is not False else 2


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modspace",
        description="time-frequency norms, dispersive propagators, Picard solves, verification suites",
        exit_on_error=False,
    )
    parser.add_argument("--out", default=None, help="output directory (default: $MODSPACE_OUT or ./modspace_out)")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--config", default=None, help="JSON file with flag defaults")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("norm", exit_on_error=False)
    _add_grid_flags(p)
    _add_field_flags(p)
    _add_params_flags(p)
    p.set_defaults(func=_cmd_norm)

    p = sub.add_parser("stft", exit_on_error=False)
    _add_grid_flags(p)
    _add_field_flags(p)
    p.add_argument("--window", default="gaussian", choices=("gaussian",))
    p.add_argument("--window-width", dest="window_width", type=float, default=1.0)
    p.set_defaults(func=_cmd_stft)

    p = sub.add_parser("propagate", exit_on_error=False)
    _add_grid_flags(p)
    _add_field_flags(p)
    _add_params_flags(p)
    p.add_argument("--kind", required=True, choices=FAMILIES)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--sweep", default=None,
                   help="comma-separated times: battery norm-growth sweep (CSV + SVG)")
    p.add_argument("--battery-size", dest="battery_size", type=int, default=12)
    p.set_defaults(func=_cmd_propagate)

    p = sub.add_parser("solve", exit_on_error=False)
    _add_grid_flags(p)
    _add_params_flags(p)
    p.add_argument("--eq", required=True, choices=("nls", "nlw", "nlkg"))
    p.add_argument("--nonlinearity", default="cubic",
                   help="preset name (cubic, quadratic, quintic) or JSON file")
    p.add_argument("--u0", default="gaussian", choices=FIELD_CHOICES)
    p.add_argument("--u1", default=None, choices=FIELD_CHOICES)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--width", type=float, default=None)
    p.add_argument("--center", type=float, default=None)
    p.add_argument("--mode", type=int, default=None)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--field-seed", type=int, default=None)
    p.add_argument("--t-end", dest="t_end", type=float, required=True)
    p.add_argument("--dt", type=float, default=0.002)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--c1", type=float, default=None, help="multiplier constant; measured if omitted")
    p.add_argument("--horizon-cap", dest="horizon_cap", type=float, default=1.0)
    p.add_argument("--safety", type=float, default=0.9)
    p.add_argument("--save-fields", dest="save_fields", action="store_true")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", exit_on_error=False)
    _add_grid_flags(p)
    p.add_argument("--suite", default="all", choices=("all",) + SUITES)
    p.add_argument("--battery-size", dest="battery_size", type=int, default=20)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("probe", exit_on_error=False)
    p.add_argument("--kind", required=True, choices=("counterexample", "analyticity", "localization"))
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--n", type=int, default=512)
    p.set_defaults(func=_cmd_probe)

    parser._modspace_subparsers = list(sub.choices.values())
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        if "--config" in argv:
            pre, _ = parser.parse_known_args(argv)
            if pre.config:
                defaults = json.loads(Path(pre.config).read_text())
                parser.set_defaults(**defaults)
                for subparser in parser._modspace_subparsers:
                    subparser.set_defaults(**defaults)
        args = parser.parse_args(argv)
    except (argparse.ArgumentError, SystemExit) as exc:
        if isinstance(exc, SystemExit) and exc.code in (0, None):
            return 0
        print("usage error: run with --help for flags", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, PicardError) as exc:
        outdir = _outdir(args)
        _manifest(outdir, args.cmd, vars(args) | {"out": str(outdir)}, args.seed, 0.0, [])
        note = {"failure": str(exc), "stage": args.cmd}
        write_json(outdir / "failure.json", note)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
