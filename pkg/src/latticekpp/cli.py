"""Command line entry point.

Subcommands: ``dispersion``, ``green-verify``, ``bramson``, ``front``,
``barrier-check``, ``continuum``. Every run echoes its configuration,
writes CSV series plus a summary JSON with all fitted quantities and
pass/fail flags into the output directory, and renders figures alongside.
Exit status is 0 iff all declared checks pass, 1 on a numerical failure,
2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, figures
from .dispersion import solve_dispersion
from . import barriers, continuum, fronts, green
from .reaction import make_logistic, quadratic_defect_bound

_THREAD_VAR = "LATTICEKPP_THREADS"


def _apply_thread_env() -> None:
    n = os.environ.get(_THREAD_VAR)
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_summary(outdir: Path, config: dict, summary: dict) -> None:
    payload = {"version": __version__, "config": config, **summary}
    with open(outdir / "summary.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(outdir / "config.json", "w") as fh:
        json.dump({"version": __version__, **config}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _outdir(args, name: str) -> Path:
    out = Path(args.out) if args.out else Path("latticekpp-out") / name
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------


def cmd_dispersion(args) -> int:
    d = solve_dispersion(args.fprime0, args.tol)
    r1, r2 = d.residuals()
    payload = {
        "fprime0": d.fprime0,
        "c_star": d.c_star,
        "lambda_star": d.lambda_star,
        "Lambda_star": d.Lambda_star,
        "bramson_coeff": d.bramson_coeff,
        "residual1": r1,
        "residual2": r2,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    outdir = _outdir(args, "dispersion")
    _write_summary(outdir, _config_of(args), {**payload, "pass": True})
    return 0


def cmd_green_verify(args) -> int:
    d = solve_dispersion(args.fprime0)
    outdir = _outdir(args, "green-verify")
    exp = green.remainder_experiment(
        d, L=args.L, dt=args.dt, tmax=args.tmax, stride=args.stride, fit_tmin=args.fit_tmin
    )

    rows = []
    for t, snap in exp.snapshots.items():
        dec = green.decompose(snap, d)
        j = snap.indices()
        rows.extend(zip([t] * j.size, j, dec.values, dec.principal, dec.remainder))
    write_csv(outdir / "snapshots.csv", ["t", "j", "G", "H", "R"], rows)
    write_csv(outdir / "remainder.csv", ["t", "E_sup"], exp.e_series)
    write_csv(
        outdir / "cubic.csv", ["xi", "P_tilde", "P"], zip(exp.xi, exp.p_tilde, exp.p_theory)
    )

    checks = {
        "slope_in_range": -1.55 <= exp.slope <= -1.45,
        "r2_ok": exp.r_squared >= 0.999,
        "mass_ok": exp.mass_error_max <= 1e-8,
        "positivity_ok": exp.positivity_min >= -1e-12,
        "cubic_ok": exp.cubic_sup_error <= 0.1,
    }
    summary = {
        "slope": exp.slope,
        "intercept": exp.intercept,
        "r2": exp.r_squared,
        "mass_error_max": exp.mass_error_max,
        "positivity_min": exp.positivity_min,
        "cubic_sup_error": exp.cubic_sup_error,
        "contamination_time": exp.contamination_time,
        "checks": checks,
        "pass": all(checks.values()),
    }
    _write_summary(outdir, _config_of(args), summary)
    if not args.no_figures:
        ts = [t for t, _ in exp.e_series if t >= args.fit_tmin]
        es = [e for t, e in exp.e_series if t >= args.fit_tmin]
        figures.remainder_loglog(outdir / "remainder.png", ts, es, exp.slope, exp.intercept)
        figures.cubic_overlay(outdir / "cubic.png", exp.xi, exp.p_tilde, exp.p_theory)
    print(json.dumps(summary, indent=2, sort_keys=True, default=float))
    return 0 if summary["pass"] else 1


def cmd_bramson(args) -> int:
    outdir = _outdir(args, "bramson")
    reaction = make_logistic(args.fprime0)
    levels = tuple(float(x) for x in args.levels.split(","))
    t_min, t_max = (float(x) for x in args.fit_window.split(","))
    run = fronts.simulate_step(reaction, L=args.L, dt=args.dt, T=args.T, levels=levels)
    d = run.dispersion

    rows = []
    fits = []
    fit_rows = []
    for m in levels:
        tr = run.traces[m]
        rows.extend(zip([m] * len(tr.times), tr.times, tr.j_m, tr.x_m))
        a, b, r2 = fronts.bramson_fit(tr, d, t_min, t_max)
        fit_rows.append(
            {"m": m, "a_hat": a, "b_hat": b, "r2": r2, "bramson_coeff_theory": d.bramson_coeff}
        )
        t_arr = np.asarray(tr.times)
        keep = (t_arr >= t_min) & (t_arr <= t_max)
        fits.append(
            {
                "m": m,
                "times": t_arr[keep],
                "delay": d.c_star * t_arr[keep] - np.asarray(tr.x_m)[keep],
                "a_hat": a,
                "b_hat": b,
            }
        )
    write_csv(outdir / "trace.csv", ["m", "t", "j_m", "x_m"], rows)

    checks = {
        f"a_hat_within_10pct_m={f['m']:g}": abs(f["a_hat"] / d.bramson_coeff - 1.0) <= 0.10
        for f in fit_rows
    }
    summary = {"fits": fit_rows, "checks": checks, "pass": all(checks.values())}
    _write_summary(outdir, _config_of(args), summary)
    if not args.no_figures:
        figures.delay_fits(outdir / "delay.png", fits)
    print(json.dumps(summary, indent=2, sort_keys=True, default=float))
    return 0 if summary["pass"] else 1


def cmd_front(args) -> int:
    if not args.collapse:
        print("front: only --collapse mode is implemented", file=sys.stderr)
        return 2
    outdir = _outdir(args, "front")
    reaction = make_logistic(args.fprime0)
    t1, t2 = args.t1, args.t2
    d = solve_dispersion(args.fprime0)
    L = args.L if args.L else int(math.ceil(d.c_star * t2 + 10.0 * math.sqrt(t2))) + 20
    run = fronts.simulate_step(
        reaction, L=L, dt=args.dt, T=t2, levels=(args.m,), profile_times=(t1, t2)
    )
    p1 = fronts.extract_profile(run.profiles[t1], m=args.m, half_width=args.half_width)
    p2 = fronts.extract_profile(run.profiles[t2], m=args.m, half_width=args.half_width)
    dist = fronts.collapse_distance(p1, p2)
    for tag, p in (("t1", p1), ("t2", p2)):
        write_csv(outdir / f"profile_{tag}.csv", ["offset", "u"], zip(p.offsets, p.values))
    summary = {
        "t1": t1,
        "t2": t2,
        "anchor_t1": p1.anchor,
        "anchor_t2": p2.anchor,
        "collapse_distance": dist,
        "pass": dist <= 0.01,
    }
    _write_summary(outdir, _config_of(args), summary)
    if not args.no_figures:
        figures.profile_overlay(outdir / "collapse.png", [p1, p2])
    print(json.dumps(summary, indent=2, sort_keys=True, default=float))
    return 0 if summary["pass"] else 1


def cmd_barrier_check(args) -> int:
    outdir = _outdir(args, "barrier-check")
    if args.params != "default":
        print("barrier-check: only the default parameter set is shipped", file=sys.stderr)
        return 2
    d = solve_dispersion(args.fprime0)
    p = barriers.BarrierParams()
    reaction = make_logistic(args.fprime0)
    times = tuple(float(x) for x in args.t.split(","))
    bgs = barriers.run_background(
        d, p, times=times, dt=args.dt, quad_bound=quadratic_defect_bound(reaction)
    )
    reports = []
    for bg in bgs:
        reports.extend(barriers.certify(bg, reaction=reaction))
    payload = [
        {
            "t": r.t,
            "barrier": r.barrier,
            "region": r.name,
            "n_points": r.n_points,
            "min_residual": r.min_residual,
            "max_residual": r.max_residual,
            "pass": r.ok,
        }
        for r in reports
    ]
    summary = {
        "regions": payload,
        "cm_measured": bgs[0].cm,
        "pass": all(r.ok for r in reports),
    }
    _write_summary(outdir, _config_of(args), summary)
    write_csv(
        outdir / "regions.csv",
        ["t", "barrier", "region", "n_points", "min_residual", "max_residual", "pass"],
        [
            (r.t, r.barrier, r.name, r.n_points, r.min_residual, r.max_residual, int(r.ok))
            for r in reports
        ],
    )
    if not args.no_figures:
        figures.barrier_regions(outdir / "regions.png", reports)
    print(json.dumps(summary, indent=2, sort_keys=True, default=float))
    return 0 if summary["pass"] else 1


def cmd_continuum(args) -> int:
    outdir = _outdir(args, "continuum")
    if args.bramson:
        res = continuum.continuous_bramson(
            fprime0=args.fprime0, dx=args.dx, X=args.X, dt=args.dt, T=args.T
        )
        write_csv(outdir / "trace.csv", ["t", "x_m"], zip(res.times, res.positions))
        summary = {
            "a_hat": res.a_hat,
            "b_hat": res.b_hat,
            "r2": res.r_squared,
            "a_se": res.a_se,
            "theory": res.theory,
            "c_star": res.c_star,
            "c_grid": res.c_grid,
            "pass": abs(res.a_hat / res.theory - 1.0) <= 0.10,
        }
        _write_summary(outdir, _config_of(args), summary)
        if not args.no_figures:
            keep = res.times >= 50.0
            figures.continuum_delay(
                outdir / "delay.png",
                res.times[keep],
                res.c_grid * res.times[keep] - res.positions[keep],
                res.a_hat,
                res.b_hat,
            )
        print(json.dumps(summary, indent=2, sort_keys=True, default=float))
        return 0 if summary["pass"] else 1
    if args.heat_ratio:
        data = continuum.OddData.indicator(1.0)
        ys = [float(x) for x in args.ys.split(",")]
        ratios = [continuum.asymptotic_ratio(args.t, y, data) for y in ys]
        target = data.moment1 / (2.0 * math.sqrt(math.pi))
        write_csv(outdir / "ratio.csv", ["y", "ratio", "target"], [(y, r, target) for y, r in zip(ys, ratios)])
        ok = all(abs(r / target - 1.0) <= 0.02 for r in ratios)
        summary = {"t": args.t, "ratios": dict(zip(map(str, ys), ratios)), "target": target, "pass": ok}
        _write_summary(outdir, _config_of(args), summary)
        if not args.no_figures:
            figures.heat_ratio(outdir / "ratio.png", ys, ratios, target)
        print(json.dumps(summary, indent=2, sort_keys=True, default=float))
        return 0 if ok else 1
    print("continuum: pass --bramson or --heat-ratio", file=sys.stderr)
    return 2


# ---------------------------------------------------------------------------


def _config_of(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="latticekpp", description=__doc__)
    ap.add_argument("--config", help="JSON run configuration file", default=None)
    ap.add_argument("--version", action="version", version=f"latticekpp {__version__}")
    sub = ap.add_subparsers(dest="subcommand")

    def common(p):
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--no-figures", action="store_true")

    p = sub.add_parser("dispersion", help="solve the minimal-speed pair")
    p.add_argument("--fprime0", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    common(p)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("green-verify", help="kernel remainder scaling and cubic profile")
    p.add_argument("--fprime0", type=float, default=1.0)
    p.add_argument("--L", type=int, default=1000)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--tmax", type=float, default=400.0)
    p.add_argument("--stride", type=int, default=100, help="steps between remainder samples")
    p.add_argument("--fit-tmin", type=float, default=10.0)
    common(p)
    p.set_defaults(func=cmd_green_verify)

    p = sub.add_parser("bramson", help="level-set delay fits")
    p.add_argument("--fprime0", type=float, default=1.0)
    p.add_argument("--L", type=int, default=1200)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--T", type=float, default=400.0)
    p.add_argument("--levels", default="0.1,0.5,0.9")
    p.add_argument("--fit-window", default="50,400")
    common(p)
    p.set_defaults(func=cmd_bramson)

    p = sub.add_parser("front", help="profile collapse between two times")
    p.add_argument("--collapse", action="store_true")
    p.add_argument("--t1", type=float, default=200.0)
    p.add_argument("--t2", type=float, default=400.0)
    p.add_argument("--fprime0", type=float, default=1.0)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--m", type=float, default=0.5)
    p.add_argument("--half-width", type=int, default=20)
    common(p)
    p.set_defaults(func=cmd_front)

    p = sub.add_parser("barrier-check", help="super/subsolution residual certification")
    p.add_argument("--t", default="2000", help="comma-separated certification times")
    p.add_argument("--params", default="default")
    p.add_argument("--fprime0", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=0.05)
    common(p)
    p.set_defaults(func=cmd_barrier_check)

    p = sub.add_parser("continuum", help="continuous-space companion checks")
    p.add_argument("--bramson", action="store_true")
    p.add_argument("--heat-ratio", action="store_true")
    p.add_argument("--fprime0", type=float, default=1.0)
    p.add_argument("--dx", type=float, default=0.05)
    p.add_argument("--X", type=float, default=800.0)
    p.add_argument("--dt", type=float, default=0.0015)
    p.add_argument("--T", type=float, default=300.0)
    p.add_argument("--t", type=float, default=1000.0)
    p.add_argument("--ys", default="2,5,10")
    common(p)
    p.set_defaults(func=cmd_continuum)

    return ap


def main(argv=None) -> int:
    _apply_thread_env()
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        argv2 = [cfg["subcommand"]]
        for key, val in cfg.get("parameters", {}).items():
            flag = "--" + key.replace("_", "-")
            if isinstance(val, bool):
                if val:
                    argv2.append(flag)
            else:
                argv2.extend([flag, str(val)])
        if "seed" in cfg:
            argv2.extend(["--seed", str(cfg["seed"])])
        if "output_dir" in cfg:
            argv2.extend(["--out", cfg["output_dir"]])
        args = ap.parse_args(argv2)
    if not getattr(args, "subcommand", None):
        ap.print_help()
        return 2
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        diag = {"error": str(exc), "type": type(exc).__name__}
        print(json.dumps(diag), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
