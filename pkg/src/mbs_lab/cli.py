"""``mbs-lab`` command line interface.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import contextlib
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from ._parallel import ordered_map
from .analysis import contrast_curve
from .cloud import cloud_intensity_perp_closed, default_theta_grid, fringe_pattern
from .config import ConfigError, ScenarioConfig, load_config, parse_config
from .emitter import g1_resonant, injected_fault, local_saturation, mollow_spectrum
from .exceptions import ConvergenceError, DomainError, FitError, NumericalError
from .polarization import cross_overlap_from_phase, grating_phase
from .scatterer import contrast_single
from .validation import format_report, run_checks

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

ALLOWED = {
    "g1": ("tau",),
    "spectrum": ("nu",),
    "single": ("tau", "z", "gamma"),
    "cloud": ("theta",),
    "contrast": ("tau", "gamma"),
}


class NumericalFailure(Exception):
    pass


def _resolve(cfg: ScenarioConfig, command: str) -> ScenarioConfig:
    """Fill subcommand-dependent sweep defaults so the sidecar is explicit."""
    sweep = cfg.sweep
    variable = sweep.variable or ALLOWED[command][0]
    if variable not in ALLOWED[command]:
        raise ConfigError(f"'sweep.variable'={variable!r} not valid for '{command}'; "
                          f"use one of {ALLOWED[command]}")
    rng, points = sweep.range, sweep.points
    if variable == "theta":
        grid = default_theta_grid(cfg.build_geometry(), cfg.build_cloud())
        default_rng, default_points = [math.degrees(grid[0]), math.degrees(grid[-1])], grid.size
    else:
        # z spans one grating period lambda / (2 cos theta0), in micrometers
        period_um = cfg.geometry.lambda_nm * 1e-3 / (2 * math.cos(math.radians(cfg.geometry.theta0_deg)))
        default_rng, default_points = {
            "tau": ([0.0, 6.0], 121),
            "nu": ([-500.0, 500.0], 100_001),
            "z": ([0.0, period_um], 101),
            "gamma": ([0.0, 90.0], 91),
        }[variable]
    rng = rng if rng is not None else default_rng
    points = points if points is not None else default_points
    return replace(cfg, sweep=replace(sweep, variable=variable,
                                      range=[float(rng[0]), float(rng[1])], points=int(points)))


def _grid(cfg):
    lo, hi = cfg.sweep.range
    return np.linspace(lo, hi, cfg.sweep.points)


def _run_g1(cfg):
    tau = _grid(cfg)
    return ["tau_gamma", "g1"], [tau, np.atleast_1d(g1_resonant(cfg.saturation(), tau))]


def _run_spectrum(cfg):
    nu = _grid(cfg)
    spec = mollow_spectrum(cfg.saturation(), nu)
    return (["nu_gamma", "density", "coherent_weight"],
            [nu, spec.density, np.full(nu.size, spec.coherent_weight)])


def _run_single(cfg):
    geometry = cfg.build_geometry()
    grid = _grid(cfg)
    var = cfg.sweep.variable
    s0 = cfg.drive.s0

    def point(x):
        z, tau, gamma = cfg.atom.z_um * 1e-6, cfg.tau, cfg.gamma_wp
        if var == "tau":
            tau = x
        elif var == "z":
            z = x * 1e-6
        else:
            gamma = math.radians(x)
        s = local_saturation(z, gamma, geometry, s0)
        g = g1_resonant(s, tau)
        cross = cross_overlap_from_phase(grating_phase(z, geometry), gamma)
        return s, g, float(cross), contrast_single(z, tau, gamma, geometry, s0)

    rows = np.array(ordered_map(point, grid))
    first = {"tau": ("tau_gamma", grid), "z": ("z_m", grid * 1e-6),
             "gamma": ("gamma_rad", np.radians(grid))}[var]
    return ([first[0], "s_local", "g1", "cross_overlap", "contrast_p2p"],
            [first[1], rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3]])


def _run_cloud(cfg):
    geometry, cloud = cfg.build_geometry(), cfg.build_cloud()
    theta = np.radians(_grid(cfg))
    method = cfg.method if cfg.method != "single_atom" else "quadrature"
    cloud.check_validity(geometry.k)
    try:
        pattern = fringe_pattern(theta, cfg.tau, cfg.gamma_wp, geometry, cloud, cfg.drive.s0,
                                 method, tol=cfg.tol, n_samples=cfg.n_samples, seed=cfg.seed)
    except ConvergenceError as exc:
        raise NumericalFailure(f"cloud pattern (tau={cfg.tau:g}): {exc}") from exc
    cols, data = ["theta_rad", "intensity_norm"], [theta, pattern.intensity]
    if pattern.std_error is not None:
        cols.append("std_error")
        data.append(pattern.std_error)
    return cols, data


def _run_contrast(cfg):
    geometry, cloud = cfg.build_geometry(), cfg.build_cloud()
    grid = _grid(cfg)
    method = cfg.method if cfg.method in ("quadrature", "montecarlo", "closed_perp") else "quadrature"
    s_ref = 2.0 * cfg.drive.s0
    if cfg.sweep.variable == "tau":
        curve = contrast_curve(grid, cfg.gamma_wp, geometry, cloud, cfg.drive.s0, "michelson",
                               method=method, tol=cfg.tol, n_samples=cfg.n_samples, seed=cfg.seed)
        first, ref = ("tau_gamma", grid), np.atleast_1d(g1_resonant(s_ref, grid))
        labels = [f"tau={t:g}" for t in grid]
    else:
        def one(gdeg):
            return contrast_curve([cfg.tau], math.radians(gdeg), geometry, cloud, cfg.drive.s0,
                                  "michelson", method=method, tol=cfg.tol,
                                  n_samples=cfg.n_samples, seed=cfg.seed)[0]
        curve = ordered_map(one, grid)
        first, ref = ("gamma_rad", np.radians(grid)), np.full(grid.size, g1_resonant(s_ref, cfg.tau))
        labels = [f"gamma={g:g} deg" for g in grid]
    for res, label in zip(curve, labels):
        if not res.converged:
            raise NumericalFailure(f"contrast fit failed at {label}: {res.message or 'no convergence'}")
    mich = np.array([r.contrast for r in curve])
    return ([first[0], "contrast_michelson", "contrast_p2p", "g1"],
            [first[1], mich, 2 * mich, ref])


RUNNERS = {"g1": _run_g1, "spectrum": _run_spectrum, "single": _run_single,
           "cloud": _run_cloud, "contrast": _run_contrast}


def _format(value) -> str:
    return "%.17g" % float(value)


def write_csv(path: Path, columns, data):
    lines = [",".join(columns)]
    for row in zip(*data):
        lines.append(",".join(_format(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def sidecar_path(out: Path) -> Path:
    return out.with_suffix(".json") if out.suffix == ".csv" else Path(str(out) + ".json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mbs-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON scenario file")
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--out", help="CSV output path (sidecar JSON written next to it)")
        p.add_argument("--method", choices=("quadrature", "montecarlo", "closed_perp", "single_atom"))
    v = sub.add_parser("validate", help="run the oracle self-check suite")
    v.add_argument("--fast", action="store_true", help="quick subset")
    v.add_argument("--inject-fault", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        ctx = injected_fault(args.inject_fault) if args.inject_fault else contextlib.nullcontext()
        with ctx:
            results = run_checks(fast=args.fast)
        print(format_report(results))
        return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC

    try:
        cfg = load_config(args.config)
        overrides = {k: getattr(args, k) for k in ("seed", "tol", "method") if getattr(args, k) is not None}
        if args.out is not None:
            overrides["output"] = args.out
        if overrides:
            cfg = parse_config({**cfg.to_dict(), **overrides})
        cfg = _resolve(cfg, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        columns, data = RUNNERS[args.command](cfg)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConvergenceError, FitError, NumericalError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(cfg.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(out, columns, data)
    sidecar_path(out).write_text(cfg.to_json(), encoding="utf-8")
    print(f"wrote {out} ({len(data[0])} rows)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
