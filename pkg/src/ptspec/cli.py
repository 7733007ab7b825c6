"""Command-line entry point: ``ptspec {spectrum,sweep,eps,crossings,validate}``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import shlex
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import report
from ._common import ConfigError, DomainError, NonConvergenceError
from .hobasis import BasisConfig
from .potentials import InvalidSpecError, Model, PotentialSpec
from .shooting import ShootingConfig
from .trace import AmbiguousEPWarning, Method, SweepConfig, detect_crossings, locate_eps, real_spectrum, sweep

log = logging.getLogger("ptspec")

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NONCONVERGENCE = 0, 1, 2, 3


# --------------------------------------------------------------------------
# argument parsing

def _model_args(p, need_v2=True):
    p.add_argument("--potential", required=True, choices=[m.value for m in Model])
    p.add_argument("--v1", type=float, required=True, help="well depth (> 0)")
    if need_v2:
        p.add_argument("--v2", type=float, required=True, help="imaginary strength")
    p.add_argument("--a", type=float, default=2.0, help="half-width of the rectangular well (default 2)")
    p.add_argument("--method", default="shooting", choices=[m.value for m in Method])
    p.add_argument("--n-basis", type=int, default=None, help="basis size for ho-basis / wc-pencil")
    p.add_argument("--scale", default=None, help="basis length scale, a number or 'auto' (ho-basis)")
    p.add_argument("--L", type=float, default=None, help="matching distance for shooting")
    p.add_argument("--step", type=float, default=None, help="integration step for shooting")
    p.add_argument("--e-scan-points", type=int, default=None)
    p.add_argument("--reproducible", action="store_true", help="omit the wall-clock timestamp")


def _sweep_args(p):
    _model_args(p, need_v2=False)
    p.add_argument("--v2-min", type=float, default=0.0)
    p.add_argument("--v2-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--match-gap", type=float, default=None)
    p.add_argument("--ep-tol", type=float, default=1e-3, help="bisection tolerance in v2")
    p.add_argument("--threads", type=int, default=None, help="overrides PTSPEC_THREADS (0 = auto)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptspec",
        description="Real spectra, exceptional points and level crossings of PT-symmetric wells.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="real eigenvalues at one (v1, v2)")
    _model_args(p)

    p = sub.add_parser("sweep", help="trace branches over v2 and write CSV/JSON/SVG")
    _sweep_args(p)
    p.add_argument("--out-csv", type=Path, required=True)
    p.add_argument("--out-json", type=Path, required=True)
    p.add_argument("--out-svg", type=Path, default=None)

    p = sub.add_parser("eps", help="exceptional points of a sweep, JSON to stdout")
    _sweep_args(p)

    p = sub.add_parser("crossings", help="real-to-real crossings of a sweep, JSON to stdout")
    _sweep_args(p)

    p = sub.add_parser("validate", help="run the oracle suite (and the published EP checks)")
    p.add_argument("--fast", action="store_true", help="oracle checks only, reduced sizes")
    return parser


# --------------------------------------------------------------------------
# configuration

def _spec(args, v2=0.0) -> PotentialSpec:
    return PotentialSpec(Model.parse(args.potential), args.v1, v2, args.a)


def _shooting_cfg(args, sweep_default: bool) -> ShootingConfig:
    step = args.step if args.step is not None else (1e-2 if sweep_default else 1e-3)
    kw = {"L": args.L, "step": step}
    if args.e_scan_points is not None:
        kw["e_scan_points"] = args.e_scan_points
    return ShootingConfig(**kw)


def _basis_cfg(args, model: Model):
    if args.n_basis is None and args.scale is None:
        return None
    n = args.n_basis if args.n_basis is not None else (140 if model is Model.WIGNER_COULOMB else 160)
    scale = 1.0 if args.scale is None else (args.scale if args.scale == "auto" else float(args.scale))
    return BasisConfig(n, scale)


def _config(args, spec, single=False) -> SweepConfig:
    try:
        shooting = _shooting_cfg(args, sweep_default=not single)
        basis = _basis_cfg(args, spec.model)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if single:
        return SweepConfig(spec.v2, spec.v2, 2, args.method, shooting=shooting, basis=basis, threads=1)
    return SweepConfig(
        args.v2_min, args.v2_max, args.steps, args.method, match_gap=args.match_gap,
        ep_tol_v2=args.ep_tol, shooting=shooting, basis=basis, threads=args.threads,
    )


def _manifest(args, spec, cfg) -> report.RunManifest:
    basis = cfg.basis_for(spec.model)
    resolved = {
        "n_basis": basis.n_basis,
        "scale": basis.scale,
        "L": cfg.shooting.matching_distance(spec),
        "step": cfg.shooting.step,
        "e_scan_points": cfg.shooting.e_scan_points,
    }
    # defaults that were filled in rather than given on the command line
    defaults = {k: v for k, v in resolved.items() if getattr(args, k, None) is None}
    return report.RunManifest.create(
        command=shlex.join(["ptspec", *args.argv]),
        spec={"model": spec.model.value, "v1": spec.v1, "v2": spec.v2, "a": spec.a},
        configs={"sweep": dataclasses.asdict(cfg)}, defaults=defaults, reproducible=args.reproducible,
    )


# --------------------------------------------------------------------------
# commands

def cmd_spectrum(args, out=None) -> int:
    out = out or sys.stdout
    spec = _spec(args, args.v2)
    cfg = _config(args, spec, single=True)
    res = real_spectrum(spec, cfg)
    payload = {
        "eigenvalues": list(res.eigenvalues),
        "residuals": list(res.residuals),
        "method": res.method,
        "manifest": _manifest(args, spec, cfg).to_dict(with_timestamp=False),
    }
    out.write(report.dumps(payload))
    return EXIT_OK


def _trace(args):
    spec = _spec(args)
    cfg = _config(args, spec)
    t0 = time.perf_counter()
    curves = sweep(spec, cfg)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AmbiguousEPWarning)
        eps = locate_eps(spec, curves, cfg)
    for w in caught:
        log.warning("%s", w.message)
    crossings = detect_crossings(curves)
    log.info("sweep of %d points took %.1f s", curves.v2_grid.size, time.perf_counter() - t0)
    return spec, cfg, curves, eps, crossings


def _check_writable(paths):
    for path in paths:
        if path is None:
            continue
        parent = path.resolve().parent
        if not parent.is_dir() or not os.access(parent, os.W_OK):
            raise OSError(f"cannot write to {path}")


def cmd_sweep(args, out=None) -> int:
    out = out or sys.stdout
    _check_writable([args.out_csv, args.out_json, args.out_svg])  # before the expensive part
    spec, cfg, curves, eps, crossings = _trace(args)
    manifest = _manifest(args, spec, cfg)
    args.out_csv.write_text(report.curves_csv(curves))
    manifest_path = args.out_csv.with_name(args.out_csv.name + ".manifest.json")
    manifest_path.write_text(report.dumps(manifest.to_dict(with_timestamp=False)))
    args.out_json.write_text(report.sweep_json(eps, crossings, manifest))
    if args.out_svg is not None:
        title = f"{spec.model.value}, V1 = {spec.v1:g} ({cfg.method.value})"
        args.out_svg.write_text(report.curves_svg(curves, eps, manifest, title))
    out.write(f"{len(curves.branches)} branches, {len(eps)} exceptional points, "
              f"{len(crossings)} crossings -> {args.out_csv}, {args.out_json}"
              + (f", {args.out_svg}" if args.out_svg else "") + "\n")
    return EXIT_OK


def cmd_eps(args, out=None) -> int:
    out = out or sys.stdout
    spec, cfg, curves, eps, crossings = _trace(args)
    manifest = _manifest(args, spec, cfg)
    out.write(report.dumps({"eps": [report.ep_record(e) for e in eps],
                            "manifest": manifest.to_dict(with_timestamp=False)}))
    return EXIT_OK


def cmd_crossings(args, out=None) -> int:
    out = out or sys.stdout
    spec, cfg, curves, eps, crossings = _trace(args)
    manifest = _manifest(args, spec, cfg)
    out.write(report.dumps({"crossings": [report.crossing_record(c) for c in crossings],
                            "manifest": manifest.to_dict(with_timestamp=False)}))
    return EXIT_OK


def cmd_validate(args, out=None) -> int:
    out = out or sys.stdout
    from .validate import format_table, run_checks

    t0 = time.perf_counter()
    rows = run_checks(fast=args.fast)
    out.write(format_table(rows) + "\n")
    out.write(f"total {time.perf_counter() - t0:.1f} s\n")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_VALIDATION


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "eps": cmd_eps,
    "crossings": cmd_crossings,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    args.argv = argv
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, InvalidSpecError, DomainError) as exc:
        print(f"ptspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergenceError as exc:
        print(f"ptspec: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except np.linalg.LinAlgError as exc:
        print(f"ptspec: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except OSError as exc:
        print(f"ptspec: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
