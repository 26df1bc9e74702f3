"""Command-line interface: simulate samples, estimate densities, run the
benchmark MISE grid, and emit bias/variance diagnostics.

All outputs are plain CSV ('.' decimal separator, header row) so figures can
be produced by any plotting tool.  Every command is deterministic given its
arguments; config-file values are overridden by flags.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import replace
from pathlib import Path

from .estimators import cutoff_multiplier, estimate_density, ridge_multiplier
from .estimators import CutoffSpec, RidgeSpec, write_estimate_csv
from .grids import QuadratureConfig
from .mellin import EmpiricalMellin, catalog_mellin
from .model import (
    RngStream,
    contaminate,
    density_spec,
    read_sample_csv,
    sample,
    stream_id_for,
    write_sample_csv,
    write_sample_sidecar,
)
from .risk import (
    TABLE1_ERRORS,
    TABLE1_SIZES,
    TABLE1_TARGETS,
    XGridSpec,
    bias_variance_profile,
    run_table_grid,
    table1_selection_config,
    write_mise_csv,
    write_profile_csv,
)
from .selection import select_cutoff, select_ridge, write_diagnostics_csv


def _add_common_selection_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c", type=float, default=1.0, help="development point")
    p.add_argument("--chi1", type=float, default=None, help="ridge constant chi1")
    p.add_argument("--chi2", type=float, default=None, help="ridge constant chi2")
    p.add_argument("--chi", type=float, default=None, help="cut-off constant chi")
    p.add_argument("--r", type=float, default=2.0, help="ridge power r")
    p.add_argument("--t-step", type=float, default=0.01)
    p.add_argument("--t-max", type=float, default=150.0)


def _selection_for(args, error: str):
    cfg = table1_selection_config(error, args.c)
    overrides = {}
    if getattr(args, "chi1", None) is not None:
        overrides["chi1"] = args.chi1
    if getattr(args, "chi2", None) is not None:
        overrides["chi2"] = args.chi2
    if getattr(args, "chi", None) is not None:
        overrides["chi"] = args.chi
    if getattr(args, "r", None) is not None:
        overrides["r"] = args.r
    return replace(cfg, **overrides) if overrides else cfg


def cmd_simulate(args) -> int:
    target = density_spec(args.target)
    error = density_spec(args.error)
    x = sample(target, args.n, RngStream(args.seed, stream_id_for("x", args.target, args.error, args.n)))
    y = contaminate(x, error, RngStream(args.seed, stream_id_for("u", args.target, args.error, args.n)))
    out = Path(args.out)
    write_sample_csv(out, y)
    write_sample_sidecar(out.with_suffix(out.suffix + ".json"), args.target, args.error, args.n, args.seed)
    print(f"wrote {args.n} observations to {out}")
    return 0


def cmd_estimate(args) -> int:
    y = read_sample_csv(args.sample)
    em = EmpiricalMellin(args.c, y)
    g = catalog_mellin(args.error, args.c)
    q = QuadratureConfig(t_step=args.t_step, t_max=args.t_max)
    sel_cfg = _selection_for(args, args.error)
    if args.method == "ridge":
        result = select_ridge(em, g, sel_cfg, q)
        mult = ridge_multiplier(
            RidgeSpec(k=float(result.k_hat), c=args.c, xi=sel_cfg.xi, r=sel_cfg.r), g
        )
    else:
        result = select_cutoff(em, g, sel_cfg, q)
        mult = cutoff_multiplier(CutoffSpec(k=float(result.k_hat), c=args.c), g, q)
    x_grid = XGridSpec().build()
    est = estimate_density(mult, em, x_grid, q)
    out = Path(args.out)
    write_estimate_csv(out, est)
    diag_path = out.with_name(out.stem + "_selection" + out.suffix)
    write_diagnostics_csv(diag_path, result)
    print(
        f"k_hat={result.k_hat} sigma_hat={result.sigma_hat:.6g} "
        f"admissible={len(result.admissible)}"
    )
    print(f"wrote estimate to {out} and diagnostics to {diag_path}")
    return 0


def _read_mise_config(path) -> dict:
    parser = configparser.ConfigParser()
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ValueError(f"config parse error: {exc}") from None
    if not read:
        raise ValueError(f"config file {path} not found")
    out = {}
    if parser.has_section("experiment"):
        sec = parser["experiment"]
        for key in ("targets", "errors", "methods"):
            if key in sec:
                out[key] = tuple(v.strip() for v in sec[key].split(",") if v.strip())
        if "sample_sizes" in sec:
            out["sizes"] = tuple(int(v) for v in sec["sample_sizes"].split(","))
        for key, conv in (("replications", int), ("seed", int), ("c", float)):
            if key in sec:
                out[key] = conv(sec[key])
    chi = {}
    for error in TABLE1_ERRORS:
        section = f"selection.{error}"
        if parser.has_section(section):
            sec = parser[section]
            chi[error] = {
                k: float(sec[k]) for k in ("chi1", "chi2", "chi") if k in sec
            }
    if chi:
        out["chi_overrides"] = chi
    if parser.has_section("quadrature"):
        sec = parser["quadrature"]
        out["quadrature"] = QuadratureConfig(
            t_step=sec.getfloat("t_step", 0.01),
            t_max=sec.getfloat("t_max", 150.0),
            rel_tail_tol=sec.getfloat("rel_tail_tol", 1e-6),
        )
    if parser.has_section("grid"):
        sec = parser["grid"]
        out["x_grid"] = XGridSpec(
            x_min=sec.getfloat("x_min", 1e-2),
            x_max=sec.getfloat("x_max", 30.0),
            points=sec.getint("x_points", 512),
        )
    return out


def cmd_mise(args) -> int:
    params = _read_mise_config(args.config) if args.config else {}
    if args.reps is not None:
        params["replications"] = args.reps
    if args.seed is not None:
        params["seed"] = args.seed
    rows = run_table_grid(
        reps=params.get("replications", 100),
        seed=params.get("seed", 1),
        targets=params.get("targets", TABLE1_TARGETS),
        errors=params.get("errors", TABLE1_ERRORS),
        sizes=params.get("sizes", TABLE1_SIZES),
        methods=params.get("methods", ("ridge", "cutoff")),
        c=params.get("c", 1.0),
        quadrature=params.get("quadrature", QuadratureConfig()),
        x_grid=params.get("x_grid", XGridSpec()),
        chi_overrides=params.get("chi_overrides"),
    )
    write_mise_csv(args.out, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_diagnose(args) -> int:
    sel = _selection_for(args, args.error)
    rows = bias_variance_profile(
        target=args.target,
        error=args.error,
        c=args.c,
        n=args.n,
        k_grid=list(range(1, args.k_max + 1)),
        reps=args.reps,
        seed=args.seed,
        quadrature=QuadratureConfig(t_step=args.t_step, t_max=args.t_max),
        selection=sel,
    )
    write_profile_csv(args.out, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mellin-deconv",
        description="Density estimation under multiplicative noise",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a contaminated sample to CSV")
    p.add_argument("--target", required=True, choices=TABLE1_TARGETS)
    p.add_argument("--error", required=True, choices=TABLE1_ERRORS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate a density from a sample CSV")
    p.add_argument("--sample", required=True, help="input CSV with header 'y'")
    p.add_argument("--error", required=True, choices=TABLE1_ERRORS)
    p.add_argument("--method", choices=("ridge", "cutoff"), default="ridge")
    p.add_argument("--out", required=True, help="output estimate CSV path")
    _add_common_selection_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("mise", help="run the benchmark MISE scenario grid")
    p.add_argument("--config", default=None, help="INI-style config file")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mise)

    p = sub.add_parser("diagnose", help="bias/variance profile vs risk bound")
    p.add_argument("--target", required=True, choices=TABLE1_TARGETS)
    p.add_argument("--error", required=True, choices=TABLE1_ERRORS)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--k-max", type=int, default=20)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)
    _add_common_selection_flags(p)
    p.set_defaults(func=cmd_diagnose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
