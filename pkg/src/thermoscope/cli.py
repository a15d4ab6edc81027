"""Command-line front end: subcommands, config handling, serialisation.

Exit codes: 0 success, 2 invalid arguments, 3 computation completed but some
rows are unconverged or divergent (results are still emitted), 4 an internal
budget was exceeded.
"""

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import List, Optional, Tuple

from .config import Config, load_config
from .errors import (BudgetExceeded, DegenerateGraph, DomainError,
                     InsufficientCurve, MassFloorViolation, ThermoscopeError)
from .ergodic import endpoints
from .riesz import autocorrelation_check, cylinder_masses, lq_direct
from .scan import make_grid, scan_endpoints, scan_pressure, semicontinuity_report
from .spectra import birkhoff_spectrum, lq_via_pressure
from .symbolic import TorusPoint
from .transfer import pressure, pressure_curve

LOG2 = math.log(2.0)


def parse_c(text: str) -> Tuple[TorusPoint, Optional[str]]:
    """Parse --c values: decimal literals or rationals ``k/2^n`` / ``k/m``.

    Dyadic rationals become exact torus points; other rationals parse to the
    nearest double with an explanatory note for the output metadata.
    """
    text = text.strip()
    if "/" in text:
        num_s, den_s = text.split("/", 1)
        num = int(num_s)
        if "^" in den_s:
            base_s, exp_s = den_s.split("^", 1)
            den = int(base_s) ** int(exp_s)
        else:
            den = int(den_s)
        if den <= 0:
            raise ValueError(f"bad denominator in {text!r}")
        frac = Fraction(num, den) % 1
        d = frac.denominator
        if d & (d - 1) == 0:
            return TorusPoint.from_dyadic(frac.numerator, d.bit_length() - 1), None
        note = (f"c = {text} is not dyadic; parsed to nearest double "
                f"{float(frac)!r}")
        return TorusPoint(float(frac)), note
    val = float(text)
    if not (0.0 <= val < 1.0):
        val %= 1.0
    return TorusPoint.from_float(val), None


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _pressure_rows_csv(rows, note: Optional[str]) -> str:
    lines = []
    if note:
        lines.append(f"# note: {note}")
    lines.append("c,t,depth,lower,upper,converged,divergent")
    for r in rows:
        upper = "" if r.divergent else _fmt(r.upper)
        lines.append(f"{_fmt(r.c.value)},{_fmt(r.t)},{r.depth},{_fmt(r.lower)},"
                     f"{upper},{str(r.converged).lower()},{str(r.divergent).lower()}")
    return "\n".join(lines) + "\n"


def _pressure_rows_json(rows, note: Optional[str]) -> str:
    payload = {"rows": [{
        "c": r.c.value, "t": r.t, "depth": r.depth, "lower": r.lower,
        "upper": None if r.divergent else r.upper,
        "converged": r.converged, "divergent": r.divergent,
    } for r in rows]}
    if note:
        payload["note"] = note
    return json.dumps(payload) + "\n"


def _cmd_pressure(args, cfg: Config) -> Tuple[str, int]:
    c, note = parse_c(args.c)
    est = pressure(c, args.t, cfg)
    status = 3 if (est.divergent or not est.converged) else 0
    if cfg.output_format == "json":
        return _pressure_rows_json([est], note), status
    return _pressure_rows_csv([est], note), status


def _cmd_curve(args, cfg: Config) -> Tuple[str, int]:
    c, note = parse_c(args.c)
    if args.t_steps < 2 or args.t_max <= args.t_min:
        raise DomainError("need t_max > t_min and t_steps >= 2")
    step = (args.t_max - args.t_min) / (args.t_steps - 1)
    grid = [args.t_min + k * step for k in range(args.t_steps)]
    curve = pressure_curve(c, grid, cfg)
    rows = [e for _, e in curve.samples]
    status = 3 if any(r.divergent or not r.converged for r in rows) else 0
    if cfg.output_format == "json":
        return _pressure_rows_json(rows, note), status
    return _pressure_rows_csv(rows, note), status


def _cmd_endpoints(args, cfg: Config) -> Tuple[str, int]:
    c, note = parse_c(args.c)
    depth = args.depth or min(cfg.depth_max, 12)
    est = endpoints(c, depth, cfg)
    status = 3 if est.alpha_divergent else 0
    if cfg.output_format == "json":
        payload = {
            "c": c.value, "depth": est.depth,
            "alpha": list(est.alpha_bracket), "beta": list(est.beta_bracket),
            "alpha_divergent": est.alpha_divergent,
            "alpha_witness": list(est.alpha_witness),
            "beta_witness": list(est.beta_witness),
        }
        if note:
            payload["note"] = note
        return json.dumps(payload) + "\n", status
    lines = []
    if note:
        lines.append(f"# note: {note}")
    lines.append("c,depth,alpha_lower,alpha_upper,beta_lower,beta_upper,"
                 "alpha_divergent")
    a_lo, a_hi = est.alpha_bracket
    b_lo, b_hi = est.beta_bracket
    lines.append(f"{_fmt(c.value)},{est.depth},{_fmt(a_lo)},{_fmt(a_hi)},"
                 f"{_fmt(b_lo)},{_fmt(b_hi)},{str(est.alpha_divergent).lower()}")
    return "\n".join(lines) + "\n", status


def _spectrum_csv(curve, note: Optional[str]) -> str:
    lines = []
    if note:
        lines.append(f"# note: {note}")
    lines.append("argument,value,bracket_width,flag")
    for a, v, w, f in curve.samples:
        lines.append(f"{_fmt(a)},{_fmt(v)},{_fmt(w)},{f}")
    return "\n".join(lines) + "\n"


def _cmd_birkhoff(args, cfg: Config) -> Tuple[str, int]:
    c, note = parse_c(args.c)
    if args.steps < 1 or args.beta_max < args.beta_min:
        raise DomainError("need beta_max >= beta_min and steps >= 1")
    if args.steps == 1:
        grid = [args.beta_min]
    else:
        step = (args.beta_max - args.beta_min) / (args.steps - 1)
        grid = [args.beta_min + k * step for k in range(args.steps)]
    curve = birkhoff_spectrum(c, grid, cfg)
    status = 3 if any(f != "ok" for _, _, _, f in curve.samples) else 0
    if cfg.output_format == "json":
        payload = json.loads(curve.to_json())
        if note:
            payload["note"] = note
        return json.dumps(payload) + "\n", status
    return _spectrum_csv(curve, note), status


def _cmd_lq(args, cfg: Config) -> Tuple[str, int]:
    c, note = parse_c(args.c)
    res = lq_via_pressure(c, args.q, cfg)
    status = 3 if (res.divergent or not res.converged) else 0
    width = res.estimate.width / LOG2 if res.estimate else 0.0
    flag = "divergent" if res.divergent else ("ok" if res.converged else "unconverged")
    if cfg.output_format == "json":
        payload = {"c": c.value, "q": args.q,
                   "value": None if res.divergent else res.value,
                   "bracket_width": width, "flag": flag}
        if note:
            payload["note"] = note
        return json.dumps(payload) + "\n", status
    lines = []
    if note:
        lines.append(f"# note: {note}")
    lines.append("argument,value,bracket_width,flag")
    val = "" if res.divergent else _fmt(res.value)
    lines.append(f"{_fmt(args.q)},{val},{_fmt(width)},{flag}")
    return "\n".join(lines) + "\n", status


def _cmd_lq_direct(args, cfg: Config) -> Tuple[str, int]:
    c, note = parse_c(args.c)
    fit = lq_direct(c, args.q, range(args.n_min, args.n_max + 1), cfg)
    if cfg.output_format == "json":
        payload = {"c": c.value, "q": fit.q, "slope": fit.slope,
                   "residual": fit.residual, "depths": list(fit.depths),
                   "log_sums": list(fit.log_sums)}
        if note:
            payload["note"] = note
        return json.dumps(payload) + "\n", 0
    lines = []
    if note:
        lines.append(f"# note: {note}")
    lines.append("q,slope,residual,n_min,n_max")
    lines.append(f"{_fmt(fit.q)},{_fmt(fit.slope)},{_fmt(fit.residual)},"
                 f"{fit.depths[0]},{fit.depths[-1]}")
    return "\n".join(lines) + "\n", 0


def _cmd_masses(args, cfg: Config) -> Tuple[str, int]:
    c, note = parse_c(args.c)
    M = args.truncation if args.truncation is not None else \
        args.depth + cfg.riesz_truncation_offset
    table = cylinder_masses(c, args.depth, M, cfg=cfg)
    if cfg.output_format == "json":
        payload = json.loads(table.to_json())
        if note:
            payload["note"] = note
        return json.dumps(payload) + "\n", 0
    text = table.to_csv()
    if note:
        text = f"# note: {note}\n" + text
    return text, 0


def _cmd_scan(args, cfg: Config) -> Tuple[str, int]:
    grid = make_grid(args.grid, args.focus or ())
    if args.endpoints:
        table = scan_endpoints(grid, cfg, depth=args.depth or None,
                               alpha_threshold=args.alpha_threshold)
        status = 3 if any(r.alpha_divergent for r in table.rows) else 0
    else:
        if args.t is None:
            raise DomainError("scan requires --t unless --endpoints is given")
        table = scan_pressure(args.t, grid, cfg)
        status = 3 if any(r.divergent or not r.converged for r in table.rows) else 0
    if args.gnuplot:
        with open(args.gnuplot, "w", encoding="utf-8") as fh:
            fh.write(table.to_gnuplot())
    if args.report and not args.endpoints:
        rep = semicontinuity_report(table)
        sys.stderr.write(f"semicontinuity check: {rep.violation_count} "
                         f"violations over {rep.checked} interior points\n")
    text = table.to_json() + "\n" if cfg.output_format == "json" else table.to_csv()
    return text, status


def _cmd_diffcheck(args, cfg: Config) -> Tuple[str, int]:
    c, note = parse_c(args.c)
    rep = autocorrelation_check(c, args.lags, args.length,
                                truncation=args.truncation, cfg=cfg)
    if cfg.output_format == "json":
        payload = {
            "c": c.value, "lags": rep.lags, "sample_length": rep.sample_length,
            "max_discrepancy": rep.max_discrepancy,
            "rows": [{"lag": k,
                      "empirical": [rep.empirical[k].real, rep.empirical[k].imag],
                      "riesz": [rep.riesz[k].real, rep.riesz[k].imag]}
                     for k in range(rep.lags)],
        }
        if note:
            payload["note"] = note
        return json.dumps(payload) + "\n", 0
    lines = []
    if note:
        lines.append(f"# note: {note}")
    lines.append(f"# max_abs_discrepancy = {_fmt(rep.max_discrepancy)}")
    lines.append("lag,empirical_re,empirical_im,riesz_re,riesz_im,abs_diff")
    for k in range(rep.lags):
        e, f = rep.empirical[k], rep.riesz[k]
        lines.append(f"{k},{_fmt(e.real)},{_fmt(e.imag)},{_fmt(f.real)},"
                     f"{_fmt(f.imag)},{_fmt(abs(e - f))}")
    return "\n".join(lines) + "\n", 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermoscope",
        description="Pressure, spectra and equilibrium-measure computations "
                    "for the singular potential family over the doubling map.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--out", help="write results to this path")
    common.add_argument("--format", choices=["csv", "json"], dest="format")
    common.add_argument("--depth-min", type=int)
    common.add_argument("--depth-max", type=int)
    common.add_argument("--bracket-tol", type=float)
    common.add_argument("--power-iter-tol", type=float)
    common.add_argument("--power-iter-cap", type=int)
    common.add_argument("--blowup-threshold", type=float)
    common.add_argument("--workers", type=int)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pressure", parents=[common],
                       help="pressure at one (c, t)")
    p.add_argument("--c", required=True)
    p.add_argument("--t", type=float, required=True)

    p = sub.add_parser("curve", parents=[common],
                       help="pressure curve over a t-grid")
    p.add_argument("--c", required=True)
    p.add_argument("--t-min", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--t-steps", type=int, required=True)

    p = sub.add_parser("endpoints", parents=[common],
                       help="extremal Birkhoff averages (mean cycles)")
    p.add_argument("--c", required=True)
    p.add_argument("--depth", type=int, default=0)

    p = sub.add_parser("birkhoff", parents=[common],
                       help="Birkhoff spectrum over an average-value grid")
    p.add_argument("--c", required=True)
    p.add_argument("--beta-min", type=float, required=True)
    p.add_argument("--beta-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)

    p = sub.add_parser("lq", parents=[common],
                       help="L^q spectrum value via the pressure identity")
    p.add_argument("--c", required=True)
    p.add_argument("--q", type=float, required=True)

    p = sub.add_parser("lq-direct", parents=[common],
                       help="L^q spectrum value via partition-sum slopes")
    p.add_argument("--c", required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--n-min", type=int, default=10)
    p.add_argument("--n-max", type=int, default=14)

    p = sub.add_parser("masses", parents=[common],
                       help="dyadic cell masses of the equilibrium measure")
    p.add_argument("--c", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--truncation", type=int)

    p = sub.add_parser("scan", parents=[common],
                       help="parameter scan over singularity positions")
    p.add_argument("--t", type=float)
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--focus", type=float, action="append")
    p.add_argument("--endpoints", action="store_true",
                   help="scan endpoint estimates instead of pressure")
    p.add_argument("--depth", type=int, default=0)
    p.add_argument("--alpha-threshold", type=float, default=-40.0)
    p.add_argument("--gnuplot", help="also write a two-column (c, value) file")
    p.add_argument("--report", action="store_true",
                   help="print the semicontinuity diagnostic to stderr")

    p = sub.add_parser("diffcheck", parents=[common],
                       help="sequence autocorrelation vs measure Fourier modes")
    p.add_argument("--c", required=True)
    p.add_argument("--lags", type=int, required=True)
    p.add_argument("--length", type=int, default=1 << 18)
    p.add_argument("--truncation", type=int, default=18)

    return parser


_COMMANDS = {
    "pressure": _cmd_pressure,
    "curve": _cmd_curve,
    "endpoints": _cmd_endpoints,
    "birkhoff": _cmd_birkhoff,
    "lq": _cmd_lq,
    "lq-direct": _cmd_lq_direct,
    "masses": _cmd_masses,
    "scan": _cmd_scan,
    "diffcheck": _cmd_diffcheck,
}


def _config_from_args(args) -> Config:
    cfg = load_config(args.config) if args.config else Config()
    overrides = {}
    for field_name, arg_name in [
        ("depth_min", "depth_min"), ("depth_max", "depth_max"),
        ("bracket_tol", "bracket_tol"), ("power_iter_tol", "power_iter_tol"),
        ("power_iter_cap", "power_iter_cap"),
        ("blowup_threshold", "blowup_threshold"), ("workers", "workers"),
        ("output_format", "format"),
    ]:
        val = getattr(args, arg_name, None)
        if val is not None:
            overrides[field_name] = val
    return cfg.updated(**overrides) if overrides else cfg


def run(argv: List[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        cfg = _config_from_args(args)
        text, status = _COMMANDS[args.command](args, cfg)
    except BudgetExceeded as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        return 4
    except (DomainError, InsufficientCurve, MassFloorViolation,
            DegenerateGraph, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
