"""Command-line front end: ``optokick {sweep,visibility,counts,validate}``.

Exit codes: 0 success, 1 regime check failed (validate), 2 invalid
configuration, 3 quadrature did not converge (files are still written and
marked partial).
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config, parse_methods
from .counting import campaign_schedule, required_shots, simulate_campaign
from .io import write_fringe_csv, write_json
from .params import validate_regime
from .signal import (
    SIGNAL_METHODS,
    FringeCurve,
    RegimeError,
    scan_detuning,
    visibility_from_curve,
    visibility_lorentzian,
    visibility_report,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_UNCONVERGED = 0, 1, 2, 3


def _header(cfg: RunConfig) -> dict:
    return {"tool": "optokick", "version": __version__, "seed": cfg.seed, "config": cfg.echo()}


def _compute(cfg: RunConfig, method: str, caught: list) -> FringeCurve:
    with warnings.catch_warnings(record=True) as record:
        warnings.simplefilter("always")
        if method == "exact":
            curve = SIGNAL_METHODS[method](cfg.protocol, cfg.thetas, qspec=cfg.quadrature)
        else:
            curve = SIGNAL_METHODS[method](cfg.protocol, cfg.thetas)
    caught.extend(f"{method}: {w.message}" for w in record)
    return curve


def _curve_summary(curve: FringeCurve, filename: str | None = None) -> dict:
    vis = visibility_from_curve(curve)
    out = {
        "visibility": vis.value,
        "n2_max": vis.n_max,
        "n2_min": vis.n_min,
        "theta_max": vis.theta_max,
        "theta_min": vis.theta_min,
        "zero_amplitude": vis.zero_amplitude,
        "n2_mean": float(np.mean(curve.n2)),
        "partial": curve.partial,
    }
    if filename:
        out["file"] = filename
    if curve.errors is not None:
        out["max_err_estimate"] = float(np.max(curve.errors))
    if curve.info:
        out["quadrature"] = curve.info
    return out


def _regime_tau(cfg: RunConfig) -> float:
    return float(np.max(np.abs(cfg.thetas))) / cfg.protocol.omega_m


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    caught: list[str] = []
    curves = {}
    summary = _header(cfg)
    for method in cfg.methods:
        curve = _compute(cfg, method, caught)
        name = f"fringe_{method}.csv"
        write_fringe_csv(curve, out / name)
        curves[method] = _curve_summary(curve, name)
    summary["curves"] = curves
    summary["closed_form"] = visibility_report(cfg.protocol).as_dict()
    summary["regime_checks"] = validate_regime(cfg.protocol, tau=_regime_tau(cfg)).as_dict()
    summary["warnings"] = caught
    partial = any(c["partial"] for c in curves.values())
    summary["partial"] = partial
    write_json(summary, out / "summary.json")
    for method, c in curves.items():
        flag = "  PARTIAL" if c["partial"] else ""
        print(f"{method:>10s}  V = {c['visibility']:.6e}  mean n2 = {c['n2_mean']:.6g}{flag}")
    print(f"regime: {summary['closed_form']['regime']} "
          f"(width ratio {summary['closed_form']['width_ratio']:.4g})")
    for w in caught:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_UNCONVERGED if partial else EXIT_OK


def cmd_visibility(cfg: RunConfig, out: Path, optimize_detuning: bool = False) -> int:
    out.mkdir(parents=True, exist_ok=True)
    caught: list[str] = []
    method = cfg.methods[0]
    curve = _compute(cfg, method, caught)
    report = visibility_report(cfg.protocol, curve)
    payload = _header(cfg)
    payload["visibility"] = report.as_dict()
    payload["curve"] = _curve_summary(curve)
    payload["warnings"] = caught
    rows = [
        (f"V_numeric ({method})", report.V_numeric),
        ("V_tanh (Gaussian limit)", report.V_tanh),
        ("V_lorentzian", report.V_lorentzian),
        ("V_max (optimal detuning)", report.V_max),
        ("Delta2* [rad/ns]", report.delta2_opt),
    ]
    if optimize_detuning:
        top = 5 * report.delta2_opt
        deltas = np.linspace(0.0, top, 2001)
        scan = scan_detuning(cfg.protocol, deltas)
        best = float(deltas[int(np.argmax(scan))])
        step = float(deltas[1] - deltas[0])
        payload["detuning_scan"] = {
            "delta2_min": 0.0,
            "delta2_max": top,
            "points": len(deltas),
            "step": step,
            "argmax": best,
            "delta2_opt": report.delta2_opt,
            "within_step": abs(best - report.delta2_opt) <= step,
            "v_at_argmax": float(scan.max()),
            "v_max_closed_form": visibility_lorentzian(cfg.protocol).v_max,
        }
        rows.append(("scan argmax Delta2 [rad/ns]", best))
    write_json(payload, out / "visibility.json")
    for label, value in rows:
        print(f"{label:<28s} {value:.6e}")
    print(f"regime: {report.regime} (width ratio {report.width_ratio:.4g}, "
          f"probe at {report.detuning_widths:.3g} Gaussian widths)")
    return EXIT_UNCONVERGED if curve.partial else EXIT_OK


def cmd_counts(cfg: RunConfig, out: Path) -> int:
    det = cfg.detector
    if det is None:
        raise ConfigError("counts needs a [detector] section")
    if det.total_shots < 1 or det.bins < 1:
        raise ConfigError("[detector] total_shots and bins must be >= 1")
    if det.total_shots < det.bins:
        raise ConfigError("[detector] total_shots must be at least the number of bins")
    out.mkdir(parents=True, exist_ok=True)
    caught: list[str] = []
    method = det.curve_method or cfg.methods[0]
    curve = _compute(cfg, method, caught)
    shots_per_bin = det.total_shots // det.bins
    campaign = simulate_campaign(curve, det.model, shots_per_bin, cfg.seed,
                                 n_bins=det.bins, repetition_rate=det.repetition_rate)
    vis = visibility_from_curve(curve).value
    mean_n2 = float(np.mean(curve.n2))
    need = required_shots(vis, mean_n2, det.model, det.target_z) if mean_n2 > 0 else None
    payload = _header(cfg)
    payload["curve_method"] = method
    payload["curve_visibility"] = vis
    payload["campaign"] = campaign.as_dict()
    payload["required_shots"] = None if need is None else {
        "target_z": det.target_z,
        "shots": need.shots,
        "resolvable": need.resolvable,
        "duration_s": campaign_schedule(need.shots, det.repetition_rate) if need.resolvable else math.inf,
        "model": need.model,
    }
    payload["warnings"] = caught
    write_json(payload, out / "counts.json")
    print(f"shots {campaign.total_shots} in {campaign.duration:.6g} s, "
          f"expected dark counts {campaign.expected_dark_counts:.6g}")
    print(f"fringe z-score {campaign.z_score:.4g} (analytic {campaign.z_analytic:.4g})")
    if need is not None:
        print(f"shots for z = {det.target_z:g}: {need.shots:.6g}")
    return EXIT_UNCONVERGED if curve.partial else EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    report = validate_regime(cfg.protocol, tau=_regime_tau(cfg))
    rows = [(c.name, c.ratio, c.threshold, c.status, c.description) for c in report.checks]
    d1 = cfg.protocol.Delta1
    rows.append(("delta1_zero", abs(d1), 0.0, "pass" if d1 == 0 else "fail", "resonant first pulse"))
    print(f"{'assumption':<14s} {'ratio':>12s} {'threshold':>10s}  status    description")
    for name, ratio, threshold, status, desc in rows:
        print(f"{name:<14s} {ratio:12.5g} {threshold:10.3g}  {status:<8s}  {desc}")
    print(f"G1/kappa1 = {report.g1_over_kappa1:.4g} "
          f"(first-order approximations {'valid' if report.first_order_valid else 'not valid'})")
    for note in report.notes:
        print(f"note: {note}")
    return EXIT_OK if all(r[3] != "fail" for r in rows) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optokick", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("sweep", "fringe curves for every selected method"),
        ("visibility", "numeric and closed-form visibilities"),
        ("counts", "photon-counting campaign simulation"),
        ("validate", "check the protocol assumptions"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to an INI run configuration")
        p.add_argument("--methods", help="comma-separated list from exact,gaussian,doppler,lorentzian")
        p.add_argument("--out", help="output directory (default: [run] output_dir)")
        p.add_argument("--seed", type=int, help="unsigned 64-bit seed")
        p.add_argument("--theta-points", type=int, help="number of uniform angles on [start, stop)")
        if name == "visibility":
            p.add_argument("--optimize-detuning", action="store_true",
                           help="scan the probe detuning and locate the visibility maximum")
    return parser


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.methods is not None:
        cfg.methods = parse_methods(args.methods)
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        cfg.seed = args.seed
    if args.theta_points is not None:
        if args.theta_points < 1:
            raise ConfigError("--theta-points must be >= 1")
        start = float(cfg.thetas[0])
        span = float(cfg.thetas[1] - cfg.thetas[0]) * len(cfg.thetas) if len(cfg.thetas) > 1 else 2 * math.pi
        cfg.thetas = start + span * np.arange(args.theta_points) / args.theta_points
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        out = Path(args.out or cfg.output_dir)
        if args.command == "sweep":
            return cmd_sweep(cfg, out)
        if args.command == "visibility":
            return cmd_visibility(cfg, out, args.optimize_detuning)
        if args.command == "counts":
            return cmd_counts(cfg, out)
        return cmd_validate(cfg)
    except (ConfigError, RegimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
