"""Command-line front end.

Subcommands:
  simulate  run a scenario config, write the trace CSV (and optional plots
            and metrics JSON), print a metrics summary
  check     validate the design: adaptation-rate definiteness, allocation
            rank, reference-model spectral radii
  gains     solve the outer-loop LQR and print the gain and diagnostics
  metrics   recompute the metrics report from an existing trace CSV

Exit codes: 0 success, 2 config error, 3 stability-assumption failure,
4 non-finite signal abort, 5 Riccati non-convergence.  Output files are only
written after the computation has fully succeeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .allocator import CLOSED_LOOP, check_assumption1
from .config import apply_override, config_from_dict, load_config_dict
from .controller import build_augmented, solve_dare
from .errors import AssumptionError, ConfigError, ConvergenceError, NonFiniteError
from .matrixcore import inverse, spectral_radius, sym_eig_max, sym_eig_min
from .plots import write_scenario_plots
from .scenario import metrics, run, trace_from_csv, write_trace_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSUMPTION = 3
EXIT_NONFINITE = 4
EXIT_DARE = 5

log = logging.getLogger(__name__)


def _setup_logging() -> None:
    level_name = os.environ.get("ALLOC_ADAPT_LOG", "").upper()
    if level_name:
        level = getattr(logging, level_name, logging.INFO)
        logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _load(args) -> tuple[dict, "ScenarioConfig"]:
    doc = load_config_dict(args.config)
    for assignment in args.set or []:
        apply_override(doc, assignment)
    return doc, config_from_dict(doc)


def _matrix_lines(name: str, m: np.ndarray) -> list[str]:
    lines = [f"{name} ="]
    for row in np.atleast_2d(m):
        lines.append("  [" + "  ".join(f"{v: .6f}" for v in row) + "]")
    return lines


def cmd_simulate(args) -> int:
    doc, config = _load(args)
    trace = run(config)
    write_trace_csv(trace, args.out)
    print(f"wrote {trace.steps} rows to {args.out}")
    if args.plots:
        for path in write_scenario_plots(trace, args.plots):
            print(f"wrote {path}")
    report = metrics(trace)
    if args.metrics_out:
        with open(args.metrics_out, "w") as fh:
            json.dump(report, fh, indent=2)
        print(f"wrote {args.metrics_out}")
    print("metrics summary:")
    for name, phase in report["phases"].items():
        if phase is None:
            continue
        print(
            f"  {name} [t={phase['t_start']:g}..{phase['t_end']:g}]: "
            f"alloc_err_inf={phase['alloc_err_inf']:.3e} "
            f"tracking_rms={['%.3e' % v for v in phase['tracking_rms']]} "
            f"max_V_increase={phase['max_V_increase']:.3e}"
        )
    print(f"  overall: alloc_err_inf={report['overall']['alloc_err_inf']:.3e} "
          f"theta_tail_drift={report['overall']['theta_tail_drift']:.3e}")
    return EXIT_OK


def cmd_check(args) -> int:
    doc = load_config_dict(args.config)
    for assignment in args.set or []:
        apply_override(doc, assignment)

    # evaluate conditions piecewise so one failure does not hide the rest
    from .config import _as_square, _plant_from_dict  # internal reuse

    ok = True
    lines: list[str] = []
    try:
        plant = _plant_from_dict(doc.get("plant", {"preset": "admire"}))
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"plant section invalid: {exc}") from exc
    r = plant.r

    try:
        inverse(plant.B @ plant.B.T)
        lines.append("rank(B) = r (Gram matrix nonsingular): PASS")
    except Exception:
        lines.append("rank(B) = r (Gram matrix nonsingular): FAIL")
        ok = False

    alloc_doc = doc.get("allocator", {})
    gamma = _as_square(alloc_doc.get("Gamma", np.eye(r).tolist()), r, "allocator.Gamma")
    sym_err = float(np.max(np.abs(gamma - gamma.T), initial=0.0))
    if sym_err <= 1e-12:
        lines.append("Gamma symmetric: PASS")
        lo, hi = sym_eig_min(gamma), sym_eig_max(gamma)
        lines.append(f"Gamma eigenvalues in [{lo:.6g}, {hi:.6g}]")
        if lo > 0.0:
            lines.append("Gamma positive definite: PASS")
        else:
            lines.append("Gamma positive definite: FAIL")
            ok = False
    else:
        lines.append(f"Gamma symmetric: FAIL (asymmetry {sym_err:.3e})")
        ok = False

    a_m = _as_square(alloc_doc.get("A_m", (0.5 * np.eye(r)).tolist()), r, "allocator.A_m")
    l = float(alloc_doc.get("l", 0.0))
    mode = alloc_doc.get("mode", "closed_loop")
    checks = [("A_m", a_m)]
    if mode == CLOSED_LOOP:
        checks += [("A_m + l*I", a_m + l * np.eye(r)), ("A_m - l*I", a_m - l * np.eye(r))]
    for name, mat in checks:
        rho = spectral_radius(mat)
        if rho < 1.0 - 1e-9:
            lines.append(f"rho({name}) = {rho:.6g}: PASS")
        elif rho <= 1.0:
            lines.append(f"rho({name}) = {rho:.6g}: BOUNDARY - manual review")
            ok = False
        else:
            lines.append(f"rho({name}) = {rho:.6g}: FAIL")
            ok = False

    print("\n".join(lines))
    print("all conditions pass" if ok else "one or more conditions failed")
    return EXIT_OK if ok else EXIT_ASSUMPTION


def cmd_gains(args) -> int:
    doc, config = _load(args)
    plant = config.plant
    aug = build_augmented(plant.A, plant.B_v, plant.C, plant.dt)
    sol = solve_dare(aug.A_bar, aug.B_bar, config.Q, config.R)
    rho = spectral_radius(aug.A_bar - aug.B_bar @ sol.K)
    for line in _matrix_lines("K", sol.K):
        print(line)
    print(f"DARE iterations: {sol.iterations}")
    print(f"DARE residual (max-abs): {sol.residual:.3e}")
    print(f"closed-loop spectral radius: {rho:.8f}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    doc, config = _load(args)
    trace = trace_from_csv(args.trace, config)
    report = metrics(trace)
    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alloc-adapt",
        description="Adaptive control allocation simulator for over-actuated sampled-data systems.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="path to a JSON scenario config")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="dotted-path config override (repeatable)")

    p_sim = sub.add_parser("simulate", help="run a scenario and write the trace CSV")
    add_common(p_sim)
    p_sim.add_argument("--out", default="trace.csv", help="trace CSV output path")
    p_sim.add_argument("--plots", metavar="DIR", help="also write SVG charts into DIR")
    p_sim.add_argument("--metrics-out", metavar="PATH", help="also write the metrics report as JSON")
    p_sim.set_defaults(func=cmd_simulate)

    p_check = sub.add_parser("check", help="verify design assumptions and print per-condition results")
    add_common(p_check)
    p_check.set_defaults(func=cmd_check)

    p_gains = sub.add_parser("gains", help="solve the LQR problem and print the gain")
    add_common(p_gains)
    p_gains.set_defaults(func=cmd_gains)

    p_metrics = sub.add_parser("metrics", help="recompute metrics from a trace CSV")
    add_common(p_metrics)
    p_metrics.add_argument("--trace", required=True, help="trace CSV written by simulate")
    p_metrics.add_argument("--out", help="write the JSON report here instead of stdout")
    p_metrics.set_defaults(func=cmd_metrics)
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssumptionError as exc:
        print(f"assumption check failed: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except NonFiniteError as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    except ConvergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_DARE


if __name__ == "__main__":
    sys.exit(main())
