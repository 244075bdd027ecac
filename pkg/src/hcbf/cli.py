"""Command-line front end.

Subcommands::

    hcbf run SCENARIO [--mode MODE] [--out DIR] [--svg | --no-svg]
    hcbf compare SCENARIO [--out DIR] [--svg | --no-svg]
    hcbf fit-support SHAPE [--terms N] [--grid M] [--out DIR] [--svg | --no-svg]
    hcbf oracle-check [--seed S] [--count N] [--out DIR]

SCENARIO is a JSON file or the name of a bundled scenario (flyby,
blocked_goal, mixed_field).  SHAPE is a JSON file or an inline JSON object.
Outputs go to ``--out``, else ``$HCBF_OUT_DIR``, else ``./hcbf-out``.

Exit codes: 0 success, 1 invalid input, 2 failed run (collision or
infeasible filter), 3 oracle gap above tolerance.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import svg
from .filter import Mode
from .geometry import GeometryError, fit_fourier
from .instances import DEFAULT_SEED, GAP_TOL, oracle_check
from .io import (ScenarioFileError, atomic_write, dumps_json, load_scenario, log_to_csv,
                 parse_shape, resolve_scenario)
from .sim import ScenarioError, metrics, run_scenario

log = logging.getLogger("hcbf")

EXIT_OK, EXIT_INVALID, EXIT_RUN_FAILED, EXIT_ORACLE_GAP = 0, 1, 2, 3
OUT_ENV = "HCBF_OUT_DIR"
CONSERVATIVE_GRID = 7200


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or "hcbf-out")


def _load(spec: str):
    return load_scenario(resolve_scenario(spec))


def _simulate(scenario, mode: Mode):
    sc = scenario.with_mode(mode)
    trajectory = run_scenario(sc)
    return sc, trajectory, metrics(trajectory, sc)


def _write_figures(out: Path, stem: str, scenario, logs) -> list:
    paths = []
    for name, text in svg.run_figures(scenario, logs).items():
        p = out / f"{stem}_{name}.svg"
        atomic_write(p, text)
        paths.append(str(p))
    return paths


def _write_run(out: Path, sc, trajectory, summary, with_svg: bool) -> dict:
    stem = f"{sc.name}_{sc.filter.mode.value}"
    files = {"csv": str(out / f"{stem}.csv"), "metrics": str(out / f"{stem}_metrics.json")}
    atomic_write(files["csv"], log_to_csv(trajectory))
    atomic_write(files["metrics"], dumps_json(summary))
    if with_svg:
        files["svg"] = _write_figures(out, stem, sc, {sc.filter.mode.value: trajectory})
    return files


def cmd_run(args) -> int:
    scenario = _load(args.scenario)
    mode = Mode(args.mode) if args.mode else scenario.filter.mode
    if mode is Mode.FIXED_THETA and scenario.filter.fixed_theta is None:
        raise ScenarioError("fixed-theta mode needs filter.fixed_theta in the scenario")
    sc, trajectory, summary = _simulate(scenario, mode)
    files = _write_run(_out_dir(args), sc, trajectory, summary, args.svg)
    print(f"{sc.name} [{mode.value}]: {summary['outcome']}, "
          f"min clearance {min(summary['min_clearance'], default=math.inf):.4g} m, "
          f"intervention integral {summary['intervention_integral']:.6g}")
    for ev in summary["events"]:
        print(f"  {ev}")
    for key, path in files.items():
        for item in (path if isinstance(path, list) else [path]):
            print(f"  {key}: {item}")
    return EXIT_OK if summary["outcome"] == "success" else EXIT_RUN_FAILED


def _fmt(v, spec=".4g") -> str:
    if v is None:
        return "-"
    if isinstance(v, list):
        return _fmt(min(v), spec) if v else "-"
    return format(v, spec)


COMPARE_ROWS = (
    ("outcome", "outcome", "s"),
    ("time to goal (1 m) [s]", "time_to_goal_1m", ".4g"),
    ("final goal distance [m]", "final_goal_distance", ".4g"),
    ("min clearance [m]", "min_clearance", ".4g"),
    ("intervention integral", "intervention_integral", ".6g"),
    ("intervention time [s]", "intervention_time", ".4g"),
)


def comparison_table(results: dict) -> str:
    modes = list(results)
    width = max(len(label) for label, _, _ in COMPARE_ROWS) + 2
    lines = ["".ljust(width) + "".join(m.rjust(20) for m in modes)]
    for label, key, spec in COMPARE_ROWS:
        lines.append(label.ljust(width) + "".join(_fmt(results[m][key], spec).rjust(20) for m in modes))
    return "\n".join(lines)


def cmd_compare(args) -> int:
    scenario = _load(args.scenario)
    out = _out_dir(args)
    modes = (Mode.LEAST_RESTRICTIVE, Mode.ORTHOGONAL)
    with ThreadPoolExecutor(max_workers=2) as pool:
        runs = list(pool.map(lambda m: _simulate(scenario, m), modes))
    results, logs = {}, {}
    for sc, trajectory, summary in runs:
        _write_run(out, sc, trajectory, summary, with_svg=False)
        results[sc.filter.mode.value] = summary
        logs[sc.filter.mode.value] = trajectory
    atomic_write(out / f"{scenario.name}_compare.json", dumps_json(results))
    if args.svg:
        _write_figures(out, f"{scenario.name}_compare", scenario, logs)
    print(f"{scenario.name}: least-restrictive vs orthogonal")
    print(comparison_table(results))
    print(f"  outputs in {out}")
    ok = all(r["outcome"] == "success" for r in results.values())
    return EXIT_OK if ok else EXIT_RUN_FAILED


def _read_shape(spec: str) -> dict:
    text = spec
    if not spec.lstrip().startswith("{"):
        try:
            text = Path(spec).read_text(encoding="utf-8")
        except OSError as exc:
            raise ScenarioFileError(f"{spec}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(f"shape JSON {exc.lineno}:{exc.colno}: {exc.msg}") from None


def fit_report(model, grid: int = CONSERVATIVE_GRID) -> dict:
    th = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
    slack = model.distance(th) - model.shape.support(th)
    coeffs = np.concatenate([[model.a0], model.an, model.bn])
    return {
        "n_terms": model.n_terms,
        "a0": model.a0,
        "an": model.an.tolist(),
        "bn": model.bn.tolist(),
        "margin": model.margin,
        "max_residual": model.max_residual,
        "nonzero_coefficients": int(np.sum(np.abs(coeffs) > 1e-12)),
        "min_slack": float(slack.min()),
        "conservative": bool(slack.min() >= -1e-9),
        "check_grid": grid,
    }


def cmd_fit_support(args) -> int:
    doc = _read_shape(args.shape)
    shape = parse_shape(doc)
    try:
        model = fit_fourier(shape, args.terms, grid=args.grid)
    except GeometryError as exc:
        raise ScenarioFileError(str(exc)) from None
    report = {"shape": doc, "fit_grid": args.grid, **fit_report(model)}
    out = _out_dir(args)
    stem = f"support_{doc.get('type', 'shape')}_n{args.terms}"
    atomic_write(out / f"{stem}.json", dumps_json(report))
    if args.svg:
        atomic_write(out / f"{stem}.svg", svg.support_polar(model))
    print(f"N={model.n_terms}: margin {model.margin:.6g}, max residual {model.max_residual:.6g}, "
          f"{report['nonzero_coefficients']} nonzero coefficients, "
          f"conservative={report['conservative']}")
    print(f"  report: {out / (stem + '.json')}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    if args.count < 0:
        raise ScenarioError("--count must be non-negative")
    report = oracle_check(args.seed, args.count, u_resolution=args.u_resolution,
                          theta_resolution=args.theta_resolution)
    atomic_write(_out_dir(args) / f"oracle_check_seed{args.seed}_n{args.count}.json",
                 dumps_json(report))
    verdict = "PASS" if report["passed"] else "FAIL"
    print(f"oracle-check seed={args.seed} count={args.count}: max gap {report['max_gap']:.3g} "
          f"(tolerance {GAP_TOL:g}) {verdict}")
    return EXIT_OK if report["passed"] else EXIT_ORACLE_GAP


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hcbf", description="Hyperplane CBF safety filter simulator.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_svg=True):
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./hcbf-out)")
        if with_svg:
            sp.add_argument("--svg", action=argparse.BooleanOptionalAction, default=True,
                            help="write SVG figures")

    sp = sub.add_parser("run", help="simulate one scenario")
    sp.add_argument("scenario")
    sp.add_argument("--mode", choices=[m.value for m in Mode])
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("compare", help="least-restrictive vs orthogonal on one scenario")
    sp.add_argument("scenario")
    common(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("fit-support", help="fit a Fourier support model to a shape")
    sp.add_argument("shape", help="shape JSON file or inline JSON object")
    sp.add_argument("--terms", type=int, default=16)
    sp.add_argument("--grid", type=int, default=720)
    common(sp)
    sp.set_defaults(func=cmd_fit_support)

    sp = sub.add_parser("oracle-check", help="optimizer vs brute-force oracle")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--u-resolution", type=int, default=1001)
    sp.add_argument("--theta-resolution", type=int, default=3600)
    common(sp, with_svg=False)
    sp.set_defaults(func=cmd_oracle_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ScenarioFileError, ScenarioError, GeometryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
