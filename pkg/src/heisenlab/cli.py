"""Command-line entry point.

Exit codes: 0 success, 1 experiment failure, 2 usage/config/parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .classical import ClassicalHamiltonian, PhasePoint, classical_trajectory
from .config import ConfigError, RunConfig, load_config
from .convergence import run_derivative_quotient_scan, run_full_suite, run_operator_order_scan, run_quantum_classical_gap
from .heisenberg import TrajectoryRecord, expectation_trajectory
from .models import TruncationError, build_model, coherent_state, fock_state, gaussian_grid_state
from .symbolic import ParseError, classical_symbol, dirac_check, normal_order, parse, sym_commutator

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

TRAJECTORY_HEADER = ("t", "Q", "P", "varQ", "varP", "Qcl", "Pcl", "errQ", "errP")
ERRORS_HEADER = ("scenario", "series", "index", "dt", "error")


def fmt(x) -> str:
    return format(float(x), ".17g")


def trajectory_csv(rec: TrajectoryRecord) -> str:
    cols = [rec.times, rec.Q, rec.P, rec.varQ, rec.varP, rec.Qcl, rec.Pcl, rec.errQ, rec.errP]
    lines = [",".join(TRAJECTORY_HEADER)]
    for i in range(len(rec)):
        lines.append(",".join(fmt(c[i]) if c is not None else "" for c in cols))
    return "\n".join(lines) + "\n"


def errors_csv(reports) -> str:
    lines = [",".join(ERRORS_HEADER)]
    for r in reports:
        for series, values in r.errors.items():
            for i, v in enumerate(values):
                dt = fmt(r.dt_grid[i]) if len(r.dt_grid) == len(values) else ""
                lines.append(",".join([r.scenario, series, str(i), dt, fmt(v)]))
    return "\n".join(lines) + "\n"


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)


def build_state(cfg: RunConfig, model):
    if cfg.state_type == "coherent":
        return coherent_state(model.spec, cfg.alpha)
    if cfg.state_type == "fock":
        return fock_state(model.spec, cfg.fock_n)
    return gaussian_grid_state(model, cfg.alpha)


def _setup(cfg: RunConfig):
    model = build_model(cfg.model)
    return model, build_state(cfg, model)


def cmd_evolve(cfg: RunConfig) -> int:
    model, psi = _setup(cfg)
    times = np.asarray(cfg.time_grid())
    traj = expectation_trajectory(model, psi, times)
    start = PhasePoint(float(traj.Q[0]), float(traj.P[0]), float(times[0]))
    cl = classical_trajectory(ClassicalHamiltonian.from_spec(cfg.model), start, times)
    traj = traj.with_classical(cl.Qcl, cl.Pcl)
    if cfg.output_format == "json":
        cols = {name: [float(x) for x in getattr(traj, name)] for name in TrajectoryRecord.COLUMNS}
        _write(cfg.output_path, dump_json({"t": [float(t) for t in times], **cols}))
    else:
        _write(cfg.output_path, trajectory_csv(traj))
    return EXIT_OK


def cmd_order(cfg: RunConfig) -> int:
    model, psi = _setup(cfg)
    dts = cfg.dt_values()
    reports = [
        run_operator_order_scan(model, cfg.hadamard_orders, dts, cfg.tolerances),
        run_derivative_quotient_scan(model, psi, dts, cfg.tolerances),
    ]
    _write(cfg.output_path, dump_json({r.scenario: r.to_dict() for r in reports}))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_compare(cfg: RunConfig) -> int:
    model, psi = _setup(cfg)
    report = run_quantum_classical_gap(model, psi, cfg.dt_values(), cfg.tolerances)
    _write(cfg.output_path, dump_json(report.to_dict()))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_suite(cfg: RunConfig) -> int:
    reports = run_full_suite(cfg.suite_config())
    passed = all(r.passed for r in reports)
    doc = {
        "passed": passed,
        "seed": cfg.seed,
        "scenarios": [r.to_dict() for r in reports],
    }
    out = cfg.output_path or "suite_report.json"
    _write(out, dump_json(doc))
    _write(str(Path(out).with_suffix(".csv")), errors_csv(reports))
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.scenario}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


SYMBOLIC_ACTIONS = {
    "normal": 1,
    "symbol": 1,
    "commutator": 2,
    "dirac": 2,
}


def cmd_symbolic(action: str, exprs: list[str]) -> int:
    need = SYMBOLIC_ACTIONS[action]
    if len(exprs) != need:
        raise ConfigError(f"symbolic {action} takes {need} expression(s), got {len(exprs)}")
    polys = [parse(e) for e in exprs]
    if action == "normal":
        out = {"result": normal_order(polys[0]).to_text()}
    elif action == "symbol":
        out = {"result": classical_symbol(normal_order(polys[0])).to_text()}
    elif action == "commutator":
        out = {"result": sym_commutator(*polys).to_text()}
    else:
        out = dirac_check(*polys).to_dict()
    sys.stdout.write(json.dumps(out, separators=(",", ":"), sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config leaf by dotted path, e.g. model.lambda=0.1")
    common.add_argument("--output", help="output path (default: config output.path, else stdout)")
    common.add_argument("--seed", type=int)

    parser = argparse.ArgumentParser(prog="heisenlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("evolve", parents=[common], help="expectation trajectory with classical counterpart (CSV)")
    sub.add_parser("order", parents=[common], help="Hadamard-order and difference-quotient scans (JSON)")
    sub.add_parser("compare", parents=[common], help="quantum-classical gap report (JSON)")
    sub.add_parser("suite", parents=[common], help="run every scenario; exit 0 iff all pass")
    sym = sub.add_parser("symbolic", help="operator-polynomial algebra (JSON to stdout)")
    sym.add_argument("action", choices=sorted(SYMBOLIC_ACTIONS))
    sym.add_argument("exprs", nargs="+")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "symbolic":
            return cmd_symbolic(args.action, args.exprs)
        cfg = load_config(args.config, args.overrides, args.seed, args.output)
        return {"evolve": cmd_evolve, "order": cmd_order, "compare": cmd_compare, "suite": cmd_suite}[args.command](cfg)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TruncationError as exc:
        print(f"rejected by truncation guard: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
