"""Command-line entry point ``smallbody``.

Subcommands: ``simulate``, ``verify``, ``convergence``, ``forces``.
Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 runtime halt (collision, body penetration, non-finite state).
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import ConfigError, ScenarioConfig, load
from .conformal import map_from_name
from .errors import CollisionError, ConvergenceError, InsideBodyError, NonFiniteError, SingularityError
from .finite_eps import (
    EpsParams,
    EpsState,
    convergence_study,
    run_coupled,
    solid_rhs,
    support_radius_monitor,
)
from .limit_dynamics import LimitParams, LimitState
from .limit_dynamics import run as run_limit
from .output import write_trajectory
from .verification import run_identity_suite

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3
RUNTIME_ERRORS = (CollisionError, NonFiniteError, InsideBodyError, SingularityError, ConvergenceError)


def _emit(obj, as_json: bool, text: str):
    print(json.dumps(obj, indent=2) if as_json else text)


def _require(cfg: ScenarioConfig, cond: bool, field: str, message: str):
    if not cond:
        raise ConfigError(field, message)


def _eps_setup(cfg: ScenarioConfig, epsilon: float | None = None):
    state = EpsState(cfg.ell0, cfg.r0, cfg.theta0, cfg.h0, cfg.vorticity())
    params = EpsParams(cfg.m, cfg.J0, cfg.gamma, cfg.dt)
    return state, params, cfg.geometry(epsilon)


def run_scenario(cfg: ScenarioConfig):
    """Integrate a scenario: the limit system without ``epsilon``, the coupled
    disk system with it.  Returns ``(kind, trajectory)``."""
    if cfg.epsilon is None:
        c, s = np.cos(cfg.theta0), np.sin(cfg.theta0)
        xi0 = cfg.m * np.array([c * cfg.ell0[0] - s * cfg.ell0[1], s * cfg.ell0[0] + c * cfg.ell0[1]])
        state = LimitState(cfg.h0, xi0, cfg.vorticity())
        core = max((b.core for b in cfg.blobs), default=0.0)
        params = LimitParams(cfg.m, cfg.gamma, core, cfg.dt)
        return "limit", run_limit(state, params, cfg.T, stride=cfg.output.stride)
    _require(cfg, cfg.shape == "disk", "shape", "coupled finite-size runs require shape = 'disk'")
    state, params, geom = _eps_setup(cfg)
    return "finite_epsilon", run_coupled(state, geom, params, cfg.T, stride=cfg.output.stride,
                                         record_forces=True)


def cmd_simulate(args) -> int:
    cfg = load(args.config)
    kind, traj = run_scenario(cfg)
    rows = write_trajectory(traj.records(), cfg.output.path, cfg.output.format) if cfg.output.path else 0
    support = support_radius_monitor(traj)
    energy = traj.hamiltonian if kind == "limit" else traj.energy
    summary = {
        "kind": kind,
        "steps": int(round(cfg.T / cfg.dt)),
        "records_written": rows,
        "output": cfg.output.path,
        "final_h": [float(v) for v in traj.h[-1]],
        "energy_drift": float(np.max(np.abs(energy - energy[0])) / max(1.0, abs(energy[0]))),
        "support_margin": support.min_margin,
    }
    text = "\n".join(f"{k:16s} {v}" for k, v in summary.items())
    _emit(summary, args.json, text)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.config:
        cfg = load(args.config)
        shape, params = cfg.shape, ({"a": cfg.a} if cfg.shape == "joukowski" else {})
        seed = cfg.seed
    else:
        shape, params, seed = args.shape, ({"a": args.a} if args.shape == "joukowski" else {}), args.seed
    try:
        map_ = map_from_name(shape, **params)
    except ValueError as exc:
        raise ConfigError("--a" if shape == "joukowski" else "--shape", str(exc)) from exc
    results = run_identity_suite(map_, tol=args.tol, seed=seed, threads=args.threads)
    ok = all(r.passed for r in results)
    report = {"shape": shape, **params, "passed": ok, "checks": [r.as_dict() for r in results]}
    lines = [f"{'check':32s} {'residual':>12s} {'threshold':>10s}  status"]
    lines += [f"{r.name:32s} {r.residual:12.3e} {r.threshold:10.1e}  {'PASS' if r.passed else 'FAIL'}"
              for r in results]
    _emit(report, args.json, "\n".join(lines))
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_convergence(args) -> int:
    cfg = load(args.config)
    _require(cfg, cfg.shape == "disk", "shape", "the convergence study requires shape = 'disk'")
    eps_list = cfg.epsilon_list or ((cfg.epsilon,) if cfg.epsilon is not None else None)
    _require(cfg, eps_list is not None, "epsilon_list", "missing required field")
    state, params, _ = _eps_setup(cfg, eps_list[0])
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            report = convergence_study(state, params, eps_list, cfg.T, executor=pool)
    else:
        report = convergence_study(state, params, eps_list, cfg.T)
    out = report.as_dict()
    columns = ["epsilon", "sup_error", "final_error", "energy_drift", "eps_r_max"]
    table = ["# " + " ".join(columns)]
    table += [" ".join(repr(float(r[c])) for c in columns) for r in out["rows"]]
    if cfg.output.path:
        with open(cfg.output.path, "w") as fh:
            fh.write("\n".join(table) + "\n")
    _emit(out, args.json, "\n".join(table) + f"\n# monotone: {out['monotone']}")
    return EXIT_OK


def cmd_forces(args) -> int:
    cfg = load(args.config)
    eps = cfg.epsilon if cfg.epsilon is not None else cfg.largest_epsilon
    _require(cfg, eps is not None, "epsilon", "required for a force evaluation")
    state, params, geom = _eps_setup(cfg, eps)
    solid = solid_rhs(state, geom, params)
    ft = solid.forces
    out = {"epsilon": eps, **ft.as_dict(), "accel": [*map(float, solid.dell), float(solid.dr)]}
    text = "\n".join(f"{k:18s} {v}" for k, v in out.items())
    _emit(out, args.json, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smallbody", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=1, help="worker threads for independent tasks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="run a scenario and write its trajectory")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", parents=[common], help="run the identity suite for one shape")
    p.add_argument("--config")
    p.add_argument("--shape", default="disk", choices=["disk", "joukowski"])
    p.add_argument("--a", type=float, default=0.5, help="joukowski parameter")
    p.add_argument("--tol", type=float, default=None, help="override every threshold")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("convergence", parents=[common], help="finite-size runs against the limit")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("forces", parents=[common], help="pressure-force breakdown at the initial state")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_forces)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "field": exc.field, "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    except RUNTIME_ERRORS as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
