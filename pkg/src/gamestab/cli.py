"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 analysis precondition failure
(e.g. the point is not a fixed point), 4 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import presets
from .classify import classify_equilibrium
from .dynamics import optimal_tau, simulate_continuous, simulate_discrete, tau_sweep
from .errors import ConvergenceError, EvaluationError, GameStabError, NotAFixedPointError
from .game import LearningConfig, assemble_jacobian, find_fixed_point
from .io import (
    GameFileError,
    csv_text,
    json_text,
    load_game_file,
    qnr_csv,
    sha256,
    sweep_csv,
    trajectory_csv,
)
from .qnr import containment_check, sample_qnr

OUT_ENV = "GAMESTAB_OUT"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_NUMERICAL = 4


class InputError(GameStabError):
    pass


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"--param expects key=value, got {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise InputError(f"--param {key} needs a number, got {value!r}") from None
    return params


def _parse_vector(text: str, n: int, name: str) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise InputError(f"{name} must be comma-separated numbers") from None
    if v.size != n:
        raise InputError(f"{name} needs {n} entries, got {v.size}")
    return v


def _load_game(args):
    params = _parse_params(args.param)
    if bool(args.preset) == bool(args.game):
        raise InputError("give exactly one of --preset or --game")
    if args.preset:
        try:
            return presets.build(args.preset, params), args.preset, params
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if params:
        raise InputError("--param only applies to presets")
    return load_game_file(args.game), str(args.game), params


def _emit(args, game_id, params, primary: tuple, extra: tuple | None = None, options=None):
    """Write ``primary`` (and ``extra``) to --out with a manifest, or primary to stdout."""
    out = args.out or os.environ.get(OUT_ENV)
    if not out:
        sys.stdout.write(primary[1])
        return
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    artifacts = {}
    for item in (primary, extra):
        if item is None:
            continue
        name, text = item
        (outdir / name).write_text(text)
        artifacts[name] = sha256(text)
    manifest = {
        "command": args.command,
        "input": game_id,
        "params": params,
        "seed": getattr(args, "seed", None),
        "options": options or {},
        "out": str(outdir),
        "artifacts": artifacts,
    }
    (outdir / "manifest.json").write_text(json_text(manifest))


def cmd_analyze(args) -> int:
    game, game_id, params = _load_game(args)
    n = game.d1 + game.d2
    if args.point:
        x = _parse_vector(args.point, n, "--point")
    else:
        x = find_fixed_point(game, np.zeros(n), tol=min(args.tol, 1e-10)).vector
    config = LearningConfig(args.gamma1, args.tau)
    report = classify_equilibrium(game, x, config, tol=args.tol, seed=args.seed)
    options = {"point": [float(v) for v in x], "gamma1": args.gamma1, "tau": args.tau,
               "tol": args.tol}
    _emit(args, game_id, params, ("report.json", json_text(report.to_dict())), options=options)
    return EXIT_OK


def cmd_qnr(args) -> int:
    game, game_id, params = _load_game(args)
    if args.n < 1:
        raise InputError("-n must be at least 1")
    J = assemble_jacobian(game)
    est = sample_qnr(J, args.n, args.seed)
    contain = containment_check(J, est, args.tol)
    summary = est.to_dict()
    summary["containment"] = {
        "tol": args.tol,
        "eigenvalues": [[float(z.real), float(z.imag)] for z in contain.eigenvalues],
        "distances": [float(v) for v in contain.distances],
        "under_sampled": [bool(v) for v in contain.under_sampled],
    }
    _emit(args, game_id, params, ("qnr.csv", qnr_csv(est)), ("qnr.json", json_text(summary)),
          options={"n": args.n, "tol": args.tol})
    return EXIT_OK


def cmd_simulate(args) -> int:
    game, game_id, params = _load_game(args)
    n = game.d1 + game.d2
    x0 = np.ones(n) if args.x0 is None else _parse_vector(args.x0, n, "--x0")
    if args.steps < 0:
        raise InputError("--steps must be nonnegative")
    if args.mode == "discrete":
        config = LearningConfig(args.gamma1, args.tau)
        rec = simulate_discrete(game, config, x0, max_steps=args.steps, conv_tol=args.conv_tol)
    else:
        LearningConfig(1.0, args.tau)
        rec = simulate_continuous(game, args.tau, x0, t_end=args.t_end, dt=args.dt,
                                  conv_tol=args.conv_tol)
    summary = {
        "mode": args.mode,
        "terminated": rec.terminated,
        "steps": rec.steps,
        # non-finite norms (escaped runs) are reported as null
        "final_norm": float(rec.norms[-1]) if np.isfinite(rec.norms[-1]) else None,
    }
    options = {"mode": args.mode, "gamma1": args.gamma1, "tau": args.tau,
               "x0": [float(v) for v in x0], "steps": args.steps, "conv_tol": args.conv_tol,
               "dt": args.dt, "t_end": args.t_end}
    _emit(args, game_id, params, ("trajectory.csv", trajectory_csv(rec)),
          ("trajectory.json", json_text(summary)), options=options)
    return EXIT_OK


def cmd_sweep(args) -> int:
    game, game_id, params = _load_game(args)
    if not 0 < args.tau_lo < args.tau_hi:
        raise InputError("need 0 < --tau-lo < --tau-hi")
    if args.n < 2:
        raise InputError("-n must be at least 2")
    J = assemble_jacobian(game)
    taus = np.logspace(np.log10(args.tau_lo), np.log10(args.tau_hi), args.n)
    result = tau_sweep(J, args.gamma1, taus)
    best_tau, best_rho = optimal_tau(J, args.gamma1, args.tau_lo, args.tau_hi, args.n)
    summary = {
        "best_tau": best_tau,
        "best_rho": best_rho,
        "grid_best_tau": result.best_tau,
        "grid_best_rho": result.best_rho,
        "rho_at_tau_lo": float(result.rho_discrete[0]),
        "rho_at_tau_hi": float(result.rho_discrete[-1]),
    }
    _emit(args, game_id, params, ("sweep.csv", sweep_csv(result)),
          ("sweep.json", json_text(summary)),
          options={"gamma1": args.gamma1, "tau_lo": args.tau_lo, "tau_hi": args.tau_hi,
                   "n": args.n})
    return EXIT_OK


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gamestab",
        description="Stability analysis of gradient play in two-player continuous games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("game")
    src.add_argument("--preset", choices=presets.names())
    src.add_argument("--game", type=Path, help="JSON game definition file")
    src.add_argument("--param", action="append", metavar="K=V",
                     help="preset parameter (b, p or eps); repeatable")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV}, else stdout)")

    p = sub.add_parser("analyze", parents=[common], help="classify a fixed point")
    p.add_argument("--point", help="comma-separated fixed point (default: solved from 0)")
    p.add_argument("--gamma1", type=_positive, default=1e-3)
    p.add_argument("--tau", type=_positive, default=1.0)
    p.add_argument("--tol", type=float, default=1e-8, help="fixed-point residual tolerance")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("qnr", parents=[common], help="sample W(J) and W^2(J)")
    p.add_argument("-n", type=int, default=5000, help="number of (v, w) draws")
    p.add_argument("--tol", type=float, default=0.05, help="containment diagnostic tolerance")
    p.set_defaults(func=cmd_qnr)

    p = sub.add_parser("simulate", parents=[common], help="simulate gradient play")
    p.add_argument("--mode", choices=("discrete", "continuous"), default="discrete")
    p.add_argument("--gamma1", type=_positive, default=1e-3)
    p.add_argument("--tau", type=_positive, default=1.0)
    p.add_argument("--x0", help="comma-separated initial point (default: ones)")
    p.add_argument("--steps", type=int, default=100_000, help="maximum discrete steps")
    p.add_argument("--dt", type=_positive, default=1e-2)
    p.add_argument("--t-end", type=float, default=50.0)
    p.add_argument("--conv-tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="sweep the learning-rate ratio")
    p.add_argument("--gamma1", type=_positive, default=1e-3)
    p.add_argument("--tau-lo", type=float, default=1.0)
    p.add_argument("--tau-hi", type=float, default=100.0)
    p.add_argument("-n", type=int, default=200)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotAFixedPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InputError, GameFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, EvaluationError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
