"""Command-line front end: data ingestion, runs, theory reports, Monte Carlo.

Verbs:
    synth       write a synthetic regression CSV with controlled conditioning
    run         execute one quantized coordinate-descent run, dump trajectory
    theory      closed-form convergence report for a problem instance
    montecarlo  replicated runs checking the convergence guarantee empirically

Each verb accepts --config FILE (JSON whose keys mirror the flag names);
explicit flags win over config values. Relative output paths are placed
under $QRCD_OUTPUT_DIR when that variable is set. Exit codes: 2 for
configuration errors, 3 for data errors, 4 for numerical aborts.
"""

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bounds import DegenerateContraction, InvalidConfidence, TheoryInputs, iteration_bound
from .data import (
    DataError,
    Dataset,
    load_csv,
    normalize,
    synthesize_regression,
    with_intercept,
    write_csv,
)
from .engine import RunConfig, run
from .montecarlo import estimate, theorem_check
from .objective import build_least_squares
from .quantizer import LevelOverflow

__all__ = ["main"]

_OUTPUT_DIR_ENV = "QRCD_OUTPUT_DIR"


class ConfigError(Exception):
    """Invalid flag/config combination (exit code 2)."""


class NumericAbort(Exception):
    """Run aborted on non-finite values (exit code 4)."""


# --------------------------------------------------------------------------
# argument handling

def _add_config_flag(parser):
    parser.add_argument("--config", default=None, metavar="FILE",
                        help="JSON file whose keys mirror the flag names")


def _add_data_source(parser):
    parser.add_argument("--csv", default=None, metavar="PATH", help="input dataset")
    parser.add_argument("--target-column", default=None,
                        help="target column name (default: last header)")
    parser.add_argument("--synthetic", action="store_true", default=None,
                        help="use the built-in synthetic regression source")
    parser.add_argument("--n", type=int, default=None, help="synthetic rows")
    parser.add_argument("--d", type=int, default=None,
                        help="synthetic coordinates incl. intercept")
    parser.add_argument("--condition", type=float, default=None,
                        help="synthetic condition number target")
    parser.add_argument("--data-seed", type=int, default=None, help="synthetic data seed")
    parser.add_argument("--normalize", action="store_true", default=None,
                        help="normalize all columns to zero mean, unit sample std")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qrcd",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="write a synthetic regression CSV")
    _add_config_flag(p_synth)
    p_synth.add_argument("--n", type=int, default=None)
    p_synth.add_argument("--d", type=int, default=None,
                         help="coordinates after intercept augmentation (>= 2)")
    p_synth.add_argument("--condition", type=float, default=None)
    p_synth.add_argument("--seed", type=int, default=None)
    p_synth.add_argument("--out", default=None)
    p_synth.add_argument("--meta", default=None)
    p_synth.set_defaults(func=cmd_synth)

    p_run = sub.add_parser("run", help="one quantized coordinate-descent run")
    _add_config_flag(p_run)
    _add_data_source(p_run)
    p_run.add_argument("--step-t", type=float, default=None)
    p_run.add_argument("--delta", type=float, default=None)
    p_run.add_argument("--iterations", type=int, default=None,
                       help="update steps (default 200000)")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--x0", default=None, help="'ones', 'zeros', or comma list")
    p_run.add_argument("--probe", default=None, help="'ones', 'none', or comma list")
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--meta", default=None)
    p_run.set_defaults(func=cmd_run)

    p_theory = sub.add_parser("theory", help="closed-form convergence report")
    _add_config_flag(p_theory)
    _add_data_source(p_theory)
    p_theory.add_argument("--L", type=float, default=None, help="explicit smoothness constant")
    p_theory.add_argument("--m", type=float, default=None,
                          help="explicit strong convexity constant")
    p_theory.add_argument("--dim", type=int, default=None, help="explicit dimension")
    p_theory.add_argument("--r0", type=float, default=None,
                          help="explicit initial squared residual")
    p_theory.add_argument("--epsilon", type=float, default=None)
    p_theory.add_argument("--rho", type=float, default=None)
    p_theory.add_argument("--x0", default=None)
    p_theory.add_argument("--out", default=None)
    p_theory.set_defaults(func=cmd_theory)

    p_mc = sub.add_parser("montecarlo", help="replicated empirical guarantee check")
    _add_config_flag(p_mc)
    _add_data_source(p_mc)
    p_mc.add_argument("--replications", type=int, default=None)
    p_mc.add_argument("--epsilon", type=float, default=None)
    p_mc.add_argument("--rho", type=float, default=None)
    p_mc.add_argument("--step-t", type=float, default=None,
                      help="default: optimal step for the instance")
    p_mc.add_argument("--delta", type=float, default=None,
                      help="default: the sufficient resolution bound")
    p_mc.add_argument("--iterations-k", type=int, default=None,
                      help="default: the quantized iteration bound")
    p_mc.add_argument("--seed", type=int, default=None)
    p_mc.add_argument("--x0", default=None)
    p_mc.add_argument("--out", default=None)
    p_mc.add_argument("--series", default=None,
                      help="CSV of per-iteration mean residuals")
    p_mc.set_defaults(func=cmd_montecarlo)
    return parser


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the JSON config file; flags take precedence."""
    if getattr(args, "config", None) is None:
        return args
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        values = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(values, dict):
        raise ConfigError("config file must hold a JSON object")
    known = {k for k in vars(args) if k not in ("command", "func", "config")}
    for key, value in values.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise ConfigError(f"unknown config key {key!r}")
        if getattr(args, dest) is None:
            setattr(args, dest, value)
    return args


def _require(args, names):
    for name in names:
        if getattr(args, name) is None:
            flag = "--" + name.replace("_", "-")
            raise ConfigError(f"missing required option {flag}")


def _out_path(value) -> Path:
    path = Path(value)
    base = os.environ.get(_OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _parse_vector(spec, dim: int, what: str) -> np.ndarray:
    if spec is None or spec == "ones":
        return np.ones(dim)
    if spec == "zeros":
        return np.zeros(dim)
    if isinstance(spec, (list, tuple)):
        values = [float(v) for v in spec]
    else:
        try:
            values = [float(tok) for tok in str(spec).split(",") if tok.strip() != ""]
        except ValueError as exc:
            raise ConfigError(f"cannot parse {what} specification {spec!r}") from exc
    if len(values) != dim:
        raise ConfigError(f"{what} has {len(values)} entries, expected {dim}")
    return np.array(values)


def _resolve_dataset(args) -> tuple[Dataset, dict]:
    use_csv = args.csv is not None
    use_synth = bool(args.synthetic)
    if use_csv == use_synth:
        raise ConfigError("exactly one data source required: --csv or --synthetic")
    if use_csv:
        ds = load_csv(args.csv, args.target_column)
        source = {"kind": "csv", "path": str(args.csv), "target_column": ds.target_name}
    else:
        _require(args, ["n", "d", "condition", "data_seed"])
        if args.d < 2:
            raise ConfigError("synthetic source needs --d >= 2")
        ds, x_true = synthesize_regression(args.n, args.d, args.condition, args.data_seed)
        source = {
            "kind": "synthetic",
            "n": args.n,
            "d": args.d,
            "condition": args.condition,
            "data_seed": args.data_seed,
            "true_coefficients": [float(v) for v in x_true],
        }
    if args.normalize:
        ds = normalize(ds)
    source["normalized"] = bool(args.normalize)
    return ds, source


def _build_objective(args):
    ds, source = _resolve_dataset(args)
    design = with_intercept(ds)
    obj = build_least_squares(design, ds.targets)
    return ds, source, obj


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _fmt(value) -> str:
    return format(float(value), ".17g")


# --------------------------------------------------------------------------
# commands

def cmd_synth(args) -> int:
    _require(args, ["n", "d", "condition", "seed", "out"])
    if args.d < 2:
        raise ConfigError("synth needs --d >= 2 (intercept plus at least one feature)")
    if args.condition < 1.0:
        raise ConfigError("--condition must be >= 1")
    ds, x_true = synthesize_regression(args.n, args.d, args.condition, args.seed)
    out = _out_path(args.out)
    write_csv(ds, out)
    obj = build_least_squares(with_intercept(ds), ds.targets)
    meta_path = _out_path(args.meta) if args.meta else out.with_suffix(".meta.json")
    _write_json(meta_path, {
        "n": args.n,
        "d": args.d,
        "condition_target": args.condition,
        "seed": args.seed,
        "true_coefficients": [float(v) for v in x_true],
        "achieved_L": obj.lipschitz_L,
        "achieved_m": obj.strong_convexity_m,
        "achieved_condition": obj.condition_g,
        "csv": str(out),
    })
    return 0


def cmd_run(args) -> int:
    _require(args, ["step_t", "delta", "seed", "out"])
    if args.iterations is None:
        args.iterations = 200_000
    if args.iterations < 0:
        raise ConfigError("--iterations must be >= 0")
    ds, source, obj = _build_objective(args)
    dim = obj.dimension
    x0 = _parse_vector(args.x0, dim, "x0")
    probe = None if args.probe == "none" else _parse_vector(args.probe, dim, "probe")
    stats = ds.normalization_stats
    target_stats = stats.get(ds.target_name) if stats else None

    out = _out_path(args.out)
    meta_path = _out_path(args.meta) if args.meta else out.with_suffix(".meta.json")
    header = ["iter", "coord", "raw_partial", "q_partial", "noise",
              "residual_sq", "prediction", "prediction_denorm"]

    diff0 = x0 - obj.minimizer_x_star
    meta = {
        "config": {
            "step_t": args.step_t,
            "delta": args.delta,
            "iterations": args.iterations,
            "seed": args.seed,
            "x0": [float(v) for v in x0],
            "probe": None if probe is None else [float(v) for v in probe],
        },
        "data_source": source,
        "n": obj.n_observations,
        "d": dim,
        "L": obj.lipschitz_L,
        "m": obj.strong_convexity_m,
        "g": obj.condition_g,
        "x_star": [float(v) for v in obj.minimizer_x_star],
        "normalization_stats": stats,
        "normalization_divisor": "sample (n-1)" if stats else None,
        "initial_residual_sq": float(diff0 @ diff0),
    }

    if args.iterations == 0:
        with open(out, "w", newline="", encoding="utf-8") as handle:
            csv.writer(handle).writerow(header)
        meta["termination_status"] = "completed"
        meta["iterations_run"] = 0
        _write_json(meta_path, meta)
        return 0

    cfg = RunConfig(step_t=args.step_t, delta=args.delta, iterations_T=args.iterations,
                    seed=args.seed, x0=x0, probe_input=probe)
    status = "completed"
    records = []
    try:
        trajectory = run(obj, cfg)
        records = trajectory.records
        if trajectory.diverged:
            status = "nonfinite"
    except LevelOverflow:
        status = "level_overflow"

    with open(out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for rec in records:
            if rec.probe_prediction is None:
                pred = denorm = ""
            else:
                pred = _fmt(rec.probe_prediction)
                if target_stats:
                    mean_y, std_y = target_stats
                    denorm = _fmt(rec.probe_prediction * std_y + mean_y)
                else:
                    denorm = pred
            writer.writerow([
                rec.iter_index,
                rec.selected_coordinate,
                _fmt(rec.raw_partial),
                _fmt(rec.quantized_partial),
                _fmt(rec.noise_value),
                _fmt(rec.residual_sq),
                pred,
                denorm,
            ])
    meta["termination_status"] = status
    meta["iterations_run"] = len(records)
    _write_json(meta_path, meta)
    if status != "completed":
        raise NumericAbort(f"{status} after {len(records)} iterations (outputs written)")
    return 0


def cmd_theory(args) -> int:
    _require(args, ["out"])
    explicit = [args.L, args.m, args.dim, args.r0]
    epsilon = 0.01 if args.epsilon is None else args.epsilon
    rho = 0.1 if args.rho is None else args.rho

    if any(v is not None for v in explicit):
        if any(v is None for v in explicit):
            raise ConfigError("explicit mode needs all of --L --m --dim --r0")
        L, m, dim, r0 = args.L, args.m, args.dim, args.r0
        source = {"kind": "explicit"}
    else:
        _, source, obj = _build_objective(args)
        L, m, dim = obj.lipschitz_L, obj.strong_convexity_m, obj.dimension
        x0 = _parse_vector(args.x0, dim, "x0")
        diff = x0 - obj.minimizer_x_star
        r0 = float(diff @ diff)

    try:
        inputs = TheoryInputs(L=L, m=m, d=dim, epsilon=epsilon, rho=rho,
                              initial_residual_sq=r0)
    except InvalidConfidence as exc:
        raise ConfigError(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    payload = {
        "inputs": {"L": L, "m": m, "d": dim, "epsilon": epsilon, "rho": rho,
                   "initial_residual_sq": r0},
        "data_source": source,
    }
    try:
        report = iteration_bound(inputs)
        payload.update({
            "t_opt": report.t_opt,
            "c_min": report.c_min,
            "delta_max": report.delta_max,
            "delta_max_unbounded": False,
            "k1": report.k1,
            "k2": report.k2,
            "k_q": report.k_q,
            "k_free": report.k_free,
            "k1_raw": report.k1_raw,
            "k2_raw": report.k2_raw,
            "k_free_raw": report.k_free_raw,
            "markov_threshold": report.markov_threshold,
        })
    except DegenerateContraction:
        g = L / m
        payload.update({
            "t_opt": 1.0 / (g * L * dim),
            "c_min": 0.0,
            "delta_max": None,
            "delta_max_unbounded": True,
            "note": "DegenerateContraction: C_min = 0, any finite resolution suffices",
            "k1": None, "k2": None, "k_q": None, "k_free": None,
            "markov_threshold": epsilon * rho,
        })
    _write_json(_out_path(args.out), payload)
    return 0


def cmd_montecarlo(args) -> int:
    _require(args, ["replications", "seed", "out"])
    if args.replications < 30:
        raise ConfigError("--replications must be at least 30")
    epsilon = 0.01 if args.epsilon is None else args.epsilon
    rho = 0.1 if args.rho is None else args.rho
    if not 0.0 < rho < 1.0:
        raise ConfigError(f"rho must be in (0, 1), got {rho}")
    if epsilon <= 0.0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")

    _, source, obj = _build_objective(args)
    dim = obj.dimension
    x0 = _parse_vector(args.x0, dim, "x0")
    diff = x0 - obj.minimizer_x_star
    r0 = float(diff @ diff)

    inputs = TheoryInputs(L=obj.lipschitz_L, m=obj.strong_convexity_m, d=dim,
                          epsilon=epsilon, rho=rho, initial_residual_sq=r0)
    report = iteration_bound(inputs)
    step_t = report.t_opt if args.step_t is None else args.step_t
    delta = report.delta_max if args.delta is None else args.delta
    k = report.k_q if args.iterations_k is None else args.iterations_k
    if k < 0:
        raise ConfigError("--iterations-k must be >= 0")

    cfg = RunConfig(step_t=step_t, delta=delta, iterations_T=max(k, 1),
                    seed=args.seed, x0=x0)
    summary = estimate(obj, cfg, args.replications, epsilon, rho, k)
    checks = theorem_check(summary)

    out = _out_path(args.out)
    series_path = _out_path(args.series) if args.series \
        else out.with_suffix(".series.csv")
    with open(series_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "mean_residual_sq", "std_error"])
        for i, (mean, se) in enumerate(zip(summary.per_iteration_mean_residuals,
                                           summary.per_iteration_std_errors)):
            writer.writerow([i, _fmt(mean), _fmt(se)])

    _write_json(out, {
        "config": {
            "replications": args.replications,
            "epsilon": epsilon,
            "rho": rho,
            "step_t": step_t,
            "delta": delta,
            "iterations_k": k,
            "seed": args.seed,
            "x0": [float(v) for v in x0],
        },
        "data_source": source,
        "theory": {
            "t_opt": report.t_opt,
            "c_min": report.c_min,
            "delta_max": report.delta_max,
            "k_q": report.k_q,
            "k_free": report.k_free,
            "markov_threshold": report.markov_threshold,
        },
        "replications": summary.replications,
        "iterations_used": summary.iterations_used,
        "mean_residual_sq": summary.mean_residual_sq,
        "success_fraction": summary.success_fraction,
        "std_error_mean": summary.std_error_mean,
        "aborted_runs": summary.aborted_runs,
        "checks": checks,
        "series_csv": str(series_path),
    })
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(args)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: ConfigError: {exc}", file=sys.stderr)
        return 2
    except InvalidConfidence as exc:
        print(f"error: InvalidConfidence: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except NumericAbort as exc:
        print(f"error: NumericAbort: {exc}", file=sys.stderr)
        return 4
    except LevelOverflow as exc:
        print(f"error: LevelOverflow: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
