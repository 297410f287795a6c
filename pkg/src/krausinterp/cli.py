"""Command-line entry point: ``krausinterp <experiment> [options]``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines (values parsed as JSON when possible), then explicit
flags. Each run writes one CSV (``--out``) and a JSON manifest beside it.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import adc_time_grid, run_mse_sweep, run_sqr_sweep, simulate_adc
from .channels import AdcParams, channel_from_dict, load_channel, make_adc
from .decompose import decompose_channel
from .errors import ConfigError, KrausInterpError
from .optimize import OptimizerConfig
from .scu import Observable, projector

EXPERIMENTS = ("decompose", "simulate-adc", "mse-sweep", "sqr-sweep")

DEFAULTS = {
    "seed": 0,
    "shots": 2**11,
    "gamma": 1.52e9,
    "t": None,
    "lambda_th": 1.0,
    "points": 30,
    "t_max": None,
    "kraus_file": None,
    "kraus": None,
    "method": "exact",
    "epsilon": 0.1,
    "observable": "p1",
    "epsilons": [0.1, 0.05],
    "shot_grid": [100, 1000, 10000, 100000, 1000000],
    "trials": 100,
    "dims": [2, 4, 8, 16],
    "samples": 50,
    "strategies": ["simplex", "sqp", "multistart", "random"],
    "optimizer_methods": ["simplex", "sqp"],
    "max_iters": 500,
    "shallow_iters": 25,
    "scale_factors": [0.25, 0.5, 1.0, 2.0, 4.0],
}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment line."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}", "expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS and key not in ("experiment", "out"):
            raise ConfigError(key, "unknown configuration key")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value.strip("\"'")
    return out


def load_config(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError("config", f"file not found: {p}")
    return parse_config_text(p.read_text(encoding="utf-8"), str(p))


def _csv_list(kind):
    def parse(text):
        return [kind(x) for x in text.split(",") if x.strip()]
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="krausinterp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="CSV output path (manifest goes next to it)")
    common.add_argument("--shots", type=int, help="total shots per estimate")
    common.add_argument("--gamma", type=float, help="decay rate in 1/s")
    common.add_argument("--lambda-th", dest="lambda_th", type=float)
    common.add_argument("--optimizer-methods", dest="optimizer_methods", type=_csv_list(str))
    common.add_argument("--max-iters", dest="max_iters", type=int)
    common.add_argument("--shallow-iters", dest="shallow_iters", type=int)
    common.add_argument("--scale-factors", dest="scale_factors", type=_csv_list(float))

    p = sub.add_parser("decompose", parents=[common], help="expand Kraus operators into unitaries")
    p.add_argument("--kraus-file", dest="kraus_file")
    p.add_argument("--t", type=float, help="ADC time when no Kraus file is given")
    p.add_argument("--method", choices=("exact", "approximate"))
    p.add_argument("--epsilon", type=float)

    p = sub.add_parser("simulate-adc", parents=[common], help="sampled vs exact ADC populations")
    p.add_argument("--points", type=int)
    p.add_argument("--t-max", dest="t_max", type=float)

    p = sub.add_parser("mse-sweep", parents=[common], help="estimator MSE against total shots")
    p.add_argument("--t", type=float)
    p.add_argument("--observable", help="z, x, p0, p1 or a JSON matrix of [re, im] pairs")
    p.add_argument("--epsilons", type=_csv_list(float))
    p.add_argument("--shot-grid", dest="shot_grid", type=_csv_list(int))
    p.add_argument("--trials", type=int)

    p = sub.add_parser("sqr-sweep", parents=[common], help="solution quality ratio of random spectra")
    p.add_argument("--dims", type=_csv_list(int))
    p.add_argument("--samples", type=int)
    p.add_argument("--strategies", type=_csv_list(str))
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(load_config(args.config))
    for key, value in vars(args).items():
        if key in ("config", "experiment") or value is None:
            continue
        cfg[key] = value
    cfg["experiment"] = args.experiment
    if cfg.get("out") is None:
        cfg["out"] = f"{args.experiment}.csv"
    _validate(cfg)
    return cfg


def _require(cfg, key, ok, message):
    try:
        good = ok(cfg[key])
    except (TypeError, ValueError):
        good = False
    if not good:
        raise ConfigError(key, f"{message} (got {cfg[key]!r})")


def _validate(cfg: dict) -> None:
    _require(cfg, "seed", lambda v: int(v) == v and v >= 0, "must be a non-negative integer")
    _require(cfg, "shots", lambda v: int(v) == v and v >= 1, "must be a positive integer")
    _require(cfg, "gamma", lambda v: float(v) >= 0, "must be >= 0")
    _require(cfg, "lambda_th", lambda v: 0 <= float(v) <= 1, "must lie in [0, 1]")
    _require(cfg, "points", lambda v: int(v) == v and v >= 1, "must be a positive integer")
    _require(cfg, "trials", lambda v: int(v) == v and v >= 30, "must be an integer >= 30")
    _require(cfg, "samples", lambda v: int(v) == v and v >= 1, "must be a positive integer")
    _require(cfg, "epsilon", lambda v: float(v) > 0, "must be positive")
    _require(cfg, "epsilons", lambda v: len(v) > 0 and all(float(e) > 0 for e in v), "must be positive numbers")
    _require(cfg, "shot_grid", lambda v: len(v) > 0 and all(int(s) >= 1 for s in v), "must be positive integers")
    _require(cfg, "dims", lambda v: len(v) > 0 and all(int(d) >= 1 for d in v), "must be positive integers")
    if cfg["kraus_file"] is not None and not Path(cfg["kraus_file"]).is_file():
        raise ConfigError("kraus_file", f"file not found: {cfg['kraus_file']}")
    try:
        optimizer_config(cfg)
    except KrausInterpError as exc:
        raise ConfigError("optimizer", str(exc)) from exc


def optimizer_config(cfg: dict) -> OptimizerConfig:
    return OptimizerConfig(
        methods=tuple(cfg["optimizer_methods"]),
        max_iters=int(cfg["max_iters"]),
        shallow_iters=int(cfg["shallow_iters"]),
        scale_factors=tuple(float(r) for r in cfg["scale_factors"]),
        seed=int(cfg["seed"]),
    )


def parse_observable(spec, dim: int = 2) -> Observable:
    named = {
        "z": np.diag([1.0, -1.0]),
        "x": np.array([[0.0, 1.0], [1.0, 0.0]]),
    }
    if isinstance(spec, str):
        key = spec.lower()
        if key in named:
            return Observable.from_matrix(named[key])
        if key.startswith("p") and key[1:].isdigit():
            return projector(int(key[1:]), dim)
        raise ConfigError("observable", f"unknown observable {spec!r}")
    arr = np.asarray(spec, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ConfigError("observable", "matrix must be rows of [re, im] pairs")
    return Observable.from_matrix(arr[..., 0] + 1j * arr[..., 1])


def _channel(cfg: dict):
    if cfg["kraus_file"] is not None:
        return load_channel(cfg["kraus_file"])
    if cfg["kraus"] is not None:
        return channel_from_dict({"operators": cfg["kraus"]})
    t = cfg["t"] if cfg["t"] is not None else math.log(2) / float(cfg["gamma"])
    return make_adc(AdcParams(float(cfg["gamma"]), float(t), float(cfg["lambda_th"])))


# -- experiments ---------------------------------------------------------------

def _decompose_rows(cfg):
    channel = _channel(cfg)
    decs = decompose_channel(channel, cfg["method"], optimizer_config(cfg),
                             **({"epsilon": float(cfg["epsilon"])} if cfg["method"] == "approximate" else {}))
    rows = []
    for k, dec in enumerate(decs):
        for part in dec.parts:
            for j, (c, mu) in enumerate(zip(part.coefficients, part.mus)):
                rows.append({
                    "kraus_index": k, "kind": part.kind, "term": j,
                    "c_re": float(c.real), "c_im": float(c.imag), "mu": float(mu),
                    "generator_l1": part.l1, "sqr": part.sqr,
                })
    summary = {
        "channel": channel.label,
        "terms": len(rows),
        "l1_total": float(sum(d.l1 for d in decs)),
        "max_residual": float(max(d.residual() for d in decs)),
    }
    return rows, summary


def _simulate_rows(cfg):
    gamma = float(cfg["gamma"])
    if gamma <= 0:
        raise ConfigError("gamma", "simulate-adc needs gamma > 0")
    times = adc_time_grid(gamma, int(cfg["points"]))
    if cfg["t_max"] is not None:
        times = np.linspace(0.0, float(cfg["t_max"]), int(cfg["points"]))
    rows = simulate_adc(gamma, float(cfg["lambda_th"]), times, int(cfg["shots"]), int(cfg["seed"]),
                        config=optimizer_config(cfg))
    dev = [abs(r["p1_est"] - r["p1_exact"]) / r["predicted_sigma"] for r in rows if r["predicted_sigma"] > 0]
    summary = {"points": len(rows), "max_abs_z_score": float(max(dev)) if dev else 0.0,
               "max_L": float(max(r["L"] for r in rows))}
    return rows, summary


def _mse_rows(cfg):
    from .analysis import ADC_RHO0

    channel = _channel(cfg)
    obs = parse_observable(cfg["observable"], channel.dim)
    rho0 = ADC_RHO0 if channel.dim == 2 else np.eye(channel.dim) / channel.dim
    rows = run_mse_sweep(channel, rho0, obs, ("exact", "approximate"), [float(e) for e in cfg["epsilons"]],
                         [int(s) for s in cfg["shot_grid"]], int(cfg["trials"]), int(cfg["seed"]),
                         optimizer_config(cfg))
    return rows, {"rows": len(rows)}


def _sqr_rows(cfg):
    rows = run_sqr_sweep([int(d) for d in cfg["dims"]], int(cfg["samples"]), tuple(cfg["strategies"]),
                         int(cfg["seed"]), optimizer_config(cfg))
    return rows, {"rows": len(rows)}


RUNNERS = {
    "decompose": _decompose_rows,
    "simulate-adc": _simulate_rows,
    "mse-sweep": _mse_rows,
    "sqr-sweep": _sqr_rows,
}


# -- output ------------------------------------------------------------------

def config_hash(cfg: dict) -> str:
    payload = {k: v for k, v in cfg.items() if k != "out"}
    return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()[:16]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value) + 0.0, ".17g")
    return str(value)


def write_csv(path, rows: list[dict], meta: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = list(rows[0]) if rows else []
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in header])


def manifest_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".manifest.json")


def run(cfg: dict) -> int:
    """Run one resolved experiment configuration and write its outputs."""
    rows, summary = RUNNERS[cfg["experiment"]](cfg)
    meta = {"experiment": cfg["experiment"], "seed": cfg["seed"], "version": __version__,
            "config_hash": config_hash(cfg)}
    write_csv(cfg["out"], rows, meta)
    manifest = {**meta, "config": cfg, "outputs": [str(cfg["out"])], "summary": summary}
    manifest_path(cfg["out"]).write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return run(cfg)
    except ConfigError as exc:
        print(f"krausinterp: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (KrausInterpError, KeyError, OSError) as exc:
        print(f"krausinterp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
