"""Command-line front end: optimize schemes, sweep SNR grids, validate by simulation.

Three subcommands write plot-ready artifacts and echo a short summary:

    pilotopt optimize --alpha 0.99 --snr-db 0 --method bpsk --out run1
    pilotopt sweep    --alpha 0.99 --snr-grid=-10:0:0.5 --format csv
    pilotopt validate --alpha 0.90 --snr-db 0 --samples 1000000 --seed 7

Exit codes: 0 success, 1 a validation band failed, 2 configuration error,
3 output could not be written, 4 the optimizer missed its tolerance (the
report is still written).  Identical configuration plus seed always produces
byte-identical files.  --out is a path prefix; when omitted, files land in
$PILOTOPT_OUT_DIR (default: current directory) under the subcommand's name.
A JSON file given via --config supplies any of the long-flag values (keys
use underscores); explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .bpsk import bpsk_frame_rate, bpsk_mi
from .channel import ChannelParams, TrainingScheme
from .energy import min_bit_energy, sweep_snr
from .gaussian import gaussian_frame_rate
from .montecarlo import mc_bpsk_mi, mc_frame_rate, validate_estimator
from .optimize import default_t_max, optimize_scheme

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NONCONVERGED = 4

OUT_DIR_ENV = "PILOTOPT_OUT_DIR"

_METHODS = ("bpsk", "gaussian", "jensen")


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    """One fully resolved run: which command, on which channel, written where."""

    command: str
    alpha: float
    snr_db: object = None
    sigma_h_sq: object = None
    sigma_n_sq: object = None
    power: object = None
    method: str = "bpsk"
    t_min: int = 2
    t_max: object = None
    snr_grid: object = None
    seed: int = 0
    samples: int = 10**6
    out_format: str = "csv"
    out: object = None

    def resolved_t_max(self) -> int:
        return int(self.t_max) if self.t_max is not None else default_t_max(self.alpha)

    def channel_params(self) -> ChannelParams:
        if self.snr_db is not None:
            return ChannelParams(self.alpha, 1.0, 1.0, 10.0 ** (self.snr_db / 10.0))
        return ChannelParams(self.alpha, self.sigma_h_sq, self.sigma_n_sq, self.power)

    def sweep_template(self) -> ChannelParams:
        return ChannelParams(
            self.alpha,
            self.sigma_h_sq if self.sigma_h_sq is not None else 1.0,
            self.sigma_n_sq if self.sigma_n_sq is not None else 1.0,
            0.0,  # replaced point by point from the grid
        )


def _parse_grid(value) -> list:
    """Grid spec 'a:b:step' in dB, endpoints inclusive; lists pass through."""
    if isinstance(value, (list, tuple)):
        grid = [float(v) for v in value]
    else:
        parts = str(value).split(":")
        if len(parts) != 3:
            raise ConfigError(f"snr grid must look like 'a:b:step', got {value!r}")
        try:
            lo, hi, step = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"snr grid has non-numeric parts: {value!r}") from None
        if step <= 0.0:
            raise ConfigError("snr grid step must be positive")
        if hi < lo:
            raise ConfigError("snr grid must ascend (a <= b)")
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        grid = [lo + i * step for i in range(n)]
    if not grid:
        raise ConfigError("snr grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("snr grid must be strictly increasing")
    return grid


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pilotopt",
        description="Rates and pilot/data power optimization for pilot-assisted "
        "transmission over Gauss-Markov Rayleigh fading.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("optimize", "solve the joint period and power allocation problem"),
        ("sweep", "re-optimize along an SNR grid and report bit energies"),
        ("validate", "compare analytic values against Monte Carlo simulation"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="JSON file with defaults for any flag below")
        p.add_argument("--alpha", type=float, help="fading correlation in [0, 1]")
        p.add_argument("--snr-db", type=float, help="SNR in dB (unit variances implied)")
        p.add_argument("--sigma-h-sq", type=float, help="fading variance, linear")
        p.add_argument("--sigma-n-sq", type=float, help="noise variance, linear")
        p.add_argument("--power", type=float, help="average power budget, linear")
        p.add_argument("--method", choices=_METHODS, help="objective (default bpsk)")
        p.add_argument("--t-min", type=int, help="smallest period scanned (default 2)")
        p.add_argument("--t-max", type=int, help="largest period scanned")
        p.add_argument("--seed", type=int, help="RNG seed (default 0)")
        p.add_argument("--samples", type=int, help="Monte Carlo sample count")
        p.add_argument("--format", choices=("csv", "json"), help="output format")
        p.add_argument("--out", help="output path prefix")
        if name == "sweep":
            p.add_argument("--snr-grid",
                           help="dB grid as 'a:b:step', endpoints inclusive; "
                           "write --snr-grid=-10:0:0.5 when it starts below zero")
    return parser


def _load_config_file(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def _resolve(args: argparse.Namespace) -> ScenarioConfig:
    file_cfg = _load_config_file(args.config) if args.config else {}

    def pick(key, default=None):
        v = getattr(args, key, None)
        if v is not None:
            return v
        return file_cfg.get(key, default)

    alpha = pick("alpha")
    if alpha is None:
        raise ConfigError("alpha is required (flag --alpha or config file)")
    cfg = ScenarioConfig(
        command=args.command,
        alpha=float(alpha),
        snr_db=pick("snr_db"),
        sigma_h_sq=pick("sigma_h_sq"),
        sigma_n_sq=pick("sigma_n_sq"),
        power=pick("power"),
        method=pick("method", "bpsk"),
        t_min=int(pick("t_min", 2)),
        t_max=pick("t_max"),
        snr_grid=pick("snr_grid"),
        seed=int(pick("seed", 0)),
        samples=int(pick("samples", 10**6)),
        out_format=pick("format", "csv"),
        out=pick("out"),
    )
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: ScenarioConfig):
    if cfg.method not in _METHODS:
        raise ConfigError(f"method must be one of {_METHODS}, got {cfg.method!r}")
    if cfg.out_format not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.out_format!r}")
    triple = (cfg.sigma_h_sq, cfg.sigma_n_sq, cfg.power)
    have_triple = all(v is not None for v in triple)
    have_partial = any(v is not None for v in triple)
    if cfg.command == "sweep":
        if cfg.snr_db is not None or cfg.power is not None:
            raise ConfigError("sweep takes power from --snr-grid; drop --snr-db/--power")
        if cfg.snr_grid is None:
            raise ConfigError("sweep requires --snr-grid")
        cfg.snr_grid = _parse_grid(cfg.snr_grid)
    else:
        if cfg.snr_db is not None and have_partial:
            raise ConfigError("give either --snr-db or the explicit "
                              "--sigma-h-sq/--sigma-n-sq/--power triple, not both")
        if cfg.snr_db is None and not have_triple:
            raise ConfigError("give either --snr-db or the full "
                              "--sigma-h-sq/--sigma-n-sq/--power triple")
    if cfg.samples < 10**3:
        raise ConfigError("samples must be at least 1000")
    t_max = cfg.resolved_t_max()
    if not 2 <= cfg.t_min <= t_max:
        raise ConfigError(f"need 2 <= t_min <= t_max, got [{cfg.t_min}, {t_max}]")
    try:
        cfg.channel_params() if cfg.command != "sweep" else cfg.sweep_template()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _out_prefix(cfg: ScenarioConfig) -> str:
    if cfg.out:
        return str(cfg.out)
    return os.path.join(os.environ.get(OUT_DIR_ENV, "."), cfg.command)


def _fmt(x) -> str:
    return f"{float(x):.17e}"


def _write_csv(path, header, rows):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path, payload):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _config_echo(cfg: ScenarioConfig) -> dict:
    echo = asdict(cfg)
    return {k: v for k, v in echo.items() if v is not None}


def cmd_optimize(cfg: ScenarioConfig) -> int:
    params = cfg.channel_params()
    result = optimize_scheme(params, cfg.method, cfg.t_min, cfg.resolved_t_max(), seed=cfg.seed)
    scheme = result.best_scheme
    print(f"best period: {result.best_period}")
    print(f"rate: {result.best_rate_bits:.12g} bits/symbol")
    print(f"pilot power: {scheme.pilot_power:.12g}")
    print("data powers: " + " ".join(f"{p:.6g}" for p in scheme.data_powers))
    prefix = _out_prefix(cfg)
    if cfg.out_format == "csv":
        rate_rows = [
            (T, _fmt(r.rate_bits), _fmt(r.scheme.pilot_power), str(r.converged).lower(), r.iterations)
            for T, r in sorted(result.per_period.items())
        ]
        _write_csv(prefix + "_rates.csv",
                   ("period", "rate_bits", "pilot_power", "converged", "iterations"),
                   rate_rows)
        profile_rows = [(0, "pilot", _fmt(scheme.pilot_power))]
        profile_rows += [(d + 1, "data", _fmt(p)) for d, p in enumerate(scheme.data_powers)]
        _write_csv(prefix + "_profile.csv", ("slot", "role", "power"), profile_rows)
        written = [prefix + "_rates.csv", prefix + "_profile.csv"]
    else:
        payload = {
            "config": _config_echo(cfg),
            "objective": result.objective,
            "best": _scheme_payload(result.per_period[result.best_period]),
            "per_period": [
                _scheme_payload(result.per_period[T]) for T in sorted(result.per_period)
            ],
        }
        _write_json(prefix + ".json", payload)
        written = [prefix + ".json"]
    for path in written:
        print(f"wrote {path}")
    if not result.all_converged:
        bad = sorted(T for T, r in result.per_period.items() if not r.converged)
        print(f"warning: tolerance not met at periods {bad}", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def _scheme_payload(alloc) -> dict:
    return {
        "period": alloc.scheme.period,
        "rate_bits": alloc.rate_bits,
        "pilot_power": alloc.scheme.pilot_power,
        "data_powers": [float(p) for p in alloc.scheme.data_powers],
        "converged": alloc.converged,
        "iterations": alloc.iterations,
    }


def cmd_sweep(cfg: ScenarioConfig) -> int:
    curve = sweep_snr(
        cfg.sweep_template(), cfg.snr_grid, cfg.method, cfg.t_min, cfg.resolved_t_max(),
        seed=cfg.seed,
    )
    low = min_bit_energy(curve)
    if low is None:
        print("no positive-rate points on this grid")
    else:
        print(f"least bit energy: {low[1]:.6g} dB at SNR {low[0]:.6g} dB")
    prefix = _out_prefix(cfg)
    if cfg.out_format == "csv":
        rows = [
            (_fmt(p.snr_db), _fmt(p.snr_linear), _fmt(p.best_rate_bits),
             _fmt(p.bit_energy_db), p.best_period)
            for p in curve.points
        ]
        _write_csv(prefix + ".csv",
                   ("snr_db", "snr_linear", "rate_bits", "eb_n0_db", "best_period"),
                   rows)
    else:
        payload = {
            "config": _config_echo(cfg),
            "objective": curve.objective,
            "points": [
                {
                    "snr_db": p.snr_db,
                    "snr_linear": p.snr_linear,
                    "rate_bits": p.best_rate_bits,
                    "eb_n0_db": p.bit_energy_db,
                    "best_period": p.best_period,
                }
                for p in curve.points
            ],
        }
        _write_json(prefix + ".json", payload)
    suffix = ".csv" if cfg.out_format == "csv" else ".json"
    print(f"wrote {prefix}{suffix}")
    return EXIT_OK if curve.converged else EXIT_NONCONVERGED


def cmd_validate(cfg: ScenarioConfig, analytic_shift: float = 0.0) -> int:
    """Run the simulation battery; `analytic_shift` exists so tests can push
    every reference off target and exercise the failure path."""
    params = cfg.channel_params()
    frames = cfg.samples
    T = min(max(6, cfg.t_min), cfg.resolved_t_max())
    budget = params.power_budget * T
    uniform = TrainingScheme(T, budget / T, np.full(T - 1, budget / T))
    q = 0.7 ** np.arange(T - 1, dtype=float)
    decay = TrainingScheme(T, 0.3 * budget, q / q.sum() * 0.7 * budget)

    rows = []

    def record(check, label, analytic, estimate, se):
        analytic = analytic + analytic_shift
        z = abs(estimate - analytic) / se if se > 0 else (0.0 if estimate == analytic else math.inf)
        rows.append((check, label, analytic, estimate, se, z, z <= 3.0))

    from .channel import estimate_variance, error_variance  # local to keep the top imports lean

    stats = validate_estimator(params, uniform, frames, cfg.seed)
    for d, est_emp, err_emp, cross in stats.per_offset:
        est_ana = estimate_variance(params, uniform.pilot_power, d)
        err_ana = error_variance(params, uniform.pilot_power, d)
        record("estimate_variance", f"offset={d}", est_ana, est_emp,
               max(est_ana, 1e-300) / math.sqrt(frames))
        record("error_variance", f"offset={d}", err_ana, err_emp,
               err_ana / math.sqrt(frames))
        record("cross_correlation", f"offset={d}", 0.0, abs(cross), 1.0 / math.sqrt(frames))
    for gamma in (0.25, 1.0, 4.0):
        est, se = mc_bpsk_mi(gamma, cfg.samples, cfg.seed + 1)
        record("bpsk_mi", f"gamma={gamma}", bpsk_mi(gamma), est, se)
    for name, scheme in (("uniform", uniform), ("decay", decay)):
        est, se = mc_frame_rate(scheme, params, cfg.samples, cfg.seed + 2, "bpsk")
        record("frame_rate_bpsk", name, bpsk_frame_rate(scheme, params).frame_rate_bits, est, se)
        est, se = mc_frame_rate(scheme, params, cfg.samples, cfg.seed + 3, "gaussian-lb")
        record("frame_rate_gaussian", name,
               gaussian_frame_rate(scheme, params).frame_rate_bits, est, se)

    passed = sum(1 for r in rows if r[6])
    print(f"{passed}/{len(rows)} bands within 3 standard errors")
    prefix = _out_prefix(cfg)
    if cfg.out_format == "csv":
        csv_rows = [
            (check, label, _fmt(ana), _fmt(est), _fmt(se), _fmt(z), str(ok).lower())
            for check, label, ana, est, se, z, ok in rows
        ]
        _write_csv(prefix + ".csv",
                   ("check", "label", "analytic", "estimate", "std_error", "z", "passed"),
                   csv_rows)
        print(f"wrote {prefix}.csv")
    else:
        payload = {
            "config": _config_echo(cfg),
            "results": [
                {"check": c, "label": l, "analytic": a, "estimate": e,
                 "std_error": s, "z": z if math.isfinite(z) else None, "passed": ok}
                for c, l, a, e, s, z, ok in rows
            ],
        }
        _write_json(prefix + ".json", payload)
        print(f"wrote {prefix}.json")
    return EXIT_OK if passed == len(rows) else EXIT_VALIDATION


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    handler = {"optimize": cmd_optimize, "sweep": cmd_sweep, "validate": cmd_validate}[cfg.command]
    try:
        return handler(cfg)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
