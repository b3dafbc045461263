"""Command-line entry point.

Subcommands:

* ``run`` -- execute an experiment grid from a JSON config and/or flags;
  writes one CSV series per policy, ``summary.json`` and ``metadata.json``.
* ``presets`` -- print the built-in environments.
* ``lp-solve`` -- solve one rate-selection LP from flags or a JSON file.

Exit codes: 0 success, 1 internal error, 2 configuration error,
3 infeasible lp-solve input. A fixed seed yields byte-identical output files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .env import DEFAULT_ANCHORS, DEFAULT_SEGMENT_LEN, PRESET_MUS, PRESET_NAMES, WIFI_RATES
from .lp import LpInstance, RateTable, solve_rate_lp
from .metrics import theorem_bounds
from .policies import POLICY_NAMES
from .sim import RNG_NAME, AggregatedResults, ExperimentConfig, run_experiment

__all__ = ["main", "write_outputs", "load_config"]

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3

_BASE_COLUMNS = (
    "t,cum_expected_tput_mean,cum_expected_tput_se,cum_violation_mean,"
    "cum_violation_se,ratio_mean,ratio_clamped,cum_regret_mean,cum_regret_se"
)
_MA_COLUMNS = ",ma_tput_mean,ma_violation_mean"


class ConfigError(Exception):
    """Anything wrong with the requested configuration."""


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def load_config(path: str) -> dict:
    """Read a config JSON; a metadata.json document (config nested under
    "config") round-trips transparently."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    if "config" in doc and isinstance(doc["config"], dict):
        doc = doc["config"]
    return doc


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = {}
    if args.config:
        values.update(load_config(args.config))
    if "t" in values:  # accept lower-cased horizon key
        values["T"] = values.pop("t")
    overrides = {
        "environment": args.env,
        "T": args.T,
        "runs": args.runs,
        "base_seed": args.seed,
        "tau": args.tau,
        "window": args.window,
        "output_dir": args.out,
        "segment_len": args.segment_len,
        "workers": args.workers,
    }
    if args.policies is not None:
        overrides["policies"] = [p.strip() for p in args.policies.split(",") if p.strip()]
    if args.anchors is not None:
        overrides["anchors"] = [a.strip() for a in args.anchors.split(",") if a.strip()]
    if args.no_common_random_numbers:
        overrides["common_random_numbers"] = False
    values.update({k: v for k, v in overrides.items() if v is not None})

    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    try:
        config = ExperimentConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    env = config.environment.lower()
    if env not in PRESET_NAMES and env != "nonstationary":
        raise ConfigError(f"unknown environment: {config.environment!r}")
    for p in config.policies:
        if p.lower() not in POLICY_NAMES:
            raise ConfigError(f"unknown policy: {p!r}")
    if not config.policies:
        raise ConfigError("at least one policy is required")
    if config.anchors is not None:
        bad = [a for a in config.anchors if a.lower() not in PRESET_NAMES]
        if bad:
            raise ConfigError(f"anchors must be preset names, got {bad}")
    return config


def write_outputs(results: AggregatedResults, out_dir: Path) -> list[Path]:
    """Emit per-policy CSVs, summary.json, metadata.json; returns paths."""
    config = results.config
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    env = config.environment.lower()
    with_ma = config.window is not None

    for policy, series in results.policies.items():
        path = out_dir / f"{env}_{policy}.csv"
        lines = [_BASE_COLUMNS + (_MA_COLUMNS if with_ma else "")]
        for i in range(config.T):
            row = [
                str(i + 1),
                _fmt(series.cum_tput_mean[i]),
                _fmt(series.cum_tput_se[i]),
                _fmt(series.cum_violation_mean[i]),
                _fmt(series.cum_violation_se[i]),
                _fmt(series.ratio[i]),
                str(int(series.ratio_clamped[i])),
                _fmt(series.cum_regret_mean[i]),
                _fmt(series.cum_regret_se[i]),
            ]
            if with_ma:
                row.append(_fmt(series.ma_tput[i]))
                row.append(_fmt(series.ma_violation[i]))
            lines.append(",".join(row))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)

    K = len(WIFI_RATES)
    vio_bound, reg_bound = theorem_bounds(K, config.T, WIFI_RATES.r_max)
    summary = {
        "environment": env,
        "T": config.T,
        "runs": config.runs,
        "tau": config.tau,
        "theorem_bounds": {"violation": vio_bound, "regret": reg_bound,
                           "K": K, "r_max": WIFI_RATES.r_max},
        "policies": {
            policy: {
                "cum_expected_tput": series.cum_tput_mean[-1],
                "cum_violation": series.cum_violation_mean[-1],
                "ratio": series.ratio[-1],
                "ratio_clamped": bool(series.ratio_clamped[-1]),
                "cum_regret": series.cum_regret_mean[-1],
            }
            for policy, series in results.policies.items()
        },
    }
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                            encoding="utf-8")
    written.append(summary_path)

    try:
        pkg_version = version("conbandit")
    except PackageNotFoundError:
        pkg_version = "unknown"
    metadata = {
        "config": dataclasses.asdict(config),
        "rng": RNG_NAME,
        "package_version": pkg_version,
    }
    metadata_path = out_dir / "metadata.json"
    metadata_path.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
    written.append(metadata_path)
    return written


def _cmd_run(args: argparse.Namespace) -> int:
    config = _build_config(args)
    results = run_experiment(config)
    written = write_outputs(results, Path(config.output_dir))
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_presets(_args: argparse.Namespace) -> int:
    print(f"rates_mbps: {list(WIFI_RATES.rates)}")
    for name, mu in PRESET_MUS.items():
        print(f"{name}: {list(mu)}")
    print(f"nonstationary: anchors={list(DEFAULT_ANCHORS)} "
          f"segment_len={DEFAULT_SEGMENT_LEN}")
    return EXIT_OK


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad {what} list: {text!r}") from exc


def _cmd_lp_solve(args: argparse.Namespace) -> int:
    if args.file:
        doc = load_config(args.file)
        rates = doc.get("rates")
        mu = doc.get("mu", doc.get("success_probs"))
        tau = doc.get("tau")
    else:
        rates = _parse_floats(args.rates, "rates") if args.rates else list(WIFI_RATES.rates)
        if args.mu is None or args.tau is None:
            raise ConfigError("lp-solve needs --mu and --tau (or --file)")
        mu = _parse_floats(args.mu, "mu")
        tau = args.tau
    if rates is None or mu is None or tau is None:
        raise ConfigError("lp-solve file must provide rates, mu, tau")
    try:
        instance = LpInstance(RateTable(rates), mu, float(tau))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    solution = solve_rate_lp(instance)
    if solution is None:
        print("infeasible: max success probability below threshold")
        return EXIT_INFEASIBLE
    probs = solution.selection.probs
    print(f"feasible: objective {_fmt(solution.objective)} Mbps")
    for k in np.nonzero(probs > 0)[0]:
        print(f"  rate {_fmt(instance.rates.rates[k])} Mbps: weight {_fmt(probs[k])}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conbandit",
        description="Latency-constrained wireless rate selection experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment grid")
    run.add_argument("--config", help="JSON config file (flags override it)")
    run.add_argument("--env", help="environment name (gradual/lossy/steep/linear/nonstationary)")
    run.add_argument("--policies", help="comma-separated policy names")
    run.add_argument("--T", type=int, help="horizon (transmission intervals)")
    run.add_argument("--runs", type=int, help="independent runs to average")
    run.add_argument("--tau", type=float, help="packet success threshold")
    run.add_argument("--seed", type=int, help="base seed")
    run.add_argument("--window", type=int, help="sliding-window size")
    run.add_argument("--out", help="output directory")
    run.add_argument("--anchors", help="comma-separated nonstationary anchors")
    run.add_argument("--segment-len", type=int, dest="segment_len",
                     help="nonstationary segment length")
    run.add_argument("--workers", type=int, help="parallel worker cap")
    run.add_argument("--no-common-random-numbers", action="store_true",
                     help="give each policy its own channel noise stream")
    run.set_defaults(func=_cmd_run)

    presets = sub.add_parser("presets", help="print built-in environments")
    presets.set_defaults(func=_cmd_presets)

    lp = sub.add_parser("lp-solve", help="solve one rate-selection LP")
    lp.add_argument("--rates", help="comma-separated rates in Mbps (default WiFi set)")
    lp.add_argument("--mu", help="comma-separated success probabilities")
    lp.add_argument("--tau", type=float, help="success threshold")
    lp.add_argument("--file", help="JSON file with rates, mu, tau")
    lp.set_defaults(func=_cmd_lp_solve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse errors are configuration errors
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
