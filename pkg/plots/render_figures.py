#!/usr/bin/env python3
"""Render comparison figures from experiment CSV outputs.

Reads the per-policy CSV series written by the ``conbandit run`` command
(schema: t, cum_expected_tput_mean/se, cum_violation_mean/se, ratio_mean,
ratio_clamped, cum_regret_mean/se[, ma_tput_mean, ma_violation_mean]) and
renders:

* a grid of throughput-violation-ratio panels (top row, higher is better)
  and cumulative-violation panels (bottom row, lower is better), one column
  per stationary environment;
* moving-average ratio and violation panels for non-stationary runs that
  carry the ma_* columns.

Rows whose ratio was epsilon-clamped (zero cumulative violation) are masked
rather than plotted, so the clamped epsilon denominator cannot dominate the
axis. Usage::

    python3 render_figures.py --input-dir out/ --out figures/ --format png
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

PANEL_KINDS = ("ratio", "violation", "ma_ratio", "ma_violation")
POLICY_LABELS = {"con-ts": "Con-TS", "uts": "UTS", "con-kl-ucb": "Con-KL-UCB"}
STATIONARY_ORDER = ("gradual", "lossy", "steep", "linear")
MA_EPS = 1e-9

BASE_COLUMNS = [
    "t", "cum_expected_tput_mean", "cum_expected_tput_se", "cum_violation_mean",
    "cum_violation_se", "ratio_mean", "ratio_clamped", "cum_regret_mean",
    "cum_regret_se",
]
MA_COLUMNS = ["ma_tput_mean", "ma_violation_mean"]


class InputError(Exception):
    """A referenced CSV is missing or does not match the expected schema."""


@dataclass
class Series:
    """Parsed columns of one {env}_{policy}.csv file."""

    t: list[float]
    ratio: list[float]
    ratio_clamped: list[bool]
    violation: list[float]
    ma_tput: Optional[list[float]] = None
    ma_violation: Optional[list[float]] = None


@dataclass
class FigureSpec:
    """What to render: which environments/policies from which directory."""

    input_dir: Path
    environments: list[str]
    policies: list[str]
    output: Path
    format: str = "png"
    kinds: tuple[str, ...] = ("ratio", "violation")

    def __post_init__(self):
        if self.format not in ("png", "svg"):
            raise InputError(f"unsupported format: {self.format!r}")
        for kind in self.kinds:
            if kind not in PANEL_KINDS:
                raise InputError(f"unknown panel kind: {kind!r}")
        if not self.policies:
            raise InputError("policy list is empty")
        if not self.environments:
            raise InputError("environment list is empty")


def read_series(path: Path) -> Series:
    if not path.exists():
        raise InputError(f"missing CSV: {path}")
    try:
        with path.open(encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            if header[:len(BASE_COLUMNS)] != BASE_COLUMNS:
                raise InputError(f"ill-formed CSV (bad header): {path}")
            has_ma = header[len(BASE_COLUMNS):] == MA_COLUMNS
            series = Series([], [], [], [],
                            ma_tput=[] if has_ma else None,
                            ma_violation=[] if has_ma else None)
            for row in reader:
                series.t.append(float(row["t"]))
                series.ratio.append(float(row["ratio_mean"]))
                series.ratio_clamped.append(row["ratio_clamped"] == "1")
                series.violation.append(float(row["cum_violation_mean"]))
                if has_ma:
                    series.ma_tput.append(float(row["ma_tput_mean"]))
                    series.ma_violation.append(float(row["ma_violation_mean"]))
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"ill-formed CSV: {path} ({exc})") from exc
    if not series.t:
        raise InputError(f"ill-formed CSV (no rows): {path}")
    return series


def _masked_ratio(series: Series) -> tuple[list[float], list[float]]:
    """(t, ratio) with epsilon-clamped rows dropped."""
    pts = [(t, r) for t, r, clamped in zip(series.t, series.ratio, series.ratio_clamped)
           if not clamped]
    if not pts:
        return [], []
    ts, rs = zip(*pts)
    return list(ts), list(rs)


def _masked_ma_ratio(series: Series) -> tuple[list[float], list[float]]:
    if series.ma_tput is None:
        raise InputError("ma_* columns requested but absent from CSV")
    pts = [(t, tput / vio) for t, tput, vio in
           zip(series.t, series.ma_tput, series.ma_violation) if vio > MA_EPS]
    if not pts:
        return [], []
    ts, rs = zip(*pts)
    return list(ts), list(rs)


_PANEL_TITLES = {
    "ratio": "Tput / Vio., {env} (higher is better)",
    "violation": "Vio., {env} (lower is better)",
    "ma_ratio": "M.A. tput / M.A. vio., {env}",
    "ma_violation": "M.A. vio., {env}",
}


def render(spec: FigureSpec) -> dict:
    """Render the spec's (environment x kind) panel grid to one image.

    Returns a report with the written path and, per panel, the maximum
    plotted value (used to verify that masking kept clamped rows out).
    """
    n_rows = len(spec.kinds)
    n_cols = len(spec.environments)
    fig, axes = plt.subplots(n_rows, n_cols, squeeze=False,
                             figsize=(4 * n_cols, 3.2 * n_rows))
    report = {"panels": [], "max_plotted": {}}
    for col, env in enumerate(spec.environments):
        data = {policy: read_series(spec.input_dir / f"{env}_{policy}.csv")
                for policy in spec.policies}
        for row, kind in enumerate(spec.kinds):
            ax = axes[row][col]
            peak = 0.0
            for policy in spec.policies:
                series = data[policy]
                if kind == "ratio":
                    xs, ys = _masked_ratio(series)
                elif kind == "ma_ratio":
                    xs, ys = _masked_ma_ratio(series)
                elif kind == "violation":
                    xs, ys = series.t, series.violation
                else:
                    if series.ma_violation is None:
                        raise InputError("ma_* columns requested but absent from CSV")
                    xs, ys = series.t, series.ma_violation
                ax.plot(xs, ys, label=POLICY_LABELS.get(policy, policy))
                if ys:
                    peak = max(peak, max(ys))
            ax.set_title(_PANEL_TITLES[kind].format(env=env))
            ax.set_xlabel("t")
            ax.set_ylabel(kind.replace("_", " "))
            ax.legend(fontsize=8)
            report["panels"].append((env, kind))
            report["max_plotted"][(env, kind)] = peak
    fig.tight_layout()
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, format=spec.format)
    plt.close(fig)
    report["output"] = spec.output
    return report


def discover(input_dir: Path) -> tuple[list[str], list[str], list[str]]:
    """Find (stationary envs, nonstationary envs, policies) from CSV names."""
    envs, ns_envs, policies = [], [], []
    for path in sorted(input_dir.glob("*_*.csv")):
        env, _, policy = path.stem.rpartition("_")
        if policy not in POLICY_LABELS:
            continue
        target = ns_envs if env == "nonstationary" else envs
        if env not in target:
            target.append(env)
        if policy not in policies:
            policies.append(policy)
    envs.sort(key=lambda e: STATIONARY_ORDER.index(e) if e in STATIONARY_ORDER else 99)
    policies.sort(key=lambda p: list(POLICY_LABELS).index(p))
    return envs, ns_envs, policies


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--input-dir", required=True, type=Path)
    parser.add_argument("--out", required=True, type=Path,
                        help="output directory for the images")
    parser.add_argument("--format", default="png", choices=("png", "svg"))
    args = parser.parse_args(argv)
    try:
        envs, ns_envs, policies = discover(args.input_dir)
        if not envs and not ns_envs:
            raise InputError(f"no experiment CSVs found in {args.input_dir}")
        written = []
        if envs:
            spec = FigureSpec(args.input_dir, envs, policies,
                              args.out / f"figures.{args.format}", args.format,
                              kinds=("ratio", "violation"))
            written.append(render(spec)["output"])
        for env in ns_envs:
            spec = FigureSpec(args.input_dir, [env], policies,
                              args.out / f"{env}_ma.{args.format}", args.format,
                              kinds=("ma_ratio", "ma_violation"))
            written.append(render(spec)["output"])
        for path in written:
            print(path)
        return 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
