"""Seedable experiment runner for (environment x policy x run) grids.

Reproducibility contract:

* every run derives its random streams from SHA-256 of
  ``(base_seed, run_index, policy_name)`` fed into numpy's PCG64, so a run is
  a pure function of the config;
* environment randomness and policy randomness come from two independent
  substreams, and the environment substream ignores the policy name, so
  compared policies face identical channel noise per run (common random
  numbers, disableable);
* aggregation reduces run series stacked in run_index order, so parallel and
  serial execution produce identical results.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .env import EnvironmentSchedule, resolve_environment
from .lp import LpInstance, solve_rate_lp
from .metrics import RATIO_EPS, MetricsLog, moving_average
from .policies import POLICY_NAMES, make_policy

__all__ = [
    "ExperimentConfig",
    "RunSeries",
    "PolicySeries",
    "AggregatedResults",
    "run_single",
    "run_experiment",
    "stream_seed",
]

RNG_NAME = "numpy PCG64 seeded via SHA-256 of 'conbandit|{kind}|{base_seed}|{run_index}[|{policy}]'"


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved parameters of one experiment grid."""

    environment: str = "gradual"
    policies: tuple[str, ...] = POLICY_NAMES
    T: int = 10000
    runs: int = 64
    base_seed: int = 1
    tau: float = 0.75
    window: Optional[int] = None
    output_dir: str = "out"
    anchors: Optional[tuple[str, ...]] = None
    segment_len: Optional[int] = None
    common_random_numbers: bool = True
    workers: Optional[int] = None

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")
        if self.window is not None and self.window < 1:
            raise ValueError("window must be >= 1 when present")
        if self.base_seed < 0:
            raise ValueError("base_seed must be nonnegative")
        object.__setattr__(self, "policies", tuple(self.policies))
        if self.anchors is not None:
            object.__setattr__(self, "anchors", tuple(self.anchors))

    def schedule(self) -> EnvironmentSchedule:
        return resolve_environment(self.environment, self.anchors, self.segment_len)


def stream_seed(kind: str, base_seed: int, run_index: int,
                policy_name: str = "") -> np.random.SeedSequence:
    """Documented seed mixing: SHA-256 of the labelled tuple, 128 bits kept."""
    tag = f"conbandit|{kind}|{base_seed}|{run_index}"
    if policy_name:
        tag += f"|{policy_name}"
    digest = hashlib.sha256(tag.encode()).digest()
    return np.random.SeedSequence(int.from_bytes(digest[:16], "little"))


def _true_mu_and_optima(schedule: EnvironmentSchedule, T: int, tau: float):
    """Ground-truth mu(t) rows and the per-interval LP-optimal throughput."""
    rates = schedule.rates
    r = rates.as_array()
    if schedule.stationary:
        mu = np.broadcast_to(schedule.mu_of_t(1), (T, len(rates)))
        sol = solve_rate_lp(LpInstance(rates, schedule.mu_of_t(1), tau))
        opt = np.full(T, sol.objective if sol is not None else 0.0)
        return mu, mu * r, opt
    mu = np.stack([schedule.mu_of_t(t) for t in range(1, T + 1)])
    opt = np.empty(T)
    for i in range(T):
        sol = solve_rate_lp(LpInstance(rates, mu[i], tau))
        opt[i] = sol.objective if sol is not None else 0.0
    return mu, mu * r, opt


def run_single(config: ExperimentConfig, policy_name: str, run_index: int) -> MetricsLog:
    """Execute one seeded run of one policy; returns the full per-step trace."""
    schedule = config.schedule()
    rates = schedule.rates
    K = len(rates)
    T = config.T

    env_policy_tag = "" if config.common_random_numbers else policy_name
    env_rng = np.random.default_rng(
        stream_seed("env", config.base_seed, run_index, env_policy_tag))
    policy_rng = np.random.default_rng(
        stream_seed("policy", config.base_seed, run_index, policy_name))
    env_uniforms = env_rng.random(T)  # one channel variate per interval

    policy = make_policy(policy_name, rates, config.tau, config.window)
    mu, rmu, opt = _true_mu_and_optima(schedule, T, config.tau)

    log = MetricsLog(T, K, config.tau, rates)
    for i in range(T):
        t = i + 1
        decision = policy.select(t, policy_rng)
        probs = decision.selection.probs
        arm = decision.chosen_arm
        outcome = int(env_uniforms[i] < mu[i, arm])
        policy.update(arm, outcome)
        log.selections[i] = probs
        log.chosen_arms[i] = arm
        log.outcomes[i] = outcome
        log.expected_tput[i] = probs @ rmu[i]
        log.expected_success[i] = probs @ mu[i]
        log.optimal_tput[i] = opt[i]
        log.fallback[i] = decision.fallback_used
        if decision.constraint_value is not None:
            log.constraint_values[i] = decision.constraint_value
    return log


@dataclass(frozen=True)
class RunSeries:
    """Per-run cumulative series reduced from a MetricsLog."""

    cum_tput: np.ndarray
    cum_violation: np.ndarray
    cum_regret: np.ndarray


def reduce_log(log: MetricsLog) -> RunSeries:
    t_idx = np.arange(1, log.T + 1)
    cum_tput = np.cumsum(log.expected_tput)
    cum_vio = np.maximum(0.0, log.tau * t_idx - np.cumsum(log.expected_success))
    cum_reg = np.maximum(0.0, np.cumsum(log.optimal_tput - log.expected_tput))
    return RunSeries(cum_tput, cum_vio, cum_reg)


@dataclass(frozen=True)
class PolicySeries:
    """Across-run aggregation for one policy; all arrays have length T."""

    cum_tput_mean: np.ndarray
    cum_tput_se: np.ndarray
    cum_violation_mean: np.ndarray
    cum_violation_se: np.ndarray
    ratio: np.ndarray
    ratio_clamped: np.ndarray
    cum_regret_mean: np.ndarray
    cum_regret_se: np.ndarray
    ma_tput: Optional[np.ndarray] = None
    ma_violation: Optional[np.ndarray] = None


@dataclass(frozen=True)
class AggregatedResults:
    config: ExperimentConfig
    policies: dict[str, PolicySeries] = field(default_factory=dict)


def _se(stack: np.ndarray) -> np.ndarray:
    runs = stack.shape[0]
    if runs < 2:
        return np.zeros(stack.shape[1])
    return stack.std(axis=0, ddof=1) / np.sqrt(runs)


def _aggregate(config: ExperimentConfig, runs: Sequence[RunSeries]) -> PolicySeries:
    """Mean/SE across runs, stacked in run_index order (fixed reduction order)."""
    tput = np.stack([r.cum_tput for r in runs])
    vio = np.stack([r.cum_violation for r in runs])
    reg = np.stack([r.cum_regret for r in runs])
    tput_mean = tput.mean(axis=0)
    vio_mean = vio.mean(axis=0)
    # Paper-style ratio: expectation of throughput over expectation of the
    # clamped violation shortfall.
    clamped = vio_mean < RATIO_EPS
    ratio = tput_mean / np.maximum(vio_mean, RATIO_EPS)
    ma_tput = ma_vio = None
    if config.window is not None:
        # Moving averages smooth the cumulative performance metrics, so a
        # policy's accumulated violations keep weighing on its ratio through
        # later low-violation stretches.
        ma_tput = moving_average(tput_mean, config.window)
        ma_vio = moving_average(vio_mean, config.window)
    return PolicySeries(
        cum_tput_mean=tput_mean,
        cum_tput_se=_se(tput),
        cum_violation_mean=vio_mean,
        cum_violation_se=_se(vio),
        ratio=ratio,
        ratio_clamped=clamped,
        cum_regret_mean=reg.mean(axis=0),
        cum_regret_se=_se(reg),
        ma_tput=ma_tput,
        ma_violation=ma_vio,
    )


def _worker(config: ExperimentConfig, policy_name: str, run_index: int) -> RunSeries:
    return reduce_log(run_single(config, policy_name, run_index))


def _resolve_workers(config: ExperimentConfig) -> int:
    if config.workers is not None:
        workers = config.workers
    else:
        workers = os.cpu_count() or 1
    cap = os.environ.get("CONBANDIT_THREADS")
    if cap:
        workers = min(workers, max(1, int(cap)))
    return max(1, workers)


def run_experiment(config: ExperimentConfig) -> AggregatedResults:
    """Run the full grid and aggregate; identical results at any parallelism."""
    workers = _resolve_workers(config)
    tasks = [(policy, run) for policy in config.policies for run in range(config.runs)]
    results: dict[tuple[str, int], RunSeries] = {}
    if workers == 1 or len(tasks) == 1:
        for policy, run in tasks:
            results[(policy, run)] = _worker(config, policy, run)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_worker, config, policy, run): (policy, run)
                       for policy, run in tasks}
            for fut, key in futures.items():
                results[key] = fut.result()
    aggregated = AggregatedResults(config)
    for policy in config.policies:
        series = [results[(policy, run)] for run in range(config.runs)]
        aggregated.policies[policy] = _aggregate(config, series)
    return aggregated
