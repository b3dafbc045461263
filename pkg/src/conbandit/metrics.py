"""Evaluation metrics for constrained rate selection.

Per-run quantities are computed from expected per-step values (the selection
vector dotted with the true success probabilities), not realized outcomes:

* violation V(T'): positive part of the cumulative shortfall of expected
  success mass below T' * tau;
* regret R(T'): positive part of the cumulative expected-throughput loss
  against the per-interval LP optimum (which reduces to the stationary
  optimal policy in stationary environments);
* throughput-violation ratio W(T'): cumulative expected throughput over the
  violation, with an epsilon-clamped denominator flagged to the caller.

Also included: trailing moving averages, the sqrt(log(TK/n)/n) confidence
bound diagnostics, and the leading-term theoretical bound evaluators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .lp import RateTable, SelectionVector

__all__ = [
    "StepRecord",
    "MetricsLog",
    "violation",
    "regret",
    "tput_violation_ratio",
    "RatioResult",
    "moving_average",
    "confidence_bounds",
    "theorem_bounds",
    "RATIO_EPS",
]

RATIO_EPS = 1e-9


@dataclass(frozen=True)
class StepRecord:
    """One interval's trace entry."""

    t: int
    selection: SelectionVector
    chosen_arm: int
    outcome: int
    expected_tput: float
    expected_success: float
    optimal_tput: float
    fallback_used: bool = False


class MetricsLog:
    """Column-oriented trace of a single run, intervals 1..T."""

    def __init__(self, T: int, K: int, tau: float, rates: RateTable):
        self.T = T
        self.tau = tau
        self.rates = rates
        self.selections = np.zeros((T, K))
        self.chosen_arms = np.zeros(T, dtype=np.int64)
        self.outcomes = np.zeros(T, dtype=np.int64)
        self.expected_tput = np.zeros(T)
        self.expected_success = np.zeros(T)
        self.optimal_tput = np.zeros(T)
        self.fallback = np.zeros(T, dtype=bool)
        self.constraint_values = np.full(T, np.nan)  # policy-internal, diagnostic

    def append(self, t: int, selection: np.ndarray, chosen_arm: int, outcome: int,
               expected_tput: float, expected_success: float, optimal_tput: float,
               fallback_used: bool = False, constraint_value: float = np.nan) -> None:
        i = t - 1
        self.selections[i] = selection
        self.chosen_arms[i] = chosen_arm
        self.outcomes[i] = outcome
        self.expected_tput[i] = expected_tput
        self.expected_success[i] = expected_success
        self.optimal_tput[i] = optimal_tput
        self.fallback[i] = fallback_used
        self.constraint_values[i] = constraint_value

    def record(self, t: int) -> StepRecord:
        i = t - 1
        return StepRecord(
            t=t,
            selection=SelectionVector(self.selections[i]),
            chosen_arm=int(self.chosen_arms[i]),
            outcome=int(self.outcomes[i]),
            expected_tput=float(self.expected_tput[i]),
            expected_success=float(self.expected_success[i]),
            optimal_tput=float(self.optimal_tput[i]),
            fallback_used=bool(self.fallback[i]),
        )


def _check_upto(log: MetricsLog, upto: int) -> int:
    if not 1 <= upto <= log.T:
        raise ValueError("upto must lie in 1..T")
    return upto


def violation(log: MetricsLog, upto: int) -> float:
    """V(T') = max(0, T'*tau - sum_{t<=T'} expected_success(t))."""
    upto = _check_upto(log, upto)
    return max(0.0, upto * log.tau - float(log.expected_success[:upto].sum()))


def regret(log: MetricsLog, upto: int) -> float:
    """R(T') = max(0, sum_{t<=T'} (optimal_tput(t) - expected_tput(t)))."""
    upto = _check_upto(log, upto)
    return max(0.0, float((log.optimal_tput[:upto] - log.expected_tput[:upto]).sum()))


class RatioResult(NamedTuple):
    ratio: float
    throughput: float
    violation: float
    clamped: bool


def tput_violation_ratio(log: MetricsLog, upto: int) -> RatioResult:
    """W(T') with the denominator clamped at RATIO_EPS; clamping is flagged."""
    upto = _check_upto(log, upto)
    num = float(log.expected_tput[:upto].sum())
    vio = violation(log, upto)
    clamped = vio < RATIO_EPS
    return RatioResult(num / max(vio, RATIO_EPS), num, vio, clamped)


def moving_average(series: Sequence[float], window: int) -> np.ndarray:
    """Trailing mean: element i averages the last min(i+1, window) values."""
    if window < 1:
        raise ValueError("window must be >= 1")
    arr = np.asarray(series, dtype=np.float64)
    csum = np.concatenate(([0.0], np.cumsum(arr)))
    n = len(arr)
    idx = np.arange(1, n + 1)
    lo = np.maximum(0, idx - window)
    return (csum[idx] - csum[lo]) / (idx - lo)


def confidence_bounds(mu_hat: float, n: int, T: int, K: int) -> tuple[float, float]:
    """(U, L) diagnostic bounds with radius sqrt(log_+(TK/n) / n).

    log_+(x) = log(x) for x >= 1 and 0 otherwise. Unexplored arms (n = 0)
    report maximal uncertainty (1, 0).
    """
    if T < 1 or K < 1:
        raise ValueError("T and K must be >= 1")
    if n == 0:
        return 1.0, 0.0
    x = T * K / n
    radius = math.sqrt(math.log(x) / n) if x >= 1.0 else 0.0
    return min(1.0, mu_hat + radius), max(0.0, mu_hat - radius)


def theorem_bounds(K: int, T: int, r_max: float) -> tuple[float, float]:
    """Leading-term theoretical bounds: violation 12*sqrt(KT), regret
    r_max * (6*sqrt(KT) + 12*sqrt(KT log K)).

    The violation figure omits an O(K^2 log T sqrt(T)) remainder with unknown
    constant; treat it as the leading term only.
    """
    if K < 1 or T < 1:
        raise ValueError("K and T must be >= 1")
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    kt = K * T
    violation_bound = 12.0 * math.sqrt(kt)
    regret_bound = r_max * (6.0 * math.sqrt(kt) + 12.0 * math.sqrt(kt * math.log(K)))
    return violation_bound, regret_bound
