"""Bandit policies for constrained rate selection.

Three policies share a uniform select/update interface:

* :class:`ConTS` -- constrained Thompson sampling: sample Beta posteriors,
  solve the rate-selection LP on the sampled means, draw the arm from the LP
  selection vector; fall back to uniform selection when the sampled LP is
  infeasible.
* :class:`ConKLUCB` -- the same LP step driven by Bernoulli KL upper
  confidence indices instead of posterior samples.
* :class:`UTS` -- unconstrained unimodal Thompson sampling on the line graph
  over rates: track the empirical-throughput leader, periodically force-play
  it, otherwise Thompson-sample within its one-hop neighborhood.

Each policy optionally runs in sliding-window mode, where posterior counts
are recomputed from a bounded FIFO of recent observations.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit

from .lp import LpInstance, RateTable, SelectionVector, solve_rate_lp

__all__ = [
    "BetaPosterior",
    "PolicyDecision",
    "ObservationWindow",
    "ConTS",
    "ConKLUCB",
    "UTS",
    "con_ts_select",
    "con_ts_update",
    "kl_bernoulli",
    "kl_ucb_index",
    "windowed_update",
    "make_policy",
    "POLICY_NAMES",
]

POLICY_NAMES = ("con-ts", "uts", "con-kl-ucb")

# Clamp for KL index arguments so d(p, q) stays defined at the boundary.
_KL_CLAMP = 1e-12


@dataclass(frozen=True)
class BetaPosterior:
    """Per-arm Beta(alpha_k, beta_k) success-probability beliefs.

    With the uniform Beta(1, 1) initialization, alpha_k - 1 counts observed
    successes and beta_k - 1 observed failures of arm k.
    """

    alpha: np.ndarray
    beta: np.ndarray

    @staticmethod
    def uniform(K: int) -> "BetaPosterior":
        return BetaPosterior(np.ones(K), np.ones(K))

    def __post_init__(self):
        if self.alpha.shape != self.beta.shape:
            raise ValueError("alpha and beta must have equal length")
        if np.any(self.alpha < 1) or np.any(self.beta < 1):
            raise ValueError("Beta parameters must be >= 1")

    @property
    def counts(self) -> np.ndarray:
        """N_k: number of observations per arm."""
        return self.alpha + self.beta - 2.0

    @property
    def means(self) -> np.ndarray:
        """Empirical means; arms with no observations report 0."""
        n = self.counts
        return np.divide(self.alpha - 1.0, n, out=np.zeros_like(n), where=n > 0)


def con_ts_update(posterior: BetaPosterior, arm: int, outcome: int) -> BetaPosterior:
    """Bayes update for one Bernoulli observation: success bumps alpha, failure beta."""
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    alpha = posterior.alpha.copy()
    beta = posterior.beta.copy()
    alpha[arm] += outcome
    beta[arm] += 1 - outcome
    return BetaPosterior(alpha, beta)


@dataclass(frozen=True)
class PolicyDecision:
    """One round's commitment: selection vector, the drawn arm, fallback flag.

    ``constraint_value`` is sum_k p_k * mu~_k under the policy's internal mean
    estimates for LP-driven policies (a diagnostic for the almost-sure
    feasibility property), ``None`` for UTS.
    """

    selection: SelectionVector
    chosen_arm: int
    fallback_used: bool = False
    constraint_value: Optional[float] = None


def _sample_categorical(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw over arm indices in ascending order; one uniform variate."""
    u = rng.random()
    c = 0.0
    for k in range(len(probs) - 1):
        c += probs[k]
        if u < c:
            return k
    return len(probs) - 1


def _lp_decision(mu_tilde: np.ndarray, rates: RateTable, tau: float,
                 rng: np.random.Generator) -> PolicyDecision:
    """Shared LP-then-sample step for Con-TS and Con-KL-UCB."""
    solution = solve_rate_lp(LpInstance(rates, mu_tilde, tau))
    if solution is None:
        K = len(rates)
        selection = SelectionVector(np.full(K, 1.0 / K))
        arm = _sample_categorical(selection.probs, rng)
        return PolicyDecision(selection, arm, fallback_used=True,
                              constraint_value=float(np.mean(mu_tilde)))
    selection = solution.selection
    arm = _sample_categorical(selection.probs, rng)
    return PolicyDecision(selection, arm, fallback_used=False,
                          constraint_value=float(np.dot(selection.probs, mu_tilde)))


def con_ts_select(posterior: BetaPosterior, rates: RateTable, tau: float,
                  rng: np.random.Generator) -> PolicyDecision:
    """One Con-TS round: K Beta draws, one LP solve, one categorical draw."""
    mu_tilde = rng.beta(posterior.alpha, posterior.beta)
    return _lp_decision(mu_tilde, rates, tau, rng)


def kl_bernoulli(p: float, q: float) -> float:
    """Bernoulli KL divergence d(p, q), with the 0 log 0 := 0 convention."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1); callers clamp")
    out = 0.0
    if p > 0.0:
        out += p * math.log(p / q)
    if p < 1.0:
        out += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return out


@njit(cache=True)
def _kl_ucb_many(mu_hat, n, log_t):
    """KL-UCB indices for all arms by bisection on q in [mu_hat, 1).

    35 halvings of an interval of length <= 1 land within 1e-10 absolute.
    """
    K = mu_hat.shape[0]
    out = np.empty(K)
    for k in range(K):
        nk = n[k]
        if nk <= 0:
            out[k] = 1.0
            continue
        p = mu_hat[k]
        if p < _KL_CLAMP:
            p = _KL_CLAMP
        elif p > 1.0 - _KL_CLAMP:
            out[k] = 1.0
            continue
        target = log_t / nk
        lo = p
        hi = 1.0
        for _ in range(35):
            mid = 0.5 * (lo + hi)
            d = p * np.log(p / mid) + (1.0 - p) * np.log((1.0 - p) / (1.0 - mid))
            if d <= target:
                lo = mid
            else:
                hi = mid
        out[k] = lo
    return out


def kl_ucb_index(mu_hat: float, n: int, t: int) -> float:
    """sup{ q >= mu_hat : n * d(mu_hat, q) <= log t }; 1 for unexplored arms."""
    if n < 0 or t < 1:
        raise ValueError("need n >= 0 and t >= 1")
    return float(_kl_ucb_many(np.array([mu_hat]), np.array([float(n)]), math.log(t))[0])


class ObservationWindow:
    """Bounded FIFO of (arm, outcome) pairs; oldest-first eviction."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("window capacity must be >= 1")
        self.capacity = capacity
        self.entries: deque[tuple[int, int]] = deque(maxlen=capacity)

    def push(self, arm: int, outcome: int) -> None:
        self.entries.append((arm, outcome))

    def counts(self, K: int) -> tuple[np.ndarray, np.ndarray]:
        """(successes, failures) per arm, recounted from the window contents."""
        succ = np.zeros(K)
        fail = np.zeros(K)
        for arm, outcome in self.entries:
            if outcome:
                succ[arm] += 1
            else:
                fail[arm] += 1
        return succ, fail


def windowed_update(window: ObservationWindow, K: int, arm: int,
                    outcome: int) -> tuple[ObservationWindow, BetaPosterior]:
    """Append an observation and rebuild the posterior from window contents."""
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    window.push(arm, outcome)
    succ, fail = window.counts(K)
    return window, BetaPosterior(1.0 + succ, 1.0 + fail)


class _BasePolicy:
    """Shared count-keeping: full-history or sliding-window posterior state."""

    def __init__(self, rates: RateTable, window: Optional[int] = None):
        self.rates = rates
        self.K = len(rates)
        self._alpha = np.ones(self.K)
        self._beta = np.ones(self.K)
        self._window = ObservationWindow(window) if window is not None else None

    @property
    def posterior(self) -> BetaPosterior:
        return BetaPosterior(self._alpha.copy(), self._beta.copy())

    def update(self, arm: int, outcome: int) -> None:
        if outcome not in (0, 1):
            raise ValueError("outcome must be 0 or 1")
        if self._window is None:
            self._alpha[arm] += outcome
            self._beta[arm] += 1 - outcome
        else:
            self._window.push(arm, outcome)
            succ, fail = self._window.counts(self.K)
            self._alpha = 1.0 + succ
            self._beta = 1.0 + fail


class ConTS(_BasePolicy):
    """Constrained Thompson sampling (LP on sampled posterior means)."""

    def __init__(self, rates: RateTable, tau: float, window: Optional[int] = None):
        super().__init__(rates, window)
        if not 0.0 <= tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")
        self.tau = tau

    def select(self, t: int, rng: np.random.Generator) -> PolicyDecision:
        mu_tilde = rng.beta(self._alpha, self._beta)
        return _lp_decision(mu_tilde, self.rates, self.tau, rng)


class ConKLUCB(_BasePolicy):
    """Constrained KL-UCB: the LP driven by per-arm KL upper confidence indices."""

    def __init__(self, rates: RateTable, tau: float, window: Optional[int] = None):
        super().__init__(rates, window)
        if not 0.0 <= tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")
        self.tau = tau

    def select(self, t: int, rng: np.random.Generator) -> PolicyDecision:
        n = self._alpha + self._beta - 2.0
        mu_hat = np.divide(self._alpha - 1.0, n, out=np.zeros_like(n), where=n > 0)
        indices = _kl_ucb_many(mu_hat, n, math.log(t))
        return _lp_decision(indices, self.rates, self.tau, rng)


class UTS(_BasePolicy):
    """Unimodal Thompson sampling on the path graph over rates.

    The leader is the arm maximizing empirical throughput r_k * mu_hat_k
    (unplayed arms count as mu_hat = 1, ties to the lowest index). Every
    third leadership occurrence the leader is played outright; otherwise the
    played arm is the Thompson-sampled throughput argmax within the leader's
    one-hop neighborhood. Unconstrained: tau is ignored.
    """

    LEADER_PERIOD = 3  # gamma + 1 with gamma = 2 neighbors on the path graph

    def __init__(self, rates: RateTable, window: Optional[int] = None):
        super().__init__(rates, window)
        self.leader_count = np.zeros(self.K, dtype=np.int64)
        self._rates_arr = rates.as_array()

    def select(self, t: int, rng: np.random.Generator) -> PolicyDecision:
        n = self._alpha + self._beta - 2.0
        mu_hat = np.divide(self._alpha - 1.0, n, out=np.ones_like(n), where=n > 0)
        leader = int(np.argmax(self._rates_arr * mu_hat))
        self.leader_count[leader] += 1
        if (self.leader_count[leader] - 1) % self.LEADER_PERIOD == 0:
            arm = leader
        else:
            lo = max(0, leader - 1)
            hi = min(self.K - 1, leader + 1)
            mu_tilde = rng.beta(self._alpha[lo:hi + 1], self._beta[lo:hi + 1])
            arm = lo + int(np.argmax(self._rates_arr[lo:hi + 1] * mu_tilde))
        probs = np.zeros(self.K)
        probs[arm] = 1.0
        return PolicyDecision(SelectionVector(probs), arm)


def make_policy(name: str, rates: RateTable, tau: float,
                window: Optional[int] = None):
    """Instantiate a policy by its config name: con-ts, uts, con-kl-ucb."""
    key = name.lower()
    if key == "con-ts":
        return ConTS(rates, tau, window)
    if key == "uts":
        return UTS(rates, window)
    if key == "con-kl-ucb":
        return ConKLUCB(rates, tau, window)
    raise ValueError(f"unknown policy name: {name!r}")
