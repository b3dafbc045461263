"""Exact solver for the rate-selection linear program.

The problem: given K transmission rates r_k, per-rate success probabilities
mu_k and a success-rate threshold tau, find the probability vector y that
maximizes sum_k y_k * r_k * mu_k subject to sum_k y_k * mu_k >= tau,
sum_k y_k = 1, y >= 0.

Two independent solvers are provided:

* :func:`solve_rate_lp` -- the production path. Because the LP has a single
  resource constraint on top of the simplex constraint, every vertex of the
  feasible polytope has support size at most 2, so the exact optimum is found
  by O(K^2) vertex enumeration.
* :func:`simplex_solve` -- a textbook two-phase dense simplex with Bland's
  pivot rule, used as a testing oracle for the enumeration path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numba import njit

__all__ = [
    "RateTable",
    "LpInstance",
    "SelectionVector",
    "LpSolution",
    "solve_rate_lp",
    "simplex_solve",
    "lp_value",
]

# Feasibility slack for the constraint row; entries within NEG_CLAMP of zero
# are clamped to exactly zero.
FEASIBILITY_TOL = 1e-9
NEG_CLAMP = -1e-12


@dataclass(frozen=True)
class RateTable:
    """The K available transmission rates, in Mbps, strictly increasing."""

    rates: tuple[float, ...]

    def __init__(self, rates: Sequence[float]):
        rates = tuple(float(r) for r in rates)
        if len(rates) < 1:
            raise ValueError("need at least one rate")
        if any(r <= 0 for r in rates):
            raise ValueError("rates must be positive")
        if any(a >= b for a, b in zip(rates, rates[1:])):
            raise ValueError("rates must be strictly increasing")
        object.__setattr__(self, "rates", rates)

    def __len__(self) -> int:
        return len(self.rates)

    @property
    def r_max(self) -> float:
        return self.rates[-1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.rates, dtype=np.float64)


@dataclass(frozen=True)
class LpInstance:
    """Data of one rate-selection LP: rates, plugged-in success probs, threshold."""

    rates: RateTable
    success_probs: tuple[float, ...]
    threshold: float

    def __init__(self, rates: RateTable, success_probs: Sequence[float], threshold: float):
        probs = tuple(float(p) for p in success_probs)
        if len(probs) != len(rates):
            raise ValueError("success_probs length must match number of rates")
        if any(not (0.0 <= p <= 1.0) for p in probs):
            raise ValueError("success_probs must lie in [0, 1]")
        threshold = float(threshold)
        if not (0.0 <= threshold <= 1.0):
            raise ValueError("threshold must lie in [0, 1]")
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "success_probs", probs)
        object.__setattr__(self, "threshold", threshold)

    def __len__(self) -> int:
        return len(self.rates)


class SelectionVector:
    """A probability distribution over the K arms."""

    __slots__ = ("probs",)

    def __init__(self, probs: Sequence[float]):
        arr = np.asarray(probs, dtype=np.float64).copy()
        if np.any(arr < NEG_CLAMP):
            raise ValueError("selection entries must be nonnegative")
        arr[arr < 0.0] = 0.0
        if abs(arr.sum() - 1.0) > 1e-9:
            raise ValueError("selection entries must sum to 1")
        self.probs = arr

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, k: int) -> float:
        return float(self.probs[k])

    def support(self) -> tuple[int, ...]:
        return tuple(int(k) for k in np.nonzero(self.probs > 0.0)[0])

    def __repr__(self) -> str:
        return f"SelectionVector({self.probs.tolist()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, SelectionVector) and np.array_equal(self.probs, other.probs)


@dataclass(frozen=True)
class LpSolution:
    """A feasible LP result: the optimal selection and its objective in Mbps."""

    selection: SelectionVector
    objective: float


# Status codes for the numba kernel.
_INFEASIBLE = 0
_FEASIBLE = 1


@njit(cache=True)
def _enumerate_vertices(rates, mu, tau):
    """Exact optimum by vertex enumeration.

    Candidates: every pure arm with mu_k >= tau, and every pair (i, j) with
    mu_i > tau and mu_j < tau mixed so the constraint binds. Ties on the
    objective are broken towards the lexicographically smallest support
    index set, where a pure support (k,) precedes (k, j).

    Returns (status, probs, objective).
    """
    K = rates.shape[0]
    probs = np.zeros(K)
    mu_max = mu[0]
    for k in range(1, K):
        if mu[k] > mu_max:
            mu_max = mu[k]
    if mu_max < tau:
        return _INFEASIBLE, probs, 0.0

    best_obj = -1.0
    # support encoded as (a, b); b = -1 marks a pure vertex. With that
    # sentinel, plain tuple order gives (k, -1) < (k, j) as required.
    best_a = -1
    best_b = -1
    best_yi = 0.0

    for k in range(K):
        if mu[k] >= tau:
            obj = rates[k] * mu[k]
            if obj > best_obj or (obj == best_obj and (k < best_a or (k == best_a and -1 < best_b))):
                best_obj = obj
                best_a = k
                best_b = -1
                best_yi = 1.0

    for i in range(K):
        if mu[i] <= tau:
            continue
        for j in range(K):
            if mu[j] >= tau:
                continue
            yi = (tau - mu[j]) / (mu[i] - mu[j])
            obj = yi * rates[i] * mu[i] + (1.0 - yi) * rates[j] * mu[j]
            a = i if i < j else j
            b = j if i < j else i
            if obj > best_obj or (
                obj == best_obj and (a < best_a or (a == best_a and b != -1 and b < best_b))
            ):
                best_obj = obj
                best_a = i
                best_b = j
                best_yi = yi

    if best_b == -1:
        probs[best_a] = 1.0
    else:
        probs[best_a] = best_yi
        probs[best_b] = 1.0 - best_yi
    return _FEASIBLE, probs, best_obj


def solve_rate_lp(instance: LpInstance) -> Optional[LpSolution]:
    """Solve the rate-selection LP exactly; ``None`` signals infeasibility.

    Infeasible iff max_k mu_k < tau strictly. The returned selection has
    support size at most 2 and satisfies the constraint within 1e-9.
    """
    rates = instance.rates.as_array()
    mu = np.asarray(instance.success_probs, dtype=np.float64)
    status, probs, objective = _enumerate_vertices(rates, mu, float(instance.threshold))
    if status == _INFEASIBLE:
        return None
    return LpSolution(SelectionVector(probs), float(objective))


def lp_value(selection: SelectionVector, instance: LpInstance) -> float:
    """Objective value sum_k p_k * r_k * mu_k of a selection on an instance."""
    if len(selection) != len(instance):
        raise ValueError("selection and instance have mismatched arm counts")
    mu = np.asarray(instance.success_probs, dtype=np.float64)
    return float(np.dot(selection.probs, instance.rates.as_array() * mu))


# ---------------------------------------------------------------------------
# Independent oracle: two-phase dense simplex with Bland's rule.
# ---------------------------------------------------------------------------


def _simplex_pivot(tableau: np.ndarray, basis: np.ndarray, cost_row: np.ndarray, tol: float = 1e-11):
    """Run Bland-rule pivoting on (tableau | rhs) until cost_row is optimal.

    tableau has shape (m, n + 1) with the rhs in the last column; cost_row has
    length n + 1 holding reduced costs for a minimization problem. Mutates all
    arguments in place. Raises on unboundedness (cannot occur here: the
    simplex constraint bounds the feasible set).
    """
    m, n1 = tableau.shape
    n = n1 - 1
    while True:
        enter = -1
        for j in range(n):  # Bland: smallest index with negative reduced cost
            if cost_row[j] < -tol:
                enter = j
                break
        if enter == -1:
            return
        leave = -1
        best_ratio = np.inf
        for i in range(m):
            a = tableau[i, enter]
            if a > tol:
                ratio = tableau[i, -1] / a
                if ratio < best_ratio - tol or (
                    abs(ratio - best_ratio) <= tol
                    and (leave == -1 or basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave == -1:
            raise RuntimeError("LP unbounded; malformed instance")
        piv = tableau[leave, enter]
        tableau[leave, :] /= piv
        for i in range(m):
            if i != leave and tableau[i, enter] != 0.0:
                tableau[i, :] -= tableau[i, enter] * tableau[leave, :]
        cost_row[:] -= cost_row[enter] * tableau[leave, :]
        basis[leave] = enter


def simplex_solve(instance: LpInstance) -> Optional[LpSolution]:
    """Solve the same LP with a two-phase dense simplex (testing oracle).

    Deterministic via Bland's anti-cycling rule. Agrees with
    :func:`solve_rate_lp` on feasibility exactly and on the objective within
    1e-9; selections may differ when the optimum is degenerate.
    """
    K = len(instance)
    rates = instance.rates.as_array()
    mu = np.asarray(instance.success_probs, dtype=np.float64)
    tau = float(instance.threshold)

    # Standard form: variables [y_1..y_K, s, a_1, a_2], s the surplus of the
    # success constraint, a_* artificials.
    #   mu . y - s + a_1 = tau
    #   1  . y      + a_2 = 1
    n = K + 3
    tableau = np.zeros((2, n + 1))
    tableau[0, :K] = mu
    tableau[0, K] = -1.0
    tableau[0, K + 1] = 1.0
    tableau[0, -1] = tau
    tableau[1, :K] = 1.0
    tableau[1, K + 2] = 1.0
    tableau[1, -1] = 1.0
    basis = np.array([K + 1, K + 2])

    # Phase 1: minimize a_1 + a_2.
    cost = np.zeros(n + 1)
    cost[K + 1] = 1.0
    cost[K + 2] = 1.0
    for i in range(2):  # price out the artificial basis
        cost -= tableau[i, :]
    _simplex_pivot(tableau, basis, cost)
    if -cost[-1] > FEASIBILITY_TOL:
        return None
    # Drive any artificial still in the basis out (degenerate feasible case).
    for i in range(2):
        if basis[i] >= K + 1:
            for j in range(K + 1):
                if abs(tableau[i, j]) > 1e-11:
                    piv = tableau[i, j]
                    tableau[i, :] /= piv
                    for r in range(2):
                        if r != i and tableau[r, j] != 0.0:
                            tableau[r, :] -= tableau[r, j] * tableau[i, :]
                    basis[i] = j
                    break

    # Phase 2: minimize -(r * mu) . y over [y, s]; forbid the artificials.
    tableau2 = np.delete(tableau, [K + 1, K + 2], axis=1)
    cost2 = np.zeros(K + 2)
    cost2[:K] = -(rates * mu)
    for i in range(2):
        if basis[i] <= K:
            cost2 -= cost2[basis[i]] * tableau2[i, :]
    _simplex_pivot(tableau2, basis, cost2)

    y = np.zeros(K)
    for i in range(2):
        if basis[i] < K:
            y[basis[i]] = tableau2[i, -1]
    y[np.abs(y) < 1e-12] = 0.0
    total = y.sum()
    if total > 0:
        y = y / total  # renormalize away pivot round-off
    objective = float(np.dot(y, rates * mu))
    return LpSolution(SelectionVector(y), objective)
