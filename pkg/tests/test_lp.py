import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conbandit.lp import (
    LpInstance,
    RateTable,
    SelectionVector,
    lp_value,
    simplex_solve,
    solve_rate_lp,
)

WIFI = RateTable([6, 9, 12, 18, 24, 36, 48, 54])
STEEP = [0.99, 0.98, 0.96, 0.93, 0.90, 0.10, 0.06, 0.04]
GRADUAL = [0.95, 0.90, 0.80, 0.65, 0.45, 0.25, 0.15, 0.10]
LOSSY = [0.90, 0.80, 0.70, 0.55, 0.45, 0.35, 0.20, 0.10]
LINEAR = [1.00, 0.87, 0.75, 0.62, 0.50, 0.37, 0.25, 0.12]


def random_instance(rng):
    K = int(rng.integers(2, 9))
    rates = RateTable(np.sort(rng.uniform(1, 60, K)) + np.arange(K) * 1e-3)
    return LpInstance(rates, rng.uniform(0, 1, K), float(rng.uniform(0, 1)))


class TestRateTable:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            RateTable([])

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            RateTable([0, 6])

    def test_rejects_nonincreasing(self):
        with pytest.raises(ValueError):
            RateTable([6, 6])

    def test_r_max(self):
        assert WIFI.r_max == 54


class TestSolveRateLp:
    def test_steep_pure_24mbps(self):
        sol = solve_rate_lp(LpInstance(WIFI, STEEP, 0.75))
        assert sol.selection.support() == (4,)
        assert sol.objective == pytest.approx(21.6, abs=1e-9)

    def test_gradual_two_arm_mix(self):
        sol = solve_rate_lp(LpInstance(WIFI, GRADUAL, 0.75))
        assert sol.selection.support() == (2, 3)
        assert sol.selection[2] == pytest.approx(2 / 3, abs=1e-9)
        assert sol.selection[3] == pytest.approx(1 / 3, abs=1e-9)
        assert sol.objective == pytest.approx(10.3, abs=1e-9)

    def test_tau_zero_degenerates_to_argmax(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            inst = random_instance(rng)
            inst = LpInstance(inst.rates, inst.success_probs, 0.0)
            sol = solve_rate_lp(inst)
            scores = inst.rates.as_array() * np.asarray(inst.success_probs)
            assert sol.selection.support() == (int(np.argmax(scores)),)

    def test_infeasible_when_all_below_threshold(self):
        assert solve_rate_lp(LpInstance(RateTable([6, 9]), [0.5, 0.3], 0.9)) is None

    def test_boundary_mu_equal_tau_is_pure_feasible(self):
        sol = solve_rate_lp(LpInstance(RateTable([6.0]), [0.75], 0.75))
        assert sol.selection.support() == (0,)
        assert sol.objective == pytest.approx(6.0 * 0.75)

    def test_determinism_bit_identical(self):
        inst = LpInstance(WIFI, LOSSY, 0.75)
        a = solve_rate_lp(inst)
        b = solve_rate_lp(inst)
        assert a.objective == b.objective
        assert np.array_equal(a.selection.probs, b.selection.probs)

    def test_output_feasibility_and_support(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            inst = random_instance(rng)
            sol = solve_rate_lp(inst)
            if sol is None:
                assert max(inst.success_probs) < inst.threshold
                continue
            p = sol.selection.probs
            assert np.all(p >= 0)
            assert abs(p.sum() - 1.0) <= 1e-9
            assert float(p @ np.asarray(inst.success_probs)) >= inst.threshold - 1e-9
            assert len(sol.selection.support()) <= 2

    def test_objective_monotone_in_tau(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            inst = random_instance(rng)
            t1, t2 = sorted(rng.uniform(0, max(inst.success_probs), 2))
            o1 = solve_rate_lp(LpInstance(inst.rates, inst.success_probs, t1))
            o2 = solve_rate_lp(LpInstance(inst.rates, inst.success_probs, t2))
            assert o1 is not None and o2 is not None
            assert o1.objective >= o2.objective - 1e-9


class TestSimplexOracle:
    def test_steep_objective(self):
        sol = simplex_solve(LpInstance(WIFI, STEEP, 0.75))
        assert sol.objective == pytest.approx(21.6, abs=1e-9)

    def test_single_arm_at_threshold(self):
        sol = simplex_solve(LpInstance(RateTable([12.0]), [0.6], 0.6))
        assert sol.selection.support() == (0,)

    def test_infeasibility_agrees(self):
        assert simplex_solve(LpInstance(RateTable([6, 9]), [0.5, 0.3], 0.9)) is None

    def test_cross_oracle_thousand_instances(self):
        rng = np.random.default_rng(20240817)
        for _ in range(1000):
            inst = random_instance(rng)
            fast = solve_rate_lp(inst)
            oracle = simplex_solve(inst)
            assert (fast is None) == (oracle is None)
            if fast is not None:
                assert fast.objective == pytest.approx(oracle.objective, abs=1e-9)


@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_hypothesis_oracle_equivalence(K, seed):
    rng = np.random.default_rng(seed)
    rates = RateTable(np.sort(rng.uniform(1, 60, K)) + np.arange(K) * 1e-3)
    inst = LpInstance(rates, rng.uniform(0, 1, K), float(rng.uniform(0, 1)))
    fast = solve_rate_lp(inst)
    oracle = simplex_solve(inst)
    assert (fast is None) == (oracle is None)
    if fast is not None:
        assert abs(fast.objective - oracle.objective) <= 1e-9


class TestLpValue:
    def test_one_hot_steep(self):
        sel = SelectionVector([0, 0, 0, 0, 1, 0, 0, 0])
        assert lp_value(sel, LpInstance(WIFI, STEEP, 0.75)) == pytest.approx(21.6)

    def test_zero_mu_gives_zero(self):
        sel = SelectionVector([0.5, 0.5])
        assert lp_value(sel, LpInstance(RateTable([6, 9]), [0, 0], 0.0)) == 0.0

    def test_gradual_optimum_value(self):
        inst = LpInstance(WIFI, GRADUAL, 0.75)
        sol = solve_rate_lp(inst)
        assert lp_value(sol.selection, inst) == pytest.approx(10.3, abs=1e-9)

    def test_length_mismatch_raises(self):
        with pytest.raises(ValueError):
            lp_value(SelectionVector([1.0]), LpInstance(WIFI, STEEP, 0.75))


class TestSelectionVector:
    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            SelectionVector([-0.1, 1.1])

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            SelectionVector([0.5, 0.4])

    def test_clamps_tiny_negative(self):
        sel = SelectionVector([1.0 + 5e-13, -5e-13])
        assert sel[1] == 0.0
