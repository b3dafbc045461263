"""Latency-constrained wireless rate selection with constrained Thompson sampling.

A library and simulation harness: an exact solver for the rate-selection LP,
three bandit policies (Con-TS, UTS, Con-KL-UCB) with optional sliding-window
forgetting, synthetic WiFi environments, evaluation metrics, and a seeded,
reproducible experiment runner with a CLI front end.
"""

from .env import (
    PRESET_MUS,
    PRESET_NAMES,
    WIFI_RATES,
    EnvironmentSchedule,
    draw_outcome,
    interpolated,
    preset,
    resolve_environment,
)
from .lp import (
    LpInstance,
    LpSolution,
    RateTable,
    SelectionVector,
    lp_value,
    simplex_solve,
    solve_rate_lp,
)
from .metrics import (
    MetricsLog,
    StepRecord,
    confidence_bounds,
    moving_average,
    regret,
    theorem_bounds,
    tput_violation_ratio,
    violation,
)
from .policies import (
    BetaPosterior,
    ConKLUCB,
    ConTS,
    ObservationWindow,
    PolicyDecision,
    UTS,
    con_ts_select,
    con_ts_update,
    kl_bernoulli,
    kl_ucb_index,
    make_policy,
    windowed_update,
)
from .sim import (
    AggregatedResults,
    ExperimentConfig,
    run_experiment,
    run_single,
)

__all__ = [name for name in dir() if not name.startswith("_")]
