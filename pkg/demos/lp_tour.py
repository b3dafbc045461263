#!/usr/bin/env python3
"""Tour of the rate-selection LP on the built-in channel presets.

For each preset this solves

    max  sum_k y_k * r_k * mu_k
    s.t. sum_k y_k * mu_k >= tau,  sum_k y_k = 1,  y >= 0

and prints the optimal mixture. With a single linear resource constraint on
top of the simplex, the optimum always lives on a vertex with at most two
rates in support — visible in every solution below.
"""

import numpy as np

from conbandit import PRESET_MUS, WIFI_RATES, LpInstance, solve_rate_lp

TAU = 0.75


def describe(name: str, mu: np.ndarray, tau: float) -> None:
    sol = solve_rate_lp(LpInstance(WIFI_RATES, mu, tau))
    print(f"\n{name} (tau = {tau}):")
    if sol is None:
        print("  infeasible: even the most reliable rate misses the target")
        return
    for k in sol.selection.support():
        print(f"  rate {WIFI_RATES.rates[k]:>4g} Mbps  "
              f"weight {sol.selection[k]:.4f}  (mu = {mu[k]:.2f})")
    value = float(sol.selection.probs @ (WIFI_RATES.as_array() * mu))
    print(f"  expected throughput {value:.4f} Mbps, "
          f"success probability {float(sol.selection.probs @ mu):.4f}")


def main() -> None:
    print(f"Rates: {list(WIFI_RATES.rates)} Mbps")
    for name, mu in PRESET_MUS.items():
        describe(name, np.asarray(mu), TAU)

    # Tightening tau trades throughput for reliability until nothing works.
    print("\nGradual channel as tau sweeps up:")
    mu = np.asarray(PRESET_MUS["gradual"])
    for tau in (0.0, 0.5, 0.75, 0.9, 0.96):
        sol = solve_rate_lp(LpInstance(WIFI_RATES, mu, tau))
        if sol is None:
            print(f"  tau={tau:.2f}: infeasible")
        else:
            support = ", ".join(f"{WIFI_RATES.rates[k]:g}" for k in
                                sol.selection.support())
            print(f"  tau={tau:.2f}: throughput {sol.objective:.3f} "
                  f"using rates [{support}]")


if __name__ == "__main__":
    main()
