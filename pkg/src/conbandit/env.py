"""Ground-truth packet-success environments.

Stationary presets use the standard 802.11a/g rate set with the four
published success-probability profiles (Gradual, Lossy, Steep, Linear). The
non-stationary schedule linearly interpolates between presets in fixed-length
segments. Policies never see the ground truth; they observe only Bernoulli
packet outcomes drawn from it.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .lp import RateTable

__all__ = [
    "EnvironmentSchedule",
    "preset",
    "interpolated",
    "draw_outcome",
    "resolve_environment",
    "PRESET_MUS",
    "WIFI_RATES",
    "PRESET_NAMES",
    "DEFAULT_ANCHORS",
    "DEFAULT_SEGMENT_LEN",
]

WIFI_RATES = RateTable([6, 9, 12, 18, 24, 36, 48, 54])

PRESET_MUS = {
    "gradual": (0.95, 0.90, 0.80, 0.65, 0.45, 0.25, 0.15, 0.10),
    "lossy": (0.90, 0.80, 0.70, 0.55, 0.45, 0.35, 0.20, 0.10),
    "steep": (0.99, 0.98, 0.96, 0.93, 0.90, 0.10, 0.06, 0.04),
    "linear": (1.00, 0.87, 0.75, 0.62, 0.50, 0.37, 0.25, 0.12),
}
PRESET_NAMES = tuple(PRESET_MUS)

# Published non-stationary setup: 250-interval linear segments cycling back
# to the starting profile over T = 1000.
DEFAULT_ANCHORS = ("gradual", "lossy", "steep", "gradual")
DEFAULT_SEGMENT_LEN = 250


class EnvironmentSchedule:
    """Per-interval ground-truth success probabilities mu_k(t), t in 1..T."""

    def __init__(self, rates: RateTable, name: str,
                 static_mu: Optional[np.ndarray] = None,
                 anchors: Optional[np.ndarray] = None,
                 segment_len: int = 0):
        self.rates = rates
        self.name = name
        self._static_mu = static_mu
        self._anchors = anchors
        self._segment_len = segment_len
        if static_mu is None and anchors is None:
            raise ValueError("schedule needs either static probabilities or anchors")

    @property
    def stationary(self) -> bool:
        return self._static_mu is not None

    def mu_of_t(self, t: int) -> np.ndarray:
        """Success probabilities in effect during interval t (1-based)."""
        if t < 1:
            raise ValueError("intervals are 1-based")
        if self._static_mu is not None:
            return self._static_mu
        n_seg = self._anchors.shape[0] - 1
        seg, offset = divmod(t - 1, self._segment_len)
        seg %= n_seg  # traverse the anchor path cyclically
        frac = offset / self._segment_len
        return (1.0 - frac) * self._anchors[seg] + frac * self._anchors[seg + 1]


def preset(name: str) -> EnvironmentSchedule:
    """One of the stationary profiles: Gradual, Lossy, Steep, Linear."""
    key = name.lower()
    if key not in PRESET_MUS:
        raise ValueError(f"unknown environment preset: {name!r}")
    mu = np.asarray(PRESET_MUS[key], dtype=np.float64)
    mu.setflags(write=False)
    return EnvironmentSchedule(WIFI_RATES, key, static_mu=mu)


def interpolated(anchors: Sequence[str], segment_len: int,
                 name: str = "nonstationary") -> EnvironmentSchedule:
    """Piecewise-linear traversal of preset anchors, segment_len intervals each."""
    if len(anchors) < 2:
        raise ValueError("need at least two anchors")
    if segment_len < 1:
        raise ValueError("segment_len must be >= 1")
    table = np.array([PRESET_MUS[a.lower()] for a in anchors], dtype=np.float64)
    if any(a.lower() not in PRESET_MUS for a in anchors):
        raise ValueError("anchors must be preset names")
    return EnvironmentSchedule(WIFI_RATES, name, anchors=table, segment_len=segment_len)


def draw_outcome(schedule: EnvironmentSchedule, t: int, arm: int,
                 rng: np.random.Generator) -> int:
    """One Bernoulli packet outcome for the given interval and arm; one uniform variate."""
    mu = schedule.mu_of_t(t)
    if not 0 <= arm < len(mu):
        raise ValueError("arm index out of range")
    return int(rng.random() < mu[arm])


def resolve_environment(name: str, anchors: Optional[Sequence[str]] = None,
                        segment_len: Optional[int] = None) -> EnvironmentSchedule:
    """Map a config environment name (case-insensitive) to a schedule."""
    key = name.lower()
    if key == "nonstationary":
        return interpolated(anchors or DEFAULT_ANCHORS,
                            segment_len or DEFAULT_SEGMENT_LEN)
    return preset(key)
