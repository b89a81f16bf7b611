"""Two-level adaptive operator selection.

Each evolver owns usage/improvement counters per sequence; every update
interval the engine aggregates them, reweights the registry through an
exponential moving average, clamps into per-sequence windows, normalizes
once, and zeroes the counters. Step-count (K-level) weights follow the
same update and are reset to the defaults on stagnation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import SequenceRegistry

# K-level defaults, also the stagnation reset target.
DEFAULT_K_WEIGHTS = (0.8, 0.15, 0.05)


@dataclass(frozen=True)
class AosConfig:
    update_interval: int = 10
    ema_alpha: float = 0.7
    weight_floor: float = 0.01
    weight_cap: float = 0.6
    epsilon: float = 1e-6
    stagnation_threshold: int = 5

    def __post_init__(self):
        if not (0.0 < self.ema_alpha < 1.0):
            raise ValueError("ema_alpha must be in (0, 1)")
        if self.weight_floor >= self.weight_cap:
            raise ValueError("weight_floor must be below weight_cap")
        if self.update_interval < 1:
            raise ValueError("update_interval must be >= 1")

    def as_dict(self) -> dict:
        # echoed into run results so defaults are reproducible
        return {
            "update_interval": self.update_interval,
            "ema_alpha": self.ema_alpha,
            "weight_floor": self.weight_floor,
            "weight_cap": self.weight_cap,
            "epsilon": self.epsilon,
            "stagnation_threshold": self.stagnation_threshold,
        }


class AosStats:
    """Per-evolver usage (u) and improvement (v) counters, plus the same
    pair for the three step counts."""

    __slots__ = ("ids", "_pos", "usage", "improvement", "k_usage", "k_improvement")

    def __init__(self, ids):
        self.ids = tuple(ids)
        self._pos = {seq_id: i for i, seq_id in enumerate(self.ids)}
        self.usage = np.zeros(len(self.ids), dtype=np.int64)
        self.improvement = np.zeros(len(self.ids), dtype=np.int64)
        self.k_usage = np.zeros(3, dtype=np.int64)
        self.k_improvement = np.zeros(3, dtype=np.int64)

    def record(self, seq_id: int, improved: bool):
        try:
            pos = self._pos[seq_id]
        except KeyError:
            raise KeyError(f"sequence id {seq_id} is not registered") from None
        self.usage[pos] += 1
        if improved:
            self.improvement[pos] += 1

    def record_k(self, k: int, improved: bool):
        self.k_usage[k - 1] += 1
        if improved:
            self.k_improvement[k - 1] += 1

    def merge(self, other: "AosStats"):
        self.usage += other.usage
        self.improvement += other.improvement
        self.k_usage += other.k_usage
        self.k_improvement += other.k_improvement

    def reset(self):
        self.usage[:] = 0
        self.improvement[:] = 0
        self.k_usage[:] = 0
        self.k_improvement[:] = 0


def record(stats: AosStats, seq_id: int, improved: bool):
    stats.record(seq_id, improved)


def ema_weight(w: float, u: int, v: int, cfg: AosConfig) -> float:
    """One EMA step: alpha * w + (1 - alpha) * (v / (u + eps) + floor)."""
    return cfg.ema_alpha * w + (1.0 - cfg.ema_alpha) * (
        v / (u + cfg.epsilon) + cfg.weight_floor
    )


def clamp_window(seq_floor: float, seq_cap: float, cfg: AosConfig) -> tuple[float, float]:
    """Clamp window [floor, min(cap, per-sequence cap)].

    A per-sequence cap below the floor wins (the LNS presets sit below the
    global floor on purpose), giving a degenerate one-point window.
    """
    lo = max(cfg.weight_floor, seq_floor)
    hi = min(cfg.weight_cap, seq_cap)
    if hi < lo:
        lo = hi
    return lo, hi


def update_weights(registry: SequenceRegistry, aggregated: AosStats,
                   cfg: AosConfig) -> np.ndarray:
    """EMA update, clamp, single normalization; zeroes the counters.

    Returns the pre-normalization weights so callers can assert the clamp
    window (the registry itself is left normalized).
    """
    if tuple(aggregated.ids) != tuple(registry.ids()):
        raise ValueError("stats and registry cover different sequence ids")
    pre = np.empty(len(registry.entries))
    for i, entry in enumerate(registry.entries):
        w = ema_weight(entry.weight, int(aggregated.usage[i]),
                       int(aggregated.improvement[i]), cfg)
        lo, hi = clamp_window(entry.floor, entry.cap, cfg)
        pre[i] = min(max(w, lo), hi)
        entry.weight = pre[i]
    registry.normalize()
    aggregated.reset()
    return pre


def update_k_weights(k_weights, k_usage, k_improvement, cfg: AosConfig) -> tuple:
    """Same EMA for the step-count level; floor-clamped and normalized
    (no cap: the defaults themselves sit above the sequence cap)."""
    new = []
    for w, u, v in zip(k_weights, k_usage, k_improvement):
        new.append(max(ema_weight(w, int(u), int(v), cfg), cfg.weight_floor))
    total = sum(new)
    return tuple(w / total for w in new)


def sample_k(k_weights, rng) -> int:
    """Draw a step count in {1, 2, 3} proportional to the K-level weights."""
    x = rng.random() * (k_weights[0] + k_weights[1] + k_weights[2])
    if x < k_weights[0]:
        return 1
    if x < k_weights[0] + k_weights[1]:
        return 2
    return 3


def sample_sequence(registry: SequenceRegistry, rng, applicable=None) -> int:
    """Draw a sequence id proportional to registry weight.

    `applicable` optionally restricts the draw to a predicate over ids;
    weights are renormalized over the filtered set.
    """
    entries = registry.entries
    if applicable is not None:
        entries = [e for e in entries if applicable(e.id)]
        if not entries:
            raise ValueError("no applicable sequences to sample from")
    total = sum(e.weight for e in entries)
    x = rng.random() * total
    acc = 0.0
    for e in entries:
        acc += e.weight
        if x < acc:
            return e.id
    return entries[-1].id


def stagnation_check_and_reset(no_improve_batches: int, k_weights,
                               cfg: AosConfig) -> tuple[tuple, int]:
    """Reset K-level weights to the defaults after sustained stagnation.

    Returns (possibly reset weights, updated counter).
    """
    if no_improve_batches > cfg.stagnation_threshold:
        return DEFAULT_K_WEIGHTS, 0
    return tuple(k_weights), no_improve_batches
