import math
import random

import numpy as np
import pytest

from genopt.aos import (
    DEFAULT_K_WEIGHTS,
    AosConfig,
    AosStats,
    record,
    sample_k,
    sample_sequence,
    stagnation_check_and_reset,
    update_k_weights,
    update_weights,
)
from genopt.core import Encoding, ObjDef, ProblemConfig, RowModeKind
from genopt.operators import SequenceEntry, SequenceRegistry, build_registry
from genopt.profiles import apply_preset, classify

# frozen once from the chosen rng (seed 12345 / 67890 over the registry below)
GOLDEN_SEQUENCE_DRAWS = [3, 0, 15, 2, 3, 1, 12, 1, 1, 3, 12, 1, 4, 3, 16, 0]
GOLDEN_K_DRAWS = [1, 1, 1, 2, 1, 1, 1, 2, 1, 1, 1, 1, 2, 1, 1, 1]


def perm_cfg(n=8):
    return ProblemConfig(Encoding.permutation(), d1=1, d2=n, n=n,
                         row_mode=RowModeKind.SINGLE_SEQ, obj_defs=(ObjDef("o"),))


def make_registry(weights: dict[int, float], caps: dict[int, float] | None = None):
    entries = [SequenceEntry(i, f"op{i}", lambda s, r, c: None, weight=w,
                             cap=(caps or {}).get(i, math.inf))
               for i, w in weights.items()]
    return SequenceRegistry(entries)


def reference_update(weights, floors, caps, usage, improvement, cfg):
    """Independent EMA + clamp + single normalization, written directly from
    the update rule rather than through the library code paths."""
    pre = []
    for w, lo_extra, cap, u, v in zip(weights, floors, caps, usage, improvement):
        w_new = cfg.ema_alpha * w + (1 - cfg.ema_alpha) * (
            v / (u + cfg.epsilon) + cfg.weight_floor)
        lo = max(cfg.weight_floor, lo_extra)
        hi = min(cfg.weight_cap, cap)
        if hi < lo:
            lo = hi
        pre.append(min(max(w_new, lo), hi))
    total = sum(pre)
    return pre, [p / total for p in pre]


class TestRecord:
    def test_first_record(self):
        stats = AosStats([3, 7])
        record(stats, 7, True)
        assert stats.usage.tolist() == [0, 1]
        assert stats.improvement.tolist() == [0, 1]

    def test_unimproved_records(self):
        stats = AosStats([7])
        for _ in range(3):
            record(stats, 7, False)
        assert stats.usage.tolist() == [3]
        assert stats.improvement.tolist() == [0]

    def test_improvement_never_exceeds_usage(self):
        rng = random.Random(0)
        stats = AosStats([1, 2, 3])
        for _ in range(500):
            record(stats, rng.choice([1, 2, 3]), rng.random() < 0.4)
        assert np.all(stats.improvement <= stats.usage)

    def test_unknown_id_rejected(self):
        with pytest.raises(KeyError):
            record(AosStats([1]), 9, True)

    def test_merge_is_order_independent(self):
        rng = random.Random(3)
        parts = []
        for _ in range(6):
            stats = AosStats([0, 1, 2])
            for _ in range(50):
                stats.record(rng.randrange(3), rng.random() < 0.5)
            parts.append(stats)
        forward = AosStats([0, 1, 2])
        for part in parts:
            forward.merge(part)
        backward = AosStats([0, 1, 2])
        for part in reversed(parts):
            backward.merge(part)
        assert np.array_equal(forward.usage, backward.usage)
        assert np.array_equal(forward.improvement, backward.improvement)


class TestUpdateWeights:
    def test_ema_textbook_value(self):
        # alpha 0.7, w 0.2, u 10, v 5, floor 0.01 -> 0.293 before clamping
        cfg = AosConfig()
        registry = make_registry({0: 0.2, 1: 0.8})
        stats = AosStats([0, 1])
        stats.usage[:] = [10, 0]
        stats.improvement[:] = [5, 0]
        pre = update_weights(registry, stats, cfg)
        assert pre[0] == pytest.approx(0.7 * 0.2 + 0.3 * (5 / (10 + cfg.epsilon) + 0.01),
                                       abs=1e-12)
        assert pre[0] == pytest.approx(0.293, abs=1e-6)

    def test_zero_usage_decays_toward_floor(self):
        cfg = AosConfig()
        registry = make_registry({0: 0.5, 1: 0.5})
        stats = AosStats([0, 1])
        pre = update_weights(registry, stats, cfg)
        assert pre[0] == pytest.approx(0.7 * 0.5 + 0.3 * 0.01)

    def test_per_sequence_cap_binds_pre_normalization(self):
        cfg = AosConfig()
        registry = make_registry({0: 0.9, 16: 0.1}, caps={16: 0.005})
        stats = AosStats([0, 16])
        stats.usage[:] = [5, 50]
        stats.improvement[:] = [0, 50]  # huge observed success, still capped
        pre = update_weights(registry, stats, cfg)
        assert pre[1] <= 0.005 + 1e-15

    def test_counters_zeroed_after_update(self):
        registry = make_registry({0: 1.0})
        stats = AosStats([0])
        stats.usage[:] = [4]
        update_weights(registry, stats, AosConfig())
        assert stats.usage.tolist() == [0] and stats.improvement.tolist() == [0]

    def test_matches_independent_reference_on_fuzzed_tuples(self):
        rng = random.Random(2024)
        for _ in range(1000):
            n = rng.randrange(2, 9)
            alpha = rng.uniform(0.05, 0.95)
            cfg = AosConfig(ema_alpha=alpha)
            weights = [rng.uniform(0.01, 1.0) for _ in range(n)]
            caps = {i: (0.005 if rng.random() < 0.2 else math.inf) for i in range(n)}
            registry = make_registry(dict(enumerate(weights)), caps=caps)
            normalized = [e.weight for e in registry.entries]
            stats = AosStats(range(n))
            usage = [rng.randrange(0, 40) for _ in range(n)]
            improvement = [rng.randrange(0, u + 1) for u in usage]
            stats.usage[:] = usage
            stats.improvement[:] = improvement
            pre = update_weights(registry, stats, cfg)
            ref_pre, ref_norm = reference_update(
                normalized, [0.0] * n, [caps[i] for i in range(n)],
                usage, improvement, cfg)
            assert np.allclose(pre, ref_pre, atol=1e-9)
            assert np.allclose([e.weight for e in registry.entries], ref_norm, atol=1e-9)

    def test_weights_sum_to_one_and_respect_windows(self):
        rng = random.Random(7)
        cfg = AosConfig()
        registry = make_registry({i: rng.uniform(0.05, 1) for i in range(6)},
                                 caps={5: 0.02})
        for _ in range(50):
            stats = AosStats(range(6))
            for i in range(6):
                u = rng.randrange(0, 30)
                stats.usage[i] = u
                stats.improvement[i] = rng.randrange(0, u + 1)
            pre = update_weights(registry, stats, cfg)
            assert abs(sum(e.weight for e in registry.entries) - 1.0) <= 1e-6
            for entry, value in zip(registry.entries, pre):
                hi = min(cfg.weight_cap, entry.cap)
                lo = min(max(cfg.weight_floor, entry.floor), hi)
                assert lo - 1e-12 <= value <= hi + 1e-12

    def test_sustained_success_gains_weight(self):
        cfg = AosConfig()
        registry = make_registry({0: 0.3, 1: 0.3, 2: 0.4})
        ratio_before = registry.entries[0].weight / registry.entries[1].weight
        for _ in range(6):
            stats = AosStats([0, 1, 2])
            stats.usage[:] = [20, 20, 20]
            stats.improvement[:] = [20, 0, 5]
            update_weights(registry, stats, cfg)
        ratio_after = registry.entries[0].weight / registry.entries[1].weight
        assert ratio_after > ratio_before
        assert registry.entries[0].weight <= cfg.weight_cap / \
            sum(min(max(e.weight, 0), 1) for e in registry.entries) + 1.0  # sanity


class TestSampling:
    def test_degenerate_k_weights(self):
        rng = random.Random(1)
        assert all(sample_k((1.0, 0.0, 0.0), rng) == 1 for _ in range(100))

    def test_golden_draw_sequences(self):
        registry = build_registry(perm_cfg())
        rng = random.Random(12345)
        draws = [sample_sequence(registry, rng) for _ in range(16)]
        assert draws == GOLDEN_SEQUENCE_DRAWS
        rng2 = random.Random(67890)
        kdraws = [sample_k(DEFAULT_K_WEIGHTS, rng2) for _ in range(16)]
        assert kdraws == GOLDEN_K_DRAWS

    def test_empirical_frequencies_match_weights(self):
        registry = make_registry({0: 0.5, 1: 0.3, 2: 0.2})
        rng = random.Random(99)
        counts = {0: 0, 1: 0, 2: 0}
        n = 100000
        for _ in range(n):
            counts[sample_sequence(registry, rng)] += 1
        for i, e in enumerate(registry.entries):
            assert abs(counts[e.id] / n - e.weight) < 0.02

    def test_applicability_filter(self):
        registry = make_registry({0: 0.5, 1: 0.5})
        rng = random.Random(5)
        assert all(sample_sequence(registry, rng, applicable=lambda i: i == 1) == 1
                   for _ in range(50))
        with pytest.raises(ValueError):
            sample_sequence(registry, rng, applicable=lambda i: False)


class TestStagnation:
    def test_reset_to_defaults(self):
        cfg = AosConfig()
        weights, counter = stagnation_check_and_reset(cfg.stagnation_threshold + 1,
                                                      (0.2, 0.5, 0.3), cfg)
        assert weights == (0.8, 0.15, 0.05)
        assert counter == 0

    def test_below_threshold_unchanged(self):
        cfg = AosConfig()
        weights, counter = stagnation_check_and_reset(0, (0.2, 0.5, 0.3), cfg)
        assert weights == (0.2, 0.5, 0.3) and counter == 0

    def test_reset_idempotent(self):
        cfg = AosConfig()
        weights = (0.2, 0.5, 0.3)
        for _ in range(3):
            weights, _ = stagnation_check_and_reset(cfg.stagnation_threshold + 1,
                                                    weights, cfg)
        assert weights == (0.8, 0.15, 0.05)


class TestKWeightUpdate:
    def test_update_normalizes_and_floors(self):
        cfg = AosConfig()
        new = update_k_weights((0.8, 0.15, 0.05), [10, 0, 0], [9, 0, 0], cfg)
        assert sum(new) == pytest.approx(1.0)
        assert all(w > 0 for w in new)
        assert new[0] > new[1] > 0


class TestPresetIntegration:
    def test_preset_then_update_respects_lns_cap(self):
        # large-scale profile: LNS capped at 0.005 pre-normalization forever
        cfg_problem = ProblemConfig(Encoding.permutation(), d1=1, d2=442, n=442,
                                    row_mode=RowModeKind.SINGLE_SEQ,
                                    obj_defs=(ObjDef("o"),))
        registry = build_registry(cfg_problem)
        apply_preset(registry, classify(cfg_problem))
        aos_cfg = AosConfig()
        lns_positions = [i for i, e in enumerate(registry.entries) if e.cap == 0.005]
        assert lns_positions
        for _ in range(5):
            stats = AosStats(registry.ids())
            stats.usage[:] = 10
            stats.improvement[:] = 10
            pre = update_weights(registry, stats, aos_cfg)
            for i in lns_positions:
                assert pre[i] <= 0.005 + 1e-15
