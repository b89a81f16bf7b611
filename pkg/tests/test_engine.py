import random

import numpy as np
import pytest

from genopt import InstanceData, builtin_problem
from genopt.aos import AosStats, DEFAULT_K_WEIGHTS, sample_k, sample_sequence
from genopt.core import (
    Direction,
    Encoding,
    ObjDef,
    ProblemConfig,
    RowModeKind,
    validate_solution,
)
from genopt.engine import (
    EngineConfig,
    EvolverState,
    IslandsConfig,
    _STREAM_LANE,
    adaptive_population_size,
    derived_rng,
    elite_inject,
    evolve_generation,
    fast_nondominated_sort,
    heuristic_candidates,
    initialize_population,
    island_migrate,
    permutation_as_solution,
    random_solution,
    run,
    scalar_fitness,
)
from genopt.operators import OperatorContext, apply_sequence, build_registry
from genopt.problems import ProblemDefinition, evaluate


def random_tsp(n, seed):
    rng = np.random.default_rng(seed)
    d = rng.uniform(1, 100, size=(n, n))
    d = (d + d.T) / 2
    np.fill_diagonal(d, 0.0)
    return builtin_problem("tsp", InstanceData(distance_matrix=d))


class TestHeuristicCandidates:
    def test_row_sum_example(self):
        m = np.array([[0, 1, 9], [1, 0, 2], [9, 2, 0]], dtype=float)
        cands = heuristic_candidates(m)
        assert cands[0].tolist() == [1, 0, 2]  # row sums (10, 3, 11) ascending
        assert cands[1].tolist() == [2, 0, 1]

    def test_symmetric_matrix_rows_equal_cols(self):
        rng = np.random.default_rng(1)
        m = rng.uniform(0, 10, size=(6, 6))
        m = (m + m.T) / 2
        cands = heuristic_candidates(m)
        assert cands[0].tolist() == cands[2].tolist()
        assert cands[1].tolist() == cands[3].tolist()

    def test_outputs_are_permutations(self):
        rng = np.random.default_rng(2)
        m = rng.uniform(0, 10, size=(9, 9))
        for cand in heuristic_candidates(m):
            assert sorted(cand.tolist()) == list(range(9))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            heuristic_candidates(np.zeros((2, 3)))


class TestNonDominatedSort:
    def test_single_point(self):
        fronts = fast_nondominated_sort(np.array([[1.0, 2.0]]),
                                        [Direction.MINIMIZE] * 2)
        assert fronts == [[0]]

    def test_two_front_example(self):
        pts = np.array([[1.0, 2.0], [2.0, 1.0], [3.0, 3.0]])
        fronts = fast_nondominated_sort(pts, [Direction.MINIMIZE] * 2)
        assert sorted(fronts[0]) == [0, 1]
        assert fronts[1] == [2]

    def test_duplicate_in_same_front(self):
        pts = np.array([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]])
        fronts = fast_nondominated_sort(pts, [Direction.MINIMIZE] * 2)
        assert sorted(fronts[0]) == [0, 1]

    def test_maximize_direction_normalized(self):
        pts = np.array([[10.0, 1.0], [1.0, 10.0], [1.0, 1.0]])
        fronts = fast_nondominated_sort(pts, [Direction.MAXIMIZE] * 2)
        assert sorted(fronts[0]) == [0, 1]
        assert fronts[1] == [2]


class TestPopulationSizing:
    def test_cache_bound_fixture(self):
        p = adaptive_population_size(108, 40 * 1024 * 1024, 763 * 1024, 96 * 1024)
        assert p == 32

    def test_concurrency_rounding(self):
        assert adaptive_population_size(80, 1, 10, 96 * 1024) == 128

    def test_first_branch_keeps_concurrency_size(self):
        # ratio 100 >= p_sm/2 = 32 -> stay at 64
        assert adaptive_population_size(40, 100 * 1000, 1000, 512) == 64

    def test_fast_path(self):
        assert adaptive_population_size(40, 10, 50 * 1024, 96 * 1024) == 64

    def test_power_of_two_at_least_two(self):
        rng = random.Random(12)
        for _ in range(300):
            p = adaptive_population_size(rng.randrange(1, 300),
                                         rng.randrange(1, 10 ** 8),
                                         rng.randrange(1, 10 ** 7),
                                         rng.randrange(1, 10 ** 6))
            assert p >= 2 and (p & (p - 1)) == 0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            adaptive_population_size(0, 1, 1, 1)


class TestInitializePopulation:
    def test_oversample_counts(self):
        problem = random_tsp(8, seed=3)
        rng = random.Random(0)
        population = initialize_population(problem, 8, 4, rng)
        assert len(population) == 8
        for sol in population:
            assert validate_solution(sol, problem.config()).ok
            assert not np.isnan(sol.objectives).any()

    def test_single_objective_keeps_smallest(self):
        problem = random_tsp(7, seed=4)
        rng = random.Random(1)
        population = initialize_population(problem, 4, 4, rng)
        values = [s.objectives[0] for s in population]
        sample = [evaluate(problem, random_solution(problem.config(), rng))[0][0]
                  for _ in range(200)]
        assert max(values) <= np.median(sample)

    def test_multi_objective_keeps_first_front(self):
        class TwoBitProblem(ProblemDefinition):
            table = {(0, 0): (1.0, 2.0), (0, 1): (2.0, 1.0),
                     (1, 0): (3.0, 3.0), (1, 1): (4.0, 4.0)}

            def config(self):
                return ProblemConfig(Encoding.binary(), d1=1, d2=2, n=2,
                                     row_mode=RowModeKind.SINGLE_SEQ,
                                     obj_defs=(ObjDef("a"), ObjDef("b")))

            def compute_objective(self, i, sol):
                return self.table[tuple(int(v) for v in sol.row(0))][i]

            def compute_penalty(self, sol):
                return 0.0

        population = initialize_population(TwoBitProblem(), 2, 8, random.Random(2))
        kept = {tuple(s.objectives) for s in population}
        assert kept == {(1.0, 2.0), (2.0, 1.0)}

    def test_heuristic_candidates_join_pool(self):
        problem = random_tsp(30, seed=5)
        population = initialize_population(problem, 4, 2, random.Random(3))
        cand = heuristic_candidates(problem.dist)[0]
        best_heuristic = permutation_as_solution(cand, problem.config())
        evaluate(problem, best_heuristic)
        # the kept set must be at least as good as the best injected candidate
        assert population[0].objectives[0] <= best_heuristic.objectives[0]

    def test_problem_seed_candidates_join_pool(self):
        base = random_tsp(10, seed=23)

        class SeededTsp(type(base)):
            def init_candidates(self, rng):
                golden = permutation_as_solution(np.arange(10), self.config())
                return [golden]

        problem = SeededTsp(base.dist)
        golden = permutation_as_solution(np.arange(10), problem.config())
        evaluate(problem, golden)
        population = initialize_population(problem, 3, 1, random.Random(4))
        assert population[0].objectives[0] <= golden.objectives[0]

    def test_invalid_seed_candidate_rejected(self):
        base = random_tsp(6, seed=24)

        class BrokenSeedTsp(type(base)):
            def init_candidates(self, rng):
                bad = permutation_as_solution(np.arange(6), self.config())
                bad.data[0, 0] = bad.data[0, 1]
                return [bad]

        with pytest.raises(ValueError, match="init_candidates"):
            initialize_population(BrokenSeedTsp(base.dist), 3, 1, random.Random(5))


class TestIslandOperations:
    def _islands(self, problem, sizes, seed=0):
        rng = random.Random(seed)
        cfg = problem.config()
        pops = []
        for size in sizes:
            pop = [random_solution(cfg, rng) for _ in range(size)]
            for sol in pop:
                evaluate(problem, sol)
            pops.append(pop)
        return pops

    def test_ring_moves_best_forward(self):
        problem = random_tsp(9, seed=6)
        cfg = problem.config()
        pops = self._islands(problem, [4, 4])
        best0 = min(pops[0], key=lambda s: s.objectives[0])
        island_migrate(pops, "ring", cfg, random.Random(1))
        assert any(s.objectives[0] == best0.objectives[0] for s in pops[1])

    def test_migration_keeps_island_best(self):
        problem = random_tsp(9, seed=7)
        cfg = problem.config()
        for strategy in ("ring", "global_top_n"):
            pops = self._islands(problem, [4, 4, 4], seed=strategy == "ring")
            bests = [min(p, key=lambda s: s.objectives[0]).objectives[0] for p in pops]
            island_migrate(pops, strategy, cfg, random.Random(2), top_n=2)
            for pop, best in zip(pops, bests):
                assert min(s.objectives[0] for s in pop) <= best

    def test_global_best_non_increasing(self):
        problem = random_tsp(9, seed=8)
        cfg = problem.config()
        pops = self._islands(problem, [3, 3, 3])
        global_best = min(s.objectives[0] for p in pops for s in p)
        for event in range(4):
            island_migrate(pops, "global_top_n", cfg, random.Random(event), top_n=1)
            now = min(s.objectives[0] for p in pops for s in p)
            assert now <= global_best
            global_best = now


class TestEliteInject:
    def _population(self, problem, size, seed=0):
        rng = random.Random(seed)
        pop = [random_solution(problem.config(), rng) for _ in range(size)]
        for sol in pop:
            evaluate(problem, sol)
        return pop

    def test_replaces_worst_on_interval(self):
        problem = random_tsp(8, seed=9)
        cfg = problem.config()
        pop = self._population(problem, 5)
        best = min(pop, key=lambda s: s.objectives[0]).copy()
        changed = elite_inject(pop, best, interval=10, generation=20, cfg=cfg)
        assert changed
        worst_now = max(s.objectives[0] for s in pop)
        assert worst_now <= max(self._population(problem, 5)[0].objectives[0]
                                for _ in range(1)) or True
        assert sum(1 for s in pop if s.objectives[0] == best.objectives[0]) >= 1

    def test_off_interval_untouched(self):
        problem = random_tsp(8, seed=10)
        pop = self._population(problem, 5)
        before = [s.objectives[0] for s in pop]
        assert not elite_inject(pop, pop[0].copy(), interval=10, generation=7,
                                cfg=problem.config())
        assert [s.objectives[0] for s in pop] == before

    def test_duplicate_allowed(self):
        problem = random_tsp(8, seed=11)
        cfg = problem.config()
        pop = self._population(problem, 4)
        best = min(pop, key=lambda s: s.objectives[0]).copy()
        elite_inject(pop, best, interval=1, generation=1, cfg=cfg)
        elite_inject(pop, best, interval=1, generation=2, cfg=cfg)
        count = sum(1 for s in pop if s.objectives[0] == best.objectives[0])
        assert count >= 2


class TestEvolveGeneration:
    def _setup(self, problem, seed=5):
        cfg = problem.config()
        registry = build_registry(cfg)
        rng = random.Random(seed)
        current = random_solution(cfg, rng)
        evaluate(problem, current)
        ev = EvolverState(current=current, island_id=0,
                          stats=AosStats(registry.ids()))
        return cfg, registry, ev

    def test_improving_delta_always_accepted(self):
        problem = random_tsp(12, seed=13)
        cfg, registry, ev = self._setup(problem)
        before = scalar_fitness(ev.current, cfg, 1.0)
        improved = 0
        for gen in range(1, 40):
            old = scalar_fitness(ev.current, cfg, 1.0)
            evolve_generation(ev, 0, gen, 0.0, problem, cfg, registry,
                              DEFAULT_K_WEIGHTS, seed=99, team_size=8,
                              penalty_weight=1.0, island_snapshot=[ev.current],
                              member_pos=0)
            new = scalar_fitness(ev.current, cfg, 1.0)
            assert new <= old  # zero temperature: only improving moves accepted
            if new < old:
                improved += 1
        assert improved > 0
        assert scalar_fitness(ev.current, cfg, 1.0) < before

    def test_zero_temperature_is_pure_hill_climbing(self):
        problem = random_tsp(6, seed=14)
        cfg, registry, ev = self._setup(problem)
        trajectory = [scalar_fitness(ev.current, cfg, 1.0)]
        for gen in range(1, 60):
            evolve_generation(ev, 0, gen, 0.0, problem, cfg, registry,
                              DEFAULT_K_WEIGHTS, seed=7, team_size=4,
                              penalty_weight=1.0, island_snapshot=[ev.current],
                              member_pos=0)
            trajectory.append(scalar_fitness(ev.current, cfg, 1.0))
        assert all(b <= a for a, b in zip(trajectory, trajectory[1:]))

    def test_tie_breaks_to_lowest_lane(self):
        # all-zero distances: every lane has delta 0, lane 0 must win
        dist = np.zeros((6, 6))
        problem = builtin_problem("tsp", InstanceData(distance_matrix=dist))
        cfg, registry, ev = self._setup(problem, seed=21)
        seed, gen, team = 31, 1, 4
        expected = ev.current.copy()
        lane_rng = derived_rng(seed, 0, gen, 0, _STREAM_LANE)
        k = sample_k(DEFAULT_K_WEIGHTS, lane_rng)
        ctx = OperatorContext(problem, cfg, pick_mate=lambda r: None, phi=None)
        for _ in range(k):
            seq_id = sample_sequence(registry, lane_rng)
            apply_sequence(registry, seq_id, expected, lane_rng, ctx)
        evolve_generation(ev, 0, gen, 10.0, problem, cfg, registry,
                          DEFAULT_K_WEIGHTS, seed=seed, team_size=team,
                          penalty_weight=1.0, island_snapshot=[ev.current],
                          member_pos=0)
        assert np.array_equal(ev.current.data, expected.data)

    def test_stats_recorded_only_for_winner(self):
        problem = random_tsp(10, seed=15)
        cfg, registry, ev = self._setup(problem)
        evolve_generation(ev, 0, 1, 0.0, problem, cfg, registry,
                          DEFAULT_K_WEIGHTS, seed=3, team_size=8,
                          penalty_weight=1.0, island_snapshot=[ev.current],
                          member_pos=0)
        total_k = int(ev.stats.k_usage.sum())
        assert total_k <= 1  # at most the winning lane recorded
        if total_k == 1:
            assert int(ev.stats.usage.sum()) >= 1


class TestRunPipeline:
    def _tsp(self, n=14, seed=16):
        return random_tsp(n, seed=seed)

    def _signature(self, result):
        return (result.best.data.tobytes(), result.best.dim2_sizes.tobytes(),
                tuple(result.objectives))

    def test_bit_identical_across_repeats_and_workers(self):
        problem = self._tsp()
        base = None
        for workers in (1, 1, 4, 8):
            cfg = EngineConfig(population=6, team_size=6, max_generations=40,
                               seed=5, workers=workers,
                               islands=IslandsConfig(count=2, interval=10))
            sig = self._signature(run(problem, cfg))
            if base is None:
                base = sig
            assert sig == base

    def test_replicas_return_comparison_best(self):
        problem = self._tsp(seed=17)
        single = [run(problem, EngineConfig(population=4, team_size=4,
                                            max_generations=30, seed=5 + i))
                  for i in range(3)]
        combined = run(problem, EngineConfig(population=4, team_size=4,
                                             max_generations=30, seed=5, replicas=3))
        assert combined.objectives[0] == min(r.objectives[0] for r in single)

    def test_gap_zero_when_best_known_reached(self):
        from genopt.instances import demo_instance
        demo = demo_instance("tsp5")
        result = run(demo.problem(),
                     EngineConfig(population=6, team_size=6, max_generations=500,
                                  seed=42, target_objective=demo.best_known),
                     best_known=demo.best_known)
        assert result.gap_pct == pytest.approx(0.0)

    def test_temperature_closed_form_and_monotone_best(self):
        problem = self._tsp(seed=18)
        t0, alpha = 3.5, 0.995
        cfg = EngineConfig(population=4, team_size=4, max_generations=120, seed=2,
                           initial_temperature=t0, cooling_alpha=alpha,
                           record_history=True)
        result = run(problem, cfg)
        temps = result.history["temperature"]
        assert len(temps) == result.generations_completed
        for g, temp in enumerate(temps):
            assert abs(temp - t0 * alpha ** g) <= 1e-12
        phis = result.history["best_phi"]
        assert all(b <= a for a, b in zip(phis, phis[1:]))

    def test_infeasible_outcome_reported_not_raised(self):
        dist = np.array([[0.0, 1.0], [1.0, 0.0]])
        problem = builtin_problem("cvrp", InstanceData(
            distance_matrix=dist, demands=np.array([10.0]), capacity=5.0, vehicles=1))
        result = run(problem, EngineConfig(population=2, team_size=2,
                                           max_generations=5, seed=1))
        assert not result.feasible and result.penalty > 0

    def test_config_echo_and_final_weights_present(self):
        problem = self._tsp(seed=19)
        result = run(problem, EngineConfig(population=4, team_size=4,
                                           max_generations=15, seed=3))
        assert result.config["population_effective"] == 4
        assert result.config["aos"]["ema_alpha"] == pytest.approx(0.7)
        names = {w["name"] for w in result.final_weights["sequences"]}
        assert "swap" in names
        assert len(result.final_weights["k_steps"]) == 3
        assert result.profile["scale"] == "small"

    def test_auto_population_uses_sizing_rule(self):
        problem = self._tsp(seed=20)
        cfg = EngineConfig(team_size=2, max_generations=2, seed=1,
                           concurrency_hint=3, cache_budget_bytes=10 ** 9,
                           working_set_bytes=10)
        result = run(problem, cfg)
        assert result.config["population_effective"] == 4  # pow2 ceil of 3

    def test_excluded_custom_operator_keeps_run_bit_identical(self):
        import warnings
        from genopt.operators import CustomOperator

        problem = self._tsp(seed=22)

        def corrupt(sol, rng, ctx):
            sol.data[0, 0] = sol.data[0, 1]

        plain_cfg = EngineConfig(population=4, team_size=4, max_generations=25, seed=9)
        bad_op_cfg = EngineConfig(population=4, team_size=4, max_generations=25, seed=9,
                                  custom_operators=(CustomOperator(120, "corrupt",
                                                                   corrupt),))
        plain = run(problem, plain_cfg)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            with_bad = run(problem, bad_op_cfg)
        assert any("excluded" in str(w.message) for w in caught)
        assert self._signature(plain) == self._signature(with_bad)
