"""Evolution core: candidate-lane generations with simulated annealing
acceptance, oversampled initialization, islands, elite injection,
cache-aware population sizing, and independent-replica runs.

Determinism contract: every stochastic decision draws from a stream
derived by hashing (seed, evolver index, generation, lane), so results
are bit-identical across repeated runs and across worker-pool sizes.
Lane ties resolve to the lowest lane index.
"""

from __future__ import annotations

import math
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cmp_to_key

import numpy as np

from .aos import (
    DEFAULT_K_WEIGHTS,
    AosConfig,
    AosStats,
    sample_k,
    sample_sequence,
    stagnation_check_and_reset,
    update_k_weights,
    update_weights,
)
from .core import (
    A_BETTER,
    B_BETTER,
    Direction,
    EncodingKind,
    Lexicographic,
    ProblemConfig,
    RowModeKind,
    Solution,
    Weighted,
    scalarize,
    compare,
    validate_solution,
)
from .operators import (
    CustomOperator,
    OperatorContext,
    SequenceRegistry,
    apply_sequence,
    build_registry,
    register_custom,
)
from .problems import ProblemDefinition, evaluate
from .profiles import apply_preset, classify

_MASK64 = (1 << 64) - 1

ENV_CACHE_BUDGET = "GENOPT_CACHE_BUDGET"
ENV_PARALLELISM = "GENOPT_PAR"

DEFAULT_CACHE_BUDGET = 32 * 1024 * 1024
DEFAULT_FAST_BUDGET = 96 * 1024

# stream discriminators so unrelated draws never share a stream
_STREAM_LANE = 0
_STREAM_ACCEPT = 1
_STREAM_INIT = 2
_STREAM_MIGRATION = 3
_STREAM_PROBE = 4


def mix64(*parts: int) -> int:
    """Deterministic 64-bit mix of integer parts (splitmix64 finalizer)."""
    h = 0x9E3779B97F4A7C15
    for p in parts:
        h ^= p & _MASK64
        h = (h * 0xBF58476D1CE4E5B9) & _MASK64
        h ^= h >> 27
        h = (h * 0x94D049BB133111EB) & _MASK64
        h ^= h >> 31
    return h


def derived_rng(*parts: int) -> random.Random:
    return random.Random(mix64(*parts))


@dataclass(frozen=True)
class IslandsConfig:
    count: int = 1
    migration: str = "ring"  # ring | global_top_n | hybrid
    interval: int = 100
    top_n: int = 1

    def __post_init__(self):
        if self.count < 1 or self.interval < 1 or self.top_n < 1:
            raise ValueError("island count, interval and top_n must be >= 1")
        if self.migration not in ("ring", "global_top_n", "hybrid"):
            raise ValueError(f"unknown migration strategy {self.migration!r}")

    def as_dict(self):
        return {"count": self.count, "migration": self.migration,
                "interval": self.interval, "top_n": self.top_n}


@dataclass
class EngineConfig:
    population: int | None = None  # None: cache-aware automatic sizing
    team_size: int = 128
    max_generations: int = 1000
    time_limit_seconds: float | None = None
    seed: int = 42
    initial_temperature: float | None = None
    cooling_alpha: float = 0.999
    oversample_factor: int = 4
    islands: IslandsConfig = field(default_factory=IslandsConfig)
    elite_injection_interval: int = 50
    replicas: int = 1
    cache_budget_bytes: int | None = None
    concurrency_hint: int | None = None
    fast_budget_bytes: int = DEFAULT_FAST_BUDGET
    working_set_bytes: int | None = None
    workers: int = 1
    aos: AosConfig = field(default_factory=AosConfig)
    custom_operators: tuple[CustomOperator, ...] = ()
    target_objective: float | None = None
    record_history: bool = False

    def __post_init__(self):
        if self.team_size < 1:
            raise ValueError("team_size must be >= 1")
        if self.population is not None and self.population < self.islands.count:
            raise ValueError("population must cover at least one member per island")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.oversample_factor < 1:
            raise ValueError("oversample_factor must be >= 1")
        if not (0.0 < self.cooling_alpha <= 1.0):
            raise ValueError("cooling_alpha must be in (0, 1]")
        if self.elite_injection_interval < 1:
            raise ValueError("elite_injection_interval must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def resolved_cache_budget(self) -> int:
        if self.cache_budget_bytes is not None:
            return self.cache_budget_bytes
        env = os.environ.get(ENV_CACHE_BUDGET)
        return int(env) if env else DEFAULT_CACHE_BUDGET

    def resolved_concurrency_hint(self) -> int:
        if self.concurrency_hint is not None:
            return self.concurrency_hint
        env = os.environ.get(ENV_PARALLELISM)
        if env:
            return int(env)
        return os.cpu_count() or 1

    def as_dict(self) -> dict:
        return {
            "population": self.population,
            "team_size": self.team_size,
            "max_generations": self.max_generations,
            "time_limit_seconds": self.time_limit_seconds,
            "seed": self.seed,
            "initial_temperature": self.initial_temperature,
            "cooling_alpha": self.cooling_alpha,
            "oversample_factor": self.oversample_factor,
            "islands": self.islands.as_dict(),
            "elite_injection_interval": self.elite_injection_interval,
            "replicas": self.replicas,
            "cache_budget_bytes": self.cache_budget_bytes,
            "concurrency_hint": self.concurrency_hint,
            "fast_budget_bytes": self.fast_budget_bytes,
            "working_set_bytes": self.working_set_bytes,
            "workers": self.workers,
            "aos": self.aos.as_dict(),
            "custom_operators": [op.name for op in self.custom_operators],
            "target_objective": self.target_objective,
        }


@dataclass
class EvolverState:
    current: Solution
    island_id: int
    stats: AosStats
    temperature: float = 0.0


@dataclass
class RunResult:
    best: Solution
    objectives: list[float]
    penalty: float
    feasible: bool
    gap_pct: float | None
    generations_completed: int
    elapsed_seconds: float
    gens_per_sec: float
    final_weights: dict
    profile: dict
    config: dict
    seed: int
    history: dict | None = None


# ---------------------------------------------------------------------------
# fitness scalarization and acceptance delta

def scalar_fitness(sol: Solution, cfg: ProblemConfig, penalty_weight: float) -> float:
    """Direction-normalized weighted objective plus penalty term (lower wins)."""
    mode = cfg.comparison_or_default()
    if isinstance(mode, Weighted):
        weights = mode.weights
    else:
        weights = tuple(o.weight for o in cfg.obj_defs)
    return scalarize(sol.objectives, cfg.obj_defs, weights) + penalty_weight * sol.penalty


def acceptance_delta(cand: Solution, current: Solution, cfg: ProblemConfig,
                     penalty_weight: float) -> float:
    """Candidate-vs-current delta for annealing acceptance.

    Weighted mode compares scalarized fitness. Lexicographic mode takes the
    delta on the highest-priority objective not tied under its tolerance
    (zero when all tie), with penalties folded in both cases.
    """
    mode = cfg.comparison_or_default()
    if isinstance(mode, Weighted):
        return scalar_fitness(cand, cfg, penalty_weight) - scalar_fitness(current, cfg, penalty_weight)
    assert isinstance(mode, Lexicographic)
    d = 0.0
    for i in mode.priority_order:
        diff = float(cand.objectives[i]) - float(current.objectives[i])
        if abs(diff) <= mode.tolerances[i]:
            continue
        if cfg.obj_defs[i].direction is Direction.MAXIMIZE:
            diff = -diff
        d = diff
        break
    return d + penalty_weight * (cand.penalty - current.penalty)


# ---------------------------------------------------------------------------
# solution construction

def random_solution(cfg: ProblemConfig, rng: random.Random) -> Solution:
    data = np.zeros((cfg.d1, cfg.d2), dtype=np.int64)
    sizes = np.zeros(cfg.d1, dtype=np.int64)
    kind = cfg.encoding.kind
    if kind is EncodingKind.PERMUTATION:
        if cfg.row_mode is RowModeKind.SINGLE_SEQ:
            perm = list(range(cfg.n))
            rng.shuffle(perm)
            data[0, :cfg.n] = perm
            sizes[0] = cfg.n
        elif cfg.row_mode is RowModeKind.MULTI_FIXED:
            for r in range(cfg.d1):
                perm = list(range(cfg.n))
                rng.shuffle(perm)
                data[r, :cfg.n] = perm
                sizes[r] = cfg.n
        else:
            values = list(range(cfg.n))
            rng.shuffle(values)
            for v in values:
                open_rows = [r for r in range(cfg.d1) if sizes[r] < cfg.d2]
                r = open_rows[rng.randrange(len(open_rows))]
                data[r, sizes[r]] = v
                sizes[r] += 1
    elif kind is EncodingKind.BINARY:
        for r in range(cfg.d1):
            sizes[r] = cfg.d2
            for p in range(cfg.d2):
                data[r, p] = rng.randrange(2)
    else:
        lb, ub = cfg.encoding.lower_bound, cfg.encoding.upper_bound
        for r in range(cfg.d1):
            sizes[r] = cfg.d2
            for p in range(cfg.d2):
                data[r, p] = rng.randrange(lb, ub + 1)
    return Solution(data, sizes, cfg.num_objectives)


def heuristic_candidates(matrix: np.ndarray) -> list[np.ndarray]:
    """Four attribute-agnostic permutations: ascending/descending argsorts
    of the row sums and of the column sums."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"heuristic construction needs a square matrix, got {m.shape}")
    row_sums = m.sum(axis=1)
    col_sums = m.sum(axis=0)
    row_asc = np.argsort(row_sums, kind="stable")
    col_asc = np.argsort(col_sums, kind="stable")
    return [row_asc.astype(np.int64), row_asc[::-1].astype(np.int64),
            col_asc.astype(np.int64), col_asc[::-1].astype(np.int64)]


def permutation_as_solution(perm: np.ndarray, cfg: ProblemConfig) -> Solution:
    """Wrap a flat permutation into the configured row layout (even split
    for partitions, replicated rows for fixed multi-sequences)."""
    data = np.zeros((cfg.d1, cfg.d2), dtype=np.int64)
    sizes = np.zeros(cfg.d1, dtype=np.int64)
    if cfg.row_mode is RowModeKind.SINGLE_SEQ:
        data[0, :cfg.n] = perm
        sizes[0] = cfg.n
    elif cfg.row_mode is RowModeKind.MULTI_FIXED:
        for r in range(cfg.d1):
            data[r, :cfg.n] = perm
            sizes[r] = cfg.n
    else:
        base, extra = divmod(cfg.n, cfg.d1)
        at = 0
        for r in range(cfg.d1):
            size = base + (1 if r < extra else 0)
            data[r, :size] = perm[at:at + size]
            sizes[r] = size
            at += size
    return Solution(data, sizes, cfg.num_objectives)


def initialize_population(problem: ProblemDefinition, pop_size: int,
                          oversample_factor: int, rng: random.Random) -> list[Solution]:
    """Oversample-then-select: random candidates plus the bidirectional
    heuristic pool, keeping the best `pop_size` (non-dominated sorting when
    the problem is multi-objective)."""
    cfg = problem.config()
    candidates = [random_solution(cfg, rng) for _ in range(oversample_factor * pop_size)]
    if cfg.encoding.kind is EncodingKind.PERMUTATION:
        for matrix in problem.init_matrices():
            if matrix.shape == (cfg.n, cfg.n):
                for perm in heuristic_candidates(matrix):
                    candidates.append(permutation_as_solution(perm, cfg))
    seeded = problem.init_candidates(rng)
    if seeded:
        for sol in seeded:
            report = validate_solution(sol, cfg)
            if not report.ok:
                raise ValueError(f"init_candidates produced an invalid solution: {report.violations[0]}")
            candidates.append(sol.copy())
    for sol in candidates:
        evaluate(problem, sol, validate=False)
    if cfg.num_objectives == 1:
        ranked = sorted(candidates, key=cmp_to_key(lambda a, b: compare(a, b, cfg)))
        return ranked[:pop_size]
    fronts = fast_nondominated_sort(
        np.array([s.objectives for s in candidates]),
        [o.direction for o in cfg.obj_defs],
    )
    keep: list[Solution] = []
    for front in fronts:
        for idx in front:
            if len(keep) < pop_size:
                keep.append(candidates[idx])
    return keep


# ---------------------------------------------------------------------------
# non-dominated sorting (used by multi-objective initialization)

def _dominates(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.all(a <= b) and np.any(a < b))


def fast_nondominated_sort(points: np.ndarray, directions) -> list[list[int]]:
    """Deb-style dominance ranking; within each front, indices are ordered
    by crowding distance descending. Maximize objectives are negated first."""
    pts = np.asarray(points, dtype=np.float64).copy()
    for j, direction in enumerate(directions):
        if direction is Direction.MAXIMIZE:
            pts[:, j] = -pts[:, j]
    n = len(pts)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    domination_count = np.zeros(n, dtype=np.int64)
    fronts: list[list[int]] = [[]]
    for i in range(n):
        for j in range(i + 1, n):
            if _dominates(pts[i], pts[j]):
                dominated_by[i].append(j)
                domination_count[j] += 1
            elif _dominates(pts[j], pts[i]):
                dominated_by[j].append(i)
                domination_count[i] += 1
    for i in range(n):
        if domination_count[i] == 0:
            fronts[0].append(i)
    f = 0
    while fronts[f]:
        nxt: list[int] = []
        for p in fronts[f]:
            for q in dominated_by[p]:
                domination_count[q] -= 1
                if domination_count[q] == 0:
                    nxt.append(q)
        f += 1
        fronts.append(nxt)
    fronts.pop()
    return [_order_by_crowding(front, pts) for front in fronts]


def _order_by_crowding(front: list[int], pts: np.ndarray) -> list[int]:
    if len(front) <= 2:
        return list(front)
    crowding = np.zeros(len(front))
    sub = pts[front]
    for j in range(sub.shape[1]):
        order = np.argsort(sub[:, j], kind="stable")
        span = sub[order[-1], j] - sub[order[0], j]
        crowding[order[0]] = crowding[order[-1]] = math.inf
        if span == 0:
            continue
        for pos in range(1, len(front) - 1):
            crowding[order[pos]] += (sub[order[pos + 1], j] - sub[order[pos - 1], j]) / span
    ranked = sorted(range(len(front)), key=lambda i: (-crowding[i], i))
    return [front[i] for i in ranked]


# ---------------------------------------------------------------------------
# cache-aware population sizing

def _pow2_ceil(x: int) -> int:
    p = 1
    while p < x:
        p <<= 1
    return p


def _pow2_floor(x: float) -> int:
    p = 1
    while p * 2 <= x:
        p <<= 1
    return p


def adaptive_population_size(concurrency_hint: int, cache_budget_bytes: int,
                             working_set_bytes: int, fast_budget_bytes: int) -> int:
    """Population ceiling from the memory hierarchy.

    Small working sets get the concurrency-derived size; otherwise the
    cache budget caps the number of concurrent working sets, rounded down
    to a power of two (never below 2).
    """
    if min(concurrency_hint, cache_budget_bytes, working_set_bytes, fast_budget_bytes) <= 0:
        raise ValueError("all sizing inputs must be positive")
    p_sm = max(2, _pow2_ceil(concurrency_hint))
    if working_set_bytes <= fast_budget_bytes:
        return p_sm
    ratio = cache_budget_bytes / working_set_bytes
    if ratio >= p_sm / 2:
        return p_sm
    return max(2, _pow2_floor(ratio))


def estimate_working_set_bytes(problem: ProblemDefinition) -> int:
    cfg = problem.config()
    return problem.payload_nbytes() + cfg.d1 * cfg.d2 * 4


# ---------------------------------------------------------------------------
# population management

def _best_index(pop: list[Solution], cfg: ProblemConfig) -> int:
    best = 0
    for i in range(1, len(pop)):
        if compare(pop[i], pop[best], cfg) == A_BETTER:
            best = i
    return best


def _worst_index(pop: list[Solution], cfg: ProblemConfig) -> int:
    worst = 0
    for i in range(1, len(pop)):
        if compare(pop[i], pop[worst], cfg) == B_BETTER:
            worst = i
    return worst


def island_migrate(populations: list[list[Solution]], strategy: str,
                   cfg: ProblemConfig, rng: random.Random, top_n: int = 1):
    """Move elite copies between islands in place.

    ring: each island's best replaces the next island's worst.
    global_top_n: the global top-n broadcast, each replacing a random
    non-best member per island. An island's own best is never displaced.
    """
    k = len(populations)
    if k < 2:
        return
    if strategy == "ring":
        donors = [pop[_best_index(pop, cfg)].copy() for pop in populations]
        for i in range(k):
            receiver = populations[(i + 1) % k]
            if len(receiver) == 1:
                if compare(donors[i], receiver[0], cfg) == A_BETTER:
                    receiver[0] = donors[i]
                continue
            w = _worst_index(receiver, cfg)
            b = _best_index(receiver, cfg)
            if w == b:
                continue
            receiver[w] = donors[i]
    elif strategy == "global_top_n":
        flat = [sol for pop in populations for sol in pop]
        order = sorted(range(len(flat)), key=cmp_to_key(
            lambda a, b: compare(flat[a], flat[b], cfg)))
        donors = [flat[i].copy() for i in order[:top_n]]
        for pop in populations:
            b = _best_index(pop, cfg)
            slots = [i for i in range(len(pop)) if i != b]
            for donor in donors:
                if not slots:
                    break
                slot = slots[rng.randrange(len(slots))]
                pop[slot] = donor.copy()
    else:
        raise ValueError(f"unknown migration strategy {strategy!r}")


def elite_inject(population: list[Solution], global_best: Solution,
                 interval: int, generation: int, cfg: ProblemConfig) -> bool:
    """Overwrite the comparison-worst member with the tracked best at every
    interval-th generation."""
    if generation % interval != 0:
        return False
    w = _worst_index(population, cfg)
    population[w] = global_best.copy()
    return True


# ---------------------------------------------------------------------------
# per-generation evolution

def evolve_generation(ev: EvolverState, ev_idx: int, generation: int,
                      temperature: float, problem: ProblemDefinition,
                      cfg: ProblemConfig, registry: SequenceRegistry,
                      k_weights, seed: int, team_size: int,
                      penalty_weight: float, island_snapshot: list[Solution],
                      member_pos: int):
    """One generation for one evolver: sample team_size candidate lanes,
    pick the best delta (lowest lane wins ties), anneal-accept, and record
    operator credit for the winning lane."""
    current = ev.current

    def phi_fn(sol: Solution) -> float:
        evaluate(problem, sol, validate=False)
        return scalar_fitness(sol, cfg, penalty_weight)

    def pick_mate(rng: random.Random) -> Solution | None:
        if len(island_snapshot) <= 1:
            return None
        j = rng.randrange(len(island_snapshot) - 1)
        if j >= member_pos:
            j += 1
        return island_snapshot[j]

    ctx = OperatorContext(problem, cfg, pick_mate=pick_mate, phi=phi_fn)

    best_delta = math.inf
    best_cand = None
    best_seqs: list[int] = []
    best_k = 1
    for lane in range(team_size):
        rng = derived_rng(seed, ev_idx, generation, lane, _STREAM_LANE)
        k = sample_k(k_weights, rng)
        cand = current.copy()
        seqs = []
        for _ in range(k):
            seq_id = sample_sequence(registry, rng)
            seqs.append(seq_id)
            apply_sequence(registry, seq_id, cand, rng, ctx)
        evaluate(problem, cand, validate=False)
        d = acceptance_delta(cand, current, cfg, penalty_weight)
        if d < best_delta:
            best_delta = d
            best_cand = cand
            best_seqs = seqs
            best_k = k

    ev.temperature = temperature
    accept = best_delta < 0
    if not accept and best_cand is not None and temperature > 0:
        accept_rng = derived_rng(seed, ev_idx, generation, 0, _STREAM_ACCEPT)
        accept = accept_rng.random() < math.exp(-best_delta / temperature)
    if accept and best_cand is not None:
        improved = best_delta < 0
        ev.current = best_cand
        for seq_id in best_seqs:
            ev.stats.record(seq_id, improved)
        ev.stats.record_k(best_k, improved)
    return accept


# ---------------------------------------------------------------------------
# full runs

def run(problem: ProblemDefinition, config: EngineConfig,
        best_known: float | None = None) -> RunResult:
    """Full pipeline; with replicas > 1 the whole pipeline runs once per
    replica seed and the comparison-best result is returned."""
    if config.replicas == 1:
        return _run_single(problem, config, config.seed, best_known)
    results = [_run_single(problem, config, config.seed + i, best_known)
               for i in range(config.replicas)]
    cfg = problem.config()
    best = results[0]
    for candidate in results[1:]:
        if compare(candidate.best, best.best, cfg) == A_BETTER:
            best = candidate
    return best


def _run_single(problem: ProblemDefinition, config: EngineConfig, seed: int,
                best_known: float | None) -> RunResult:
    start = time.perf_counter()
    cfg = problem.config()
    profile = classify(cfg)
    registry = build_registry(cfg)
    apply_preset(registry, profile)

    if config.custom_operators:
        probe_rng = derived_rng(seed, _STREAM_PROBE)
        probe_sol = random_solution(cfg, probe_rng)
        evaluate(problem, probe_sol, validate=False)
        probe_ctx = OperatorContext(
            problem, cfg, pick_mate=lambda rng: None,
            phi=lambda s: (evaluate(problem, s, validate=False),
                           scalar_fitness(s, cfg, 1.0))[1],
        )
        for op in config.custom_operators:
            register_custom(registry, op, probe_sol, probe_ctx,
                            derived_rng(seed, _STREAM_PROBE, op.id))

    if config.population is not None:
        pop_size = config.population
    else:
        working_set = config.working_set_bytes or estimate_working_set_bytes(problem)
        pop_size = adaptive_population_size(
            config.resolved_concurrency_hint(), config.resolved_cache_budget(),
            working_set, config.fast_budget_bytes)
    pop_size = max(pop_size, config.islands.count)

    init_rng = derived_rng(seed, _STREAM_INIT)
    population = initialize_population(problem, pop_size,
                                       config.oversample_factor, init_rng)

    if cfg.penalty_weight is not None:
        penalty_weight = cfg.penalty_weight
    else:
        scale = float(np.mean([abs(s.objectives[0]) for s in population]))
        penalty_weight = 1000.0 * (scale if scale > 0 else 1.0)

    islands = _partition_islands(pop_size, config.islands.count)
    evolvers = []
    for island_id, members in enumerate(islands):
        for i in members:
            evolvers.append(EvolverState(current=population[i], island_id=island_id,
                                         stats=AosStats(registry.ids())))
    member_pos = []
    for members in islands:
        for pos in range(len(members)):
            member_pos.append(pos)

    global_best = population[_best_index(population, cfg)].copy()
    t0 = config.initial_temperature
    if t0 is None:
        t0 = max(1e-6, 0.05 * abs(scalar_fitness(global_best, cfg, penalty_weight)))

    k_weights = DEFAULT_K_WEIGHTS
    no_improve_batches = 0
    migration_events = 0
    history = {"best_phi": [], "temperature": []} if config.record_history else None

    pool = ThreadPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    generations_done = 0
    try:
        for gen in range(1, config.max_generations + 1):
            if config.time_limit_seconds is not None and \
                    time.perf_counter() - start >= config.time_limit_seconds:
                break
            temperature = t0 * config.cooling_alpha ** (gen - 1)
            snapshots = [[evolvers[_flat_index(islands, isl, pos)].current
                          for pos in range(len(islands[isl]))]
                         for isl in range(config.islands.count)]

            def step(ev_idx: int):
                ev = evolvers[ev_idx]
                evolve_generation(
                    ev, ev_idx, gen, temperature, problem, cfg, registry,
                    k_weights, seed, config.team_size, penalty_weight,
                    snapshots[ev.island_id], member_pos[ev_idx])

            if pool is None:
                for ev_idx in range(len(evolvers)):
                    step(ev_idx)
            else:
                list(pool.map(step, range(len(evolvers))))

            improved_global = False
            for ev in evolvers:
                if compare(ev.current, global_best, cfg) == A_BETTER:
                    global_best = ev.current.copy()
                    improved_global = True
            no_improve_batches = 0 if improved_global else no_improve_batches + 1
            generations_done = gen

            if history is not None:
                history["best_phi"].append(scalar_fitness(global_best, cfg, penalty_weight))
                history["temperature"].append(temperature)

            if _target_reached(global_best, cfg, config.target_objective):
                break

            if gen % config.aos.update_interval == 0:
                aggregated = AosStats(registry.ids())
                for ev in evolvers:
                    aggregated.merge(ev.stats)
                    ev.stats.reset()
                k_usage = aggregated.k_usage.copy()
                k_improvement = aggregated.k_improvement.copy()
                update_weights(registry, aggregated, config.aos)
                k_weights = update_k_weights(k_weights, k_usage, k_improvement, config.aos)
                k_weights, no_improve_batches = stagnation_check_and_reset(
                    no_improve_batches, k_weights, config.aos)

            if config.islands.count >= 2 and gen % config.islands.interval == 0:
                strategy = config.islands.migration
                if strategy == "hybrid":
                    strategy = "ring" if migration_events % 2 == 0 else "global_top_n"
                island_pops = [[evolvers[_flat_index(islands, isl, pos)].current
                                for pos in range(len(islands[isl]))]
                               for isl in range(config.islands.count)]
                island_migrate(island_pops, strategy, cfg,
                               derived_rng(seed, _STREAM_MIGRATION, migration_events),
                               config.islands.top_n)
                for isl in range(config.islands.count):
                    for pos in range(len(islands[isl])):
                        evolvers[_flat_index(islands, isl, pos)].current = island_pops[isl][pos]
                migration_events += 1

            if gen % config.elite_injection_interval == 0:
                currents = [ev.current for ev in evolvers]
                elite_inject(currents, global_best, config.elite_injection_interval,
                             gen, cfg)
                for ev, sol in zip(evolvers, currents):
                    ev.current = sol
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    elapsed = time.perf_counter() - start
    gap_pct = None
    single_min = cfg.num_objectives == 1 and \
        cfg.obj_defs[0].direction is Direction.MINIMIZE
    if best_known is not None and single_min and best_known != 0:
        gap_pct = (float(global_best.objectives[0]) - best_known) / best_known * 100.0

    final_weights = {
        "sequences": [{"id": e.id, "name": e.name, "weight": e.weight}
                      for e in registry.entries],
        "k_steps": list(k_weights),
    }
    return RunResult(
        best=global_best,
        objectives=[float(v) for v in global_best.objectives],
        penalty=float(global_best.penalty),
        feasible=global_best.penalty == 0.0,
        gap_pct=gap_pct,
        generations_completed=generations_done,
        elapsed_seconds=elapsed,
        gens_per_sec=generations_done / elapsed if elapsed > 0 else 0.0,
        final_weights=final_weights,
        profile=profile.as_dict(),
        config=_echo_config(config, pop_size),
        seed=seed,
        history=history,
    )


def _echo_config(config: EngineConfig, effective_population: int) -> dict:
    echo = config.as_dict()
    echo["population_effective"] = effective_population
    return echo


def _partition_islands(pop_size: int, count: int) -> list[list[int]]:
    base, extra = divmod(pop_size, count)
    islands = []
    at = 0
    for i in range(count):
        size = base + (1 if i < extra else 0)
        islands.append(list(range(at, at + size)))
        at += size
    return islands


def _flat_index(islands: list[list[int]], island_id: int, pos: int) -> int:
    return islands[island_id][pos]


def _target_reached(best: Solution, cfg: ProblemConfig, target: float | None) -> bool:
    if target is None or cfg.num_objectives != 1 or best.penalty > 0:
        return False
    value = float(best.objectives[0])
    if cfg.obj_defs[0].direction is Direction.MINIMIZE:
        return value <= target + 1e-9
    return value >= target - 1e-9
