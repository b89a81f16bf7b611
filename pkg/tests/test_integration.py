"""End-to-end paths that cross module boundaries: benchmark files through
parser, problem construction, engine, and result emission."""

import json
import time

import numpy as np
import pytest

from genopt import EngineConfig, IslandsConfig, builtin_problem, run
from genopt.cli import main
from genopt.parsers import parse_solomon, parse_tsplib


def test_time_limit_stops_run():
    instance = parse_tsplib("tests/fixtures/eil51.tsp")
    problem = builtin_problem("tsp", instance)
    config = EngineConfig(population=4, team_size=8, max_generations=10 ** 6,
                          seed=1, time_limit_seconds=0.5)
    start = time.perf_counter()
    result = run(problem, config)
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    assert 0 < result.generations_completed < 10 ** 6
    assert result.gens_per_sec > 0


def test_hybrid_migration_deterministic():
    rng = np.random.default_rng(44)
    d = rng.uniform(1, 60, size=(15, 15))
    d = (d + d.T) / 2
    np.fill_diagonal(d, 0.0)
    from genopt import InstanceData
    problem = builtin_problem("tsp", InstanceData(distance_matrix=d))
    config = EngineConfig(population=6, team_size=4, max_generations=40, seed=3,
                          islands=IslandsConfig(count=3, migration="hybrid",
                                                interval=8))
    first = run(problem, config)
    second = run(problem, config)
    assert first.best.data.tobytes() == second.best.data.tobytes()
    assert first.objectives == second.objectives


def test_solomon_instance_runs_end_to_end():
    instance = parse_solomon("tests/fixtures/R101.txt")
    problem = builtin_problem("vrptw", instance)
    cfg = problem.config()
    assert cfg.d1 == 25 and cfg.n == 100
    result = run(problem, EngineConfig(population=4, team_size=4,
                                       max_generations=8, seed=42))
    assert len(result.objectives) == 1
    assert result.penalty >= 0.0


def test_eil51_bench_cli_reports_gap(tmp_path, capsys):
    out = tmp_path / "bench.json"
    code = main(["bench", "--problem", "tsp",
                 "--instance", "tests/fixtures/eil51.tsp",
                 "--best-known", "426", "--seeds", "42,123",
                 "--pop", "4", "--team-size", "8", "--generations", "60",
                 "--json", str(out)])
    assert code == 0
    records = json.loads(out.read_text())
    assert len(records) == 2
    for record in records:
        assert record["problem"] == "tsp"
        assert record["gap_pct"] is not None
        assert record["feasible"] is True
    table = capsys.readouterr().out
    assert "eil51.tsp" in table


def test_custom_ops_cli_flag(capsys):
    code = main(["solve", "--instance", "demo:tsp5", "--pop", "4",
                 "--team-size", "4", "--generations", "120", "--target", "18",
                 "--custom-ops", "tsp-delta", "--seed", "7"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    names = {w["name"] for w in payload["final_weights"]["sequences"]}
    assert {"delta_two_opt", "delta_or_opt", "delta_node_insert"} <= names
    assert payload["objectives"] == [18.0]


def test_priority_scenario_reaches_zero_violations():
    # priority-constrained routing: penalty counts in-route priority inversions
    from genopt import InstanceData
    rng = np.random.default_rng(9)
    n = 8
    coords = rng.uniform(0, 50, size=(n + 1, 2))
    d = np.hypot(coords[:, None, 0] - coords[None, :, 0],
                 coords[:, None, 1] - coords[None, :, 1])
    problem = builtin_problem("vrp_priority", InstanceData(
        distance_matrix=d, demands=np.ones(n), capacity=4.0, vehicles=3,
        priorities=rng.permutation(n).astype(float)))
    result = run(problem, EngineConfig(population=8, team_size=8,
                                       max_generations=400, seed=42))
    assert result.feasible, result.penalty  # zero inversions and within capacity
