"""Bundled demo instances with independently verified optima.

Every `best_known` here was computed by exhaustive enumeration or exact
dynamic programming over the instance data (see tests/oracles.py) before
being frozen; VRPTW8 carries no optimum and is checked for feasibility
and cross-seed agreement instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .builtins import builtin_problem
from .core import ComparisonMode
from .problems import InstanceData, ProblemDefinition


@dataclass(frozen=True)
class DemoInstance:
    name: str
    problem_name: str
    instance: InstanceData
    best_known: float | None
    note: str = ""

    def problem(self) -> ProblemDefinition:
        return builtin_problem(self.problem_name, self.instance)


def _chain_cluster_matrix(num_nodes: int, chains: tuple[tuple[int, ...], ...],
                          end_leg: float, interior_leg: float,
                          step: float, inter: float) -> np.ndarray:
    """Depot-rooted clusters laid out as chains: cheap legs to the chain
    ends, linear costs along a chain, and a flat cost between clusters."""
    d = np.full((num_nodes, num_nodes), inter, dtype=np.float64)
    np.fill_diagonal(d, 0.0)
    for chain in chains:
        for a in range(len(chain)):
            for b in range(a + 1, len(chain)):
                d[chain[a], chain[b]] = d[chain[b], chain[a]] = step * (b - a)
        for c in chain:
            d[0, c] = d[c, 0] = interior_leg
        for end in (chain[0], chain[-1]):
            d[0, end] = d[end, 0] = end_leg
    return d


def _tsp4() -> DemoInstance:
    dist = np.array([[0, 1, 2, 3], [1, 0, 4, 5], [2, 4, 0, 6], [3, 5, 6, 0]],
                    dtype=np.float64)
    return DemoInstance("tsp4", "tsp", InstanceData(distance_matrix=dist), 14.0,
                        "four-city tour used by the scripting bridge")


def _tsp5() -> DemoInstance:
    dist = np.array([
        [0, 3, 9, 9, 4],
        [3, 0, 4, 9, 9],
        [9, 4, 0, 3, 9],
        [9, 9, 3, 0, 4],
        [4, 9, 9, 4, 0],
    ], dtype=np.float64)
    return DemoInstance("tsp5", "tsp", InstanceData(distance_matrix=dist), 18.0)


def _knapsack6() -> DemoInstance:
    instance = InstanceData(weights=np.array([2.0, 3, 4, 5, 6, 7]),
                            values=np.array([10.0, 10, 10, 5, 5, 5]),
                            capacity=9.0)
    return DemoInstance("knapsack6", "knapsack", instance, 30.0)


def _assign4() -> DemoInstance:
    cost = np.array([[9, 2, 7, 8], [6, 4, 3, 7], [5, 8, 1, 8], [7, 6, 9, 4]],
                    dtype=np.float64)
    return DemoInstance("assign4", "assignment", InstanceData(cost_matrix=cost), 13.0)


def _schedule3x4() -> DemoInstance:
    cost = np.array([[5, 8, 4, 9], [7, 6, 8, 6], [9, 7, 9, 7]], dtype=np.float64)
    instance = InstanceData(cost_matrix=cost,
                            requirements=np.array([1.0, 1, 1, 1]))
    return DemoInstance("schedule3x4", "schedule_binary", instance, 21.0)


def _cvrp10() -> DemoInstance:
    dist = _chain_cluster_matrix(
        11, ((1, 2, 3, 4, 5), (6, 7, 8, 9, 10)),
        end_leg=20.0, interior_leg=45.0, step=15.0, inter=60.0)
    instance = InstanceData(distance_matrix=dist, demands=np.ones(10),
                            capacity=5.0, vehicles=4)
    return DemoInstance("cvrp10", "cvrp", instance, 200.0,
                        "two 5-customer clusters; capacity forces two routes")


def _loadbal8() -> DemoInstance:
    instance = InstanceData(durations=np.array([8.0, 7, 6, 5, 5, 4, 3, 2]),
                            num_machines=3)
    return DemoInstance("loadbal8", "load_balancing", instance, 14.0)


def _graphcolor10() -> DemoInstance:
    petersen = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
                (5, 7), (7, 9), (9, 6), (6, 8), (8, 5)]
    instance = InstanceData(edges=petersen, num_colors=3,
                            meta={"num_vertices": 10})
    return DemoInstance("graphcolor10", "graph_coloring", instance, 0.0,
                        "Petersen graph with a 3-color palette")


def _binpack8() -> DemoInstance:
    instance = InstanceData(item_sizes=np.array([5.0, 5, 4, 4, 3, 3, 3, 3]),
                            bin_capacity=8.0)
    return DemoInstance("binpack8", "bin_packing", instance, 4.0)


def _qap5() -> DemoInstance:
    flow = np.array([
        [0, 0, 5, 1, 1],
        [0, 0, 1, 0, 1],
        [5, 1, 0, 4, 3],
        [1, 0, 4, 0, 5],
        [1, 1, 3, 5, 0],
    ], dtype=np.float64)
    dist = np.abs(np.subtract.outer(np.arange(5), np.arange(5))).astype(np.float64)
    return DemoInstance("qap5", "qap", InstanceData(flow_matrix=flow,
                                                    distance_matrix=dist), 58.0)


def _vrptw8_matrix() -> np.ndarray:
    return _chain_cluster_matrix(
        9, ((1, 2, 3, 4), (5, 6, 7, 8)),
        end_leg=20.0, interior_leg=45.0, step=15.0, inter=60.0)


def _vrptw8() -> DemoInstance:
    n = 8
    instance = InstanceData(
        distance_matrix=_vrptw8_matrix(),
        demands=np.ones(n),
        capacity=4.0,
        vehicles=3,
        ready_times=np.zeros(n + 1),
        due_times=np.array([1000.0] + [400.0] * n),
        service_times=np.array([0.0] + [10.0] * n),
    )
    return DemoInstance("vrptw8", "vrptw", instance, None,
                        "no reference optimum; checked for feasibility and "
                        "seed agreement")


_JSP3X3_JOBS = [
    [(0, 4), (1, 4), (2, 4)],
    [(1, 4), (2, 4), (0, 4)],
    [(2, 4), (0, 4), (1, 4)],
]


def _jsp3x3_int() -> DemoInstance:
    return DemoInstance("jsp3x3_int", "jsp_int", InstanceData(jobs=_JSP3X3_JOBS), 12.0)


def _jsp3x3_perm() -> DemoInstance:
    return DemoInstance("jsp3x3_perm", "jsp_perm", InstanceData(jobs=_JSP3X3_JOBS), 12.0)


def cvrp8_instance(objectives: tuple[str, ...] = ("distance", "vehicles"),
                   comparison: ComparisonMode | None = None) -> InstanceData:
    """Bi-objective eight-customer routing fixture (two chains of four).

    Exact references (subset dynamic programming): distance optimum 170
    with 2 vehicles; a single route covers everything at distance 190.
    """
    dist = _chain_cluster_matrix(
        9, ((1, 2, 3, 4), (5, 6, 7, 8)),
        end_leg=20.0, interior_leg=45.0, step=15.0, inter=60.0)
    meta = {"objectives": objectives}
    if comparison is not None:
        meta["comparison"] = comparison
    return InstanceData(distance_matrix=dist, demands=np.ones(8),
                        capacity=8.0, vehicles=3, meta=meta)


_BUILDERS = (
    _tsp4, _tsp5, _knapsack6, _assign4, _schedule3x4, _cvrp10, _loadbal8,
    _graphcolor10, _binpack8, _qap5, _vrptw8, _jsp3x3_int, _jsp3x3_perm,
)

GENERALITY_SUITE = ("tsp5", "knapsack6", "assign4", "schedule3x4", "cvrp10",
                    "loadbal8", "graphcolor10", "binpack8", "qap5", "vrptw8",
                    "jsp3x3_int", "jsp3x3_perm")


def demo_instances() -> dict[str, DemoInstance]:
    return {builder().name: builder() for builder in _BUILDERS}


def demo_instance(name: str) -> DemoInstance:
    table = demo_instances()
    try:
        return table[name]
    except KeyError:
        raise ValueError(
            f"unknown demo instance {name!r}; available: {', '.join(sorted(table))}"
        ) from None
