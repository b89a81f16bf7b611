"""Built-in problem definitions covering the five encoding variants.

Routing problems store customers as solution values 0..n-1; index 0 of the
distance matrix is the depot, so customer c maps to matrix row c + 1.
Empty route rows are allowed and the vehicle count emerges from nonempty
rows.
"""

from __future__ import annotations

import numpy as np

from .core import (
    ComparisonMode,
    Direction,
    Encoding,
    ObjDef,
    ProblemConfig,
    RowModeKind,
    Solution,
)
from .problems import InstanceData, ProblemDefinition, check_distance_matrix

BUILTIN_NAMES = (
    "tsp",
    "cvrp",
    "vrptw",
    "knapsack",
    "qap",
    "assignment",
    "graph_coloring",
    "bin_packing",
    "load_balancing",
    "jsp_int",
    "jsp_perm",
    "schedule_binary",
    "vrp_priority",
    "vrp_nonlinear",
)


def builtin_problem(name: str, instance: InstanceData) -> ProblemDefinition:
    """Construct a built-in problem from an instance payload."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(
            f"unknown problem {name!r}; known problems: {', '.join(BUILTIN_NAMES)}"
        ) from None
    return factory(instance)


class TspProblem(ProblemDefinition):
    def __init__(self, dist: np.ndarray):
        self.dist = check_distance_matrix(dist)
        self.n = self.dist.shape[0]
        self._cfg = ProblemConfig(
            encoding=Encoding.permutation(),
            d1=1, d2=self.n, n=self.n,
            row_mode=RowModeKind.SINGLE_SEQ,
            obj_defs=(ObjDef("tour_length"),),
        )

    def config(self):
        return self._cfg

    def compute_objective(self, i, sol):
        tour = sol.row(0)
        if len(tour) < 2:
            return 0.0
        return float(self.dist[tour[:-1], tour[1:]].sum() + self.dist[tour[-1], tour[0]])

    def compute_penalty(self, sol):
        return 0.0

    def init_matrices(self):
        return [self.dist]


class RoutingProblem(ProblemDefinition):
    """Shared structure for CVRP and its variants.

    Objectives are selected by name so the same class serves single- and
    multi-objective runs ("distance", "vehicles").
    """

    def __init__(self, dist: np.ndarray, demands, capacity: float, vehicles: int,
                 objectives: tuple[str, ...] = ("distance",),
                 comparison: ComparisonMode | None = None):
        self.dist = check_distance_matrix(dist)
        self.demands = np.asarray(demands, dtype=np.float64)
        self.capacity = float(capacity)
        self.vehicles = int(vehicles)
        self.n = len(self.demands)
        if self.dist.shape[0] != self.n + 1:
            raise ValueError(
                f"distance matrix has {self.dist.shape[0]} nodes, expected "
                f"{self.n + 1} (depot + {self.n} customers)"
            )
        if self.vehicles < 1:
            raise ValueError("at least one vehicle required")
        self.objective_names = tuple(objectives)
        obj_defs = []
        for name in self.objective_names:
            if name not in ("distance", "vehicles"):
                raise ValueError(f"unknown routing objective {name!r}")
            obj_defs.append(ObjDef(name))
        self._cfg = ProblemConfig(
            encoding=Encoding.permutation(),
            d1=self.vehicles, d2=self.n, n=self.n,
            row_mode=RowModeKind.MULTI_PARTITION,
            obj_defs=tuple(obj_defs),
            comparison=comparison,
        )

    def config(self):
        return self._cfg

    def route_distance(self, route: np.ndarray) -> float:
        if len(route) == 0:
            return 0.0
        nodes = route + 1
        total = self.dist[0, nodes[0]] + self.dist[nodes[-1], 0]
        if len(nodes) > 1:
            total += self.dist[nodes[:-1], nodes[1:]].sum()
        return float(total)

    def total_distance(self, sol: Solution) -> float:
        return sum(self.route_distance(sol.row(r)) for r in range(sol.d1))

    def compute_objective(self, i, sol):
        name = self.objective_names[i]
        if name == "distance":
            return self.total_distance(sol)
        return float(np.count_nonzero(sol.dim2_sizes))

    def capacity_penalty(self, sol: Solution) -> float:
        total = 0.0
        for r in range(sol.d1):
            load = self.demands[sol.row(r)].sum()
            total += max(0.0, float(load) - self.capacity)
        return total

    def compute_penalty(self, sol):
        return self.capacity_penalty(sol)

    def init_matrices(self):
        # customer-to-customer block; the initializer works in value space
        return [self.dist[1:, 1:]]

    def payload_nbytes(self):
        return self.dist.nbytes + self.demands.nbytes


class VrptwProblem(RoutingProblem):
    def __init__(self, dist, demands, capacity, vehicles, ready, due, service,
                 objectives=("distance",), comparison=None):
        super().__init__(dist, demands, capacity, vehicles,
                         objectives=objectives, comparison=comparison)
        # index 0 is the depot window
        self.ready = np.asarray(ready, dtype=np.float64)
        self.due = np.asarray(due, dtype=np.float64)
        self.service = np.asarray(service, dtype=np.float64)
        for arr, label in ((self.ready, "ready"), (self.due, "due"), (self.service, "service")):
            if len(arr) != self.n + 1:
                raise ValueError(f"{label} times must cover depot + {self.n} customers")

    def lateness_penalty(self, sol: Solution) -> float:
        total = 0.0
        for r in range(sol.d1):
            route = sol.row(r)
            if len(route) == 0:
                continue
            t = self.ready[0]
            prev = 0
            for c in route:
                node = c + 1
                arrival = max(self.ready[node], t + self.dist[prev, node])
                total += max(0.0, arrival - self.due[node])
                t = arrival + self.service[node]
                prev = node
            back = t + self.dist[prev, 0]
            total += max(0.0, back - self.due[0])
        return float(total)

    def compute_penalty(self, sol):
        return self.capacity_penalty(sol) + self.lateness_penalty(sol)

    def payload_nbytes(self):
        return super().payload_nbytes() + self.ready.nbytes + self.due.nbytes + self.service.nbytes


class PriorityVrpProblem(RoutingProblem):
    """CVRP where a high-priority customer must precede lower ones in-route."""

    def __init__(self, dist, demands, capacity, vehicles, priorities,
                 objectives=("distance",), comparison=None):
        super().__init__(dist, demands, capacity, vehicles,
                         objectives=objectives, comparison=comparison)
        self.priorities = np.asarray(priorities, dtype=np.float64)
        if len(self.priorities) != self.n:
            raise ValueError("one priority per customer required")

    def compute_penalty(self, sol):
        violations = 0
        for r in range(sol.d1):
            prio = self.priorities[sol.row(r)]
            for p in range(len(prio)):
                violations += int(np.count_nonzero(prio[p + 1:] > prio[p]))
        return self.capacity_penalty(sol) + violations


class NonlinearVrpProblem(RoutingProblem):
    """CVRP with edge cost d_ij * (1 + 0.3 * (load / cap)^2).

    Collection model: the vehicle leaves the depot empty and the load on an
    edge is the demand picked up so far, including the node just left.
    """

    def compute_objective(self, i, sol):
        name = self.objective_names[i]
        if name == "vehicles":
            return float(np.count_nonzero(sol.dim2_sizes))
        total = 0.0
        for r in range(sol.d1):
            route = sol.row(r)
            if len(route) == 0:
                continue
            load = 0.0
            prev = 0
            for c in route:
                node = c + 1
                total += self.dist[prev, node] * (1.0 + 0.3 * (load / self.capacity) ** 2)
                load += self.demands[c]
                prev = node
            total += self.dist[prev, 0] * (1.0 + 0.3 * (load / self.capacity) ** 2)
        return float(total)


class KnapsackProblem(ProblemDefinition):
    def __init__(self, weights, values, capacity):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.values = np.asarray(values, dtype=np.float64)
        self.capacity = float(capacity)
        if len(self.weights) != len(self.values):
            raise ValueError("weights and values must have equal length")
        self.n = len(self.weights)
        self._cfg = ProblemConfig(
            encoding=Encoding.binary(),
            d1=1, d2=self.n, n=self.n,
            row_mode=RowModeKind.SINGLE_SEQ,
            obj_defs=(ObjDef("total_value", Direction.MAXIMIZE),),
        )

    def config(self):
        return self._cfg

    def compute_objective(self, i, sol):
        return float(self.values @ sol.row(0))

    def compute_penalty(self, sol):
        return max(0.0, float(self.weights @ sol.row(0)) - self.capacity)


class QapProblem(ProblemDefinition):
    def __init__(self, flow, dist):
        self.flow = np.asarray(flow, dtype=np.float64)
        self.dist = np.asarray(dist, dtype=np.float64)
        if self.flow.shape != self.dist.shape or self.flow.ndim != 2:
            raise ValueError("flow and distance matrices must be square and equal-shaped")
        self.n = self.flow.shape[0]
        self._cfg = ProblemConfig(
            encoding=Encoding.permutation(),
            d1=1, d2=self.n, n=self.n,
            row_mode=RowModeKind.SINGLE_SEQ,
            obj_defs=(ObjDef("total_cost"),),
        )

    def config(self):
        return self._cfg

    def compute_objective(self, i, sol):
        perm = sol.row(0)
        return float((self.flow * self.dist[np.ix_(perm, perm)]).sum())

    def compute_penalty(self, sol):
        return 0.0

    def init_matrices(self):
        return [self.flow, self.dist]


class AssignmentProblem(ProblemDefinition):
    def __init__(self, cost):
        self.cost = np.asarray(cost, dtype=np.float64)
        if self.cost.ndim != 2 or self.cost.shape[0] != self.cost.shape[1]:
            raise ValueError("assignment cost matrix must be square")
        self.n = self.cost.shape[0]
        self._cfg = ProblemConfig(
            encoding=Encoding.permutation(),
            d1=1, d2=self.n, n=self.n,
            row_mode=RowModeKind.SINGLE_SEQ,
            obj_defs=(ObjDef("total_cost"),),
        )

    def config(self):
        return self._cfg

    def compute_objective(self, i, sol):
        perm = sol.row(0)
        return float(self.cost[np.arange(self.n), perm].sum())

    def compute_penalty(self, sol):
        return 0.0

    def init_matrices(self):
        return [self.cost]


class GraphColoringProblem(ProblemDefinition):
    """Fixed palette; the objective counts monochromatic edges."""

    def __init__(self, num_vertices, edges, num_colors):
        self.n = int(num_vertices)
        self.edges = [(int(u), int(v)) for u, v in edges]
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside vertex range")
        self.num_colors = int(num_colors)
        self._eu = np.array([u for u, _ in self.edges], dtype=np.int64)
        self._ev = np.array([v for _, v in self.edges], dtype=np.int64)
        self._cfg = ProblemConfig(
            encoding=Encoding.integer(0, self.num_colors - 1),
            d1=1, d2=self.n, n=self.n,
            row_mode=RowModeKind.SINGLE_SEQ,
            obj_defs=(ObjDef("conflicts"),),
        )

    def config(self):
        return self._cfg

    def compute_objective(self, i, sol):
        colors = sol.row(0)
        return float(np.count_nonzero(colors[self._eu] == colors[self._ev]))

    def compute_penalty(self, sol):
        return 0.0


class BinPackingProblem(ProblemDefinition):
    def __init__(self, item_sizes, bin_capacity):
        self.sizes = np.asarray(item_sizes, dtype=np.float64)
        self.capacity = float(bin_capacity)
        self.n = len(self.sizes)
        self._cfg = ProblemConfig(
            encoding=Encoding.integer(0, self.n - 1),
            d1=1, d2=self.n, n=self.n,
            row_mode=RowModeKind.SINGLE_SEQ,
            obj_defs=(ObjDef("bins_used"),),
        )

    def config(self):
        return self._cfg

    def compute_objective(self, i, sol):
        return float(len(np.unique(sol.row(0))))

    def compute_penalty(self, sol):
        assignment = sol.row(0)
        loads = np.bincount(assignment, weights=self.sizes, minlength=self.n)
        return float(np.maximum(loads - self.capacity, 0.0).sum())


class LoadBalancingProblem(ProblemDefinition):
    def __init__(self, durations, num_machines):
        self.durations = np.asarray(durations, dtype=np.float64)
        self.num_machines = int(num_machines)
        self.n = len(self.durations)
        self._cfg = ProblemConfig(
            encoding=Encoding.integer(0, self.num_machines - 1),
            d1=1, d2=self.n, n=self.n,
            row_mode=RowModeKind.SINGLE_SEQ,
            obj_defs=(ObjDef("makespan"),),
        )

    def config(self):
        return self._cfg

    def compute_objective(self, i, sol):
        loads = np.bincount(sol.row(0), weights=self.durations, minlength=self.num_machines)
        return float(loads.max())

    def compute_penalty(self, sol):
        return 0.0


def _check_jobs(jobs) -> tuple[int, int]:
    n_jobs = len(jobs)
    if n_jobs == 0:
        raise ValueError("at least one job required")
    ops_per_job = len(jobs[0])
    for j, ops in enumerate(jobs):
        if len(ops) != ops_per_job:
            raise ValueError(f"job {j} has {len(ops)} operations, expected {ops_per_job}")
    return n_jobs, ops_per_job


class JspIntProblem(ProblemDefinition):
    """Priority-decoded job shop: the integer vector assigns one priority
    per operation and a serial generator dispatches the ready operation
    with the lowest priority value, ties broken by operation index.
    """

    def __init__(self, jobs):
        self.jobs = [[(int(m), int(d)) for m, d in ops] for ops in jobs]
        self.n_jobs, self.ops_per_job = _check_jobs(self.jobs)
        self.n_machines = 1 + max(m for ops in self.jobs for m, _ in ops)
        self.n_ops = self.n_jobs * self.ops_per_job
        self._cfg = ProblemConfig(
            encoding=Encoding.integer(0, self.n_ops - 1),
            d1=1, d2=self.n_ops, n=self.n_ops,
            row_mode=RowModeKind.SINGLE_SEQ,
            obj_defs=(ObjDef("makespan"),),
        )

    def config(self):
        return self._cfg

    def compute_objective(self, i, sol):
        prio = sol.row(0)
        next_op = [0] * self.n_jobs
        job_avail = [0.0] * self.n_jobs
        mach_avail = [0.0] * self.n_machines
        makespan = 0.0
        for _ in range(self.n_ops):
            best = None
            for j in range(self.n_jobs):
                k = next_op[j]
                if k >= self.ops_per_job:
                    continue
                op_idx = j * self.ops_per_job + k
                key = (int(prio[op_idx]), op_idx)
                if best is None or key < best[0]:
                    best = (key, j)
            j = best[1]
            machine, dur = self.jobs[j][next_op[j]]
            start = max(job_avail[j], mach_avail[machine])
            done = start + dur
            job_avail[j] = done
            mach_avail[machine] = done
            next_op[j] += 1
            makespan = max(makespan, done)
        return float(makespan)

    def compute_penalty(self, sol):
        return 0.0


class JspPermProblem(ProblemDefinition):
    """Multi-sequence job shop: row m orders the jobs on machine m.

    Orders that imply a cyclic wait leave operations unscheduled; the
    penalty counts them so the search is driven back to decodable orders.
    """

    def __init__(self, jobs):
        self.jobs = [[(int(m), int(d)) for m, d in ops] for ops in jobs]
        self.n_jobs, self.ops_per_job = _check_jobs(self.jobs)
        self.n_machines = 1 + max(m for ops in self.jobs for m, _ in ops)
        self._cfg = ProblemConfig(
            encoding=Encoding.permutation(),
            d1=self.n_machines, d2=self.n_jobs, n=self.n_jobs,
            row_mode=RowModeKind.MULTI_FIXED,
            obj_defs=(ObjDef("makespan"),),
        )

    def config(self):
        return self._cfg

    def _decode(self, sol: Solution) -> tuple[float, int]:
        ptr = [0] * self.n_machines
        next_op = [0] * self.n_jobs
        job_avail = [0.0] * self.n_jobs
        mach_avail = [0.0] * self.n_machines
        scheduled = 0
        total_ops = self.n_jobs * self.ops_per_job
        makespan = 0.0
        progressed = True
        while progressed and scheduled < total_ops:
            progressed = False
            for m in range(self.n_machines):
                if ptr[m] >= self.n_jobs:
                    continue
                j = int(sol.data[m, ptr[m]])
                k = next_op[j]
                if k >= self.ops_per_job or self.jobs[j][k][0] != m:
                    continue
                dur = self.jobs[j][k][1]
                start = max(job_avail[j], mach_avail[m])
                done = start + dur
                job_avail[j] = done
                mach_avail[m] = done
                next_op[j] += 1
                ptr[m] += 1
                scheduled += 1
                makespan = max(makespan, done)
                progressed = True
        return makespan, total_ops - scheduled

    def compute_objective(self, i, sol):
        makespan, _ = self._decode(sol)
        return float(makespan)

    def compute_penalty(self, sol):
        _, unscheduled = self._decode(sol)
        return float(unscheduled)


class BinaryScheduleProblem(ProblemDefinition):
    """Worker x shift assignment: minimize cost, cover every shift."""

    def __init__(self, cost, requirements):
        self.cost = np.asarray(cost, dtype=np.float64)
        if self.cost.ndim != 2:
            raise ValueError("cost must be a worker x shift matrix")
        self.workers, self.shifts = self.cost.shape
        self.requirements = np.asarray(requirements, dtype=np.float64)
        if len(self.requirements) != self.shifts:
            raise ValueError("one coverage requirement per shift required")
        self._cfg = ProblemConfig(
            encoding=Encoding.binary(),
            d1=self.workers, d2=self.shifts, n=self.workers * self.shifts,
            row_mode=RowModeKind.MULTI_FIXED,
            obj_defs=(ObjDef("total_cost"),),
        )

    def config(self):
        return self._cfg

    def compute_objective(self, i, sol):
        return float((self.cost * sol.data).sum())

    def compute_penalty(self, sol):
        coverage = sol.data.sum(axis=0)
        return float(np.maximum(self.requirements - coverage, 0.0).sum())


def _need(instance: InstanceData, *fields):
    missing = [f for f in fields if getattr(instance, f) is None]
    if missing:
        raise ValueError(f"instance payload missing fields: {', '.join(missing)}")


def _routing_kwargs(instance: InstanceData) -> dict:
    kwargs = {}
    meta = instance.meta or {}
    if "objectives" in meta:
        kwargs["objectives"] = tuple(meta["objectives"])
    if "comparison" in meta:
        kwargs["comparison"] = meta["comparison"]
    return kwargs


def _make_tsp(instance):
    _need(instance, "distance_matrix")
    return TspProblem(instance.distance_matrix)


def _make_cvrp(instance):
    _need(instance, "distance_matrix", "demands", "capacity", "vehicles")
    return RoutingProblem(instance.distance_matrix, instance.demands,
                          instance.capacity, instance.vehicles,
                          **_routing_kwargs(instance))


def _make_vrptw(instance):
    _need(instance, "distance_matrix", "demands", "capacity", "vehicles",
          "ready_times", "due_times", "service_times")
    return VrptwProblem(instance.distance_matrix, instance.demands,
                        instance.capacity, instance.vehicles,
                        instance.ready_times, instance.due_times,
                        instance.service_times, **_routing_kwargs(instance))


def _make_knapsack(instance):
    _need(instance, "weights", "values", "capacity")
    return KnapsackProblem(instance.weights, instance.values, instance.capacity)


def _make_qap(instance):
    _need(instance, "flow_matrix", "distance_matrix")
    return QapProblem(instance.flow_matrix, instance.distance_matrix)


def _make_assignment(instance):
    _need(instance, "cost_matrix")
    return AssignmentProblem(instance.cost_matrix)


def _make_graph_coloring(instance):
    _need(instance, "edges", "num_colors")
    n = instance.meta.get("num_vertices")
    if n is None:
        n = 1 + max(max(u, v) for u, v in instance.edges)
    return GraphColoringProblem(n, instance.edges, instance.num_colors)


def _make_bin_packing(instance):
    _need(instance, "item_sizes", "bin_capacity")
    return BinPackingProblem(instance.item_sizes, instance.bin_capacity)


def _make_load_balancing(instance):
    _need(instance, "durations", "num_machines")
    return LoadBalancingProblem(instance.durations, instance.num_machines)


def _make_jsp_int(instance):
    _need(instance, "jobs")
    return JspIntProblem(instance.jobs)


def _make_jsp_perm(instance):
    _need(instance, "jobs")
    return JspPermProblem(instance.jobs)


def _make_schedule_binary(instance):
    _need(instance, "cost_matrix", "requirements")
    return BinaryScheduleProblem(instance.cost_matrix, instance.requirements)


def _make_vrp_priority(instance):
    _need(instance, "distance_matrix", "demands", "capacity", "vehicles", "priorities")
    return PriorityVrpProblem(instance.distance_matrix, instance.demands,
                              instance.capacity, instance.vehicles,
                              instance.priorities, **_routing_kwargs(instance))


def _make_vrp_nonlinear(instance):
    _need(instance, "distance_matrix", "demands", "capacity", "vehicles")
    return NonlinearVrpProblem(instance.distance_matrix, instance.demands,
                               instance.capacity, instance.vehicles,
                               **_routing_kwargs(instance))


_FACTORIES = {
    "tsp": _make_tsp,
    "cvrp": _make_cvrp,
    "vrptw": _make_vrptw,
    "knapsack": _make_knapsack,
    "qap": _make_qap,
    "assignment": _make_assignment,
    "graph_coloring": _make_graph_coloring,
    "bin_packing": _make_bin_packing,
    "load_balancing": _make_load_balancing,
    "jsp_int": _make_jsp_int,
    "jsp_perm": _make_jsp_perm,
    "schedule_binary": _make_schedule_binary,
    "vrp_priority": _make_vrp_priority,
    "vrp_nonlinear": _make_vrp_nonlinear,
}
