"""Problem abstraction: configuration plus objective and penalty callbacks.

A problem owns its configuration, computes each objective and the
constraint-violation penalty for a solution, and may expose n x n data
matrices (used by the attribute-agnostic initializer) or a list of seed
candidates. Implementations must keep the callbacks pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ProblemConfig, Solution, validate_solution


@dataclass
class InstanceData:
    """Numeric payload for one problem instance.

    Only the fields a given problem uses need to be present; the problem
    constructors validate completeness.
    """

    distance_matrix: np.ndarray | None = None
    weights: np.ndarray | None = None
    values: np.ndarray | None = None
    capacity: float | None = None
    flow_matrix: np.ndarray | None = None
    cost_matrix: np.ndarray | None = None
    edges: list[tuple[int, int]] | None = None
    num_colors: int | None = None
    item_sizes: np.ndarray | None = None
    bin_capacity: float | None = None
    durations: np.ndarray | None = None
    num_machines: int | None = None
    jobs: list[list[tuple[int, int]]] | None = None
    demands: np.ndarray | None = None
    vehicles: int | None = None
    ready_times: np.ndarray | None = None
    due_times: np.ndarray | None = None
    service_times: np.ndarray | None = None
    priorities: np.ndarray | None = None
    requirements: np.ndarray | None = None
    meta: dict = field(default_factory=dict)


class ProblemDefinition:
    """Interface every problem implements: config, objectives, penalty."""

    def config(self) -> ProblemConfig:
        raise NotImplementedError

    def compute_objective(self, i: int, sol: Solution) -> float:
        raise NotImplementedError

    def compute_penalty(self, sol: Solution) -> float:
        raise NotImplementedError

    def init_matrices(self) -> list[np.ndarray]:
        """Square data matrices for attribute-agnostic initialization."""
        return []

    def init_candidates(self, rng) -> list[Solution] | None:
        """Optional problem-specific seed solutions for the oversample pool."""
        return None

    def payload_nbytes(self) -> int:
        """Instance data footprint, used by the working-set estimate."""
        total = 0
        for m in self.init_matrices():
            total += m.nbytes
        return total


def evaluate(problem: ProblemDefinition, sol: Solution, *, validate: bool = True):
    """Populate sol.objectives and sol.penalty from the problem callbacks.

    With validate=True a structurally invalid solution is refused; the
    engine disables the check because registered operators are guaranteed
    to preserve validity.
    """
    cfg = problem.config()
    if validate:
        report = validate_solution(sol, cfg)
        if not report.ok:
            raise ValueError(f"refusing to evaluate invalid solution: {report.violations[:3]}")
    for i in range(cfg.num_objectives):
        sol.objectives[i] = problem.compute_objective(i, sol)
    sol.penalty = float(problem.compute_penalty(sol))
    if sol.penalty < 0:
        raise ValueError(f"penalty must be nonnegative, got {sol.penalty}")
    return sol.objectives, sol.penalty


def check_distance_matrix(d: np.ndarray, symmetric: bool = True) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {d.shape}")
    if np.any(d < 0):
        raise ValueError("distance matrix must be nonnegative")
    if np.any(np.diag(d) != 0):
        raise ValueError("distance matrix must have a zero diagonal")
    if symmetric and not np.array_equal(d, d.T):
        raise ValueError("distance matrix declared symmetric but is not")
    return d
