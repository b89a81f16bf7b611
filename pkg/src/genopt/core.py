"""Encodings, the unified solution structure, and the comparison order.

Everything else in the package is built on the types here: solutions are
row-organized integer matrices with per-row effective lengths, objectives
carry a direction and a weight, and `compare` defines the single total
preorder (penalty first, then weighted or lexicographic) used by the
engine, population management, and result reporting.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class EncodingKind(enum.Enum):
    PERMUTATION = "permutation"
    BINARY = "binary"
    INTEGER = "integer"


class RowModeKind(enum.Enum):
    SINGLE_SEQ = "single_seq"
    MULTI_FIXED = "multi_fixed"
    MULTI_PARTITION = "multi_partition"


class Direction(enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class StructuralError(ValueError):
    """Solution shape does not match the problem configuration.

    Distinct from a validity failure: a structurally broken solution cannot
    even be checked against the encoding rules.
    """


@dataclass(frozen=True)
class Encoding:
    kind: EncodingKind
    lower_bound: int = 0
    upper_bound: int = 0

    def __post_init__(self):
        if self.kind is EncodingKind.INTEGER and self.lower_bound > self.upper_bound:
            raise ValueError(
                f"integer encoding needs lower_bound <= upper_bound, "
                f"got [{self.lower_bound}, {self.upper_bound}]"
            )

    @staticmethod
    def permutation() -> "Encoding":
        return Encoding(EncodingKind.PERMUTATION)

    @staticmethod
    def binary() -> "Encoding":
        return Encoding(EncodingKind.BINARY)

    @staticmethod
    def integer(lower_bound: int, upper_bound: int) -> "Encoding":
        return Encoding(EncodingKind.INTEGER, lower_bound, upper_bound)


@dataclass(frozen=True)
class ObjDef:
    name: str
    direction: Direction = Direction.MINIMIZE
    weight: float = 1.0

    def __post_init__(self):
        if self.weight <= 0:
            raise ValueError(f"objective weight must be > 0, got {self.weight}")


@dataclass(frozen=True)
class Weighted:
    """Scalarize objectives with fixed nonnegative weights."""

    weights: tuple[float, ...]

    def __post_init__(self):
        if any(w < 0 for w in self.weights):
            raise ValueError("weighted comparison needs nonnegative weights")
        if not any(w > 0 for w in self.weights):
            raise ValueError("weighted comparison needs at least one positive weight")


@dataclass(frozen=True)
class Lexicographic:
    """Compare objectives in priority order with per-objective tie tolerances."""

    priority_order: tuple[int, ...]
    tolerances: tuple[float, ...]

    def __post_init__(self):
        if sorted(self.priority_order) != list(range(len(self.priority_order))):
            raise ValueError("priority_order must be a permutation of objective indices")
        if len(self.tolerances) != len(self.priority_order):
            raise ValueError("tolerances length must match number of objectives")
        if any(t < 0 for t in self.tolerances):
            raise ValueError("tolerances must be nonnegative")


ComparisonMode = Weighted | Lexicographic


@dataclass(frozen=True)
class ProblemConfig:
    encoding: Encoding
    d1: int
    d2: int
    n: int
    row_mode: RowModeKind
    obj_defs: tuple[ObjDef, ...]
    comparison: ComparisonMode | None = None
    penalty_weight: float | None = None  # None: engine derives one from the initial population

    def __post_init__(self):
        if self.d1 < 1 or self.d2 < 1 or self.n < 1:
            raise ValueError("d1, d2 and n must be positive")
        if self.row_mode is RowModeKind.SINGLE_SEQ:
            if self.d1 != 1:
                raise ValueError("single-sequence layout requires d1 == 1")
            if self.encoding.kind is EncodingKind.PERMUTATION and self.n > self.d2:
                raise ValueError(f"n={self.n} does not fit a single row of width {self.d2}")
        elif self.n > self.d1 * self.d2:
            raise ValueError(f"n={self.n} exceeds layout capacity d1*d2={self.d1 * self.d2}")
        if self.comparison is not None:
            m = len(self.obj_defs)
            if isinstance(self.comparison, Weighted) and len(self.comparison.weights) != m:
                raise ValueError("comparison weights length must match obj_defs")
            if isinstance(self.comparison, Lexicographic) and len(self.comparison.priority_order) != m:
                raise ValueError("priority order length must match obj_defs")
        if self.penalty_weight is not None and self.penalty_weight <= 0:
            raise ValueError("penalty_weight must be positive")
        # cache the default mode; compare() sits on the engine's hot path
        default = self.comparison if self.comparison is not None \
            else Weighted(tuple(o.weight for o in self.obj_defs))
        object.__setattr__(self, "_default_comparison", default)

    @property
    def num_objectives(self) -> int:
        return len(self.obj_defs)

    def comparison_or_default(self) -> ComparisonMode:
        return self._default_comparison


class Solution:
    """Row-organized integer solution with objective vector and penalty.

    `data` is a fixed d1 x d2 integer matrix; only the first
    `dim2_sizes[r]` cells of row r are active. Objectives and penalty are
    populated by evaluation and carried with the solution.
    """

    __slots__ = ("data", "dim2_sizes", "objectives", "penalty")

    def __init__(self, data: np.ndarray, dim2_sizes: np.ndarray,
                 num_objectives: int = 1):
        self.data = np.asarray(data, dtype=np.int64)
        if self.data.ndim != 2:
            raise StructuralError("solution data must be a 2-d matrix")
        self.dim2_sizes = np.asarray(dim2_sizes, dtype=np.int64)
        self.objectives = np.full(num_objectives, np.nan, dtype=np.float64)
        self.penalty = 0.0

    @property
    def d1(self) -> int:
        return self.data.shape[0]

    @property
    def d2(self) -> int:
        return self.data.shape[1]

    def row(self, r: int) -> np.ndarray:
        """Active cells of row r (a view, not a copy)."""
        return self.data[r, : self.dim2_sizes[r]]

    def active_values(self) -> np.ndarray:
        """All active cells concatenated row by row."""
        return np.concatenate([self.row(r) for r in range(self.d1)]) \
            if self.d1 > 1 else self.row(0).copy()

    def copy(self) -> "Solution":
        out = Solution.__new__(Solution)
        out.data = self.data.copy()
        out.dim2_sizes = self.dim2_sizes.copy()
        out.objectives = self.objectives.copy()
        out.penalty = self.penalty
        return out

    def __repr__(self):
        rows = [list(map(int, self.row(r))) for r in range(self.d1)]
        return f"Solution(rows={rows}, objectives={self.objectives}, penalty={self.penalty})"


@dataclass
class ValidityReport:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def validate_solution(sol: Solution, cfg: ProblemConfig) -> ValidityReport:
    """Check a solution against the encoding and row-mode rules of `cfg`.

    Shape mismatches raise StructuralError; rule violations are collected
    into the report with row/position detail.
    """
    if sol.data.shape != (cfg.d1, cfg.d2):
        raise StructuralError(
            f"solution shape {sol.data.shape} does not match config ({cfg.d1}, {cfg.d2})"
        )
    if sol.dim2_sizes.shape != (cfg.d1,):
        raise StructuralError("dim2_sizes length does not match d1")

    violations: list[str] = []
    sizes = sol.dim2_sizes
    if np.any(sizes < 0) or np.any(sizes > cfg.d2):
        for r in range(cfg.d1):
            if not (0 <= sizes[r] <= cfg.d2):
                violations.append(f"row {r}: effective length {int(sizes[r])} outside [0, {cfg.d2}]")
        return ValidityReport(False, violations)

    kind = cfg.encoding.kind
    if kind is EncodingKind.PERMUTATION:
        if cfg.row_mode is RowModeKind.SINGLE_SEQ:
            _check_permutation_row(sol.row(0), cfg.n, 0, violations)
        elif cfg.row_mode is RowModeKind.MULTI_FIXED:
            # every row holds its own full ordering of [0, n)
            for r in range(cfg.d1):
                if sizes[r] != cfg.n:
                    violations.append(f"row {r}: expected full length {cfg.n}, got {int(sizes[r])}")
                else:
                    _check_permutation_row(sol.row(r), cfg.n, r, violations)
        else:  # MULTI_PARTITION: exact cover of [0, n) across rows
            values = sol.active_values() if sol.d1 > 1 else sol.row(0)
            counts = np.zeros(cfg.n, dtype=np.int64)
            for r in range(cfg.d1):
                for p, v in enumerate(sol.row(r)):
                    if not (0 <= v < cfg.n):
                        violations.append(f"row {r} pos {p}: element {int(v)} outside [0, {cfg.n})")
                    else:
                        counts[v] += 1
            if len(values) != cfg.n:
                violations.append(f"partition covers {len(values)} cells, expected {cfg.n}")
            for v in range(cfg.n):
                if counts[v] > 1:
                    violations.append(f"duplicate element {v} ({int(counts[v])} occurrences)")
                elif counts[v] == 0 and len(values) == cfg.n:
                    violations.append(f"missing element {v}")
    elif kind is EncodingKind.BINARY:
        for r in range(cfg.d1):
            row = sol.row(r)
            bad = np.where((row != 0) & (row != 1))[0]
            for p in bad:
                violations.append(f"row {r} pos {int(p)}: value {int(row[p])} not in {{0, 1}}")
    else:  # INTEGER
        lb, ub = cfg.encoding.lower_bound, cfg.encoding.upper_bound
        for r in range(cfg.d1):
            row = sol.row(r)
            bad = np.where((row < lb) | (row > ub))[0]
            for p in bad:
                violations.append(f"row {r} pos {int(p)}: value {int(row[p])} outside [{lb}, {ub}]")

    return ValidityReport(not violations, violations)


def _check_permutation_row(row: np.ndarray, n: int, r: int, violations: list[str]):
    if len(row) != n:
        violations.append(f"row {r}: expected {n} elements, got {len(row)}")
        return
    counts = np.bincount(row[(row >= 0) & (row < n)], minlength=n)
    for p, v in enumerate(row):
        if not (0 <= v < n):
            violations.append(f"row {r} pos {p}: element {int(v)} outside [0, {n})")
    for v in range(n):
        if counts[v] > 1:
            violations.append(f"row {r}: duplicate element {v}")
        elif counts[v] == 0 and np.all((row >= 0) & (row < n)):
            violations.append(f"row {r}: missing element {v}")


def scalarize(objectives, obj_defs, weights) -> float:
    """Weighted sum of direction-normalized objectives (lower is better).

    Maximize objectives are negated before weighting so the engine can
    minimize uniformly.
    """
    if len(objectives) != len(obj_defs) or len(weights) != len(obj_defs):
        raise ValueError(
            f"length mismatch: {len(objectives)} objectives, "
            f"{len(obj_defs)} definitions, {len(weights)} weights"
        )
    total = 0.0
    for value, od, w in zip(objectives, obj_defs, weights):
        signed = -value if od.direction is Direction.MAXIMIZE else value
        total += w * signed
    return total


A_BETTER = -1
EQUAL = 0
B_BETTER = 1


def compare(a: Solution, b: Solution, cfg: ProblemConfig) -> int:
    """Total preorder over evaluated solutions: -1 a-better, 0 equal, 1 b-better.

    Feasible beats infeasible. Among infeasible, lower penalty wins and
    penalty ties fall through to the mode comparison. Among feasible,
    Weighted compares scalarized fitness; Lexicographic walks the priority
    order, treating objective i as tied when |a_i - b_i| <= tolerance[i].
    """
    a_feas = a.penalty == 0.0
    b_feas = b.penalty == 0.0
    if a_feas != b_feas:
        return A_BETTER if a_feas else B_BETTER
    if not a_feas and a.penalty != b.penalty:
        return A_BETTER if a.penalty < b.penalty else B_BETTER
    return _compare_by_mode(a.objectives, b.objectives, cfg)


def _compare_by_mode(obj_a, obj_b, cfg: ProblemConfig) -> int:
    mode = cfg.comparison_or_default()
    if isinstance(mode, Weighted):
        fa = scalarize(obj_a, cfg.obj_defs, mode.weights)
        fb = scalarize(obj_b, cfg.obj_defs, mode.weights)
        if fa == fb:
            return EQUAL
        return A_BETTER if fa < fb else B_BETTER
    for i in mode.priority_order:
        if abs(obj_a[i] - obj_b[i]) <= mode.tolerances[i]:
            continue
        better_low = cfg.obj_defs[i].direction is Direction.MINIMIZE
        if obj_a[i] < obj_b[i]:
            return A_BETTER if better_low else B_BETTER
        return B_BETTER if better_low else A_BETTER
    return EQUAL
