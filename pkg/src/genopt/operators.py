"""Search operator hierarchy, the sequence registry, and custom registration.

Built-in operators occupy sequence ids [0, 31], user operators register at
ids >= 100, and [32, 100) stays reserved. Every operator mutates a
caller-owned working solution in place and must leave it structurally
valid; registration runs a probe against a sample solution so an unsafe
custom operator is excluded up front instead of corrupting a run.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    EncodingKind,
    ProblemConfig,
    RowModeKind,
    Solution,
    validate_solution,
)

# Built-in sequence ids. The ranges are load-bearing: [0, 31] built-in,
# [32, 100) reserved, >= 100 custom.
SEQ_SWAP = 0
SEQ_INSERT = 1
SEQ_REVERSE = 2
SEQ_OR_OPT = 3
SEQ_THREE_OPT = 4
SEQ_FLIP = 5
SEQ_SEG_FLIP = 6
SEQ_RANDOM_RESET = 7
SEQ_SEG_RESET = 8
SEQ_ROW_SWAP = 9
SEQ_ROW_SPLIT = 10
SEQ_ROW_MERGE = 11
SEQ_OX_CROSSOVER = 12
SEQ_UNIFORM_CROSSOVER = 13
SEQ_SEG_SHUFFLE = 14
SEQ_SCATTER_SHUFFLE = 15
SEQ_GUIDED_REBUILD = 16

CUSTOM_ID_START = 100
RESERVED_BAND = (32, 100)

LNS_IDS = (SEQ_SEG_SHUFFLE, SEQ_SCATTER_SHUFFLE, SEQ_GUIDED_REBUILD)
CROSSOVER_IDS = (SEQ_OX_CROSSOVER, SEQ_UNIFORM_CROSSOVER)


@dataclass
class OperatorContext:
    """Everything an operator may consult besides the solution itself.

    `pick_mate` draws a crossover partner from the population snapshot and
    `phi` is the scalarized fitness used by guided rebuild; both are
    injected by the engine (or by the registration probe).
    """

    problem: object
    cfg: ProblemConfig
    pick_mate: Callable | None = None
    phi: Callable | None = None


@dataclass
class SequenceEntry:
    id: int
    name: str
    fn: Callable
    weight: float = 1.0
    floor: float = 0.0
    cap: float = math.inf


@dataclass
class CustomOperator:
    id: int
    name: str
    apply: Callable  # (solution, rng, context) -> None, mutates in place
    initial_weight: float = 1.0

    def __post_init__(self):
        if self.initial_weight <= 0:
            raise ValueError("initial_weight must be positive")


class SequenceRegistry:
    """Operator catalog with per-sequence weights, floors, and caps."""

    def __init__(self, entries: list[SequenceEntry]):
        ids = [e.id for e in entries]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate sequence ids in registry")
        self.entries = list(entries)
        self.normalize()

    def __len__(self):
        return len(self.entries)

    def ids(self) -> list[int]:
        return [e.id for e in self.entries]

    def get(self, seq_id: int) -> SequenceEntry:
        for e in self.entries:
            if e.id == seq_id:
                return e
        raise KeyError(f"sequence id {seq_id} not in registry")

    def normalize(self):
        total = sum(e.weight for e in self.entries)
        if total <= 0:
            raise ValueError("registry weights must have positive mass")
        for e in self.entries:
            e.weight /= total

    def weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.entries])

    def copy(self) -> "SequenceRegistry":
        out = SequenceRegistry.__new__(SequenceRegistry)
        out.entries = [SequenceEntry(e.id, e.name, e.fn, e.weight, e.floor, e.cap)
                       for e in self.entries]
        return out


def lns_scope(n: int) -> int:
    """Destruction size for LNS operators: ceil(min(0.1 n, 30)), at least 2."""
    if n < 1:
        raise ValueError("problem size must be >= 1")
    return max(2, math.ceil(min(0.1 * n, 30.0)))


# ---------------------------------------------------------------------------
# shared row bookkeeping

def _pick_row(sol: Solution, rng, min_size: int) -> int | None:
    rows = [r for r in range(sol.d1) if sol.dim2_sizes[r] >= min_size]
    if not rows:
        return None
    return rows[rng.randrange(len(rows))]


def _pick_cell(sol: Solution, rng) -> tuple[int, int] | None:
    total = int(sol.dim2_sizes.sum())
    if total == 0:
        return None
    return _nth_cell(sol, rng.randrange(total))


def _nth_cell(sol: Solution, g: int) -> tuple[int, int]:
    for r in range(sol.d1):
        size = int(sol.dim2_sizes[r])
        if g < size:
            return r, g
        g -= size
    raise IndexError("global cell index out of range")


def _row_remove(sol: Solution, r: int, pos: int) -> int:
    size = int(sol.dim2_sizes[r])
    value = int(sol.data[r, pos])
    if pos < size - 1:
        sol.data[r, pos:size - 1] = sol.data[r, pos + 1:size].copy()
    sol.dim2_sizes[r] = size - 1
    return value


def _row_insert(sol: Solution, r: int, pos: int, value: int):
    size = int(sol.dim2_sizes[r])
    if pos < size:
        sol.data[r, pos + 1:size + 1] = sol.data[r, pos:size].copy()
    sol.data[r, pos] = value
    sol.dim2_sizes[r] = size + 1


def _active_cells(sol: Solution, only_row: int | None = None) -> list[tuple[int, int]]:
    rows = [only_row] if only_row is not None else range(sol.d1)
    return [(r, p) for r in rows for p in range(int(sol.dim2_sizes[r]))]


def _first_open_row(sol: Solution) -> int:
    for r in range(sol.d1):
        if sol.dim2_sizes[r] < sol.d2:
            return r
    raise ValueError("no row has free capacity")


def _locate_value(sol: Solution, value: int, only_row: int | None = None) -> tuple[int, int]:
    rows = [only_row] if only_row is not None else range(sol.d1)
    for r in rows:
        row = sol.row(r)
        hits = np.where(row == value)[0]
        if len(hits):
            return r, int(hits[0])
    raise ValueError(f"value {value} not present")


# ---------------------------------------------------------------------------
# element- and segment-level operators

def op_swap(sol: Solution, rng, ctx: OperatorContext):
    if ctx.cfg.row_mode is RowModeKind.MULTI_PARTITION:
        total = int(sol.dim2_sizes.sum())
        if total < 2:
            return
        g1 = rng.randrange(total)
        g2 = rng.randrange(total - 1)
        if g2 >= g1:
            g2 += 1
        (r1, p1), (r2, p2) = _nth_cell(sol, g1), _nth_cell(sol, g2)
        sol.data[r1, p1], sol.data[r2, p2] = int(sol.data[r2, p2]), int(sol.data[r1, p1])
        return
    r = _pick_row(sol, rng, 2)
    if r is None:
        return
    size = int(sol.dim2_sizes[r])
    i = rng.randrange(size)
    j = rng.randrange(size - 1)
    if j >= i:
        j += 1
    sol.data[r, i], sol.data[r, j] = int(sol.data[r, j]), int(sol.data[r, i])


def op_insert(sol: Solution, rng, ctx: OperatorContext):
    if ctx.cfg.row_mode is RowModeKind.MULTI_PARTITION:
        cell = _pick_cell(sol, rng)
        if cell is None:
            return
        r1, p1 = cell
        targets = [r for r in range(sol.d1)
                   if (r == r1 and sol.dim2_sizes[r1] >= 2) or
                   (r != r1 and sol.dim2_sizes[r] < sol.d2)]
        if not targets:
            return
        r2 = targets[rng.randrange(len(targets))]
        value = _row_remove(sol, r1, p1)
        pos = rng.randrange(int(sol.dim2_sizes[r2]) + 1)
        _row_insert(sol, r2, pos, value)
        return
    r = _pick_row(sol, rng, 2)
    if r is None:
        return
    size = int(sol.dim2_sizes[r])
    i = rng.randrange(size)
    value = _row_remove(sol, r, i)
    j = rng.randrange(size)
    _row_insert(sol, r, j, value)


def op_reverse(sol: Solution, rng, ctx: OperatorContext):
    r = _pick_row(sol, rng, 2)
    if r is None:
        return
    size = int(sol.dim2_sizes[r])
    i = rng.randrange(size - 1)
    j = rng.randrange(i + 1, size)
    sol.data[r, i:j + 1] = sol.data[r, i:j + 1][::-1].copy()


def op_or_opt(sol: Solution, rng, ctx: OperatorContext):
    """Relocate a segment of length 2-3 (across rows for partitions)."""
    seg_len = rng.randrange(2, 4)
    r1 = _pick_row(sol, rng, seg_len + (0 if ctx.cfg.row_mode is RowModeKind.MULTI_PARTITION else 1))
    if r1 is None:
        return
    size1 = int(sol.dim2_sizes[r1])
    start = rng.randrange(size1 - seg_len + 1)
    segment = [int(v) for v in sol.data[r1, start:start + seg_len]]
    if ctx.cfg.row_mode is RowModeKind.MULTI_PARTITION:
        targets = [r for r in range(sol.d1)
                   if r == r1 or sol.dim2_sizes[r] + seg_len <= sol.d2]
        r2 = targets[rng.randrange(len(targets))]
    else:
        r2 = r1
    for _ in range(seg_len):
        _row_remove(sol, r1, start)
    pos = rng.randrange(int(sol.dim2_sizes[r2]) + 1)
    for offset, value in enumerate(segment):
        _row_insert(sol, r2, pos + offset, value)


_THREE_OPT_VARIANTS = 7


def op_three_opt(sol: Solution, rng, ctx: OperatorContext):
    """Randomized 3-opt: one reconnection variant applied per call."""
    r = _pick_row(sol, rng, 4)
    if r is None:
        op_reverse(sol, rng, ctx)
        return
    size = int(sol.dim2_sizes[r])
    cuts = sorted(rng.sample(range(1, size), 3))
    i, j, k = cuts
    row = sol.data[r, :size]
    a, b, c, d = row[:i], row[i:j], row[j:k], row[k:]
    variant = rng.randrange(_THREE_OPT_VARIANTS)
    if variant == 0:
        parts = (a, b[::-1], c, d)
    elif variant == 1:
        parts = (a, b, c[::-1], d)
    elif variant == 2:
        parts = (a, b[::-1], c[::-1], d)
    elif variant == 3:
        parts = (a, c, b, d)
    elif variant == 4:
        parts = (a, c, b[::-1], d)
    elif variant == 5:
        parts = (a, c[::-1], b, d)
    else:
        parts = (a, c[::-1], b[::-1], d)
    sol.data[r, :size] = np.concatenate(parts)


def op_flip(sol: Solution, rng, ctx: OperatorContext):
    cell = _pick_cell(sol, rng)
    if cell is None:
        return
    r, p = cell
    sol.data[r, p] = 1 - sol.data[r, p]


def op_seg_flip(sol: Solution, rng, ctx: OperatorContext):
    r = _pick_row(sol, rng, 1)
    if r is None:
        return
    size = int(sol.dim2_sizes[r])
    i = rng.randrange(size)
    j = rng.randrange(i, size)
    sol.data[r, i:j + 1] = 1 - sol.data[r, i:j + 1]


def op_random_reset(sol: Solution, rng, ctx: OperatorContext):
    cell = _pick_cell(sol, rng)
    if cell is None:
        return
    r, p = cell
    enc = ctx.cfg.encoding
    sol.data[r, p] = rng.randrange(enc.lower_bound, enc.upper_bound + 1)


def op_seg_reset(sol: Solution, rng, ctx: OperatorContext):
    r = _pick_row(sol, rng, 1)
    if r is None:
        return
    size = int(sol.dim2_sizes[r])
    i = rng.randrange(size)
    j = rng.randrange(i, size)
    enc = ctx.cfg.encoding
    for p in range(i, j + 1):
        sol.data[r, p] = rng.randrange(enc.lower_bound, enc.upper_bound + 1)


# ---------------------------------------------------------------------------
# row-level operators

def op_row_swap(sol: Solution, rng, ctx: OperatorContext):
    if sol.d1 < 2:
        return
    r1 = rng.randrange(sol.d1)
    r2 = rng.randrange(sol.d1 - 1)
    if r2 >= r1:
        r2 += 1
    sol.data[[r1, r2]] = sol.data[[r2, r1]]
    sol.dim2_sizes[[r1, r2]] = sol.dim2_sizes[[r2, r1]]


def op_row_split(sol: Solution, rng, ctx: OperatorContext):
    r = _pick_row(sol, rng, 2)
    if r is None:
        return
    size = int(sol.dim2_sizes[r])
    cut = rng.randrange(1, size)
    tail = [int(v) for v in sol.data[r, cut:size]]
    empty = [t for t in range(sol.d1) if t != r and sol.dim2_sizes[t] == 0]
    roomy = [t for t in range(sol.d1)
             if t != r and 0 < sol.dim2_sizes[t] and sol.dim2_sizes[t] + len(tail) <= sol.d2]
    pool = empty if empty else roomy
    if not pool:
        return
    t = pool[rng.randrange(len(pool))]
    sol.dim2_sizes[r] = cut
    base = int(sol.dim2_sizes[t])
    for offset, value in enumerate(tail):
        sol.data[t, base + offset] = value
    sol.dim2_sizes[t] = base + len(tail)


def op_row_merge(sol: Solution, rng, ctx: OperatorContext):
    nonempty = [r for r in range(sol.d1) if sol.dim2_sizes[r] > 0]
    if len(nonempty) < 2:
        return
    order = list(nonempty)
    rng.shuffle(order)
    for a in order:
        for b in order:
            if a != b and sol.dim2_sizes[a] + sol.dim2_sizes[b] <= sol.d2:
                base = int(sol.dim2_sizes[a])
                size_b = int(sol.dim2_sizes[b])
                sol.data[a, base:base + size_b] = sol.data[b, :size_b]
                sol.dim2_sizes[a] = base + size_b
                sol.dim2_sizes[b] = 0
                return


# ---------------------------------------------------------------------------
# crossover operators

def _ox_sequence(current: np.ndarray, mate: np.ndarray, rng) -> np.ndarray:
    """Canonical order crossover: keep a slice of `current`, fill the rest
    in `mate` order starting after the slice."""
    n = len(current)
    c1 = rng.randrange(n)
    c2 = rng.randrange(n)
    if c1 > c2:
        c1, c2 = c2, c1
    child = np.full(n, -1, dtype=np.int64)
    child[c1:c2 + 1] = current[c1:c2 + 1]
    kept = set(int(v) for v in current[c1:c2 + 1])
    fill_values = [int(v) for v in np.roll(mate, -(c2 + 1)) if int(v) not in kept]
    positions = [p % n for p in range(c2 + 1, c2 + 1 + n) if child[p % n] == -1]
    for pos, value in zip(positions, fill_values):
        child[pos] = value
    return child


def op_ox_crossover(sol: Solution, rng, ctx: OperatorContext):
    mate = ctx.pick_mate(rng) if ctx.pick_mate is not None else None
    if mate is None:
        return
    mode = ctx.cfg.row_mode
    if mode is RowModeKind.MULTI_PARTITION:
        current_flat = sol.active_values()
        mate_flat = mate.active_values()
        if len(current_flat) < 2 or len(mate_flat) != len(current_flat):
            return
        child = _ox_sequence(current_flat, mate_flat, rng)
        at = 0
        for r in range(sol.d1):
            size = int(sol.dim2_sizes[r])
            sol.data[r, :size] = child[at:at + size]
            at += size
        return
    r = 0 if mode is RowModeKind.SINGLE_SEQ else rng.randrange(sol.d1)
    size = int(sol.dim2_sizes[r])
    if size < 2 or int(mate.dim2_sizes[r]) != size:
        return
    sol.data[r, :size] = _ox_sequence(sol.data[r, :size], mate.data[r, :size], rng)


def op_uniform_crossover(sol: Solution, rng, ctx: OperatorContext):
    mate = ctx.pick_mate(rng) if ctx.pick_mate is not None else None
    if mate is None:
        return
    for r in range(sol.d1):
        size = min(int(sol.dim2_sizes[r]), int(mate.dim2_sizes[r]))
        for p in range(size):
            if rng.random() < 0.5:
                sol.data[r, p] = mate.data[r, p]


# ---------------------------------------------------------------------------
# large neighborhood search operators

def op_seg_shuffle(sol: Solution, rng, ctx: OperatorContext):
    r = _pick_row(sol, rng, 2)
    if r is None:
        return
    size = int(sol.dim2_sizes[r])
    length = min(lns_scope(ctx.cfg.n), size)
    start = rng.randrange(size - length + 1)
    segment = [int(v) for v in sol.data[r, start:start + length]]
    rng.shuffle(segment)
    sol.data[r, start:start + length] = segment


def op_scatter_shuffle(sol: Solution, rng, ctx: OperatorContext):
    if ctx.cfg.encoding.kind is EncodingKind.PERMUTATION and \
            ctx.cfg.row_mode is RowModeKind.MULTI_FIXED:
        # rows are independent orderings; values must not cross rows
        r = rng.randrange(sol.d1)
        size = int(sol.dim2_sizes[r])
        if size < 2:
            return
        m = min(lns_scope(ctx.cfg.n), size)
        cells = [(r, p) for p in rng.sample(range(size), m)]
        values = [int(sol.data[rr, pp]) for rr, pp in cells]
        rng.shuffle(values)
        for (rr, pp), value in zip(cells, values):
            sol.data[rr, pp] = value
        return
    total = int(sol.dim2_sizes.sum())
    if total < 2:
        return
    m = min(lns_scope(ctx.cfg.n), total)
    picks = rng.sample(range(total), m)
    cells = [_nth_cell(sol, g) for g in picks]
    values = [int(sol.data[r, p]) for r, p in cells]
    rng.shuffle(values)
    for (r, p), value in zip(cells, values):
        sol.data[r, p] = value


def op_guided_rebuild(sol: Solution, rng, ctx: OperatorContext):
    """Remove a scatter of elements, park them at row ends, then greedily
    place each at the position minimizing scalarized fitness.

    Parking keeps the solution structurally complete, so every trial
    position is scored by a full evaluation of a valid solution.
    """
    if ctx.phi is None:
        op_scatter_shuffle(sol, rng, ctx)
        return
    enc = ctx.cfg.encoding.kind
    if enc is EncodingKind.PERMUTATION:
        if ctx.cfg.row_mode is RowModeKind.MULTI_FIXED:
            # rows are independent orderings; rebuild within one row
            home_row = rng.randrange(sol.d1)
        else:
            home_row = None
        cells = _active_cells(sol, home_row)
        if len(cells) < 3:
            return
        m = min(lns_scope(ctx.cfg.n), len(cells) - 1)
        removed = []
        for r, p in sorted(rng.sample(cells, m), key=lambda c: (c[0], -c[1])):
            removed.append(_row_remove(sol, r, p))
        for value in removed:  # park at row ends to stay complete
            r = home_row if home_row is not None else _first_open_row(sol)
            _row_insert(sol, r, int(sol.dim2_sizes[r]), value)
        for value in removed:
            r0, p0 = _locate_value(sol, value, home_row)
            _row_remove(sol, r0, p0)
            best_phi = None
            best_slot = None
            rows = [home_row] if home_row is not None else range(sol.d1)
            for r in rows:
                if sol.dim2_sizes[r] >= sol.d2:
                    continue
                for pos in range(int(sol.dim2_sizes[r]) + 1):
                    _row_insert(sol, r, pos, value)
                    score = ctx.phi(sol)
                    _row_remove(sol, r, pos)
                    if best_phi is None or score < best_phi:
                        best_phi, best_slot = score, (r, pos)
            _row_insert(sol, best_slot[0], best_slot[1], value)
        return
    # binary / integer: coordinate-greedy reset of a scatter of cells
    total = int(sol.dim2_sizes.sum())
    if total == 0:
        return
    m = min(lns_scope(ctx.cfg.n), total)
    cells = [_nth_cell(sol, g) for g in rng.sample(range(total), m)]
    lb, ub = ctx.cfg.encoding.lower_bound, ctx.cfg.encoding.upper_bound
    if enc is EncodingKind.BINARY:
        lb, ub = 0, 1
    domain = list(range(lb, ub + 1))
    if len(domain) > 16:
        domain = sorted(rng.sample(domain, 16))
    for r, p in cells:
        best_phi = None
        best_value = int(sol.data[r, p])
        for value in domain:
            sol.data[r, p] = value
            score = ctx.phi(sol)
            if best_phi is None or score < best_phi:
                best_phi, best_value = score, value
        sol.data[r, p] = best_value


# ---------------------------------------------------------------------------
# registry construction and dispatch

_BUILTIN_DEFS = (
    (SEQ_SWAP, "swap", op_swap),
    (SEQ_INSERT, "insert", op_insert),
    (SEQ_REVERSE, "reverse", op_reverse),
    (SEQ_OR_OPT, "or_opt", op_or_opt),
    (SEQ_THREE_OPT, "three_opt", op_three_opt),
    (SEQ_FLIP, "flip", op_flip),
    (SEQ_SEG_FLIP, "seg_flip", op_seg_flip),
    (SEQ_RANDOM_RESET, "random_reset", op_random_reset),
    (SEQ_SEG_RESET, "seg_reset", op_seg_reset),
    (SEQ_ROW_SWAP, "row_swap", op_row_swap),
    (SEQ_ROW_SPLIT, "row_split", op_row_split),
    (SEQ_ROW_MERGE, "row_merge", op_row_merge),
    (SEQ_OX_CROSSOVER, "ox_crossover", op_ox_crossover),
    (SEQ_UNIFORM_CROSSOVER, "uniform_crossover", op_uniform_crossover),
    (SEQ_SEG_SHUFFLE, "seg_shuffle", op_seg_shuffle),
    (SEQ_SCATTER_SHUFFLE, "scatter_shuffle", op_scatter_shuffle),
    (SEQ_GUIDED_REBUILD, "guided_rebuild", op_guided_rebuild),
)


def sequence_applicable(seq_id: int, cfg: ProblemConfig) -> bool:
    kind = cfg.encoding.kind
    if seq_id in (SEQ_SWAP, SEQ_INSERT, SEQ_REVERSE, SEQ_OR_OPT, SEQ_THREE_OPT,
                  SEQ_OX_CROSSOVER):
        return kind is EncodingKind.PERMUTATION
    if seq_id in (SEQ_FLIP, SEQ_SEG_FLIP):
        return kind is EncodingKind.BINARY
    if seq_id in (SEQ_RANDOM_RESET, SEQ_SEG_RESET):
        return kind is EncodingKind.INTEGER
    if seq_id == SEQ_UNIFORM_CROSSOVER:
        return kind in (EncodingKind.BINARY, EncodingKind.INTEGER)
    if seq_id == SEQ_ROW_SWAP:
        return cfg.d1 >= 2
    if seq_id in (SEQ_ROW_SPLIT, SEQ_ROW_MERGE):
        return cfg.row_mode is RowModeKind.MULTI_PARTITION
    if seq_id in LNS_IDS:
        return True
    raise KeyError(f"unknown built-in sequence id {seq_id}")


def build_registry(cfg: ProblemConfig) -> SequenceRegistry:
    """Registry of built-in operators applicable to this problem layout,
    starting from uniform weights."""
    entries = [SequenceEntry(seq_id, name, fn)
               for seq_id, name, fn in _BUILTIN_DEFS
               if sequence_applicable(seq_id, cfg)]
    return SequenceRegistry(entries)


def apply_sequence(registry: SequenceRegistry, seq_id: int, sol: Solution,
                   rng, ctx: OperatorContext):
    """Apply exactly one registered operator to `sol` in place."""
    entry = registry.get(seq_id)
    entry.fn(sol, rng, ctx)


def register_custom(registry: SequenceRegistry, op: CustomOperator,
                    probe: Solution, ctx: OperatorContext, probe_rng) -> bool:
    """Validate a custom operator against a probe solution and add it.

    Returns True when registered. A probe failure (exception or invalid
    output) excludes the operator with a RuntimeWarning and leaves the
    registry unchanged; a bad id is a hard error.
    """
    if op.id < CUSTOM_ID_START:
        raise ValueError(
            f"custom operator id must be >= {CUSTOM_ID_START} "
            f"(got {op.id}; ids below 32 are built-in, [32, 100) is reserved)"
        )
    if op.id in registry.ids():
        raise ValueError(f"sequence id {op.id} already registered")
    trial = probe.copy()
    try:
        op.apply(trial, probe_rng, ctx)
        report = validate_solution(trial, ctx.cfg)
    except Exception as exc:  # noqa: BLE001 - any operator fault means exclusion
        warnings.warn(
            f"custom operator {op.name!r} (id {op.id}) excluded: probe raised {exc!r}",
            RuntimeWarning, stacklevel=2,
        )
        return False
    if not report.ok:
        warnings.warn(
            f"custom operator {op.name!r} (id {op.id}) excluded: probe output invalid "
            f"({report.violations[0]})",
            RuntimeWarning, stacklevel=2,
        )
        return False
    registry.entries.append(SequenceEntry(op.id, op.name, op.apply,
                                          weight=op.initial_weight))
    registry.normalize()
    return True
