"""Run-result records and their canonical JSON serialization.

Documents have a fixed key order and full-precision numbers so identical
records serialize to byte-identical text; a version stamp keeps the schema
checkable across releases.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import __version__
from .engine import RunResult

RESULT_SCHEMA_FIELDS = (
    "problem",
    "instance",
    "seed",
    "objectives",
    "penalty",
    "feasible",
    "gap_pct",
    "generations",
    "elapsed_s",
    "gens_per_sec",
    "final_weights",
    "profile",
    "config",
    "tool_version",
)


@dataclass
class ResultRecord:
    problem: str
    instance: str
    seed: int
    objectives: list[float]
    penalty: float
    feasible: bool
    gap_pct: float | None
    generations: int
    elapsed_s: float
    gens_per_sec: float  # population-generations per second
    final_weights: dict
    profile: dict
    config: dict
    tool_version: str = __version__

    @staticmethod
    def from_run(result: RunResult, problem: str, instance: str) -> "ResultRecord":
        return ResultRecord(
            problem=problem,
            instance=instance,
            seed=result.seed,
            objectives=result.objectives,
            penalty=result.penalty,
            feasible=result.feasible,
            gap_pct=result.gap_pct,
            generations=result.generations_completed,
            elapsed_s=result.elapsed_seconds,
            gens_per_sec=result.gens_per_sec,
            final_weights=result.final_weights,
            profile=result.profile,
            config=result.config,
        )

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in RESULT_SCHEMA_FIELDS}

    @staticmethod
    def from_dict(payload: dict) -> "ResultRecord":
        missing = [f for f in RESULT_SCHEMA_FIELDS if f not in payload]
        if missing:
            raise ValueError(f"result document missing fields: {', '.join(missing)}")
        return ResultRecord(**{f: payload[f] for f in RESULT_SCHEMA_FIELDS})


def emit_result(record: ResultRecord) -> str:
    """Canonical single-record document (bit-stable for identical records)."""
    return json.dumps(record.to_dict(), indent=2, allow_nan=False) + "\n"


def emit_results(records: list[ResultRecord]) -> str:
    """Sweep document: an array in declaration order."""
    return json.dumps([r.to_dict() for r in records], indent=2, allow_nan=False) + "\n"


def parse_result(text: str) -> ResultRecord:
    return ResultRecord.from_dict(json.loads(text))


def parse_results(text: str) -> list[ResultRecord]:
    return [ResultRecord.from_dict(item) for item in json.loads(text)]


def gap_table(records: list[ResultRecord]) -> str:
    """Human-readable sweep summary: one line per instance with per-seed
    objectives and the mean gap when best-known values were supplied."""
    by_instance: dict[str, list[ResultRecord]] = {}
    for record in records:
        by_instance.setdefault(record.instance, []).append(record)
    lines = [f"{'instance':<28} {'seeds':>5} {'best obj':>12} {'mean obj':>12} "
             f"{'mean gap%':>10} {'feasible':>8}"]
    for instance, group in by_instance.items():
        objectives = [g.objectives[0] for g in group]
        gaps = [g.gap_pct for g in group if g.gap_pct is not None]
        mean_gap = f"{sum(gaps) / len(gaps):.2f}" if gaps else "-"
        feasible = f"{sum(1 for g in group if g.feasible)}/{len(group)}"
        lines.append(
            f"{instance:<28} {len(group):>5} {min(objectives):>12.2f} "
            f"{sum(objectives) / len(objectives):>12.2f} {mean_gap:>10} {feasible:>8}"
        )
    return "\n".join(lines)
