"""Static problem profiling and scale-driven prior weights.

Classification looks only at the problem configuration: scale comes from
the row width, structure from the row mode. The scale class selects
initial masses for the expensive operators (3-opt, or-opt, LNS) relative
to a uniform mass of 1.0 per cheap operator, so adaptation starts from a
sensible prior instead of learning it at runtime.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .core import Encoding, ProblemConfig, RowModeKind
from .operators import (
    CROSSOVER_IDS,
    LNS_IDS,
    SEQ_OR_OPT,
    SEQ_THREE_OPT,
    SequenceRegistry,
)

DEFAULT_P_CROSS = 0.1


class Scale(enum.Enum):
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


@dataclass(frozen=True)
class WeightPreset:
    three_opt_w: float
    or_opt_w: float
    lns_w: float
    lns_cap: float


# Pre-normalization masses relative to a uniform O(1) operator mass of 1.0.
PRESETS = {
    Scale.SMALL: WeightPreset(0.50, 0.80, 0.006, 0.02),
    Scale.MEDIUM: WeightPreset(0.30, 0.70, 0.004, 0.01),
    Scale.LARGE: WeightPreset(0.05, 0.30, 0.001, 0.005),
}


@dataclass(frozen=True)
class ProblemProfile:
    encoding: Encoding
    scale: Scale
    structure: RowModeKind
    p_cross: float = DEFAULT_P_CROSS

    def as_dict(self) -> dict:
        return {
            "encoding": self.encoding.kind.value,
            "scale": self.scale.value,
            "structure": self.structure.value,
            "p_cross": self.p_cross,
        }


def classify(cfg: ProblemConfig, p_cross: float = DEFAULT_P_CROSS) -> ProblemProfile:
    """Scale from the row width D2: <= 100 small, <= 250 medium, above large."""
    if cfg.d2 <= 100:
        scale = Scale.SMALL
    elif cfg.d2 <= 250:
        scale = Scale.MEDIUM
    else:
        scale = Scale.LARGE
    return ProblemProfile(cfg.encoding, scale, cfg.row_mode, p_cross)


def apply_preset(registry: SequenceRegistry, profile: ProblemProfile) -> dict[int, float]:
    """Set initial weights and per-sequence caps from the scale preset.

    Cheap operators keep mass 1.0; 3-opt, or-opt and the LNS family get
    the preset masses with LNS additionally capped; crossover entries
    split a combined mass equal to a p_cross share of the final total.
    The registry is normalized afterwards; the returned mapping carries
    the pre-normalization masses per sequence id.
    """
    preset = PRESETS[profile.scale]
    crossover_entries = []
    plain_mass = 0.0
    for entry in registry.entries:
        if entry.id == SEQ_THREE_OPT:
            entry.weight = preset.three_opt_w
        elif entry.id == SEQ_OR_OPT:
            entry.weight = preset.or_opt_w
        elif entry.id in LNS_IDS:
            entry.weight = preset.lns_w
            entry.cap = preset.lns_cap
        elif entry.id in CROSSOVER_IDS:
            crossover_entries.append(entry)
            continue
        else:
            entry.weight = 1.0
        plain_mass += entry.weight
    if crossover_entries:
        share = profile.p_cross / (1.0 - profile.p_cross) * plain_mass
        for entry in crossover_entries:
            entry.weight = share / len(crossover_entries)
    masses = {entry.id: entry.weight for entry in registry.entries}
    registry.normalize()
    return masses
