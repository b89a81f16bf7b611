"""General-purpose parallel metaheuristic framework for combinatorial
optimization: unified encodings, an adaptive operator system with user
registration, profile-driven priors, island population management, and a
benchmark CLI."""

__version__ = "0.1.0"

from .aos import (
    DEFAULT_K_WEIGHTS,
    AosConfig,
    AosStats,
    record,
    sample_k,
    sample_sequence,
    stagnation_check_and_reset,
    update_weights,
)
from .builtins import BUILTIN_NAMES, builtin_problem
from .core import (
    ComparisonMode,
    Direction,
    Encoding,
    EncodingKind,
    Lexicographic,
    ObjDef,
    ProblemConfig,
    RowModeKind,
    Solution,
    StructuralError,
    ValidityReport,
    Weighted,
    compare,
    scalarize,
    validate_solution,
)
from .engine import (
    EngineConfig,
    EvolverState,
    IslandsConfig,
    RunResult,
    adaptive_population_size,
    elite_inject,
    evolve_generation,
    fast_nondominated_sort,
    heuristic_candidates,
    initialize_population,
    island_migrate,
    run,
)
from .instances import DemoInstance, demo_instance, demo_instances
from .operators import (
    CustomOperator,
    OperatorContext,
    SequenceRegistry,
    apply_sequence,
    build_registry,
    lns_scope,
    register_custom,
)
from .problems import InstanceData, ProblemDefinition, evaluate
from .profiles import PRESETS, ProblemProfile, Scale, WeightPreset, apply_preset, classify

__all__ = [name for name in dir() if not name.startswith("_")]
