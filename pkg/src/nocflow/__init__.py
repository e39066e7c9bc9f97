"""Optimal single-source divisible-load distribution on regular interconnects.

The pipeline: a topology plus an injection node collapses into per-level
node counts (`topology`); those counts and the cost ratio sigma assemble a
linear system per switching discipline (`flow_matrix`); elimination yields
the optimal per-level load fractions (`solver`); scalar figures of merit
(`metrics`), an independent timing replay (`timeline`), sigma sweeps with
deterministic exports (`report`), figures (`plots`), and a CLI (`cli`)
build on top.
"""

from .errors import InfeasibleError, InputError, SingularMatrixError
from .flow_matrix import (
    FlowMatrix,
    Protocol,
    Scenario,
    build,
    build_snf,
    build_vct,
    column_replaced_determinant,
    determinant,
    dump_matrix,
)
from .metrics import Metrics, compute_metrics
from .report import (
    SweepRow,
    emit_csv,
    emit_json,
    sigma_grid,
    sweep_filename,
    sweep_sigma,
)
from .solver import (
    FeasibilityReport,
    LevelAllocation,
    check_feasibility,
    closed_form_2x2,
    cramer_fraction,
    per_node_fractions,
    solve,
    solve_with_truncation,
)
from .timeline import (
    GanttRecord,
    SimultaneityCheck,
    Timeline,
    evaluate,
    expand_gantt,
    gantt_csv,
    verify_simultaneous,
)
from .topology import (
    DistributionTree,
    InjectionSpec,
    LevelProfile,
    Topology,
    distribution_tree,
    injection_at,
    level_profile,
)

__version__ = "0.1.0"

__all__ = [
    "FeasibilityReport",
    "FlowMatrix",
    "GanttRecord",
    "InfeasibleError",
    "InjectionSpec",
    "InputError",
    "LevelAllocation",
    "LevelProfile",
    "Metrics",
    "DistributionTree",
    "Protocol",
    "Scenario",
    "SimultaneityCheck",
    "SingularMatrixError",
    "SweepRow",
    "Timeline",
    "Topology",
    "build",
    "build_snf",
    "build_vct",
    "check_feasibility",
    "closed_form_2x2",
    "column_replaced_determinant",
    "compute_metrics",
    "cramer_fraction",
    "determinant",
    "distribution_tree",
    "dump_matrix",
    "emit_csv",
    "emit_json",
    "evaluate",
    "expand_gantt",
    "gantt_csv",
    "injection_at",
    "level_profile",
    "per_node_fractions",
    "sigma_grid",
    "solve",
    "solve_with_truncation",
    "sweep_filename",
    "sweep_sigma",
    "verify_simultaneous",
]
