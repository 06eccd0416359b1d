"""GTSP solver toolkit for warehouse order picking."""

from .cmcs import (
    Budget,
    BudgetMode,
    Configuration,
    RunResult,
    compute_budget,
    conf1,
    conf2,
    format_budget,
    read_config,
    run,
    write_config,
)
from .components import (
    ComponentKind,
    ComponentOutcome,
    apply_component,
    cluster_optimisation,
    insertion_hill_climber,
    order_mutation,
    vertex_mutation,
)
from .core import (
    Instance,
    NoOpMoveError,
    Point,
    Solution,
    apply_relocate,
    apply_vertex_swap,
    manhattan_distance,
    random_initial_solution,
    relocate_delta,
    solution_from_order,
    tour_cost,
    validate,
    vertex_swap_delta,
)
from .gen import (
    GeneratorParams,
    GtsplibFormatError,
    TestbedKind,
    build_testbed,
    generate,
    make_testbed_spec,
    read_gtsplib,
    write_gtsplib,
    write_testbed,
)
from .oracle import global_optimum, optimal_selection_for_order
from .trainer import (
    enumerate_meaningful,
    enumerate_raw,
    evaluate,
    normalize,
    select,
    train,
)

__all__ = [
    "Budget",
    "BudgetMode",
    "ComponentKind",
    "ComponentOutcome",
    "Configuration",
    "GeneratorParams",
    "GtsplibFormatError",
    "Instance",
    "NoOpMoveError",
    "Point",
    "RunResult",
    "Solution",
    "TestbedKind",
    "apply_component",
    "apply_relocate",
    "apply_vertex_swap",
    "build_testbed",
    "cluster_optimisation",
    "compute_budget",
    "conf1",
    "conf2",
    "enumerate_meaningful",
    "enumerate_raw",
    "evaluate",
    "format_budget",
    "generate",
    "global_optimum",
    "insertion_hill_climber",
    "make_testbed_spec",
    "manhattan_distance",
    "normalize",
    "optimal_selection_for_order",
    "order_mutation",
    "random_initial_solution",
    "read_config",
    "read_gtsplib",
    "relocate_delta",
    "run",
    "select",
    "solution_from_order",
    "tour_cost",
    "train",
    "validate",
    "vertex_mutation",
    "vertex_swap_delta",
    "write_config",
    "write_gtsplib",
    "write_testbed",
]

__version__ = "0.1.0"
