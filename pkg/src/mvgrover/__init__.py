"""Grover search on qubits encoded in a discretized modular-variable grid."""

__version__ = "0.1.0"

from . import errors
from .kernel import (
    JointState,
    ModeState,
    ModularGrid,
    ancilla_branch,
    inner,
    load_state,
    make_grid,
    normalize,
    quad_norm,
    save_state,
    state_from_bytes,
    state_to_bytes,
    tensor,
    with_ancilla,
)
from .operators import (
    GlobalOperator,
    TargetSpec,
    apply,
    compose,
    dilation,
    gamma,
    grover_cell,
    grover_weighted,
    hadamard,
    identity,
    inversion_about_zero,
    joint_weight,
    oracle,
    pauli,
)
from .search import (
    AUTO,
    SearchConfig,
    SearchReport,
    build_list,
    final_state,
    identify,
    iteration_count,
    logical_basis,
    logical_overlaps,
    per_cell_max_error,
    reference_qubit_grover,
    run_search,
    sum_over_targets,
    weighted_list,
)
from .zak import (
    EnvelopeSpec,
    PositionWave,
    build_gaussian,
    logical_one,
    logical_zero,
    position_norm,
    zak_forward,
    zak_inverse,
)

__all__ = [
    "AUTO",
    "EnvelopeSpec",
    "GlobalOperator",
    "JointState",
    "ModeState",
    "ModularGrid",
    "PositionWave",
    "SearchConfig",
    "SearchReport",
    "TargetSpec",
    "ancilla_branch",
    "apply",
    "build_gaussian",
    "build_list",
    "compose",
    "dilation",
    "errors",
    "final_state",
    "gamma",
    "grover_cell",
    "grover_weighted",
    "hadamard",
    "identify",
    "identity",
    "inner",
    "inversion_about_zero",
    "iteration_count",
    "joint_weight",
    "load_state",
    "logical_basis",
    "logical_one",
    "logical_overlaps",
    "logical_zero",
    "make_grid",
    "normalize",
    "oracle",
    "pauli",
    "per_cell_max_error",
    "position_norm",
    "quad_norm",
    "reference_qubit_grover",
    "run_search",
    "save_state",
    "state_from_bytes",
    "state_to_bytes",
    "sum_over_targets",
    "tensor",
    "weighted_list",
    "with_ancilla",
    "zak_forward",
    "zak_inverse",
]
