"""Statevector simulation of quantum databases with superposed indices.

The package builds and simulates the circuit family behind a bucket-style
quantum database: a register of index states in even superposition, each
tagged with a data word, plus a weighted all-zero "reservoir" term that
funds later insertions. Core entry points:

- :func:`prepare_general` / :func:`prepare_balanced` — build a database.
- :func:`write`, :func:`read_copy`, :func:`read_projective` — data access.
- :func:`extend`, :func:`extend_imbalanced` — grow the index register.
- :func:`remove_reservoir`, :func:`remove_projective` — delete entries.
- :func:`permute`, :func:`transpose_entries` — reorder entries.
- :mod:`qdbsim.verify` — built-in consistency battery (also ``qdbsim verify``).
"""

from .circuit import (
    Circuit,
    CircuitMetrics,
    DecompositionConfig,
    decompose_mcx,
    simulate,
)
from .errors import (
    CapacityError,
    CircuitParseError,
    QdbError,
    ScriptError,
    SemanticError,
    VerificationError,
    ZeroProbabilityError,
)
from .extend import (
    AmplificationPlan,
    ExtendPlan,
    OverlapReport,
    check_no_unitary_extend,
    extend,
    extend_imbalanced,
    plan_extend_imbalanced,
    plan_transfer,
    transfer,
    unfold,
)
from .gates import GateSpec, h, phase, rot2, ry, swap, x, y, ytilde
from .qdb import (
    QdbDescriptor,
    QdbLayout,
    QdbState,
    RemovalOutcome,
    balanced_circuit,
    index_width,
    pattern_permutation_circuit,
    permute,
    prepare_balanced,
    prepare_circuit,
    prepare_general,
    preparation_circuit,
    read_copy,
    read_copy_all,
    read_projective,
    relabel_contiguous,
    remove_projective,
    remove_reservoir,
    transpose_entries,
    transposition_circuit,
    write,
    write_swap_conditional,
)
from .statevector import (
    DEFAULT_MAX_QUBITS,
    EntanglementReport,
    StateVector,
    add_ancillas,
    apply_gate,
    drop_qubits,
    overlap,
    project,
    sample_measure,
    schmidt,
    states_equal,
)
from .text_format import emit_text, parse_text
from .verify import CheckResult, VerifyReport, run_verify

__version__ = "0.1.0"

__all__ = [
    "AmplificationPlan",
    "CapacityError",
    "CheckResult",
    "Circuit",
    "CircuitMetrics",
    "CircuitParseError",
    "DecompositionConfig",
    "DEFAULT_MAX_QUBITS",
    "EntanglementReport",
    "ExtendPlan",
    "GateSpec",
    "OverlapReport",
    "QdbDescriptor",
    "QdbError",
    "QdbLayout",
    "QdbState",
    "RemovalOutcome",
    "ScriptError",
    "SemanticError",
    "StateVector",
    "VerificationError",
    "VerifyReport",
    "ZeroProbabilityError",
    "add_ancillas",
    "apply_gate",
    "balanced_circuit",
    "check_no_unitary_extend",
    "decompose_mcx",
    "drop_qubits",
    "emit_text",
    "extend",
    "extend_imbalanced",
    "h",
    "index_width",
    "overlap",
    "parse_text",
    "pattern_permutation_circuit",
    "permute",
    "phase",
    "plan_extend_imbalanced",
    "plan_transfer",
    "prepare_balanced",
    "prepare_circuit",
    "prepare_general",
    "preparation_circuit",
    "project",
    "read_copy",
    "read_copy_all",
    "read_projective",
    "relabel_contiguous",
    "remove_projective",
    "remove_reservoir",
    "rot2",
    "run_verify",
    "ry",
    "sample_measure",
    "schmidt",
    "simulate",
    "states_equal",
    "swap",
    "transfer",
    "transpose_entries",
    "transposition_circuit",
    "unfold",
    "write",
    "write_swap_conditional",
    "x",
    "y",
    "ytilde",
]
