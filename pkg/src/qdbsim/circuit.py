"""Gate-list circuits: construction, simulation, metrics, and the
linear-cost decomposition of multi-controlled X gates.

Circuits are ordered gate lists over a fixed-width register. Qubits may carry
register labels (``I`` index, ``D`` data, ``A`` ancilla, ``S`` sensor) which
are purely annotations: simulation ignores them, but layout bookkeeping and
the text format carry them through.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SemanticError
from .gates import GateSpec, gate_inverse, x
from .statevector import DEFAULT_MAX_QUBITS, StateVector, apply_gate

VALID_LABELS = ("I", "D", "A", "S")


@dataclass
class Circuit:
    n_qubits: int
    gates: list[GateSpec] = field(default_factory=list)
    labels: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise SemanticError("a circuit needs at least one qubit")
        for q, lab in self.labels.items():
            self._check_label(q, lab)
        for g in list(self.gates):
            self._check_gate(g)

    def _check_label(self, q: int, lab: str):
        if not 0 <= q < self.n_qubits:
            raise SemanticError(f"label on qubit {q} outside register of {self.n_qubits}")
        if lab not in VALID_LABELS:
            raise SemanticError(f"register label must be one of {VALID_LABELS}, got {lab!r}")

    def _check_gate(self, g: GateSpec):
        for q in g.qubits:
            if q >= self.n_qubits:
                raise SemanticError(
                    f"gate {g.kind} touches qubit {q}, circuit has {self.n_qubits}")
        if g.kind == "rot2":
            a, b = int(g.params[0]), int(g.params[1])
            if max(a, b) >= 2**self.n_qubits:
                raise SemanticError("rot2 basis index out of range for this circuit")

    def append(self, gate: GateSpec) -> "Circuit":
        self._check_gate(gate)
        self.gates.append(gate)
        return self

    def extend_gates(self, gates) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def label(self, q: int, lab: str) -> "Circuit":
        self._check_label(q, lab)
        self.labels[q] = lab
        return self

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise SemanticError("cannot concatenate circuits of different widths")
        labels = dict(self.labels)
        labels.update(other.labels)
        return Circuit(self.n_qubits, list(self.gates) + list(other.gates), labels)

    def __len__(self):
        return len(self.gates)

    def extended(self, n_qubits: int) -> "Circuit":
        """Same gates on a wider register (new qubits at the high end)."""
        if n_qubits < self.n_qubits:
            raise SemanticError("cannot shrink a circuit")
        return Circuit(n_qubits, list(self.gates), dict(self.labels))

    def inverse(self) -> "Circuit":
        return Circuit(self.n_qubits, [gate_inverse(g) for g in reversed(self.gates)],
                       dict(self.labels))

    def remapped(self, mapping: dict[int, int], n_qubits: int) -> "Circuit":
        """Embed into a wider register, sending qubit q to mapping[q].

        rot2 gates are tied to whole-register basis indices and cannot be
        embedded this way.
        """
        out = Circuit(n_qubits)
        for q, lab in self.labels.items():
            if q in mapping:
                out.label(mapping[q], lab)
        for g in self.gates:
            if g.kind == "rot2":
                raise SemanticError("rot2 gates cannot be remapped to a sub-register")
            out.append(GateSpec(
                g.kind, g.params,
                tuple(mapping[t] for t in g.targets),
                tuple((mapping[q], b) for q, b in g.controls)))
        return out

    def controlled(self, ctrl=(), nctrl=()) -> "Circuit":
        """Add the given controls to every gate."""
        extra = tuple((q, 1) for q in ctrl) + tuple((q, 0) for q in nctrl)
        out = Circuit(self.n_qubits, labels=dict(self.labels))
        for g in self.gates:
            if g.kind == "rot2":
                raise SemanticError("rot2 gates cannot take controls")
            out.append(GateSpec(g.kind, g.params, g.targets, g.controls + extra))
        return out

    def metrics(self) -> "CircuitMetrics":
        depth_at = [0] * self.n_qubits
        mcx = 0
        max_ctrl = 0
        for g in self.gates:
            qubits = range(self.n_qubits) if g.kind == "rot2" else g.qubits
            level = 1 + max((depth_at[q] for q in qubits), default=0)
            for q in qubits:
                depth_at[q] = level
            if g.kind == "x" and len(g.controls) >= 2:
                mcx += 1
            max_ctrl = max(max_ctrl, len(g.controls))
        return CircuitMetrics(
            gate_count=len(self.gates),
            depth=max(depth_at, default=0),
            mcx_count=mcx,
            max_controls=max_ctrl,
        )


@dataclass(frozen=True)
class CircuitMetrics:
    gate_count: int
    depth: int
    mcx_count: int
    max_controls: int


def simulate(circuit: Circuit, state: StateVector | None = None,
             *, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """Run the circuit on ``state`` (default |0...0>)."""
    if state is None:
        state = StateVector.zero(circuit.n_qubits, max_qubits=max_qubits)
    if state.n_qubits != circuit.n_qubits:
        raise SemanticError(
            f"state has {state.n_qubits} qubits, circuit needs {circuit.n_qubits}")
    for g in circuit.gates:
        state = apply_gate(state, g)
    return state


@dataclass(frozen=True)
class DecompositionConfig:
    """How decompose_mcx obtains its helper qubits.

    ``clean-borrowed`` uses existing ancilla-labeled qubits assumed to be in
    |0> and returns them there; ``clean-allocated`` widens the circuit with
    fresh ancillas.
    """

    ancilla_policy: str = "clean-allocated"

    def __post_init__(self):
        if self.ancilla_policy not in ("clean-allocated", "clean-borrowed"):
            raise SemanticError(f"unknown ancilla policy {self.ancilla_policy!r}")


def _toffoli(c1: int, c2: int, t: int) -> GateSpec:
    return x(t, ctrl=(c1, c2))


def _vchain(controls: list[int], target: int, helpers: list[int]) -> list[GateSpec]:
    """And-chain of Toffolis computing the conjunction of all controls.

    Needs len(controls) - 2 helper qubits in |0>; they are returned to |0>.
    Emits 2*tau - 3 Toffolis for tau controls.
    """
    tau = len(controls)
    compute = [_toffoli(controls[0], controls[1], helpers[0])]
    for i in range(tau - 3):
        compute.append(_toffoli(controls[i + 2], helpers[i], helpers[i + 1]))
    middle = _toffoli(controls[tau - 1], helpers[tau - 3], target)
    return compute + [middle] + list(reversed(compute))


def decompose_mcx(circuit: Circuit, config: DecompositionConfig | None = None) -> Circuit:
    """Replace every X gate with three or more controls by a Toffoli chain.

    Negative controls are wrapped in X conjugation; other gate kinds pass
    through untouched. Toffoli count per gate is linear in the control count.
    """
    config = config or DecompositionConfig()
    need = max((len(g.controls) - 2 for g in circuit.gates
                if g.kind == "x" and len(g.controls) >= 3), default=0)

    n = circuit.n_qubits
    labels = dict(circuit.labels)
    if need == 0:
        return Circuit(n, list(circuit.gates), labels)

    if config.ancilla_policy == "clean-allocated":
        helpers_pool = list(range(n, n + need))
        n += need
        for q in helpers_pool:
            labels[q] = "A"
    else:
        helpers_pool = None  # chosen per gate from free ancilla-labeled qubits

    out = Circuit(n, labels=labels)
    for g in circuit.gates:
        if g.kind != "x" or len(g.controls) < 3:
            out.append(g)
            continue
        busy = set(g.qubits)
        if helpers_pool is None:
            free = [q for q, lab in sorted(circuit.labels.items())
                    if lab == "A" and q not in busy]
            if len(free) < len(g.controls) - 2:
                raise SemanticError(
                    f"insufficient ancillas under clean-borrowed policy: need "
                    f"{len(g.controls) - 2}, have {len(free)}")
            helpers = free[:len(g.controls) - 2]
        else:
            helpers = helpers_pool[:len(g.controls) - 2]
        neg = [q for q, bit in g.controls if bit == 0]
        ctrl_qubits = [q for q, _ in g.controls]
        for q in neg:
            out.append(x(q))
        out.extend_gates(_vchain(ctrl_qubits, g.targets[0], helpers))
        for q in neg:
            out.append(x(q))
    return out
