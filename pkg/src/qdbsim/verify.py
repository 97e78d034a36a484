"""Built-in verification suite.

``run_verify`` executes a battery of self-checks — closed forms, oracle
cross-checks, round-trips, and end-to-end operation invariants — and returns
a report that serializes to JSON and back. The fast level covers the cheap
always-on checks; the full level adds the expensive end-to-end suites.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import oracle
from .circuit import Circuit, DecompositionConfig, decompose_mcx, simulate
from .errors import SemanticError
from .extend import extend, extend_imbalanced, plan_extend_imbalanced, transfer
from .gates import GateSpec, h, phase, rot2, ry, swap, x, y, ytilde
from .qdb import (
    permute,
    prepare_general,
    read_copy,
    remove_projective,
    remove_reservoir,
    write,
)
from .statevector import StateVector, schmidt, states_equal
from .text_format import emit_text, parse_text
from .tolerances import ORACLE_TOL, STATE_TOL


def _check_gate_matrices() -> str:
    samples = [
        x(0), h(1), ry(0, 0.7), y(1, 0.3), ytilde(2, 0.2), phase(0, 1.1),
        swap(0, 2), rot2(1, 6, 0.4), x(2, ctrl=(0,), nctrl=(1,)),
    ]
    for g in samples:
        mat = oracle.dense_gate(g, 3)
        if not oracle.is_unitary(mat):
            raise SemanticError(f"dense matrix of {g.kind} is not unitary")
    return f"{len(samples)} gate matrices unitary"


def _check_prepare_closed_form() -> str:
    cases = [(2, 0), (3, 0), (5, 0), (8, 0), (2, 2), (5, 3), (7, 2)]
    for k, l in cases:
        db = prepare_general(k, l)
        db.check()
        want0 = math.sqrt((l + 1) / (k + l))
        if abs(abs(db.reservoir_amplitude()) - want0) > STATE_TOL:
            raise SemanticError(f"reservoir amplitude wrong for k={k}, l={l}")
    return f"{len(cases)} (k, l) preparations match the closed form"


def _check_oracle_agreement() -> str:
    db = prepare_general(5, 1, {1: 1, 3: "10"})
    mat = oracle.dense_operator(db.circuit)
    via_oracle = mat[:, 0]
    diff = float(np.max(np.abs(via_oracle - db.state.amplitudes)))
    if diff > ORACLE_TOL:
        raise SemanticError(f"oracle and simulator disagree by {diff:.3g}")
    expected = oracle.expected_qdb_amplitudes(db.descriptor, db.layout)
    for idx, want in expected.items():
        if abs(abs(db.state.amplitudes[idx]) - want) > ORACLE_TOL:
            raise SemanticError(f"closed-form amplitude mismatch at index {idx}")
    return f"simulator vs dense oracle within {diff:.2e}"


def _check_text_round_trip() -> str:
    circ = Circuit(4)
    circ.label(0, "I").label(1, "I").label(2, "D").label(3, "A")
    circ.extend_gates([
        h(0), x(1, ctrl=(0,)), ry(2, -0.25), y(0, 0.125), ytilde(1, 0.8125),
        phase(3, 2.5, nctrl=(0, 1)), swap(0, 3, ctrl=(2,)), rot2(3, 12, 1.0 / 3.0),
    ])
    text = emit_text(circ)
    again = emit_text(parse_text(text))
    if text != again:
        raise SemanticError("circuit text did not survive a round trip")
    return f"round-tripped {len(circ)} gates byte-identically"


def _check_transfer_small() -> str:
    db = prepare_general(2, 0, {1: 1})
    moved, plan = transfer(db, 2)
    moved.check()
    if plan.residual > 1e-10:
        raise SemanticError(f"plan residual {plan.residual:.3g} too large")
    return f"transfer (k=2, l=2): m={plan.m}, residual {plan.residual:.2e}"


def _check_transfer_suite() -> str:
    details = []
    for k, l in [(4, 4), (4, 2), (8, 8)]:
        moved, plan = transfer(prepare_general(k, 0), l)
        moved.check()
        details.append(f"({k},{l}):m={plan.m}")
    return "transfers " + " ".join(details)


def _check_extend_chain() -> str:
    db = prepare_general(2, 0, {1: 1})
    grown = extend(db, 5)
    grown.check()
    if grown.k != 7:
        raise SemanticError(f"extension produced {grown.k} entries, wanted 7")
    amp = abs(grown.amplitude(1))
    if abs(amp - math.sqrt(1 / 7)) > 1e-8:
        raise SemanticError("extended entries are not uniform")
    return "extend 2 -> 7 entries uniform at 1/sqrt(7)"


def _check_imbalanced() -> str:
    plan = plan_extend_imbalanced(3, 6, 2)
    db = prepare_general(3, 0, {1: 1}, m_data=1)
    grown = extend_imbalanced(db, 6, 2)
    grown.check()
    if abs(plan.alpha - abs(grown.reservoir_amplitude())) > 1e-8:
        raise SemanticError("reservoir amplitude misses the closed form")
    preloaded = extend_imbalanced(prepare_general(3, 6, {1: 1}, m_data=1), 6, 2)
    preloaded.check()
    if not states_equal(preloaded.state, grown.state, tol=1e-8):
        raise SemanticError("preloaded reservoir route diverges from transfer route")
    balanced = extend_imbalanced(prepare_general(4, 0), 3, 1)
    balanced.check()
    if abs(abs(balanced.amplitude(4)) - math.sqrt(1 / 7)) > 1e-8:
        raise SemanticError("single-ancilla extension is not balanced")
    return (f"imbalanced (3,6,z=2): alpha={plan.alpha:.6f} "
            f"gamma={plan.gamma:.6f}; preloaded route agrees; z=1 balanced")


def _check_db_ops() -> str:
    db = prepare_general(4, 0, {1: "10", 2: "01"})
    db = write(db, 3, "11")
    if db.descriptor.data_value(3) != 3:
        raise SemanticError("write did not record the data word")
    copied = read_copy(db, 3)
    rep = schmidt(copied.state, copied.copy_qubits)
    if not rep.entangled:
        raise SemanticError("copying a nonzero word must entangle the copy")
    removed = remove_reservoir(db, 3)
    removed.check()
    if removed.k != 3 or removed.l != 1:
        raise SemanticError("unitary removal did not grow the reservoir")
    outcome = remove_projective(db, 2)
    if outcome.success_state is None or abs(outcome.success_probability - 0.75) > 1e-9:
        raise SemanticError("projective removal probability is off")
    outcome.success_state.check()
    swapped = permute(db, [0, 2, 1, 3])
    swapped.check()
    if swapped.descriptor.data_value(2) != 2:
        raise SemanticError("permutation did not move entry data")
    return "write/read/remove/permute invariants hold"


def _check_mcx() -> str:
    rng = np.random.default_rng(7)
    for tau in (3, 4, 5):
        n = tau + 1
        circ = Circuit(n, [GateSpec("x", (), (tau,), tuple((c, 1) for c in range(tau)))])
        low = decompose_mcx(circ, DecompositionConfig("clean-allocated"))
        want = 2 * tau - 3
        got = sum(1 for g in low.gates if g.kind == "x" and len(g.controls) == 2)
        if got != want:
            raise SemanticError(f"tau={tau}: {got} Toffolis, expected {want}")
        amps = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
        amps /= np.linalg.norm(amps)
        target = simulate(circ, StateVector(amps))
        padded = np.zeros(2 ** low.n_qubits, dtype=complex)
        padded[:2 ** n] = amps
        lowered = simulate(low, StateVector(padded))
        marg = lowered.amplitudes[:2 ** n]
        if float(np.max(np.abs(marg - target.amplitudes))) > 1e-9:
            raise SemanticError(f"tau={tau}: decomposition changed the action")
    return "multi-controlled X decompositions agree (tau = 3, 4, 5)"


FAST_CHECKS = [
    ("gate-matrices", _check_gate_matrices),
    ("prepare-closed-form", _check_prepare_closed_form),
    ("oracle-agreement", _check_oracle_agreement),
    ("text-round-trip", _check_text_round_trip),
    ("transfer-small", _check_transfer_small),
]

FULL_CHECKS = FAST_CHECKS + [
    ("transfer-suite", _check_transfer_suite),
    ("extend-chain", _check_extend_chain),
    ("imbalanced-extend", _check_imbalanced),
    ("database-ops", _check_db_ops),
    ("mcx-decomposition", _check_mcx),
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class VerifyReport:
    level: str
    passed: bool
    checks: tuple[CheckResult, ...]

    def to_json(self) -> str:
        obj = {
            "level": self.level,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
        }
        return json.dumps(obj, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "VerifyReport":
        obj = json.loads(text)
        checks = tuple(
            CheckResult(c["name"], bool(c["passed"]), c["detail"])
            for c in obj["checks"])
        return cls(level=obj["level"], passed=bool(obj["passed"]), checks=checks)


def run_verify(level: str = "fast") -> VerifyReport:
    """Run the named check battery; never raises, failures land in the report."""
    if level not in ("fast", "full"):
        raise SemanticError(f"verify level must be 'fast' or 'full', got {level!r}")
    battery = FAST_CHECKS if level == "fast" else FULL_CHECKS
    results = []
    for name, fn in battery:
        try:
            detail = fn()
            results.append(CheckResult(name, True, detail))
        except Exception as exc:  # noqa: BLE001 - report, do not crash
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return VerifyReport(level=level, passed=all(r.passed for r in results),
                        checks=tuple(results))
