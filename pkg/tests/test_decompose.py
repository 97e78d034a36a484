"""Multi-controlled X lowering to Toffoli chains."""

import numpy as np
import pytest

from conftest import random_state
from qdbsim.circuit import Circuit, DecompositionConfig, decompose_mcx, simulate
from qdbsim.errors import SemanticError
from qdbsim.gates import h, x
from qdbsim.statevector import StateVector, add_ancillas


def _mcx_circuit(tau: int) -> Circuit:
    c = Circuit(tau + 1)
    c.append(x(tau, ctrl=tuple(range(tau))))
    return c


@pytest.mark.parametrize("tau", [3, 4, 5])
def test_toffoli_count_is_linear(tau):
    lowered = decompose_mcx(_mcx_circuit(tau))
    toffolis = [g for g in lowered.gates if g.kind == "x" and len(g.controls) == 2]
    assert len(toffolis) == 2 * tau - 3
    assert max(len(g.controls) for g in lowered.gates) == 2
    assert lowered.n_qubits == tau + 1 + (tau - 2)


@pytest.mark.parametrize("tau", [3, 4, 5])
def test_decomposition_acts_identically_on_main_register(tau, rng):
    base = _mcx_circuit(tau)
    lowered = decompose_mcx(base)
    state = random_state(rng, tau + 1)
    want = simulate(base, state)
    padded = add_ancillas(state, lowered.n_qubits - (tau + 1))
    got = simulate(lowered, padded)
    dim = want.dim
    assert np.max(np.abs(got.amplitudes[:dim] - want.amplitudes)) < 1e-9
    assert np.max(np.abs(got.amplitudes[dim:])) < 1e-9  # helpers restored


def test_negative_controls_are_wrapped():
    c = Circuit(5)
    c.append(x(4, ctrl=(0, 1), nctrl=(2, 3)))
    lowered = decompose_mcx(c)
    state = StateVector.basis(5, 0b0011)
    padded = add_ancillas(state, lowered.n_qubits - 5)
    got = simulate(lowered, padded)
    assert abs(got.amplitudes[0b10011]) == pytest.approx(1.0)


def test_small_gates_pass_through():
    c = Circuit(3)
    c.append(h(0))
    c.append(x(2, ctrl=(0, 1)))
    lowered = decompose_mcx(c)
    assert lowered.n_qubits == 3
    assert [g.kind for g in lowered.gates] == ["h", "x"]


def test_borrowed_policy_uses_labeled_ancillas(rng):
    c = Circuit(6)
    c.label(4, "A")
    c.label(5, "A")
    c.append(x(3, ctrl=(0, 1, 2)))
    lowered = decompose_mcx(c, DecompositionConfig("clean-borrowed"))
    assert lowered.n_qubits == 6  # no widening
    state = random_state(rng, 4)
    padded = add_ancillas(state, 2)
    got = simulate(lowered, padded)
    want = simulate(c, padded)
    assert np.max(np.abs(got.amplitudes - want.amplitudes)) < 1e-9


def test_borrowed_policy_requires_enough_ancillas():
    c = Circuit(5)
    c.label(4, "A")
    c.append(x(3, ctrl=(0, 1, 2), nctrl=(4,)))  # ancilla is busy as a control
    with pytest.raises(SemanticError):
        decompose_mcx(c, DecompositionConfig("clean-borrowed"))


def test_unknown_policy_rejected():
    with pytest.raises(SemanticError):
        DecompositionConfig("dirty")
