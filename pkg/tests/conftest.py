"""Shared helpers: dense-oracle comparisons and phase canonicalization."""

import numpy as np
import pytest

from qdbsim.oracle import dense_operator
from qdbsim.statevector import StateVector


def dense_column(circuit) -> np.ndarray:
    """Apply the oracle's dense operator to |0...0>."""
    op = dense_operator(circuit)
    return op[:, 0].copy()


def canonical(vec) -> np.ndarray:
    """Divide out the global phase, keyed to the largest-magnitude entry."""
    v = np.asarray(vec, dtype=complex)
    i = int(np.argmax(np.abs(v)))
    ph = v[i] / abs(v[i])
    return v / ph


def state_matches_oracle(db, tol: float = 1e-12) -> float:
    """Max amplitude deviation between a database state and the dense-oracle
    replay of its cumulative circuit (detached wires padded with |0>)."""
    col = dense_column(db.circuit)
    vec = db.state.amplitudes
    padded = np.zeros(col.shape, dtype=complex)
    padded[: vec.size] = vec
    return float(np.max(np.abs(col - padded)))


def assert_vec_close(actual, expected, tol: float = 1e-12, *, up_to_phase=False):
    a = np.asarray(actual, dtype=complex)
    e = np.asarray(expected, dtype=complex)
    if up_to_phase:
        a, e = canonical(a), canonical(e)
    assert a.shape == e.shape
    err = float(np.max(np.abs(a - e)))
    assert err <= tol, f"max deviation {err:.3e} > {tol:.1e}"


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_state(rng, n_qubits: int) -> StateVector:
    amps = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    amps /= np.linalg.norm(amps)
    return StateVector(amps, copy=False)
