"""Dense complex statevector simulation.

Conventions
-----------
* Qubit 0 is the least significant bit of the basis index: basis state
  ``|x>`` assigns qubit ``q`` the bit ``(x >> q) & 1``.
* New qubits are appended at the high-significance end and start in ``|0>``.
* States are treated as immutable: every operation returns a new
  ``StateVector`` and never mutates its input.
* State equality is judged up to global phase by default.

The default qubit budget is 26; anything above that is rejected rather than
silently thrashing memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, SemanticError, ZeroProbabilityError
from .gates import GateSpec, matrix_1q
from .tolerances import NORM_TOL, PROJECTION_ZERO_TOL, SCHMIDT_CUTOFF, STATE_TOL

DEFAULT_MAX_QUBITS = 26


class StateVector:
    """A normalized pure state on ``n_qubits`` qubits."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, amplitudes, n_qubits: int | None = None, *, copy: bool = True):
        amps = np.array(amplitudes, dtype=complex, copy=copy)
        if amps.ndim != 1:
            raise SemanticError("amplitudes must be a 1-d array")
        n = int(amps.size).bit_length() - 1
        if 2**n != amps.size:
            raise SemanticError(f"amplitude count {amps.size} is not a power of two")
        if n_qubits is not None and n_qubits != n:
            raise SemanticError(f"expected {2**n_qubits} amplitudes, got {amps.size}")
        self.n_qubits = n
        self.amplitudes = amps

    @classmethod
    def zero(cls, n_qubits: int, *, max_qubits: int = DEFAULT_MAX_QUBITS) -> "StateVector":
        return cls.basis(n_qubits, 0, max_qubits=max_qubits)

    @classmethod
    def basis(cls, n_qubits: int, index: int, *, max_qubits: int = DEFAULT_MAX_QUBITS) -> "StateVector":
        if n_qubits < 1:
            raise SemanticError("need at least one qubit")
        if n_qubits > max_qubits:
            raise CapacityError(f"{n_qubits} qubits exceeds the budget of {max_qubits}")
        if not 0 <= index < 2**n_qubits:
            raise SemanticError(f"basis index {index} out of range for {n_qubits} qubits")
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps, copy=False)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes, copy=True)

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


def _control_mask(dim: int, controls) -> np.ndarray:
    idx = np.arange(dim)
    ok = np.ones(dim, dtype=bool)
    for q, bit in controls:
        ok &= ((idx >> q) & 1) == bit
    return ok


def apply_gate(state: StateVector, gate: GateSpec) -> StateVector:
    """Apply one gate, returning a new state.

    Raises if the gate touches qubits outside the register or if the result
    drifts off unit norm (which would indicate a broken gate matrix).
    """
    n, dim = state.n_qubits, state.dim
    for q in gate.qubits:
        if q >= n:
            raise SemanticError(f"gate {gate.kind} touches qubit {q}, register has {n}")

    amps = state.amplitudes.copy()
    if gate.kind == "rot2":
        a, b = int(gate.params[0]), int(gate.params[1])
        if a >= dim or b >= dim:
            raise SemanticError(f"rot2 basis index out of range for {n} qubits")
        theta = gate.params[2]
        c, s = math.cos(theta), math.sin(theta)
        va, vb = amps[a], amps[b]
        amps[a] = c * va - s * vb
        amps[b] = s * va + c * vb
    elif gate.kind == "swap":
        t1, t2 = gate.targets
        idx = np.arange(dim)
        sel = _control_mask(dim, gate.controls)
        sel &= (((idx >> t1) & 1) == 0) & (((idx >> t2) & 1) == 1)
        i01 = idx[sel]
        i10 = (i01 | (1 << t1)) & ~(1 << t2)
        amps[i01], amps[i10] = amps[i10], amps[i01].copy()
    elif gate.kind == "phase":
        idx = np.arange(dim)
        sel = _control_mask(dim, gate.controls) & (((idx >> gate.targets[0]) & 1) == 1)
        amps[sel] *= np.exp(1j * gate.params[0])
    else:
        u = matrix_1q(gate.kind, gate.params)
        t = gate.targets[0]
        idx = np.arange(dim)
        sel = _control_mask(dim, gate.controls) & (((idx >> t) & 1) == 0)
        i0 = idx[sel]
        i1 = i0 | (1 << t)
        a0, a1 = amps[i0], amps[i1]
        amps[i0] = u[0, 0] * a0 + u[0, 1] * a1
        amps[i1] = u[1, 0] * a0 + u[1, 1] * a1

    out = StateVector(amps, copy=False)
    if abs(out.norm() - state.norm()) > NORM_TOL:
        raise SemanticError(f"gate {gate.kind} broke normalization")
    return out


def apply_two_level_rotation(state: StateVector, a: int, b: int, theta: float) -> StateVector:
    """Givens rotation in the plane spanned by basis states ``a`` and ``b``."""
    return apply_gate(state, GateSpec("rot2", (float(a), float(b), float(theta))))


def overlap(a: StateVector, b: StateVector) -> complex:
    """Inner product <a|b>."""
    if a.n_qubits != b.n_qubits:
        raise SemanticError("overlap needs states on the same register")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def states_equal(a: StateVector, b: StateVector, tol: float = STATE_TOL,
                 *, up_to_global_phase: bool = True) -> bool:
    """Whether two states agree within ``tol``, by default up to global phase."""
    if a.n_qubits != b.n_qubits:
        return False
    if not up_to_global_phase:
        return bool(np.max(np.abs(a.amplitudes - b.amplitudes)) <= tol)
    ov = np.vdot(a.amplitudes, b.amplitudes)
    if abs(ov) < 1e-300:
        return False
    ph = ov / abs(ov)
    return bool(np.max(np.abs(a.amplitudes * ph - b.amplitudes)) <= tol)


def _keep_mask(state: StateVector, keep) -> np.ndarray:
    if callable(keep):
        return np.fromiter((bool(keep(i)) for i in range(state.dim)), dtype=bool,
                           count=state.dim)
    arr = np.asarray(keep)
    if arr.dtype == bool:
        if arr.size != state.dim:
            raise SemanticError("boolean mask length must equal the state dimension")
        return arr
    mask = np.zeros(state.dim, dtype=bool)
    mask[arr.astype(int)] = True
    return mask


def project(state: StateVector, keep) -> tuple[StateVector, float]:
    """Project onto the span of the basis states selected by ``keep``.

    ``keep`` may be a predicate over basis indices, a boolean mask, or an
    index list. Returns the renormalized state and the outcome probability.
    Projections with probability below 1e-14 are rejected.
    """
    mask = _keep_mask(state, keep)
    amps = np.where(mask, state.amplitudes, 0.0)
    prob = float(np.sum(np.abs(amps) ** 2))
    if prob < PROJECTION_ZERO_TOL:
        raise ZeroProbabilityError(f"projection probability {prob:.3e} is numerically zero")
    return StateVector(amps / math.sqrt(prob), copy=False), prob


def sample_measure(state: StateVector, qubits, seed) -> tuple[str, StateVector]:
    """Measure the listed qubits in the computational basis.

    ``seed`` is an integer or a ``numpy.random.Generator``; the same seed and
    state always give the same outcome. Returns the outcome as a bitstring
    (character ``i`` is the result for ``qubits[i]``) and the collapsed state.
    """
    qubits = list(qubits)
    if len(set(qubits)) != len(qubits):
        raise SemanticError("duplicate qubit in measurement list")
    for q in qubits:
        if not 0 <= q < state.n_qubits:
            raise SemanticError(f"qubit {q} out of range")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    idx = np.arange(state.dim)
    key = np.zeros(state.dim, dtype=np.int64)
    for i, q in enumerate(qubits):
        key |= ((idx >> q) & 1) << i
    marginal = np.bincount(key, weights=state.probabilities(), minlength=2 ** len(qubits))
    marginal = marginal / marginal.sum()
    outcome = int(rng.choice(len(marginal), p=marginal))
    collapsed, _ = project(state, key == outcome)
    bits = "".join(str((outcome >> i) & 1) for i in range(len(qubits)))
    return bits, collapsed


def add_ancillas(state: StateVector, count: int, value: int = 0,
                 *, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """Append ``count`` fresh qubits at the high end, prepared in ``|value>``."""
    if count < 0:
        raise SemanticError("ancilla count must be non-negative")
    if count == 0:
        return state.copy()
    n = state.n_qubits + count
    if n > max_qubits:
        raise CapacityError(f"{n} qubits exceeds the budget of {max_qubits}")
    if not 0 <= value < 2**count:
        raise SemanticError(f"ancilla value {value} out of range for {count} qubits")
    amps = np.zeros(2**n, dtype=complex)
    base = value << state.n_qubits
    amps[base:base + state.dim] = state.amplitudes
    return StateVector(amps, copy=False)


def drop_qubits(state: StateVector, qubits, *, expect_zero: bool = True) -> StateVector:
    """Remove qubits that are in |0> across the entire support.

    This is how detached registers leave the simulation; it refuses to drop a
    qubit that still carries amplitude on |1>.
    """
    qubits = sorted(set(qubits), reverse=True)
    amps = state.amplitudes
    n = state.n_qubits
    for q in qubits:
        if not 0 <= q < n:
            raise SemanticError(f"qubit {q} out of range")
        arr = amps.reshape(-1, 2 ** (q + 1))
        hi = arr[:, 2**q:]
        if expect_zero and np.max(np.abs(hi)) > STATE_TOL:
            raise SemanticError(f"qubit {q} is not in |0>; refusing to drop it")
        amps = arr[:, :2**q].reshape(-1)
        n -= 1
    nrm = np.linalg.norm(amps)
    return StateVector(amps / nrm, copy=False)


@dataclass(frozen=True)
class EntanglementReport:
    """Schmidt data for a bipartition of a pure state."""

    schmidt_coefficients: tuple[float, ...]
    schmidt_rank: int
    entropy_bits: float
    purity: float

    @property
    def entangled(self) -> bool:
        return self.schmidt_rank > 1


def schmidt(state: StateVector, qubits) -> EntanglementReport:
    """Schmidt decomposition across the bipartition (``qubits`` | rest).

    Coefficients are returned in descending order; the rank counts
    coefficients above 1e-9; entropy is in bits; purity is that of the
    reduced state on either side.
    """
    sub = sorted(set(qubits))
    n = state.n_qubits
    if not sub or len(sub) == n:
        raise SemanticError("bipartition needs a proper non-empty qubit subset")
    for q in sub:
        if not 0 <= q < n:
            raise SemanticError(f"qubit {q} out of range")
    rest = [q for q in range(n) if q not in sub]
    tensor = state.amplitudes.reshape([2] * n)
    # axis n-1-q corresponds to qubit q
    order = [n - 1 - q for q in reversed(sub)] + [n - 1 - q for q in reversed(rest)]
    mat = tensor.transpose(order).reshape(2 ** len(sub), 2 ** len(rest))
    coeffs = np.linalg.svd(mat, compute_uv=False)
    lam2 = coeffs**2
    lam2 = lam2 / lam2.sum()
    rank = int(np.sum(coeffs > SCHMIDT_CUTOFF))
    nz = lam2[lam2 > 0]
    entropy = float(-np.sum(nz * np.log2(nz)))
    purity = float(np.sum(lam2**2))
    return EntanglementReport(tuple(float(c) for c in coeffs), rank, entropy, purity)
