"""Quantum-database state: descriptor, register layout, and operations.

A database with k occupied entries and reservoir multiplicity l is the pure
state whose entry 0 (the reservoir, always empty) carries amplitude
sqrt((l+1)/(k+l)) and whose entries 1..k-1 each carry sqrt(1/(k+l)), with
entry j's data register holding |d_j> (or u_d|d_j> under a data encoding).

Operations are functional: each returns a new QdbState and leaves its input
untouched. Every unitary step is also appended to a cumulative circuit, so a
database can always be re-created from |0...0> by the circuit it carries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .circuit import Circuit, simulate
from .errors import SemanticError, VerificationError
from .gates import GateSpec, rot2, x, y
from .statevector import (
    DEFAULT_MAX_QUBITS,
    StateVector,
    add_ancillas,
    drop_qubits,
    project,
    schmidt,
    states_equal,
)
from .text_format import emit_text, parse_text
from .tolerances import DUMP_THRESHOLD, PROJECTION_ZERO_TOL, STATE_TOL

WRITE_PURITY_TOL = 1e-10


def index_width(k: int) -> int:
    """Qubits needed for k index patterns (at least one)."""
    if k < 1:
        raise SemanticError("entry count must be at least 1")
    return max(1, math.ceil(math.log2(k)))


def _bits_to_int(bits: str) -> int:
    if bits == "":
        return 0
    if set(bits) - {"0", "1"}:
        raise SemanticError(f"data bitstring must be binary, got {bits!r}")
    return int(bits, 2)


def _int_to_bits(value: int, width: int) -> str:
    if value < 0 or (width == 0 and value) or value >> width:
        raise SemanticError(f"data value {value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


@dataclass(frozen=True)
class QdbDescriptor:
    """What a database holds: entry count, reservoir multiplicity, data map.

    ``data`` maps entry labels to MSB-first bitstrings; absent labels hold the
    all-zero word. Label 0 is the reservoir and must stay empty. ``u_d`` is an
    optional basis-change circuit on the data register: entry j then stores
    u_d|d_j> instead of |d_j>.
    """

    k: int
    l: int
    data: dict[int, str] = field(default_factory=dict)
    u_d: Circuit | None = None
    m_data: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise SemanticError("a database needs at least one entry (the reservoir)")
        if self.l < 0:
            raise SemanticError("reservoir multiplicity cannot be negative")
        if self.m_data < 0:
            raise SemanticError("data register width cannot be negative")
        cleaned: dict[int, str] = {}
        for label, bits in self.data.items():
            if isinstance(bits, int):
                value, width = bits, bits.bit_length()
            else:
                value, width = _bits_to_int(bits), len(bits)
            if label == 0 and value:
                raise SemanticError("entry 0 is the reservoir and must stay empty")
            if value == 0:
                continue
            if width > self.m_data:
                raise SemanticError(
                    f"data word {bits!r} wider than the {self.m_data}-bit data register")
            cleaned[int(label)] = _int_to_bits(value, self.m_data)
        object.__setattr__(self, "data", cleaned)
        if self.u_d is not None and self.u_d.n_qubits != self.m_data:
            raise SemanticError(
                f"data encoding circuit spans {self.u_d.n_qubits} qubits, "
                f"register has {self.m_data}")

    def data_value(self, label: int) -> int:
        return _bits_to_int(self.data.get(label, ""))

    def with_data_value(self, label: int, value: int) -> "QdbDescriptor":
        new = dict(self.data)
        if value:
            new[label] = _int_to_bits(value, self.m_data)
        else:
            new.pop(label, None)
        return replace(self, data=new)

    def to_json(self) -> str:
        obj = {
            "k": self.k,
            "l": self.l,
            "data": {str(j): self.data[j] for j in sorted(self.data)},
            "u_d": emit_text(self.u_d) if self.u_d is not None else None,
        }
        return json.dumps(obj, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "QdbDescriptor":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SemanticError(f"descriptor is not valid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise SemanticError("descriptor JSON must be an object")
        unknown = set(obj) - {"k", "l", "data", "u_d"}
        if unknown:
            raise SemanticError(f"descriptor has unknown keys {sorted(unknown)}")
        try:
            k, l = int(obj["k"]), int(obj["l"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SemanticError("descriptor needs integer k and l") from exc
        raw = obj.get("data") or {}
        data: dict[int, str] = {}
        for key, bits in raw.items():
            try:
                label = int(key)
            except ValueError as exc:
                raise SemanticError(f"data label {key!r} is not an integer") from exc
            if not isinstance(bits, str):
                raise SemanticError(f"data word for label {key} must be a string")
            data[label] = bits
        u_d_text = obj.get("u_d")
        u_d = parse_text(u_d_text) if u_d_text else None
        m_data = max([len(b) for b in data.values()] or [0])
        if u_d is not None:
            m_data = max(m_data, u_d.n_qubits)
        return cls(k=k, l=l, data=data, u_d=u_d, m_data=m_data)


@dataclass(frozen=True)
class QdbLayout:
    """Where the database lives inside the simulated register.

    ``index_qubits[i]`` holds bit i of the index pattern; ``data_qubits[b]``
    holds data bit b. ``logical_index_map`` sends entry labels to index
    patterns; removals drop their label here, and the freed pattern stays
    unused until a relabeling re-keys the survivors.
    """

    index_qubits: tuple[int, ...]
    data_qubits: tuple[int, ...] = ()
    logical_index_map: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        qubits = self.index_qubits + self.data_qubits
        if len(set(qubits)) != len(qubits):
            raise SemanticError("index and data registers overlap")
        if not self.index_qubits:
            raise SemanticError("a database needs an index register")
        pats = list(self.logical_index_map.values())
        if len(set(pats)) != len(pats):
            raise SemanticError("two labels share one index pattern")
        for pat in pats:
            if not 0 <= pat < 2 ** len(self.index_qubits):
                raise SemanticError(f"index pattern {pat} outside the register")

    @property
    def n_qubits(self) -> int:
        return len(self.index_qubits) + len(self.data_qubits)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(sorted(self.logical_index_map))

    def pattern(self, label: int) -> int:
        try:
            return self.logical_index_map[label]
        except KeyError:
            raise SemanticError(f"no entry with label {label}") from None

    def physical_index(self, label: int, data_value: int = 0) -> int:
        pat = self.pattern(label)
        idx = 0
        for i, q in enumerate(self.index_qubits):
            idx |= ((pat >> i) & 1) << q
        for b, q in enumerate(self.data_qubits):
            idx |= ((data_value >> b) & 1) << q
        if data_value >> len(self.data_qubits):
            raise SemanticError(f"data value {data_value} wider than the data register")
        return idx

    def pattern_controls(self, label: int) -> tuple[tuple[int, int], ...]:
        """(qubit, bit) controls selecting one entry's index pattern."""
        pat = self.pattern(label)
        return tuple((q, (pat >> i) & 1) for i, q in enumerate(self.index_qubits))

    @classmethod
    def fresh(cls, k: int, m_data: int) -> "QdbLayout":
        kt = index_width(k)
        return cls(
            index_qubits=tuple(range(kt)),
            data_qubits=tuple(range(kt, kt + m_data)),
            logical_index_map={j: j for j in range(k)},
        )


@dataclass
class QdbState:
    """A live database: descriptor + layout + statevector + build circuit.

    ``sensor_qubits`` / ``copy_qubits`` list registers left attached by a
    write or read; most operations require them to be detached first.
    ``amplitude_profile`` overrides the standard closed-form moduli when the
    state was built by a deliberately imbalanced extension. ``projective``
    marks states that passed through a projection, after which the cumulative
    circuit no longer reproduces them and cannot be emitted.
    """

    descriptor: QdbDescriptor
    layout: QdbLayout
    state: StateVector
    circuit: Circuit
    sensor_qubits: tuple[int, ...] = ()
    copy_qubits: tuple[int, ...] = ()
    amplitude_profile: dict[int, float] | None = None
    projective: bool = False
    max_qubits: int = DEFAULT_MAX_QUBITS

    @property
    def k(self) -> int:
        return self.descriptor.k

    @property
    def l(self) -> int:
        return self.descriptor.l

    @property
    def n_qubits(self) -> int:
        return self.state.n_qubits

    def require_bare(self, op: str):
        if self.sensor_qubits or self.copy_qubits:
            raise SemanticError(f"{op} requires sensor/copy registers to be detached")

    def occupied_labels(self, tol: float = DUMP_THRESHOLD) -> tuple[int, ...]:
        """Labels whose index pattern carries any amplitude."""
        probs = self.state.probabilities()
        idx = np.arange(self.state.dim)
        out = []
        for label, pat in self.layout.logical_index_map.items():
            mask = np.ones(self.state.dim, dtype=bool)
            for i, q in enumerate(self.layout.index_qubits):
                mask &= ((idx >> q) & 1) == ((pat >> i) & 1)
            if float(probs[mask].sum()) > tol:
                out.append(label)
        return tuple(sorted(out))

    def amplitude(self, label: int, data_value: int | None = None) -> complex:
        """Amplitude at one entry; defaults to the entry's recorded data word."""
        if data_value is None:
            data_value = self.descriptor.data_value(label)
        return complex(self.state.amplitudes[self.layout.physical_index(label, data_value)])

    def reservoir_amplitude(self) -> complex:
        return self.amplitude(0, 0)

    def expected_moduli(self) -> dict[int, float]:
        """|amplitude| each occupied label should carry."""
        if self.amplitude_profile is not None:
            return dict(self.amplitude_profile)
        k, l = self.descriptor.k, self.descriptor.l
        occupied = self.occupied_labels()
        out = {0: math.sqrt((l + 1) / (k + l))}
        for label in occupied:
            if label != 0:
                out[label] = math.sqrt(1.0 / (k + l))
        return out

    def check(self, tol: float = STATE_TOL) -> bool:
        """Verify the state against its descriptor; raises on mismatch.

        Checks the norm, the per-entry amplitude moduli, phase uniformity
        across entries, and the absence of stray support. A data encoding is
        undone before checking, so data words are compared computationally.
        """
        self.require_bare("check")
        if abs(self.state.norm() - 1.0) > tol:
            raise VerificationError(f"state norm {self.state.norm()} is off unit")
        st = self.state
        if self.descriptor.u_d is not None:
            dec = self.descriptor.u_d.inverse().remapped(
                {i: q for i, q in enumerate(self.layout.data_qubits)}, st.n_qubits)
            st = simulate(dec, st)
        expected = self.expected_moduli()
        amps = st.amplitudes
        seen = np.zeros(st.dim, dtype=bool)
        ref_phase = None
        for label, want in expected.items():
            idx = self.layout.physical_index(label, self.descriptor.data_value(label))
            seen[idx] = True
            a = amps[idx]
            if abs(abs(a) - want) > tol:
                raise VerificationError(
                    f"entry {label}: |amplitude| {abs(a):.12g}, expected {want:.12g}")
            if ref_phase is None:
                ref_phase = a / abs(a)
            elif abs(a / abs(a) - ref_phase) > math.sqrt(tol):
                raise VerificationError(f"entry {label} phase differs from entry phase")
        stray = float(np.abs(np.where(seen, 0.0, amps)).max())
        if stray > tol:
            raise VerificationError(f"stray amplitude {stray:.3g} outside the database")
        return True

    def emit(self) -> str:
        """Circuit text re-creating this state from |0...0>."""
        if self.projective:
            raise SemanticError(
                "state passed through a projection; no circuit re-creates it")
        return emit_text(self.circuit)


# ---------------------------------------------------------------------------
# preparation


def _grow(cumulative: Circuit, piece: Circuit) -> Circuit:
    """Append an operation circuit to the build circuit.

    The build circuit can be wider than the live state: detached sensor/copy
    wires stay in it (uncomputed to |0>), and later operations reuse those
    clean wires. Both sides are widened to the larger register first.
    """
    width = max(cumulative.n_qubits, piece.n_qubits)
    return cumulative.extended(width) + piece.extended(width)


def prepare_circuit(k: int, l: int, qubits, n_qubits: int | None = None) -> Circuit:
    """Index-register preparation: k patterns with an l-fold weighted entry 0.

    Produces sqrt((l+1)/(k+l)) on pattern 0 and sqrt(1/(k+l)) on patterns
    1..k-1, over the listed qubits (qubits[i] holds pattern bit i). Gates that
    reduce to the identity (even-split corrections) are omitted.
    """
    qubits = list(qubits)
    if k < 1 or l < 0:
        raise SemanticError("need k >= 1 and l >= 0")
    if k > 2 ** len(qubits):
        raise SemanticError(f"{len(qubits)} qubits cannot index {k} entries")
    width = (max(qubits) + 1) if n_qubits is None else n_qubits
    circ = Circuit(width)
    for q in qubits:
        circ.label(q, "I")
    if k == 1:
        return circ
    t = index_width(k)
    s = k - 1
    circ.append(y(qubits[t - 1], (2 ** (t - 1) + l) / (k + l)))
    for j in range(t - 2, -1, -1):
        circ.append(y(qubits[j], 0.5))
        prefix = tuple((qubits[i], (s >> i) & 1) for i in range(t - 1, j, -1))
        if (s >> j) & 1 == 0:
            circ.append(GateSpec("ry", (-math.pi / 2,), (qubits[j],), prefix))
        else:
            p = 2 ** j / ((s & ((1 << (j + 1)) - 1)) + 1)
            if p != 0.5:
                circ.append(GateSpec("ytilde", (p,), (qubits[j],), prefix))
        zero_prefix = tuple((qubits[i], 0) for i in range(t - 1, j, -1))
        p = (2 ** j + l) / (2 ** (j + 1) + l)
        if p != 0.5:
            circ.append(GateSpec("ytilde", (p,), (qubits[j],), zero_prefix))
    return circ


def balanced_circuit(k: int, qubits=None, n_qubits: int | None = None) -> Circuit:
    """Uniform preparation over a power-of-two entry count: one H per qubit."""
    if k < 2 or k & (k - 1):
        raise SemanticError(f"balanced preparation needs a power-of-two count, got {k}")
    t = index_width(k)
    qubits = list(range(t)) if qubits is None else list(qubits)
    if len(qubits) != t:
        raise SemanticError(f"{k} entries need exactly {t} qubits")
    width = (max(qubits) + 1) if n_qubits is None else n_qubits
    circ = Circuit(width)
    for q in qubits:
        circ.label(q, "I")
        circ.append(GateSpec("h", (), (q,)))
    return circ


def _complete_pattern_bijection(partial: dict[int, int], size: int) -> dict[int, int]:
    used_src = set(partial)
    used_dst = set(partial.values())
    if len(used_dst) != len(partial):
        raise SemanticError("pattern mapping is not injective")
    free_dst = iter(sorted(set(range(size)) - used_dst))
    full = dict(partial)
    for src in range(size):
        if src not in used_src:
            full[src] = next(free_dst)
    return full


def _cycles(perm: dict[int, int]) -> list[list[int]]:
    seen: set[int] = set()
    out = []
    for start in sorted(perm):
        if start in seen or perm[start] == start:
            seen.add(start)
            continue
        cyc = [start]
        seen.add(start)
        cur = perm[start]
        while cur != start:
            cyc.append(cur)
            seen.add(cur)
            cur = perm[cur]
        out.append(cyc)
    return out


def transposition_circuit(pat_a: int, pat_b: int, index_qubits, n_qubits: int) -> Circuit:
    """Exchange two index patterns, acting as identity elsewhere.

    Walks a Gray path between the patterns: with p differing bits it emits
    2p-1 multi-controlled X gates (V_1..V_{p-1}, W, V_{p-1}..V_1), each
    targeting one differing bit under register-minus-one polarity-matched
    controls on the remaining index qubits.
    """
    index_qubits = list(index_qubits)
    if pat_a == pat_b:
        raise SemanticError("transposition needs two distinct patterns")
    for pat in (pat_a, pat_b):
        if not 0 <= pat < 2 ** len(index_qubits):
            raise SemanticError(f"pattern {pat} outside the index register")
    circ = Circuit(n_qubits)
    diff = [i for i in range(len(index_qubits)) if ((pat_a ^ pat_b) >> i) & 1]

    def step(bit_pos: int, reference: int) -> GateSpec:
        ctrls = tuple(
            (q, (reference >> i) & 1)
            for i, q in enumerate(index_qubits) if i != bit_pos)
        return x(index_qubits[bit_pos]) if not ctrls else GateSpec(
            "x", (), (index_qubits[bit_pos],), ctrls)

    cur = pat_a
    vs = []
    for bit_pos in diff[:-1]:
        vs.append(step(bit_pos, cur))
        cur ^= 1 << bit_pos
    w = step(diff[-1], cur)
    circ.extend_gates(vs)
    circ.append(w)
    circ.extend_gates(reversed(vs))
    return circ


def pattern_permutation_circuit(mapping: dict[int, int], index_qubits,
                                n_qubits: int) -> Circuit:
    """Route index patterns: pattern p moves to mapping[p].

    The partial mapping is completed to a bijection over the whole pattern
    space, decomposed into cycles, and each cycle into transpositions.
    """
    index_qubits = list(index_qubits)
    full = _complete_pattern_bijection(mapping, 2 ** len(index_qubits))
    circ = Circuit(n_qubits)
    for cyc in _cycles(full):
        for t in range(len(cyc) - 2, -1, -1):
            circ += transposition_circuit(cyc[t], cyc[t + 1], index_qubits, n_qubits)
    return circ


def _embed_on(circuit: Circuit, qubits, n_qubits: int) -> Circuit:
    return circuit.remapped({i: q for i, q in enumerate(qubits)}, n_qubits)


def _data_write_circuit(descriptor: QdbDescriptor, layout: QdbLayout,
                        n: int) -> Circuit:
    """One multi-controlled X per set data bit, plus the data encoding."""
    circ = Circuit(n)
    for b in layout.data_qubits:
        circ.label(b, "D")
    for label in sorted(descriptor.data):
        value = descriptor.data_value(label)
        ctrls = layout.pattern_controls(label)
        for b, q in enumerate(layout.data_qubits):
            if (value >> b) & 1:
                circ.append(GateSpec("x", (), (q,), ctrls))
    if descriptor.u_d is not None:
        circ += _embed_on(descriptor.u_d, layout.data_qubits, n)
    return circ


def preparation_circuit(descriptor: QdbDescriptor, layout: QdbLayout) -> Circuit:
    """Full build circuit |0...0> -> database state for this descriptor/layout.

    Index spread over the label count, pattern routing when labels do not sit
    at contiguous patterns, one multi-controlled X per set data bit, and the
    data encoding last.
    """
    labels = layout.labels
    if len(labels) != descriptor.k:
        raise SemanticError(
            f"layout tracks {len(labels)} labels, descriptor says {descriptor.k}")
    n = layout.n_qubits
    width = max(max(layout.index_qubits), max(layout.data_qubits, default=-1)) + 1
    if width != n:
        raise SemanticError("layout qubits must fill a contiguous register")
    circ = prepare_circuit(descriptor.k, descriptor.l, layout.index_qubits, n)
    routing = {t: layout.pattern(label) for t, label in enumerate(labels)}
    if any(src != dst for src, dst in routing.items()):
        circ += pattern_permutation_circuit(routing, layout.index_qubits, n)
    return circ + _data_write_circuit(descriptor, layout, n)


def plan_descriptor(k: int, l: int = 0, data: dict[int, int | str] | None = None,
                    *, m_data: int | None = None,
                    u_d: Circuit | None = None) -> QdbDescriptor:
    """Normalize preparation arguments into a validated descriptor.

    Pure argument checking — no state is built — so callers can vet a
    preparation before paying for the simulation.
    """
    data = data or {}
    norm_data: dict[int, str] = {}
    widest = 0
    for label, word in data.items():
        if not 0 <= label < k:
            raise SemanticError(f"data label {label} outside [0, {k})")
        bits = word if isinstance(word, str) else format(int(word), "b")
        if isinstance(word, str) or _bits_to_int(bits):
            widest = max(widest, len(bits))
        norm_data[label] = bits
    m = max(widest if norm_data else 0,
            m_data or 0, u_d.n_qubits if u_d is not None else 0)
    return QdbDescriptor(
        k=k, l=l,
        data={j: _int_to_bits(_bits_to_int(b), m) for j, b in norm_data.items()},
        u_d=u_d, m_data=m)


def prepare_general(k: int, l: int = 0, data: dict[int, int | str] | None = None,
                    *, m_data: int | None = None, u_d: Circuit | None = None,
                    max_qubits: int | None = None) -> QdbState:
    """Create a database of k entries with reservoir multiplicity l.

    ``data`` maps labels in [1, k) to bitstrings or ints; ``m_data`` widens
    the data register beyond what the widest word needs (useful when later
    writes need room).
    """
    desc = plan_descriptor(k, l, data, m_data=m_data, u_d=u_d)
    layout = QdbLayout.fresh(k, desc.m_data)
    circ = preparation_circuit(desc, layout)
    kwargs = {"max_qubits": max_qubits} if max_qubits is not None else {}
    state = simulate(circ, **kwargs)
    return QdbState(desc, layout, state, circ,
                    max_qubits=max_qubits or DEFAULT_MAX_QUBITS)


def prepare_balanced(k: int, data: dict[int, int | str] | None = None,
                     *, m_data: int | None = None, u_d: Circuit | None = None,
                     max_qubits: int | None = None) -> QdbState:
    """Uniform database over a power-of-two entry count, built from H gates.

    The result is checked against the general preparation route and must
    agree exactly (not just up to a global phase); both routes place the same
    real amplitude on every basis state.
    """
    general = prepare_general(k, 0, data, m_data=m_data, u_d=u_d,
                              max_qubits=max_qubits)
    layout = general.layout
    circ = balanced_circuit(k, layout.index_qubits, layout.n_qubits)
    circ += _data_write_circuit(general.descriptor, layout, layout.n_qubits)
    kwargs = {"max_qubits": max_qubits} if max_qubits is not None else {}
    state = simulate(circ, **kwargs)
    if not states_equal(state, general.state, up_to_global_phase=False):
        raise VerificationError("balanced preparation disagrees with the general route")
    return QdbState(general.descriptor, layout, state, circ,
                    max_qubits=general.max_qubits)


# ---------------------------------------------------------------------------
# write


def _sensor_prep_circuit(value: int, sensor_qubits, u_d: Circuit | None,
                         n: int) -> Circuit:
    circ = Circuit(n)
    for q in sensor_qubits:
        circ.label(q, "S")
    for b, q in enumerate(sensor_qubits):
        if (value >> b) & 1:
            circ.append(x(q))
    if u_d is not None:
        circ += _embed_on(u_d, sensor_qubits, n)
    return circ


def _write_core_circuit(layout: QdbLayout, u_d: Circuit | None, n: int,
                        label: int, sensor_qubits) -> Circuit:
    """Toggle entry ``label``'s data bits wherever the sensor bit is set.

    With a data encoding the data and sensor registers are rotated to the
    computational basis, toggled, and rotated back.
    """
    circ = Circuit(n)
    if u_d is not None:
        circ += _embed_on(u_d.inverse(), layout.data_qubits, n)
        circ += _embed_on(u_d.inverse(), sensor_qubits, n)
    pattern_ctrls = layout.pattern_controls(label)
    for b, dq in enumerate(layout.data_qubits):
        circ.append(GateSpec("x", (), (dq,), pattern_ctrls + ((sensor_qubits[b], 1),)))
    if u_d is not None:
        circ += _embed_on(u_d, sensor_qubits, n)
        circ += _embed_on(u_d, layout.data_qubits, n)
    return circ


def _normalize_word(db: QdbState, word: int | str) -> int:
    value = _bits_to_int(word) if isinstance(word, str) else int(word)
    m = len(db.layout.data_qubits)
    if value < 0 or (value and m == 0) or value >> m:
        raise SemanticError(f"data word {word!r} does not fit the {m}-bit data register")
    return value


def _check_writable(db: QdbState, label: int, op: str):
    db.require_bare(op)
    if label == 0:
        raise SemanticError("entry 0 is the reservoir and cannot hold data")
    if label not in db.layout.logical_index_map:
        raise SemanticError(f"no entry with label {label}")
    if label not in db.occupied_labels():
        raise SemanticError(f"entry {label} carries no amplitude")


def write(db: QdbState, label: int, word: int | str, *,
          keep_sensor: bool = False) -> QdbState:
    """Toggle entry ``label``'s data by ``word`` (bitwise XOR semantics).

    A sensor register prepared in |word> drives one controlled toggle per data
    bit; the sensor is then verified to be unentangled, uncomputed, and
    dropped. ``keep_sensor`` skips the uncompute so the register can be
    inspected; the returned state then carries ``sensor_qubits``.
    """
    _check_writable(db, label, "write")
    value = _normalize_word(db, word)
    m = len(db.layout.data_qubits)
    if m == 0:
        raise SemanticError("database has no data register")
    n0 = db.n_qubits
    sensor = tuple(range(n0, n0 + m))
    state = add_ancillas(db.state, m, max_qubits=db.max_qubits)
    prep = _sensor_prep_circuit(value, sensor, db.descriptor.u_d, n0 + m)
    core = _write_core_circuit(db.layout, db.descriptor.u_d, n0 + m, label, sensor)
    applied = prep + core
    state = simulate(applied, state)
    purity = schmidt(state, sensor).purity
    if abs(purity - 1.0) > WRITE_PURITY_TOL:
        raise VerificationError(
            f"sensor register entangled after write (purity {purity:.12g})")
    new_desc = db.descriptor.with_data_value(label, db.descriptor.data_value(label) ^ value)
    if keep_sensor:
        return QdbState(new_desc, db.layout, state, _grow(db.circuit, applied),
                        sensor_qubits=sensor,
                        amplitude_profile=db.amplitude_profile,
                        projective=db.projective, max_qubits=db.max_qubits)
    state = simulate(prep.inverse(), state)
    state = drop_qubits(state, sensor)
    circuit = _grow(db.circuit, applied + prep.inverse())
    return QdbState(new_desc, db.layout, state, circuit,
                    amplitude_profile=db.amplitude_profile,
                    projective=db.projective, max_qubits=db.max_qubits)


def write_swap_conditional(db: QdbState, label: int, word: int | str) -> QdbState:
    """Swap entry ``label``'s data with a sensor holding ``word``.

    The swap happens only on the branch addressing that entry, so the sensor
    stays attached and, whenever the incoming and outgoing words differ, ends
    up entangled with the database. The returned state keeps the sensor.
    """
    _check_writable(db, label, "write")
    value = _normalize_word(db, word)
    m = len(db.layout.data_qubits)
    if m == 0:
        raise SemanticError("database has no data register")
    n0 = db.n_qubits
    sensor = tuple(range(n0, n0 + m))
    state = add_ancillas(db.state, m, max_qubits=db.max_qubits)
    circ = _sensor_prep_circuit(value, sensor, db.descriptor.u_d, n0 + m)
    ctrls = db.layout.pattern_controls(label)
    for b, dq in enumerate(db.layout.data_qubits):
        circ.append(GateSpec("swap", (), (dq, sensor[b]), ctrls))
    state = simulate(circ, state)
    new_desc = db.descriptor.with_data_value(label, value)
    return QdbState(new_desc, db.layout, state, _grow(db.circuit, circ),
                    sensor_qubits=sensor, amplitude_profile=db.amplitude_profile,
                    projective=db.projective, max_qubits=db.max_qubits)


# ---------------------------------------------------------------------------
# read


def read_copy(db: QdbState, label: int) -> QdbState:
    """Copy entry ``label``'s data word onto a fresh register.

    The copy register stays attached; it holds the entry's computational word
    on the branch addressing the entry and |0> elsewhere, so it is entangled
    with the database whenever the copied word is nonzero.
    """
    _check_writable(db, label, "read")
    m = len(db.layout.data_qubits)
    if m == 0:
        raise SemanticError("database has no data register")
    n0 = db.n_qubits
    out = tuple(range(n0, n0 + m))
    state = add_ancillas(db.state, m, max_qubits=db.max_qubits)
    n = n0 + m
    circ = Circuit(n)
    for q in out:
        circ.label(q, "A")
    u_d = db.descriptor.u_d
    if u_d is not None:
        circ += _embed_on(u_d.inverse(), db.layout.data_qubits, n)
    ctrls = db.layout.pattern_controls(label)
    for b, dq in enumerate(db.layout.data_qubits):
        circ.append(GateSpec("x", (), (out[b],), ctrls + ((dq, 1),)))
    if u_d is not None:
        circ += _embed_on(u_d, db.layout.data_qubits, n)
    state = simulate(circ, state)
    return QdbState(db.descriptor, db.layout, state, _grow(db.circuit, circ),
                    copy_qubits=out, amplitude_profile=db.amplitude_profile,
                    projective=db.projective, max_qubits=db.max_qubits)


def read_copy_all(db: QdbState) -> QdbState:
    """Copy every entry's data word at once (plain bitwise fan-out).

    One CNOT per data bit, no index controls: the copy register ends up
    holding each entry's word on that entry's branch, entangled with the
    database whenever two occupied entries store different words.
    """
    db.require_bare("read")
    m = len(db.layout.data_qubits)
    if m == 0:
        raise SemanticError("database has no data register")
    n0 = db.n_qubits
    out = tuple(range(n0, n0 + m))
    state = add_ancillas(db.state, m, max_qubits=db.max_qubits)
    n = n0 + m
    circ = Circuit(n)
    for q in out:
        circ.label(q, "A")
    u_d = db.descriptor.u_d
    if u_d is not None:
        circ += _embed_on(u_d.inverse(), db.layout.data_qubits, n)
    for b, dq in enumerate(db.layout.data_qubits):
        circ.append(GateSpec("x", (), (out[b],), ((dq, 1),)))
    if u_d is not None:
        circ += _embed_on(u_d, db.layout.data_qubits, n)
    state = simulate(circ, state)
    return QdbState(db.descriptor, db.layout, state, _grow(db.circuit, circ),
                    copy_qubits=out, amplitude_profile=db.amplitude_profile,
                    projective=db.projective, max_qubits=db.max_qubits)


def read_projective(db: QdbState, label: int) -> tuple[StateVector, float]:
    """Project the index register onto one entry and return its data state.

    Returns the entry's data-register state and the outcome probability
    (1/(k+l) for an occupied entry of a standard database). The database is
    consumed: the branch where the index points elsewhere is discarded.
    """
    db.require_bare("read")
    if label not in db.layout.logical_index_map:
        raise SemanticError(f"no entry with label {label}")
    if not db.layout.data_qubits:
        raise SemanticError("database has no data register")
    layout = db.layout
    pat = layout.pattern(label)
    idx = np.arange(db.state.dim)
    mask = np.ones(db.state.dim, dtype=bool)
    for i, q in enumerate(layout.index_qubits):
        mask &= ((idx >> q) & 1) == ((pat >> i) & 1)
    collapsed, prob = project(db.state, mask)
    reset = Circuit(db.n_qubits)
    for i, q in enumerate(layout.index_qubits):
        if (pat >> i) & 1:
            reset.append(x(q))
    collapsed = simulate(reset, collapsed)
    data_state = drop_qubits(collapsed, layout.index_qubits)
    return data_state, prob


# ---------------------------------------------------------------------------
# removal


@dataclass(frozen=True)
class RemovalOutcome:
    """Both branches of a projective removal."""

    success_probability: float
    success_state: QdbState | None
    failure_state: StateVector


def _layout_without(layout: QdbLayout, label: int) -> QdbLayout:
    """The same layout minus one label; its index pattern becomes unused."""
    return QdbLayout(
        index_qubits=layout.index_qubits,
        data_qubits=layout.data_qubits,
        logical_index_map={j: p for j, p in layout.logical_index_map.items()
                           if j != label},
    )


def remove_reservoir(db: QdbState, label: int) -> QdbState:
    """Fold entry ``label`` back into the reservoir, unitarily.

    The entry's data word is toggled off first (sensor machinery), then a
    two-basis-state rotation merges the entry's amplitude into the all-zero
    string. Entry count drops by one, reservoir multiplicity grows by one;
    the label and its index pattern leave the layout.
    """
    _check_writable(db, label, "remove")
    value = db.descriptor.data_value(label)
    if value:
        db = write(db, label, value)
    a_idx = db.layout.physical_index(0, 0)
    b_idx = db.layout.physical_index(label, 0)
    a = complex(db.state.amplitudes[a_idx])
    b = complex(db.state.amplitudes[b_idx])
    if abs(b) > PROJECTION_ZERO_TOL and abs(a) > PROJECTION_ZERO_TOL:
        rel = b / a
        if abs(rel.imag) > math.sqrt(STATE_TOL) * abs(rel):
            raise SemanticError("entry phases are not aligned; cannot merge unitarily")
    theta = -math.atan2(abs(b), abs(a))
    gate = rot2(a_idx, b_idx, theta)
    state = simulate(Circuit(db.n_qubits, [gate]), db.state)
    circ = _grow(db.circuit, Circuit(db.n_qubits, [gate]))
    desc = db.descriptor
    new_desc = QdbDescriptor(k=desc.k - 1, l=desc.l + 1, data=dict(desc.data),
                             u_d=desc.u_d, m_data=desc.m_data)
    layout = _layout_without(db.layout, label)
    profile = db.amplitude_profile
    if profile is not None:
        profile = {j: wgt for j, wgt in profile.items() if j != label}
        profile[0] = math.hypot(abs(a), abs(b))
    return QdbState(new_desc, layout, state, circ, amplitude_profile=profile,
                    projective=db.projective, max_qubits=db.max_qubits)


def remove_projective(db: QdbState, label: int) -> RemovalOutcome:
    """Remove entry ``label`` by post-selecting the index away from it.

    Success leaves the remaining entries renormalized — a database with one
    entry fewer and the same reservoir multiplicity. Failure collapses onto
    the removed entry. Success probability is (k-1+l)/(k+l) for a standard
    database; it is 0 when nothing else carries amplitude, in which case
    ``success_state`` is None.
    """
    db.require_bare("remove")
    if label not in db.layout.logical_index_map:
        raise SemanticError(f"no entry with label {label}")
    if label not in db.occupied_labels():
        raise SemanticError(f"entry {label} carries no amplitude")
    pat = db.layout.pattern(label)
    idx = np.arange(db.state.dim)
    hit = np.ones(db.state.dim, dtype=bool)
    for i, q in enumerate(db.layout.index_qubits):
        hit &= ((idx >> q) & 1) == ((pat >> i) & 1)
    amps = db.state.amplitudes
    p_fail = float(np.sum(np.abs(amps[hit]) ** 2))
    p_success = max(0.0, 1.0 - p_fail)
    if p_fail > PROJECTION_ZERO_TOL:
        failure_state, _ = project(db.state, hit)
    else:
        failure_state = db.state.copy()
    if p_success <= PROJECTION_ZERO_TOL:
        return RemovalOutcome(0.0, None, failure_state)
    if label == 0:
        raise SemanticError("removing the reservoir would leave no empty entry")
    survivor, _ = project(db.state, ~hit)
    desc = db.descriptor
    data = {j: w for j, w in desc.data.items() if j != label}
    new_desc = QdbDescriptor(k=desc.k - 1, l=desc.l, data=data,
                             u_d=desc.u_d, m_data=desc.m_data)
    layout = _layout_without(db.layout, label)
    profile = db.amplitude_profile
    if profile is not None:
        scale = 1.0 / math.sqrt(p_success)
        profile = {j: wgt * scale for j, wgt in profile.items() if j != label}
    new_db = QdbState(new_desc, layout, survivor, db.circuit,
                      amplitude_profile=profile, projective=True,
                      max_qubits=db.max_qubits)
    return RemovalOutcome(p_success, new_db, failure_state)


# ---------------------------------------------------------------------------
# permutation


def normalize_permutation(perm, labels) -> dict[int, int]:
    """Validate a permutation given as a sequence over the label set or as a
    dict; dict entries not mentioned stay put."""
    labels = set(labels)
    if isinstance(perm, dict):
        mapping = {int(j): int(t) for j, t in perm.items()}
        unknown = set(mapping) - labels
        if unknown:
            raise SemanticError(f"permutation names unknown labels {sorted(unknown)}")
        for j in labels - set(mapping):
            mapping[j] = j
    else:
        mapping = {j: int(t) for j, t in enumerate(perm)}
        if set(mapping) != labels:
            raise SemanticError(
                f"permutation keys {sorted(mapping)} must cover labels {sorted(labels)}")
    if set(mapping.values()) != labels:
        raise SemanticError("permutation must be a bijection on the label set")
    return mapping


def permute(db: QdbState, perm) -> QdbState:
    """Send entry j to label perm[j], physically routing index patterns.

    ``perm`` is a sequence (entry j goes to perm[j]) or an equivalent dict;
    it must be a bijection on the current label set. The entry landing on
    label 0 becomes the reservoir and must hold the empty word; relocating a
    weighted reservoir (l > 0) is rejected.
    """
    db.require_bare("permute")
    mapping = normalize_permutation(perm, db.layout.labels)
    if all(j == t for j, t in mapping.items()):
        return db
    inverse = {t: j for j, t in mapping.items()}
    if db.descriptor.data_value(inverse[0]):
        raise SemanticError(
            f"entry {inverse[0]} holds data and cannot become the reservoir")
    if mapping[0] != 0 and db.descriptor.l > 0:
        raise SemanticError("cannot relocate a weighted reservoir (l > 0)")
    pattern_map = {db.layout.pattern(j): db.layout.pattern(t)
                   for j, t in mapping.items()}
    circ = pattern_permutation_circuit(pattern_map, db.layout.index_qubits,
                                       db.n_qubits)
    state = simulate(circ, db.state)
    data = {mapping[j]: w for j, w in db.descriptor.data.items()}
    desc = QdbDescriptor(k=db.descriptor.k, l=db.descriptor.l, data=data,
                         u_d=db.descriptor.u_d, m_data=db.descriptor.m_data)
    profile = db.amplitude_profile
    if profile is not None:
        profile = {mapping[j]: wgt for j, wgt in profile.items()}
    return QdbState(desc, db.layout, state, _grow(db.circuit, circ),
                    amplitude_profile=profile, projective=db.projective,
                    max_qubits=db.max_qubits)


def transpose_entries(db: QdbState, j1: int, j2: int) -> QdbState:
    """Exchange two entries (a permutation touching nothing else)."""
    mapping = {j: j for j in db.layout.labels}
    if j1 not in mapping or j2 not in mapping:
        raise SemanticError(f"labels {j1}, {j2} must both exist")
    mapping[j1], mapping[j2] = j2, j1
    return permute(db, mapping)


def relabel_contiguous(db: QdbState) -> QdbState:
    """Re-key surviving labels to 0..k-1 after removals (metadata only)."""
    db.require_bare("relabel")
    old = db.layout.labels
    new_labels = {j: t for t, j in enumerate(old)}
    layout = QdbLayout(
        index_qubits=db.layout.index_qubits,
        data_qubits=db.layout.data_qubits,
        logical_index_map={new_labels[j]: db.layout.pattern(j) for j in old},
    )
    data = {new_labels[j]: w for j, w in db.descriptor.data.items()}
    desc = QdbDescriptor(k=db.descriptor.k, l=db.descriptor.l, data=data,
                         u_d=db.descriptor.u_d, m_data=db.descriptor.m_data)
    profile = None
    if db.amplitude_profile is not None:
        profile = {new_labels[j]: v for j, v in db.amplitude_profile.items()
                   if j in new_labels}
    return QdbState(desc, layout, db.state, db.circuit,
                    amplitude_profile=profile, projective=db.projective,
                    max_qubits=db.max_qubits)
