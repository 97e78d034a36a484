"""Circuit text format: emit/parse round trips and parse diagnostics."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdbsim.circuit import Circuit, simulate
from qdbsim.errors import CircuitParseError
from qdbsim.gates import GateSpec, h, phase, rot2, ry, swap, x, y, ytilde
from qdbsim.text_format import emit_text, parse_text


def full_vocabulary_circuit() -> Circuit:
    c = Circuit(4)
    c.label(0, "I")
    c.label(1, "I")
    c.label(2, "D")
    c.append(x(0))
    c.append(h(1, ctrl=(0,)))
    c.append(ry(2, 0.7853981633974483, nctrl=(3,)))
    c.append(y(3, 0.25))
    c.append(ytilde(0, 0.75, ctrl=(1,), nctrl=(2,)))
    c.append(phase(1, 2.5))
    c.append(swap(2, 3))
    c.append(rot2(3, 12, 1 / 3))
    return c


def test_round_trip_is_byte_identical():
    c = full_vocabulary_circuit()
    text = emit_text(c)
    again = emit_text(parse_text(text))
    assert text == again


def test_round_trip_preserves_semantics():
    c = full_vocabulary_circuit()
    parsed = parse_text(emit_text(c))
    assert parsed.n_qubits == c.n_qubits
    assert parsed.labels == c.labels
    got = simulate(parsed).amplitudes
    want = simulate(c).amplitudes
    assert np.max(np.abs(got - want)) < 1e-15


def test_emit_starts_with_width_header():
    text = emit_text(full_vocabulary_circuit())
    assert text.splitlines()[0] == "qubits 4"


def test_float_params_survive_exactly():
    c = Circuit(1)
    c.append(ry(0, 0.1 + 0.2))  # not representable in short decimal
    parsed = parse_text(emit_text(c))
    assert parsed.gates[0].params[0] == c.gates[0].params[0]


@pytest.mark.parametrize(
    "text,line",
    [
        ("x q[0]\n", 1),  # missing header
        ("qubits 2\nfrob q[0]\n", 2),
        ("qubits 2\nx q[5]\n", 2),
        ("qubits 2\nx nonsense\n", 2),
        ("qubits 2\nry q[0]\n", 2),  # missing parameter
        ("qubits 2\nx q[0] ctrl q[0]\n", 2),  # overlapping wires
        ("qubits two\n", 1),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(CircuitParseError) as exc:
        parse_text(text)
    assert exc.value.line == line
    assert exc.value.exit_code == 2


def test_comments_and_blank_lines_ignored():
    text = "qubits 1\n# a comment\n\nx q[0]\n"
    c = parse_text(text)
    assert len(c) == 1


@settings(deadline=None, max_examples=30)
@given(seed=st.integers(0, 2**32 - 1))
def test_random_circuit_round_trip(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    c = Circuit(n)
    for _ in range(int(rng.integers(0, 10))):
        kind = rng.choice(["x", "h", "ry", "y", "ytilde", "phase", "swap"])
        wires = list(rng.permutation(n))
        if kind == "swap" and n >= 2:
            g = swap(wires.pop(), wires.pop())
        elif kind == "swap":
            continue
        else:
            t = wires.pop()
            params = {
                "x": (), "h": (),
                "ry": (float(rng.uniform(-3, 3)),),
                "y": (float(rng.uniform(0.05, 0.95)),),
                "ytilde": (float(rng.uniform(0.05, 0.95)),),
                "phase": (float(rng.uniform(0, 6)),),
            }[kind]
            g = GateSpec(kind, params, (t,))
        if wires and rng.random() < 0.4:
            g = GateSpec(g.kind, g.params, g.targets,
                         tuple((q, int(rng.integers(2))) for q in wires[:2]))
        c.append(g)
    text = emit_text(c)
    assert emit_text(parse_text(text)) == text
