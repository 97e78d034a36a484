"""Line-oriented circuit text format.

One gate per line::

    qubits 4
    label q[0] I
    label q[2] D
    y(0.5) q[0]
    ry(-1.5707963267948966) q[1] ctrl q[3] nctrl q[2]
    swap q[0] q[1]
    rot2(0,5,0.7853981633974483)
    # comments run to end of line

Floats are emitted with ``repr`` so emit -> parse -> emit is byte-identical.
"""

from __future__ import annotations

import re

from .circuit import VALID_LABELS, Circuit
from .errors import CircuitParseError
from .gates import GateSpec

_HEAD_RE = re.compile(r"^([a-z0-9]+)\((.*)\)$")
_QUBIT_RE = re.compile(r"^q\[(\d+)\]$")

_PARAM_KINDS_INT = {"rot2": (True, True, False)}  # which params print as ints


def _fmt_params(g: GateSpec) -> str:
    if not g.params:
        return ""
    ints = _PARAM_KINDS_INT.get(g.kind)
    parts = []
    for i, p in enumerate(g.params):
        if ints and ints[i]:
            parts.append(str(int(p)))
        else:
            parts.append(repr(float(p)))
    return "(" + ",".join(parts) + ")"


def emit_text(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.n_qubits}"]
    for q in sorted(circuit.labels):
        lines.append(f"label q[{q}] {circuit.labels[q]}")
    for g in circuit.gates:
        line = g.kind + _fmt_params(g)
        if g.targets:
            line += " " + " ".join(f"q[{t}]" for t in g.targets)
        pos = [q for q, b in g.controls if b == 1]
        neg = [q for q, b in g.controls if b == 0]
        if pos:
            line += " ctrl " + " ".join(f"q[{q}]" for q in pos)
        if neg:
            line += " nctrl " + " ".join(f"q[{q}]" for q in neg)
        lines.append(line)
    return "\n".join(lines) + "\n"


def _parse_qubit(tok: str, ln: int) -> int:
    m = _QUBIT_RE.match(tok)
    if not m:
        raise CircuitParseError(ln, f"expected a qubit like q[3], got {tok!r}")
    return int(m.group(1))


def _parse_params(kind: str, text: str, ln: int) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        raise CircuitParseError(ln, f"{kind} needs parameters")
    out = []
    for part in text.split(","):
        try:
            out.append(float(part))
        except ValueError:
            raise CircuitParseError(ln, f"bad numeric parameter {part!r}") from None
    return tuple(out)


def parse_text(text: str) -> Circuit:
    """Parse circuit text; raises CircuitParseError with a line number."""
    circ: Circuit | None = None

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]

        if head == "qubits":
            if circ is not None:
                raise CircuitParseError(ln, "duplicate qubits header")
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise CircuitParseError(ln, "qubits header needs one integer")
            circ = Circuit(int(tokens[1]))
            continue
        if circ is None:
            raise CircuitParseError(ln, "first directive must be 'qubits N'")
        if head == "label":
            if len(tokens) != 3:
                raise CircuitParseError(ln, "label needs a qubit and a register letter")
            q = _parse_qubit(tokens[1], ln)
            if tokens[2] not in VALID_LABELS:
                raise CircuitParseError(ln, f"register letter must be one of {VALID_LABELS}")
            try:
                circ.label(q, tokens[2])
            except Exception as exc:
                raise CircuitParseError(ln, str(exc)) from None
            continue

        m = _HEAD_RE.match(head)
        if m:
            kind, params = m.group(1), _parse_params(m.group(1), m.group(2), ln)
        else:
            kind, params = head, ()

        targets: list[int] = []
        ctrl: list[int] = []
        nctrl: list[int] = []
        bucket = targets
        for tok in tokens[1:]:
            if tok == "ctrl":
                bucket = ctrl
            elif tok == "nctrl":
                bucket = nctrl
            else:
                bucket.append(_parse_qubit(tok, ln))
        controls = tuple((q, 1) for q in ctrl) + tuple((q, 0) for q in nctrl)
        try:
            circ.append(GateSpec(kind, params, tuple(targets), controls))
        except Exception as exc:
            raise CircuitParseError(ln, str(exc)) from None

    if circ is None:
        raise CircuitParseError(1, "missing 'qubits N' header")
    return circ
