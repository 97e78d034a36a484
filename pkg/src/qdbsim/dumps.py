"""Amplitude dumps: deterministic JSON/CSV listings of a state's support.

Each record holds the basis index, a register-annotated bit pattern (most
significant register first, bits MSB-first within a register), and the real
and imaginary amplitude parts. Entries below the dump threshold are omitted.
Output is byte-deterministic: floats are rendered with repr (shortest
round-trip form) and records are sorted by basis index.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .statevector import StateVector
from .tolerances import DUMP_THRESHOLD


def _register_segments(db) -> list[tuple[str, tuple[int, ...]]]:
    segments = [
        ("A", tuple(db.copy_qubits)),
        ("S", tuple(db.sensor_qubits)),
        ("D", tuple(db.layout.data_qubits)),
        ("I", tuple(db.layout.index_qubits)),
    ]
    return [(name, qs) for name, qs in segments if qs]


def annotate_bits(index: int, segments) -> str:
    """Render one basis index as labeled register fields, e.g. 'D=10 I=011'."""
    parts = []
    for name, qubits in segments:
        bits = "".join(str((index >> q) & 1) for q in reversed(list(qubits)))
        parts.append(f"{name}={bits}")
    return " ".join(parts)


def amplitude_records(state: StateVector, segments,
                      threshold: float = DUMP_THRESHOLD) -> list[dict]:
    """Support of a state as a list of {index, bits, re, im} dicts."""
    amps = state.amplitudes
    keep = np.nonzero(np.abs(amps) > threshold)[0]
    out = []
    for idx in keep:
        a = amps[idx]
        out.append({
            "index": int(idx),
            "bits": annotate_bits(int(idx), segments),
            "re": float(a.real),
            "im": float(a.imag),
        })
    return out


def dump_records(db, threshold: float = DUMP_THRESHOLD) -> list[dict]:
    """Amplitude records of a database state with its register annotation."""
    return amplitude_records(db.state, _register_segments(db), threshold)


def records_to_json(records: list[dict]) -> str:
    return json.dumps(records, indent=2) + "\n"


def records_to_csv(records: list[dict]) -> str:
    """CSV form: index,bits,re,im per line, no header."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for rec in records:
        writer.writerow([rec["index"], rec["bits"], repr(rec["re"]), repr(rec["im"])])
    return buf.getvalue()
