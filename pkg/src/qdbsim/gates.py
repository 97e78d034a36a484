"""Gate vocabulary for the simulator.

A gate is a small frozen record: a kind tag, numeric parameters, target
qubits, and polarity-aware controls (a control is a ``(qubit, wanted_bit)``
pair, so "fire when this qubit is 0" needs no surrounding X gates).

Kinds
-----
``x``, ``h``                    single-qubit, no parameters
``ry(theta)``                   rotation about the y axis
``y(p)``                        probability-split rotation: column 0 is
                                ``(sqrt(p), sqrt(1-p))``, i.e. ``ry(2*acos(sqrt(p)))``
``ytilde(p)``                   ``y(p)`` composed with the inverse of ``y(1/2)``
``phase(phi)``                  ``diag(1, e^{i phi})``
``swap``                        two targets
``rot2(a, b, theta)``           Givens rotation in the plane of two basis
                                states of the full register; targets/controls
                                are not used (``a`` and ``b`` fix everything)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SemanticError

SINGLE_QUBIT_KINDS = ("x", "h", "ry", "y", "ytilde", "phase")
ALL_KINDS = SINGLE_QUBIT_KINDS + ("swap", "rot2")

_PARAM_COUNT = {
    "x": 0,
    "h": 0,
    "ry": 1,
    "y": 1,
    "ytilde": 1,
    "phase": 1,
    "swap": 0,
    "rot2": 3,
}


@dataclass(frozen=True)
class GateSpec:
    kind: str
    params: tuple[float, ...] = ()
    targets: tuple[int, ...] = ()
    controls: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise SemanticError(f"unknown gate kind {self.kind!r}")
        if len(self.params) != _PARAM_COUNT[self.kind]:
            raise SemanticError(
                f"{self.kind} takes {_PARAM_COUNT[self.kind]} parameter(s), "
                f"got {len(self.params)}"
            )
        if self.kind in ("y", "ytilde"):
            p = self.params[0]
            if not 0.0 <= p <= 1.0:
                raise SemanticError(f"{self.kind} parameter must lie in [0, 1], got {p}")
        if self.kind == "rot2":
            a, b = int(self.params[0]), int(self.params[1])
            if a == b or a < 0 or b < 0:
                raise SemanticError("rot2 needs two distinct non-negative basis indices")
            if self.targets or self.controls:
                raise SemanticError("rot2 acts on basis indices; targets/controls not allowed")
        elif self.kind == "swap":
            if len(self.targets) != 2 or self.targets[0] == self.targets[1]:
                raise SemanticError("swap needs two distinct targets")
        else:
            if len(self.targets) != 1:
                raise SemanticError(f"{self.kind} needs exactly one target")
        seen = set(self.targets)
        for q, bit in self.controls:
            if bit not in (0, 1):
                raise SemanticError("control polarity must be 0 or 1")
            if q in seen:
                raise SemanticError(f"qubit {q} appears twice in gate {self.kind}")
            seen.add(q)
        if any(q < 0 for q in seen):
            raise SemanticError("negative qubit index")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + tuple(q for q, _ in self.controls)


def _ctrls(ctrl, nctrl) -> tuple[tuple[int, int], ...]:
    ctrl = (ctrl,) if isinstance(ctrl, int) else tuple(ctrl or ())
    nctrl = (nctrl,) if isinstance(nctrl, int) else tuple(nctrl or ())
    return tuple((q, 1) for q in ctrl) + tuple((q, 0) for q in nctrl)


def x(target: int, ctrl=(), nctrl=()) -> GateSpec:
    return GateSpec("x", (), (target,), _ctrls(ctrl, nctrl))


def h(target: int, ctrl=(), nctrl=()) -> GateSpec:
    return GateSpec("h", (), (target,), _ctrls(ctrl, nctrl))


def ry(target: int, theta: float, ctrl=(), nctrl=()) -> GateSpec:
    return GateSpec("ry", (float(theta),), (target,), _ctrls(ctrl, nctrl))


def y(target: int, p: float, ctrl=(), nctrl=()) -> GateSpec:
    return GateSpec("y", (float(p),), (target,), _ctrls(ctrl, nctrl))


def ytilde(target: int, p: float, ctrl=(), nctrl=()) -> GateSpec:
    return GateSpec("ytilde", (float(p),), (target,), _ctrls(ctrl, nctrl))


def phase(target: int, phi: float, ctrl=(), nctrl=()) -> GateSpec:
    return GateSpec("phase", (float(phi),), (target,), _ctrls(ctrl, nctrl))


def swap(t1: int, t2: int, ctrl=(), nctrl=()) -> GateSpec:
    return GateSpec("swap", (), (t1, t2), _ctrls(ctrl, nctrl))


def rot2(a: int, b: int, theta: float) -> GateSpec:
    return GateSpec("rot2", (float(a), float(b), float(theta)), (), ())


def y_angle(p: float) -> float:
    """The ry angle reproducing y(p): 2*acos(sqrt(p))."""
    return 2.0 * math.acos(math.sqrt(p))


def matrix_1q(kind: str, params: tuple[float, ...]) -> np.ndarray:
    """2x2 matrix of a single-qubit kind."""
    if kind == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "h":
        s = math.sqrt(0.5)
        return np.array([[s, s], [s, -s]], dtype=complex)
    if kind == "ry":
        c, s = math.cos(params[0] / 2), math.sin(params[0] / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "y":
        p = params[0]
        a, b = math.sqrt(p), math.sqrt(1.0 - p)
        return np.array([[a, -b], [b, a]], dtype=complex)
    if kind == "ytilde":
        # y(p) composed with the transpose (= inverse) of y(1/2)
        return matrix_1q("y", params) @ matrix_1q("y", (0.5,)).T
    if kind == "phase":
        return np.array([[1, 0], [0, np.exp(1j * params[0])]], dtype=complex)
    raise SemanticError(f"no single-qubit matrix for kind {kind!r}")


def gate_inverse(g: GateSpec) -> GateSpec:
    """Inverse gate, expressed within the same vocabulary.

    y and ytilde are rotations about the y axis, so their inverses are plain
    ry gates with the opposite accumulated angle.
    """
    if g.kind in ("x", "h", "swap"):
        return g
    if g.kind == "ry":
        return GateSpec("ry", (-g.params[0],), g.targets, g.controls)
    if g.kind == "y":
        return GateSpec("ry", (-y_angle(g.params[0]),), g.targets, g.controls)
    if g.kind == "ytilde":
        return GateSpec("ry", (math.pi / 2 - y_angle(g.params[0]),), g.targets, g.controls)
    if g.kind == "phase":
        return GateSpec("phase", (-g.params[0],), g.targets, g.controls)
    if g.kind == "rot2":
        a, b, theta = g.params
        return GateSpec("rot2", (a, b, -theta), (), ())
    raise SemanticError(f"cannot invert gate kind {g.kind!r}")
