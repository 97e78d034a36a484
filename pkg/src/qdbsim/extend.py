"""Database growth without re-preparation.

Growing a database is not a fixed unitary (it changes pairwise overlaps), so
it is done in two unitary moves applied to the concrete state at hand:

* transfer — amplitude amplification steps built from the database's own
  preparation circuit move weight into the reservoir entry until it carries
  sqrt((l+1)/(k+l));
* unfold — an ancilla qubit splits the enlarged reservoir into l new equal
  entries plus one remaining empty entry.

``extend`` chains the two in chunks of at most k new entries per round.
``extend_imbalanced`` instead spends z ancilla qubits at once, reaching up to
(2^z - 1) * k new entries in a single round at the price of unequal
amplitudes whenever more than one new entry shares an ancilla pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, simulate
from .errors import CapacityError, SemanticError, VerificationError
from .gates import GateSpec, phase, x
from .qdb import (
    QdbDescriptor,
    QdbState,
    _grow,
    prepare_circuit,
    prepare_general,
    preparation_circuit,
)
from .statevector import add_ancillas, drop_qubits, overlap, states_equal
from .tolerances import PLAN_RESIDUAL_TOL, TRANSFER_AMP_TOL


@dataclass(frozen=True)
class AmplificationPlan:
    """Schedule of amplification steps that loads the reservoir entry.

    ``m`` full steps with both phases at pi are followed by one step with the
    solved (phi, rho) pair, landing the reservoir amplitude on
    ``target_amplitude`` up to ``residual``; ``phase_fix`` is the trailing
    phase applied to the all-zero string so every entry ends up in phase.
    """

    k: int
    l: int
    m_star: float
    n: int
    sign: int
    m: int
    phi: float
    rho: float
    target_amplitude: float
    residual: float
    phase_fix: float

    def to_report(self) -> dict:
        return {
            "m_star": self.m_star,
            "n": self.n,
            "sign": self.sign,
            "m": self.m,
            "phi": self.phi,
            "rho": self.rho,
            "target_amplitude": self.target_amplitude,
            "residual": self.residual,
        }


def _step_matrix(phi: float, rho: float, theta: float) -> np.ndarray:
    """One amplification step in the (reservoir, rest) plane.

    The overall -1 of the operator is dropped; it is a global phase and no
    circuit gate is spent on it.
    """
    s, c = math.sin(theta), math.cos(theta)
    psi = np.array([s, c], dtype=complex)
    refl = np.eye(2, dtype=complex) + (np.exp(1j * phi) - 1) * np.outer(psi, psi.conj())
    return refl @ np.diag([np.exp(1j * rho), 1.0]).astype(complex)


def plan_transfer(k: int, l: int) -> AmplificationPlan:
    """Solve the amplification schedule moving a balanced k-entry database
    to reservoir weight (l+1)/(k+l).

    The fractional step count has candidate branches (n, sign); the smallest
    positive one fixes m. The final step's phase pair is found by scanning
    rho and bisecting phi on the reservoir amplitude; the leftover phase
    mismatch between reservoir and entries becomes ``phase_fix``.
    """
    if k < 1 or l < 0:
        raise SemanticError("need k >= 1 and l >= 0")
    target = math.sqrt((l + 1) / (k + l))
    if l == 0:
        return AmplificationPlan(k=k, l=0, m_star=0.0, n=0, sign=1, m=0,
                                 phi=0.0, rho=0.0, target_amplitude=target,
                                 residual=0.0, phase_fix=0.0)
    theta = math.asin(1.0 / math.sqrt(k))
    theta_kl = math.asin(1.0 / math.sqrt(k + l))
    candidates = []
    for n in range(3):
        for sign in (-1, 1):
            m_star = (sign * theta_kl - theta + math.pi * n) / (2 * theta)
            if m_star > 0:
                candidates.append((m_star, n, sign))
    if not candidates:
        raise VerificationError(f"no amplification branch for k={k}, l={l}")
    m_star, n, sign = min(candidates)
    m = int(math.floor(m_star))
    v = np.array([math.sin(theta), math.cos(theta)], dtype=complex)
    full = _step_matrix(math.pi, math.pi, theta)
    for _ in range(m):
        v = full @ v

    def reservoir_amp(phi: float, rho: float) -> complex:
        return (_step_matrix(phi, rho, theta) @ v)[0]

    solution = None
    for grid in (64, 256, 1024):
        rhos = np.linspace(1e-9, 2 * math.pi - 1e-9, grid)
        phis = np.linspace(1e-9, 2 * math.pi - 1e-9, grid)
        for rho in rhos:
            vals = np.array([abs(reservoir_amp(p, rho)) - target for p in phis])
            hits = np.nonzero(vals[:-1] * vals[1:] <= 0)[0]
            if not len(hits):
                continue
            i = hits[0]
            lo, hi, f_lo = phis[i], phis[i + 1], vals[i]
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                f_mid = abs(reservoir_amp(mid, rho)) - target
                if abs(f_mid) < 1e-14:
                    lo = hi = mid
                    break
                if f_lo * f_mid <= 0:
                    hi = mid
                else:
                    lo, f_lo = mid, f_mid
            phi = 0.5 * (lo + hi)
            if abs(abs(reservoir_amp(phi, rho)) - target) < PLAN_RESIDUAL_TOL:
                solution = (phi, float(rho))
                break
        if solution:
            break
    if not solution:
        raise VerificationError(f"no (phi, rho) pair reaches the target for k={k}, l={l}")
    phi, rho = solution
    v_final = _step_matrix(phi, rho, theta) @ v
    phase_fix = float(np.angle(v_final[1]) - np.angle(v_final[0]))
    residual = float(abs(abs(v_final[0]) - target))
    return AmplificationPlan(k=k, l=l, m_star=float(m_star), n=n, sign=sign, m=m,
                             phi=float(phi), rho=rho, target_amplitude=target,
                             residual=residual, phase_fix=phase_fix)


def zero_phase_circuit(phi: float, qubits, n_qubits: int) -> Circuit:
    """Multiply the all-zero string over ``qubits`` by e^{i phi}.

    Realized as a phase gate sandwiched in X on one qubit, negatively
    controlled on the rest.
    """
    qubits = list(qubits)
    if not qubits:
        raise SemanticError("phase needs at least one qubit")
    head, rest = qubits[0], tuple(qubits[1:])
    circ = Circuit(n_qubits)
    circ.append(x(head))
    circ.append(phase(head, phi, nctrl=rest))
    circ.append(x(head))
    return circ


def amplification_step_circuit(u_qdb: Circuit, db_qubits, phi: float,
                               rho: float) -> Circuit:
    """One amplification step as gates: zero-string phase rho, unprepare,
    zero-string phase phi, re-prepare."""
    n = u_qdb.n_qubits
    circ = zero_phase_circuit(rho, db_qubits, n)
    circ += u_qdb.inverse()
    circ += zero_phase_circuit(phi, db_qubits, n)
    circ += u_qdb
    return circ


def transfer(db: QdbState, l: int) -> tuple[QdbState, AmplificationPlan]:
    """Load the reservoir entry of a balanced database with weight for l
    future entries, unitarily.

    Before running, the database's own preparation circuit is re-simulated
    and must reproduce the live state (up to a global phase) — the
    amplification steps reflect about that prepared state, so a stale circuit
    would silently corrupt the transfer.
    """
    db.require_bare("transfer")
    if db.amplitude_profile is not None:
        raise SemanticError("transfer requires uniformly weighted entries")
    if db.descriptor.l != 0:
        raise SemanticError("transfer starts from a balanced database (l = 0)")
    if l < 0:
        raise SemanticError("cannot transfer weight for a negative entry count")
    plan = plan_transfer(db.k, l)
    if l == 0:
        return db, plan
    if db.n_qubits != db.layout.n_qubits:
        raise SemanticError("state register does not match the database layout")
    u_qdb = preparation_circuit(db.descriptor, db.layout)
    if not states_equal(simulate(u_qdb), db.state, tol=TRANSFER_AMP_TOL):
        raise VerificationError(
            "preparation-circuit preflight failed: the rebuilt circuit does not "
            "reproduce the live state")
    db_qubits = tuple(db.layout.index_qubits) + tuple(db.layout.data_qubits)
    n = db.n_qubits
    circ = Circuit(n)
    for _ in range(plan.m):
        circ += amplification_step_circuit(u_qdb, db_qubits, math.pi, math.pi)
    circ += amplification_step_circuit(u_qdb, db_qubits, plan.phi, plan.rho)
    circ += zero_phase_circuit(plan.phase_fix, db_qubits, n)
    state = simulate(circ, db.state)
    desc = db.descriptor
    new_desc = QdbDescriptor(k=desc.k, l=l, data=dict(desc.data), u_d=desc.u_d,
                             m_data=desc.m_data)
    new_db = QdbState(new_desc, db.layout, state, _grow(db.circuit, circ),
                      projective=db.projective, max_qubits=db.max_qubits)
    new_db.check(tol=TRANSFER_AMP_TOL)
    return new_db, plan


def unfold(db: QdbState) -> QdbState:
    """Split the loaded reservoir into l new empty entries plus one reserve.

    One fresh ancilla becomes the next index bit: a rotation on it (negatively
    controlled on every database qubit) peels the reservoir branch, and the
    index-register preparation for l entries, applied under that ancilla,
    spreads the branch over l fresh patterns. The result is a balanced
    database of k + l entries.
    """
    db.require_bare("unfold")
    if db.amplitude_profile is not None:
        raise SemanticError("unfold requires uniformly weighted entries")
    l = db.descriptor.l
    if l < 1:
        raise SemanticError("nothing to unfold: reservoir multiplicity is 0")
    if db.n_qubits != db.layout.n_qubits:
        raise SemanticError("state register does not match the database layout")
    kt = len(db.layout.index_qubits)
    if l > 2 ** kt:
        raise CapacityError(
            f"{l} new entries do not fit the {kt}-bit index register")
    target = math.sqrt((l + 1) / (db.k + l))
    held = abs(db.reservoir_amplitude())
    if held < target - TRANSFER_AMP_TOL:
        raise SemanticError(
            f"reservoir holds {held:.6g}, needs {target:.6g} to fund {l} entries")
    anc = db.n_qubits
    n = anc + 1
    state = add_ancillas(db.state, 1, max_qubits=db.max_qubits)
    db_qubits = tuple(db.layout.index_qubits) + tuple(db.layout.data_qubits)
    theta = 2 * math.acos(1.0 / math.sqrt(l + 1))
    circ = Circuit(n)
    circ.label(anc, "I")
    circ.append(GateSpec("ry", (theta,), (anc,), tuple((q, 0) for q in db_qubits)))
    if l > 1:
        circ += prepare_circuit(l, 0, db.layout.index_qubits, n).controlled(ctrl=(anc,))
    state = simulate(circ, state)
    old_labels = db.layout.labels
    start = max(old_labels) + 1
    new_map = dict(db.layout.logical_index_map)
    for i in range(l):
        new_map[start + i] = (1 << kt) + i
    layout = type(db.layout)(
        index_qubits=db.layout.index_qubits + (anc,),
        data_qubits=db.layout.data_qubits,
        logical_index_map=new_map,
    )
    desc = db.descriptor
    new_desc = QdbDescriptor(k=desc.k + l, l=0, data=dict(desc.data), u_d=desc.u_d,
                             m_data=desc.m_data)
    new_db = QdbState(new_desc, layout, state, _grow(db.circuit, circ),
                      projective=db.projective, max_qubits=db.max_qubits)
    new_db.check(tol=TRANSFER_AMP_TOL)
    return new_db


def extend(db: QdbState, l: int, *, plan_sink=None) -> QdbState:
    """Grow a database by l empty entries (transfer + unfold rounds).

    A balanced database is loaded round by round, each round creating at most
    k new entries (k the current count); a database whose reservoir already
    holds weight for exactly l entries skips the transfer and unfolds
    directly. ``plan_sink``, if given, receives each round's
    AmplificationPlan.
    """
    db.require_bare("extend")
    if db.amplitude_profile is not None:
        raise SemanticError("extend requires uniformly weighted entries")
    if l < 0:
        raise SemanticError("cannot extend by a negative entry count")
    if db.descriptor.l != 0:
        if db.descriptor.l != l:
            raise SemanticError(
                f"reservoir already loaded for {db.descriptor.l} entries, "
                f"not the requested {l}")
        return unfold(db)
    remaining = l
    while remaining > 0:
        chunk = min(db.k, remaining)
        db, plan = transfer(db, chunk)
        if plan_sink is not None:
            plan_sink(plan)
        db = unfold(db)
        remaining -= chunk
    return db


@dataclass(frozen=True)
class ExtendPlan:
    """Shape of an ancilla-bounded (possibly imbalanced) extension.

    z ancillas provide l_prime nonzero ancilla patterns; each is spread over
    l_double_prime index patterns. alpha/beta/gamma are the amplitude moduli
    of the reservoir, the old entries, and the new entries. The result is
    balanced exactly when every ancilla pattern hosts one new entry.
    """

    k: int
    l: int
    z: int
    l_prime: int
    l_double_prime: int
    alpha: float
    beta: float
    gamma: float
    balanced: bool
    route: str
    amplification: AmplificationPlan

    def to_report(self) -> dict:
        return {
            "k": self.k,
            "l": self.l,
            "z": self.z,
            "l_prime": self.l_prime,
            "l_double_prime": self.l_double_prime,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "balanced": self.balanced,
            "route": self.route,
            "amplification": self.amplification.to_report(),
        }


ROUTES = ("direct", "marker")


def plan_extend_imbalanced(k: int, l: int, z: int, *, route: str = "direct") -> ExtendPlan:
    """Work out the staging of an ancilla-bounded extension.

    Capacity: z ancillas can create at most (2^z - 1) * k new entries. When
    l exceeds the 2^z - 1 ancilla patterns, it must split evenly across them.
    """
    if route not in ROUTES:
        raise SemanticError(f"route must be one of {ROUTES}, got {route!r}")
    if z < 1:
        raise SemanticError("need at least one ancilla qubit")
    if l < 1:
        raise SemanticError("need at least one new entry")
    if l > (2 ** z - 1) * k:
        raise CapacityError(
            f"{z} ancilla qubits create at most {(2 ** z - 1) * k} new entries "
            f"for {k} existing ones, requested {l}")
    if z == 1:
        l_prime, l_double = l, 1
    else:
        l_prime = min(l, 2 ** z - 1)
        if l % l_prime:
            raise SemanticError(
                f"{l} new entries do not split evenly over {l_prime} ancilla patterns")
        l_double = l // l_prime
    alpha = math.sqrt((l + 1) / ((l_prime + 1) * (l + k)))
    beta = math.sqrt(1.0 / (l + k))
    gamma = math.sqrt((l + 1) / (l_double * (l_prime + 1) * (l + k)))
    balanced = l_double == 1
    if z == 1:
        # single-ancilla route reuses the reservoir unfolding, which is balanced
        alpha = gamma = beta
    return ExtendPlan(k=k, l=l, z=z, l_prime=l_prime, l_double_prime=l_double,
                      alpha=alpha, beta=beta, gamma=gamma, balanced=balanced,
                      route=route, amplification=plan_transfer(k, l))


def _marker_flag_circuit(marker: int, anc_qubits, n: int) -> Circuit:
    """Compute (ancilla register != 0) into a fresh marker qubit."""
    circ = Circuit(n)
    circ.label(marker, "A")
    circ.append(x(marker))
    circ.append(GateSpec("x", (), (marker,), tuple((q, 0) for q in anc_qubits)))
    return circ


def extend_imbalanced(db: QdbState, l: int, z: int, *, route: str = "direct",
                      plan_sink=None) -> QdbState:
    """Grow a balanced database by l entries using z ancilla qubits at once.

    After the usual transfer, the ancilla register is spread over l_prime + 1
    patterns under a negative control on the whole index register (only the
    reservoir branch has index pattern zero). If several new entries share an
    ancilla pattern, the index register is additionally spread wherever the
    ancillas are nonzero — either directly (inverse spread under a zero
    control, then an unconditional spread) or via an explicit computed
    marker qubit.

    With one entry per ancilla pattern the result is balanced; otherwise new
    entries carry gamma < beta and the reservoir alpha > beta, as recorded in
    the returned plan. A database whose reservoir already holds weight for
    exactly l entries (a ``prepare_general(k, l)`` result) skips the transfer.
    """
    db.require_bare("extend")
    if db.amplitude_profile is not None:
        raise SemanticError("extend requires uniformly weighted entries")
    plan = plan_extend_imbalanced(db.k, l, z, route=route)
    if plan_sink is not None:
        plan_sink(plan)
    if db.descriptor.l == l:
        loaded = db
    elif db.descriptor.l == 0:
        loaded, _ = transfer(db, l)
    else:
        raise SemanticError(
            f"reservoir already loaded for {db.descriptor.l} entries, "
            f"not the requested {l}")
    if z == 1:
        return unfold(loaded)
    kt = len(loaded.layout.index_qubits)
    n0 = loaded.n_qubits
    anc = tuple(range(n0, n0 + z))
    state = add_ancillas(loaded.state, z, max_qubits=loaded.max_qubits)
    n = n0 + z
    circ = Circuit(n)
    for q in anc:
        circ.label(q, "I")
    spread_anc = prepare_circuit(plan.l_prime + 1, 0, anc, n)
    circ += spread_anc.controlled(nctrl=loaded.layout.index_qubits)
    if plan.l_double_prime > 1:
        spread_idx = prepare_circuit(plan.l_double_prime, 0,
                                     loaded.layout.index_qubits, n)
        if route == "direct":
            circ += spread_idx.inverse().controlled(nctrl=anc)
            circ += spread_idx
        else:
            marker = n
            n += 1
            state = add_ancillas(state, 1, max_qubits=loaded.max_qubits)
            circ = circ.extended(n)
            flag = _marker_flag_circuit(marker, anc, n)
            circ += flag
            circ += spread_idx.extended(n).controlled(ctrl=(marker,))
            circ += flag.inverse()
    state = simulate(circ, state)
    if route == "marker" and plan.l_double_prime > 1:
        state = drop_qubits(state, [n - 1])
        n -= 1
    old_labels = loaded.layout.labels
    start = max(old_labels) + 1
    new_map = dict(loaded.layout.logical_index_map)
    profile = {0: plan.alpha}
    for label in old_labels:
        if label != 0:
            profile[label] = plan.beta
    next_label = start
    for i in range(1, plan.l_prime + 1):
        for h in range(plan.l_double_prime):
            new_map[next_label] = (i << kt) | h
            profile[next_label] = plan.gamma
            next_label += 1
    layout = type(loaded.layout)(
        index_qubits=loaded.layout.index_qubits + anc,
        data_qubits=loaded.layout.data_qubits,
        logical_index_map=new_map,
    )
    desc = loaded.descriptor
    new_desc = QdbDescriptor(k=desc.k + l, l=0, data=dict(desc.data), u_d=desc.u_d,
                             m_data=desc.m_data)
    new_db = QdbState(new_desc, layout, state, _grow(loaded.circuit, circ),
                      amplitude_profile=None if plan.balanced else profile,
                      projective=loaded.projective, max_qubits=loaded.max_qubits)
    new_db.check(tol=TRANSFER_AMP_TOL)
    return new_db


@dataclass(frozen=True)
class OverlapReport:
    """Pairwise overlap of two equal-size databases, before and after growth.

    A fixed unitary preserves overlaps; extension provably changes them
    whenever the databases differ, which is why growth must be built from
    each database's own preparation circuit instead.
    """

    k: int
    l: int
    overlap_before: float
    overlap_after: float
    closed_before: float
    closed_after: float
    preserved: bool


def check_no_unitary_extend(k: int, l: int, data_a: dict[int, int] | None = None,
                            data_b: dict[int, int] | None = None,
                            *, m_data: int = 1, tol: float = 1e-9) -> OverlapReport:
    """Demonstrate that growing by l entries cannot be one fixed unitary.

    Builds two databases (by default differing in entry 1's data bit),
    extends both, and compares overlaps: (1 + matches)/k before versus
    (1 + l + matches)/(k + l) after.
    """
    if data_a is None and data_b is None:
        data_a, data_b = {}, {1: 1}
    data_a, data_b = data_a or {}, data_b or {}
    db_a = prepare_general(k, 0, data_a, m_data=m_data)
    db_b = prepare_general(k, 0, data_b, m_data=m_data)
    before = abs(overlap(db_a.state, db_b.state))
    ext_a = extend(db_a, l)
    ext_b = extend(db_b, l)
    after = abs(overlap(ext_a.state, ext_b.state))
    matches = sum(
        1 for j in range(1, k)
        if db_a.descriptor.data_value(j) == db_b.descriptor.data_value(j))
    closed_before = (1 + matches) / k
    closed_after = (1 + l + matches) / (k + l)
    return OverlapReport(k=k, l=l, overlap_before=before, overlap_after=after,
                         closed_before=closed_before, closed_after=closed_after,
                         preserved=abs(before - after) <= tol)
