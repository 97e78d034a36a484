"""Command-line front end.

``qdbsim run SCRIPT`` executes an op script — one command per line,
``name key=value ...`` with ``#`` comments — against a single database
session and writes numbered artifacts (amplitude dumps, circuit text, plan
reports, measurement outcomes) into the output directory. Artifacts are
byte-deterministic for a given script, seed, and format.

The whole script is dry-run first: each command is checked against the
evolving descriptor, so semantic mistakes surface before anything is
simulated or written, and execution can only fail on capacity or numeric
grounds.

``qdbsim verify --level fast|full`` runs the built-in check battery.

Exit codes: 0 success, 2 script/circuit parse error, 3 semantic error,
4 capacity exceeded, 5 verification failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dumps import amplitude_records, dump_records, records_to_csv, records_to_json
from .errors import CircuitParseError, QdbError, ScriptError, SemanticError
from .extend import extend, extend_imbalanced, plan_extend_imbalanced
from .qdb import (
    QdbState,
    normalize_permutation,
    permute,
    plan_descriptor,
    prepare_general,
    read_copy,
    read_copy_all,
    read_projective,
    remove_projective,
    remove_reservoir,
    write,
    write_swap_conditional,
)
from .statevector import DEFAULT_MAX_QUBITS, schmidt
from .text_format import parse_text
from .tolerances import PROJECTION_ZERO_TOL
from .verify import run_verify

import json


COMMANDS = ("prepare", "extend", "extend-imbalanced", "write", "read-copy",
            "read-projective", "remove", "permute", "emit", "dump")


def parse_script(text: str) -> list[tuple[int, str, dict[str, str]]]:
    """Split an op script into (line, command, key-value) triples."""
    out = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        cmd = tokens[0]
        if cmd not in COMMANDS:
            raise ScriptError(ln, f"unknown command {cmd!r}")
        kv: dict[str, str] = {}
        for tok in tokens[1:]:
            if "=" not in tok:
                raise ScriptError(ln, f"expected key=value, got {tok!r}")
            key, _, value = tok.partition("=")
            if not key or not value:
                raise ScriptError(ln, f"malformed key=value pair {tok!r}")
            if key in kv:
                raise ScriptError(ln, f"duplicate key {key!r}")
            kv[key] = value
        out.append((ln, cmd, kv))
    return out


_MISSING = object()


def _take_int(kv: dict, key: str, ln: int, default=_MISSING):
    if key not in kv:
        if default is _MISSING:
            raise ScriptError(ln, f"missing required key {key!r}")
        return default
    raw = kv.pop(key)
    try:
        return int(raw)
    except ValueError:
        raise ScriptError(ln, f"{key} must be an integer, got {raw!r}") from None


def _require(kv: dict, key: str, ln: int) -> str:
    if key not in kv:
        raise ScriptError(ln, f"missing required key {key!r}")
    return kv.pop(key)


def _reject_extra(kv: dict, ln: int):
    if kv:
        raise ScriptError(ln, f"unknown keys: {', '.join(sorted(kv))}")


def _parse_data_spec(spec: str, ln: int) -> dict[int, str]:
    out: dict[int, str] = {}
    for part in spec.split(","):
        if ":" not in part:
            raise ScriptError(ln, f"data entries look like label:bits, got {part!r}")
        label, _, bits = part.partition(":")
        try:
            out[int(label)] = bits
        except ValueError:
            raise ScriptError(ln, f"data label {label!r} is not an integer") from None
    return out


def _parse_perm_spec(spec: str, ln: int):
    if ":" in spec:
        out = {}
        for part in spec.split(","):
            src, _, dst = part.partition(":")
            try:
                out[int(src)] = int(dst)
            except ValueError:
                raise ScriptError(ln, f"bad mapping pair {part!r}") from None
        return out
    try:
        return [int(tok) for tok in spec.split(",")]
    except ValueError:
        raise ScriptError(ln, f"bad permutation {spec!r}") from None


# ---------------------------------------------------------------------------
# dry run
#
# Every script is validated command by command against the evolving
# descriptor before anything is simulated or written, so execution can only
# fail on capacity or numeric grounds. The shape below mirrors exactly the
# state the semantic preconditions consult: counts, labels, data words,
# attached registers, and the amplitude profile of imbalanced extensions.
# Seeded projective removals are resolved by drawing from the same PRNG
# sequence the executor will use.


@dataclass
class _Shape:
    k: int
    l: int
    m: int
    labels: set[int]
    data: dict[int, int]
    profile: dict[int, float] | None = None
    attached: str | None = None
    projective: bool = False


@dataclass
class DryRun:
    seed: int | None
    script_dir: Path
    shape: _Shape | None = None
    consumed: str | None = None

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed) if self.seed is not None else None

    def require_shape(self) -> _Shape:
        if self.consumed:
            raise SemanticError(f"database was consumed by {self.consumed}")
        if self.shape is None:
            raise SemanticError("no database prepared yet")
        return self.shape

    def require_bare(self, op: str) -> _Shape:
        shape = self.require_shape()
        if shape.attached:
            raise SemanticError(f"{op} requires sensor/copy registers to be detached")
        return shape

    def writable(self, op: str, label: int) -> _Shape:
        shape = self.require_bare(op)
        if label == 0:
            raise SemanticError("entry 0 is the reservoir and cannot hold data")
        if label not in shape.labels:
            raise SemanticError(f"no entry with label {label}")
        if shape.m == 0:
            raise SemanticError("database has no data register")
        return shape

    def word_value(self, word: str) -> int:
        shape = self.shape
        if set(word) - {"0", "1"}:
            raise SemanticError(f"data bitstring must be binary, got {word!r}")
        value = int(word, 2) if word else 0
        if value >> shape.m:
            raise SemanticError(
                f"data word {word!r} does not fit the {shape.m}-bit data register")
        return value

    def add_entries(self, l: int, plan=None):
        shape = self.shape
        start = max(shape.labels) + 1
        new = set(range(start, start + l))
        if plan is not None and not plan.balanced:
            shape.profile = {0: plan.alpha}
            shape.profile.update({j: plan.beta for j in shape.labels if j != 0})
            shape.profile.update({j: plan.gamma for j in new})
        shape.labels |= new
        shape.k += l
        shape.l = 0


def _dry_prepare(dry: DryRun, kv: dict, ln: int):
    if dry.shape is not None or dry.consumed:
        raise SemanticError("session already holds a database")
    k = _take_int(kv, "k", ln)
    l = _take_int(kv, "l", ln, default=0)
    data = _parse_data_spec(kv.pop("data"), ln) if "data" in kv else None
    m_data = _take_int(kv, "m", ln, default=0) or None
    u_d = None
    if "u_d" in kv:
        path = dry.script_dir / kv.pop("u_d")
        try:
            u_d = parse_text(path.read_text())
        except OSError as exc:
            raise ScriptError(ln, f"cannot read data-encoding circuit: {exc}") from None
    _reject_extra(kv, ln)
    desc = plan_descriptor(k, l, data, m_data=m_data, u_d=u_d)
    dry.shape = _Shape(k=desc.k, l=desc.l, m=desc.m_data,
                       labels=set(range(desc.k)),
                       data={j: desc.data_value(j) for j in desc.data})


def _dry_extend(dry: DryRun, kv: dict, ln: int):
    shape = dry.require_bare("extend")
    l = _take_int(kv, "l", ln)
    _reject_extra(kv, ln)
    if shape.profile is not None:
        raise SemanticError("extend requires uniformly weighted entries")
    if l < 0:
        raise SemanticError("cannot extend by a negative entry count")
    if shape.l not in (0, l):
        raise SemanticError(
            f"reservoir already loaded for {shape.l} entries, not the requested {l}")
    dry.add_entries(l)


def _dry_extend_imbalanced(dry: DryRun, kv: dict, ln: int):
    shape = dry.require_bare("extend")
    l = _take_int(kv, "l", ln)
    z = _take_int(kv, "z", ln)
    route = kv.pop("route", "direct")
    _reject_extra(kv, ln)
    if shape.profile is not None:
        raise SemanticError("extend requires uniformly weighted entries")
    plan = plan_extend_imbalanced(shape.k, l, z, route=route)
    if shape.l not in (0, l):
        raise SemanticError(
            f"reservoir already loaded for {shape.l} entries, not the requested {l}")
    dry.add_entries(l, plan)


def _dry_write(dry: DryRun, kv: dict, ln: int):
    j = _take_int(kv, "j", ln)
    word = _require(kv, "d", ln)
    mode = kv.pop("mode", "xor")
    _reject_extra(kv, ln)
    shape = dry.writable("write", j)
    value = dry.word_value(word)
    if mode == "xor":
        shape.data[j] = shape.data.get(j, 0) ^ value
    elif mode == "swap":
        shape.data[j] = value
        shape.attached = "write mode=swap"
    else:
        raise ScriptError(ln, f"write mode must be xor or swap, got {mode!r}")


def _dry_read_copy(dry: DryRun, kv: dict, ln: int):
    if kv.pop("all", None):
        _reject_extra(kv, ln)
        shape = dry.require_bare("read")
        if shape.m == 0:
            raise SemanticError("database has no data register")
    else:
        j = _take_int(kv, "j", ln)
        _reject_extra(kv, ln)
        shape = dry.writable("read", j)
    shape.attached = "read-copy"


def _dry_read_projective(dry: DryRun, kv: dict, ln: int):
    j = _take_int(kv, "j", ln)
    _reject_extra(kv, ln)
    shape = dry.require_bare("read")
    if j not in shape.labels:
        raise SemanticError(f"no entry with label {j}")
    if shape.m == 0:
        raise SemanticError("database has no data register")
    dry.consumed = "read-projective"
    dry.shape = None


def _dry_remove(dry: DryRun, kv: dict, ln: int):
    j = _take_int(kv, "j", ln)
    mode = kv.pop("mode", "reservoir")
    _reject_extra(kv, ln)
    if mode == "reservoir":
        shape = dry.writable("remove", j)
        if shape.profile is not None:
            shape.profile[0] = math.hypot(shape.profile[0], shape.profile.pop(j))
        shape.labels.discard(j)
        shape.data.pop(j, None)
        shape.k -= 1
        shape.l += 1
        return
    if mode != "projective":
        raise ScriptError(ln, f"remove mode must be reservoir or projective, got {mode!r}")
    shape = dry.require_bare("remove")
    if j not in shape.labels:
        raise SemanticError(f"no entry with label {j}")
    if dry.seed is None:
        raise SemanticError("remove mode=projective samples an outcome; pass --seed")
    if shape.profile is not None:
        weight_sq = shape.profile[j] ** 2
    elif j == 0:
        weight_sq = (shape.l + 1) / (shape.k + shape.l)
    else:
        weight_sq = 1.0 / (shape.k + shape.l)
    p_success = max(0.0, 1.0 - weight_sq)
    if p_success > PROJECTION_ZERO_TOL and j == 0:
        raise SemanticError("removing the reservoir would leave no empty entry")
    if dry.rng.random() < p_success:
        if shape.profile is not None:
            scale = 1.0 / math.sqrt(p_success)
            shape.profile = {t: wgt * scale for t, wgt in shape.profile.items()
                             if t != j}
        shape.labels.discard(j)
        shape.data.pop(j, None)
        shape.k -= 1
        shape.projective = True
    else:
        dry.consumed = "remove mode=projective (failure branch)"
        dry.shape = None


def _dry_permute(dry: DryRun, kv: dict, ln: int):
    spec = _require(kv, "map", ln)
    _reject_extra(kv, ln)
    shape = dry.require_bare("permute")
    mapping = normalize_permutation(_parse_perm_spec(spec, ln), shape.labels)
    if all(j == t for j, t in mapping.items()):
        return
    inverse = {t: j for j, t in mapping.items()}
    if shape.data.get(inverse[0], 0):
        raise SemanticError(
            f"entry {inverse[0]} holds data and cannot become the reservoir")
    if mapping[0] != 0 and shape.l > 0:
        raise SemanticError("cannot relocate a weighted reservoir (l > 0)")
    shape.data = {mapping[j]: w for j, w in shape.data.items()}
    if shape.profile is not None:
        shape.profile = {mapping[j]: w for j, w in shape.profile.items()}


def _dry_emit(dry: DryRun, kv: dict, ln: int):
    shape = dry.require_shape()
    _reject_extra(kv, ln)
    if shape.projective:
        raise SemanticError(
            "state passed through a projection; no circuit re-creates it")


def _dry_dump(dry: DryRun, kv: dict, ln: int):
    dry.require_shape()
    _reject_extra(kv, ln)


DRY_HANDLERS = {
    "prepare": _dry_prepare,
    "extend": _dry_extend,
    "extend-imbalanced": _dry_extend_imbalanced,
    "write": _dry_write,
    "read-copy": _dry_read_copy,
    "read-projective": _dry_read_projective,
    "remove": _dry_remove,
    "permute": _dry_permute,
    "emit": _dry_emit,
    "dump": _dry_dump,
}


def dry_run(steps, *, seed: int | None, script_dir: Path):
    """Walk a parsed script against the evolving descriptor; raise on the
    first command that could not execute."""
    dry = DryRun(seed=seed, script_dir=script_dir)
    for ln, cmd, kv in steps:
        try:
            DRY_HANDLERS[cmd](dry, dict(kv), ln)
        except (ScriptError, CircuitParseError):
            raise
        except QdbError as exc:
            exc.args = (f"{cmd} (line {ln}): {exc}",)
            raise


@dataclass
class Session:
    out_dir: Path
    fmt: str
    seed: int | None
    max_qubits: int
    script_dir: Path
    db: QdbState | None = None
    consumed: str | None = None
    artifact_count: int = 0
    lines: list[str] = field(default_factory=list)

    def __post_init__(self):
        # one PRNG for the whole script: sampling commands draw sequentially
        self.rng = np.random.default_rng(self.seed) if self.seed is not None else None

    def require_db(self) -> QdbState:
        if self.consumed:
            raise SemanticError(f"database was consumed by {self.consumed}")
        if self.db is None:
            raise SemanticError("no database prepared yet")
        return self.db

    def artifact(self, name: str, text: str) -> Path:
        self.artifact_count += 1
        path = self.out_dir / f"{self.artifact_count:03d}-{name}"
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        return path

    def say(self, message: str):
        self.lines.append(message)
        print(message)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _cmd_prepare(sess: Session, kv: dict, ln: int):
    if sess.db is not None or sess.consumed:
        raise SemanticError("session already holds a database")
    k = _take_int(kv, "k", ln)
    l = _take_int(kv, "l", ln, default=0)
    data = _parse_data_spec(kv.pop("data"), ln) if "data" in kv else None
    m_data = _take_int(kv, "m", ln, default=0) or None
    u_d = None
    if "u_d" in kv:
        path = sess.script_dir / kv.pop("u_d")
        try:
            u_d = parse_text(path.read_text())
        except OSError as exc:
            raise ScriptError(ln, f"cannot read data-encoding circuit: {exc}") from None
    _reject_extra(kv, ln)
    sess.db = prepare_general(k, l, data, m_data=m_data, u_d=u_d,
                              max_qubits=sess.max_qubits)
    sess.say(f"prepare: k={k} l={l} on {sess.db.n_qubits} qubits")


def _cmd_extend(sess: Session, kv: dict, ln: int):
    db = sess.require_db()
    l = _take_int(kv, "l", ln)
    _reject_extra(kv, ln)
    plans = []
    sess.db = extend(db, l, plan_sink=lambda p: plans.append(p.to_report()))
    path = sess.artifact("extend-plan.json", _json_text({"l": l, "plans": plans}))
    sess.say(f"extend: +{l} -> k={sess.db.k} on {sess.db.n_qubits} qubits "
             f"({path.name})")


def _cmd_extend_imbalanced(sess: Session, kv: dict, ln: int):
    db = sess.require_db()
    l = _take_int(kv, "l", ln)
    z = _take_int(kv, "z", ln)
    route = kv.pop("route", "direct")
    _reject_extra(kv, ln)
    plans = []
    sess.db = extend_imbalanced(db, l, z, route=route,
                                plan_sink=lambda p: plans.append(p.to_report()))
    path = sess.artifact("extend-imbalanced-plan.json", _json_text(plans[0]))
    sess.say(f"extend-imbalanced: +{l} with z={z} -> k={sess.db.k} "
             f"balanced={plans[0]['balanced']} ({path.name})")


def _cmd_write(sess: Session, kv: dict, ln: int):
    db = sess.require_db()
    j = _take_int(kv, "j", ln)
    word = _require(kv, "d", ln)
    mode = kv.pop("mode", "xor")
    _reject_extra(kv, ln)
    if mode == "xor":
        sess.db = write(db, j, word)
    elif mode == "swap":
        sess.db = write_swap_conditional(db, j, word)
    else:
        raise ScriptError(ln, f"write mode must be xor or swap, got {mode!r}")
    sess.say(f"write: entry {j} d={word} mode={mode}")


def _cmd_read_copy(sess: Session, kv: dict, ln: int):
    db = sess.require_db()
    if kv.pop("all", None):
        _reject_extra(kv, ln)
        sess.db = read_copy_all(db)
        target = "all"
    else:
        j = _take_int(kv, "j", ln)
        _reject_extra(kv, ln)
        sess.db = read_copy(db, j)
        target = str(j)
    rep = schmidt(sess.db.state, sess.db.copy_qubits)
    path = sess.artifact("read-copy.json", _json_text({
        "entry": target,
        "purity": rep.purity,
        "schmidt_rank": rep.schmidt_rank,
        "entropy_bits": rep.entropy_bits,
        "entangled": rep.entangled,
    }))
    sess.say(f"read-copy: entry {target} entangled={rep.entangled} ({path.name})")


def _cmd_read_projective(sess: Session, kv: dict, ln: int):
    db = sess.require_db()
    j = _take_int(kv, "j", ln)
    _reject_extra(kv, ln)
    data_state, prob = read_projective(db, j)
    segments = [("D", tuple(range(data_state.n_qubits)))]
    records = amplitude_records(data_state, segments)
    path = sess.artifact("read-projective.json", _json_text({
        "entry": j,
        "probability": prob,
        "records": records,
    }))
    sess.consumed = "read-projective"
    sess.db = None
    sess.say(f"read-projective: entry {j} probability={prob:.12g} ({path.name})")


def _cmd_remove(sess: Session, kv: dict, ln: int):
    db = sess.require_db()
    j = _take_int(kv, "j", ln)
    mode = kv.pop("mode", "reservoir")
    _reject_extra(kv, ln)
    if mode == "reservoir":
        sess.db = remove_reservoir(db, j)
        sess.say(f"remove: entry {j} -> reservoir (k={sess.db.k}, l={sess.db.l})")
        return
    if mode != "projective":
        raise ScriptError(ln, f"remove mode must be reservoir or projective, got {mode!r}")
    if sess.seed is None:
        raise SemanticError("remove mode=projective samples an outcome; pass --seed")
    outcome = remove_projective(db, j)
    success = bool(sess.rng.random() < outcome.success_probability)
    path = sess.artifact("remove.json", _json_text({
        "entry": j,
        "mode": "projective",
        "success_probability": outcome.success_probability,
        "outcome": "success" if success else "failure",
    }))
    if success and outcome.success_state is not None:
        sess.db = outcome.success_state
    else:
        sess.consumed = "remove mode=projective (failure branch)"
        sess.db = None
    sess.say(f"remove: entry {j} projective p={outcome.success_probability:.12g} "
             f"outcome={'success' if success else 'failure'} ({path.name})")


def _cmd_permute(sess: Session, kv: dict, ln: int):
    db = sess.require_db()
    spec = _require(kv, "map", ln)
    _reject_extra(kv, ln)
    sess.db = permute(db, _parse_perm_spec(spec, ln))
    sess.say(f"permute: {spec}")


def _cmd_emit(sess: Session, kv: dict, ln: int):
    db = sess.require_db()
    _reject_extra(kv, ln)
    path = sess.artifact("circuit.txt", db.emit())
    sess.say(f"emit: {len(db.circuit)} gates ({path.name})")


def _cmd_dump(sess: Session, kv: dict, ln: int):
    db = sess.require_db()
    _reject_extra(kv, ln)
    records = dump_records(db)
    if sess.fmt == "json":
        path = sess.artifact("dump.json", records_to_json(records))
    else:
        path = sess.artifact("dump.csv", records_to_csv(records))
    sess.say(f"dump: {len(records)} amplitudes ({path.name})")


HANDLERS = {
    "prepare": _cmd_prepare,
    "extend": _cmd_extend,
    "extend-imbalanced": _cmd_extend_imbalanced,
    "write": _cmd_write,
    "read-copy": _cmd_read_copy,
    "read-projective": _cmd_read_projective,
    "remove": _cmd_remove,
    "permute": _cmd_permute,
    "emit": _cmd_emit,
    "dump": _cmd_dump,
}


def run_script(script_path: Path, out_dir: Path, *, seed: int | None,
               max_qubits: int, fmt: str) -> int:
    try:
        text = script_path.read_text()
    except OSError as exc:
        raise ScriptError(0, f"cannot read script: {exc}") from None
    steps = parse_script(text)
    dry_run(steps, seed=seed, script_dir=script_path.parent)
    sess = Session(out_dir=out_dir, fmt=fmt, seed=seed, max_qubits=max_qubits,
                   script_dir=script_path.parent)
    for ln, cmd, kv in steps:
        HANDLERS[cmd](sess, dict(kv), ln)
    print(f"done: {len(steps)} commands, {sess.artifact_count} artifacts"
          + (f" in {out_dir}" if sess.artifact_count else ""))
    return 0


def _seed_type(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdbsim",
        description="Simulate superposed-index quantum databases.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute an op script")
    run_p.add_argument("script", type=Path, help="op script path")
    run_p.add_argument("--seed", type=_seed_type, default=None,
                       help="RNG seed (unsigned 64-bit); required by sampling commands")
    run_p.add_argument("--out", type=Path, default=None,
                       help="artifact directory (default: <script>-out beside the script)")
    run_p.add_argument("--max-qubits", type=int, default=DEFAULT_MAX_QUBITS,
                       help="qubit budget for the session")
    run_p.add_argument("--format", choices=("json", "csv"), default="json",
                       help="amplitude dump format")

    verify_p = sub.add_parser("verify", help="run the built-in check battery")
    verify_p.add_argument("--level", choices=("fast", "full"), default="fast")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            out = args.out
            if out is None:
                out = args.script.parent / (args.script.stem + "-out")
            return run_script(args.script, out, seed=args.seed,
                              max_qubits=args.max_qubits, fmt=args.format)
        report = run_verify(args.level)
        for check in report.checks:
            mark = "PASS" if check.passed else "FAIL"
            print(f"[{mark}] {check.name}: {check.detail}")
        if not report.passed:
            print("verification failed")
            return 5
        print(f"verification passed ({args.level})")
        return 0
    except QdbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
