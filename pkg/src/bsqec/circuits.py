"""Noiseless reference circuits for the distance-3 codes.

A :class:`Circuit` is a flat list of located ops split into named segments.
Segments carry the classical control of the simple circuit (prepare, QEC
blocks, transversal readout): the decoder decides at run time which
segments execute, so the op list is the superset of everything that *might*
run and every fault location has a stable id.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .codes import CodeSpec
from .stabilizer_sim import PauliString
from .stabilizer_sim import ops as _ops

ONE_QUBIT = frozenset(
    {"prep_z", "prep_x", "H", "S", "X", "Y", "Z", "RX+90", "RX-90", "RY+90", "RY-90",
     "measure_z", "measure_x"}
)
TWO_QUBIT = frozenset({"CNOT", "XX"})
NATIVE = frozenset({"prep_z", "measure_z", "RX+90", "RX-90", "RY+90", "RY-90", "XX", "shuttle"})
PREPS = frozenset({"prep_z", "prep_x"})
MEASURES = frozenset({"measure_z", "measure_x"})


@dataclass(frozen=True)
class LocatedOp:
    location_id: int
    kind: str
    qubits: tuple[int, ...]
    duration: float = 0.0

    def __post_init__(self):
        if self.kind in TWO_QUBIT:
            arity = 2
        elif self.kind in ONE_QUBIT:
            arity = 1
        elif self.kind == "shuttle":
            arity = len(self.qubits)
        else:
            raise ValueError(f"unknown op kind {self.kind!r}")
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} expects {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.kind} on repeated qubit {self.qubits}")


@dataclass(frozen=True)
class Segment:
    """A contiguous op range with one classical role.

    ``role`` is one of ``prep``, ``prep_round`` (Surface-17 X-check round),
    ``qec_a``/``qec_b`` (first and conditional second syndrome round of a
    two-step block) or ``measure``.  ``block`` numbers prep rounds and QEC
    blocks from 0.
    """

    name: str
    role: str
    block: int
    start: int
    stop: int


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    ops: tuple[LocatedOp, ...]
    segments: tuple[Segment, ...] = ()
    code_name: str = ""

    def __post_init__(self):
        seen = set()
        for op in self.ops:
            for q in op.qubits:
                if not 0 <= q < self.n_qubits:
                    raise IndexError(f"op {op} touches qubit {q} outside 0..{self.n_qubits - 1}")
            if op.location_id in seen:
                raise ValueError(f"duplicate location id {op.location_id}")
            seen.add(op.location_id)
        if not self.segments:
            object.__setattr__(
                self, "segments", (Segment("all", "body", 0, 0, len(self.ops)),)
            )

    def __len__(self):
        return len(self.ops)

    def count(self, kind: str) -> int:
        return sum(1 for op in self.ops if op.kind == kind)

    def segment(self, name: str) -> Segment:
        for s in self.segments:
            if s.name == name:
                return s
        raise KeyError(name)

    def segment_ops(self, seg: Segment) -> tuple[LocatedOp, ...]:
        return self.ops[seg.start:seg.stop]

    def measured_qubits(self, seg: Segment) -> tuple[int, ...]:
        return tuple(op.qubits[0] for op in self.segment_ops(seg) if op.kind in MEASURES)

    def program(self, seg: Segment | None = None) -> np.ndarray:
        """Encode ops as an ``(m, 3)`` int32 array for ``Tableau.run``."""
        ops = self.ops if seg is None else self.segment_ops(seg)
        prog = np.zeros((len(ops), 3), dtype=np.int32)
        for i, op in enumerate(ops):
            prog[i, 0] = _ops.KIND_TO_OPCODE[op.kind]
            prog[i, 1] = op.qubits[0] if op.qubits else 0
            prog[i, 2] = op.qubits[1] if len(op.qubits) > 1 else 0
        return prog

    def with_durations(self, durations) -> Circuit:
        if len(durations) != len(self.ops):
            raise ValueError("one duration per op required")
        new = tuple(replace(op, duration=float(d)) for op, d in zip(self.ops, durations))
        return replace(self, ops=new)

    # -- text format -------------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"qubits {self.n_qubits}"]
        covered = 0
        for s in self.segments:
            lines.append(f"# segment {s.name} {s.role} {s.block}")
            for op in self.ops[s.start:s.stop]:
                lines.append(" ".join([str(op.location_id), op.kind, *map(str, op.qubits)]))
            covered += s.stop - s.start
        if covered != len(self.ops):
            raise ValueError("segments do not tile the op list")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, code_name: str = "") -> Circuit:
        n = None
        ops: list[LocatedOp] = []
        segs: list[tuple[str, str, int, int]] = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("qubits"):
                n = int(line.split()[1])
            elif line.startswith("# segment"):
                _, _, name, role, block = line.split()
                segs.append((name, role, int(block), len(ops)))
            elif line.startswith("#"):
                continue
            else:
                parts = line.split()
                ops.append(LocatedOp(int(parts[0]), parts[1], tuple(int(q) for q in parts[2:])))
        if n is None:
            raise ValueError("missing 'qubits' header")
        segments = []
        for i, (name, role, block, start) in enumerate(segs):
            stop = segs[i + 1][3] if i + 1 < len(segs) else len(ops)
            segments.append(Segment(name, role, block, start, stop))
        return cls(n, tuple(ops), tuple(segments), code_name)


class _Builder:
    """Accumulates ops with fresh location ids and segment boundaries."""

    def __init__(self, n_qubits, code_name=""):
        self.n = n_qubits
        self.code_name = code_name
        self.ops: list[LocatedOp] = []
        self.segments: list[Segment] = []
        self._open = None

    def add(self, kind, *qubits):
        self.ops.append(LocatedOp(len(self.ops), kind, tuple(qubits)))

    def begin(self, name, role, block=0):
        self.end()
        self._open = (name, role, block, len(self.ops))

    def end(self):
        if self._open is not None:
            name, role, block, start = self._open
            self.segments.append(Segment(name, role, block, start, len(self.ops)))
            self._open = None

    def extend(self, circuit: Circuit):
        for op in circuit.ops:
            self.add(op.kind, *op.qubits)

    def build(self) -> Circuit:
        self.end()
        return Circuit(self.n, tuple(self.ops), tuple(self.segments), self.code_name)


# -- syndrome extraction -----------------------------------------------------------
def _check_order(code: CodeSpec, check, order: str) -> tuple[int, ...]:
    if order == "gauge":
        return check.order
    if order == "naive":
        # walk along the logical of the check's own type: Z row by row,
        # X column by column, so a mid-way ancilla fault leaves a full line
        if check.kind == "Z":
            return tuple(sorted(check.order))
        return tuple(sorted(check.order, key=lambda q: (q % code.L, q // code.L)))
    raise ValueError(f"unknown order {order!r}")


def _emit_check(b: _Builder, code: CodeSpec, check, order: str):
    a = check.ancilla
    seq = _check_order(code, check, order)
    if check.kind == "Z":
        b.add("prep_z", a)
        for q in seq:
            b.add("CNOT", q, a)
        b.add("measure_z", a)
    else:
        b.add("prep_x", a)
        for q in seq:
            b.add("CNOT", a, q)
        b.add("measure_x", a)


def syndrome_round(code: CodeSpec, order: str = "gauge", kinds: str = "ZX") -> Circuit:
    """One round measuring every check once, Z checks first, each with its own ancilla.

    ``order="naive"`` swaps in the order that runs along the logical
    direction (negative control).  ``kinds="X"`` restricts the round to the
    X checks, as used when preparing Surface-17.
    """
    if code.name != "surface17" and not code.subsystem:
        raise ValueError(f"unsupported code {code.name}")
    b = _Builder(code.n_qubits, code.name)
    if "Z" in kinds:
        for c in code.z_stabilizers:
            _emit_check(b, code, c, order)
    if "X" in kinds:
        for c in code.x_stabilizers:
            _emit_check(b, code, c, order)
    return b.build()


def propagate(circuit: Circuit, pauli: PauliString, start: int, stop: int | None = None):
    """Push ``pauli`` (inserted just before op ``start``) through ``ops[start:stop]``.

    Returns ``(final, flips)``: the propagated Pauli on all qubits and the
    indices of measurement ops whose outcome it flips.  Preparations erase
    the component on the reset qubit.
    """
    stop = len(circuit.ops) if stop is None else stop
    p = pauli
    flips = []
    for j in range(start, stop):
        op = circuit.ops[j]
        q = op.qubits[0] if op.qubits else None
        if op.kind in PREPS:
            m = ~(1 << q)
            p = PauliString(p.n, p.x & m, p.z & m, p.phase)
        elif op.kind == "measure_z":
            if (p.x >> q) & 1:
                flips.append(j)
        elif op.kind == "measure_x":
            if (p.z >> q) & 1:
                flips.append(j)
        elif op.kind == "shuttle":
            continue
        else:
            p = p.conjugated(op.kind, op.qubits)
    return p, flips


# -- logical preparation -------------------------------------------------------------
def prep_bs13(code: CodeSpec | None = None) -> Circuit:
    """Logical |0> of the Bacon-Shor code: one X-basis GHZ state per row.

    Each row ``(a, b, c)`` gets prep, H(a), CNOT(a, b), CNOT(b, c) and a
    final H on all three, giving ``(|+++> + |--->)/sqrt2``.  Its stabilizers
    are ``Z_aZ_bZ_c`` and the row XX pairs, which generate the code's Z
    stabilizers, logical Z and XX gauges.
    """
    from .codes import baconshor

    code = code or baconshor(3)
    L = code.L
    b = _Builder(code.n_qubits, code.name)
    for r in range(L):
        row = [L * r + c for c in range(L)]
        for q in row:
            b.add("prep_z", q)
        b.add("H", row[0])
        for u, v in zip(row, row[1:]):
            b.add("CNOT", u, v)
        for q in row:
            b.add("H", q)
    return b.build()


def prep_surface17_ops(code: CodeSpec) -> Circuit:
    """The deterministic part of Surface-17 preparation: every data qubit in |0>."""
    b = _Builder(code.n_qubits, code.name)
    for q in range(code.n_data):
        b.add("prep_z", q)
    return b.build()


def prep_surface17(rng=None, code: CodeSpec | None = None):
    """Run the noiseless Surface-17 preparation protocol.

    Returns ``(circuit, frame)``: the ops actually executed (data reset plus
    two or three X-check rounds) and the Z-type Pauli frame that sets every
    X check to +1.  The frame is tracked classically, never applied.
    """
    from .codes import surface17
    from .decoders import run_circuit

    code = code or surface17()
    sc = simple_circuit(code, 0)
    res = run_circuit(sc, code, rng=rng)
    b = _Builder(code.n_qubits, code.name)
    for seg in sc.segments:
        if seg.name in res.executed and seg.role in ("prep", "prep_round"):
            b.begin(seg.name, seg.role, seg.block)
            for op in sc.segment_ops(seg):
                b.add(op.kind, *op.qubits)
    return b.build(), res.prep_frame


def simple_circuit(code: CodeSpec, rounds: int, order: str = "gauge") -> Circuit:
    """Prepare logical |0>, run ``rounds`` two-step QEC blocks, measure all data in Z.

    Conditional segments (a third Surface-17 prep round, the second round of
    each QEC block) are always present; the runner skips them when the
    decoder says so.
    """
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    b = _Builder(code.n_qubits, code.name)
    if code.subsystem:
        b.begin("prep", "prep")
        b.extend(prep_bs13(code))
    else:
        b.begin("prep", "prep")
        b.extend(prep_surface17_ops(code))
        xr = syndrome_round(code, order, kinds="X")
        for i in range(3):
            b.begin(f"prep_r{i + 1}", "prep_round", i)
            b.extend(xr)
    rnd = syndrome_round(code, order)
    for k in range(rounds):
        b.begin(f"qec{k + 1}a", "qec_a", k)
        b.extend(rnd)
        b.begin(f"qec{k + 1}b", "qec_b", k)
        b.extend(rnd)
    b.begin("measure", "measure")
    for q in range(code.n_data):
        b.add("measure_z", q)
    return b.build()


# -- trapped-ion compilation ---------------------------------------------------------
_EXPAND = {
    "H": lambda a: [("RY+90", a), ("RX+90", a), ("RX+90", a)],
    "prep_x": lambda a: [("prep_z", a), ("RY+90", a)],
    "measure_x": lambda a: [("RY-90", a), ("measure_z", a)],
    "X": lambda a: [("RX+90", a), ("RX+90", a)],
}


def _expand_cnot(c, t):
    return [("RY+90", c), ("XX", c, t), ("RX-90", c), ("RX-90", t), ("RY-90", c)]


def compile_to_ms(circuit: Circuit) -> Circuit:
    """Rewrite H, CNOT and X-basis prep/readout into XX(pi/4), RX/RY(+-pi/2), prep_z, measure_z.

    Location ids are renumbered per native op; segment boundaries follow.
    """
    b = _Builder(circuit.n_qubits, circuit.code_name)
    starts = {}
    for s in circuit.segments:
        starts.setdefault(s.start, []).append(s)
    new_bounds = []
    for i, op in enumerate(circuit.ops):
        for s in starts.get(i, []):
            new_bounds.append((s, len(b.ops)))
        if op.kind in NATIVE:
            b.add(op.kind, *op.qubits)
        elif op.kind == "CNOT":
            for k, *qs in _expand_cnot(*op.qubits):
                b.add(k, *qs)
        elif op.kind in _EXPAND:
            for k, *qs in _EXPAND[op.kind](op.qubits[0]):
                b.add(k, *qs)
        else:
            raise ValueError(f"cannot compile {op.kind!r} to trapped-ion gates")
    for s in circuit.segments:
        if s.start == len(circuit.ops):
            new_bounds.append((s, len(b.ops)))
    segs = []
    for idx, (s, start) in enumerate(new_bounds):
        stop = new_bounds[idx + 1][1] if idx + 1 < len(new_bounds) else len(b.ops)
        segs.append(Segment(s.name, s.role, s.block, start, stop))
    return Circuit(circuit.n_qubits, tuple(b.ops), tuple(segs), circuit.code_name)
