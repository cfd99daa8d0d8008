"""Two-step lookup-table decoding and execution of the simple circuit.

Corrections live in a classical Pauli frame on the data qubits and are never
executed as gates.  Syndromes are handled per type: the Z-check syndrome
selects an X correction, the X-check syndrome a Z correction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .circuits import Circuit, PREPS, propagate, syndrome_round
from .codes import CodeSpec, _tiebreak_key, reduce_mod_gauge
from .stabilizer_sim import PauliString, Tableau


@dataclass(frozen=True)
class LookupTable:
    """Syndrome -> correction, split by type.

    ``x_corr[s]`` is the X-correction mask for Z-check syndrome ``s`` (bit i
    = Z-check i) and ``z_corr[s]`` the Z-correction mask for X-check
    syndrome ``s``.
    """

    code: CodeSpec
    x_corr: tuple[int, ...]
    z_corr: tuple[int, ...]

    def __getitem__(self, syndrome) -> PauliString:
        """Full correction for a syndrome tuple in ``code.stabilizers`` order."""
        nz = len(self.code.z_stabilizers)
        if len(syndrome) != nz + len(self.code.x_stabilizers):
            raise ValueError("syndrome length mismatch")
        zs = sum(b << i for i, b in enumerate(syndrome[:nz]))
        xs = sum(b << i for i, b in enumerate(syndrome[nz:]))
        return PauliString(self.code.n_data, self.x_corr[zs], self.z_corr[xs])

    def __len__(self):
        return len(self.x_corr) * len(self.z_corr)

    def dump(self) -> str:
        """One line per typed syndrome, e.g. ``Z 10 -> X0``."""
        n = self.code.n_data
        nz, nx = len(self.code.z_stabilizers), len(self.code.x_stabilizers)
        lines = []
        for s, m in enumerate(self.x_corr):
            bits = "".join(str((s >> i) & 1) for i in range(nz))
            lines.append(f"Z {bits} -> {PauliString(n, m, 0).sparse()}")
        for s, m in enumerate(self.z_corr):
            bits = "".join(str((s >> i) & 1) for i in range(nx))
            lines.append(f"X {bits} -> {PauliString(n, 0, m).sparse()}")
        return "\n".join(lines) + "\n"


def _key(n, x, z):
    return _tiebreak_key(n, x, z)


def _min_weight_preimage(code, syn_fn, syndrome, letter):
    n = code.n_data
    for w in range(n + 1):
        for qs in itertools.combinations(range(n), w):
            m = sum(1 << q for q in qs)
            if syn_fn(m) == syndrome:
                return m
    raise ValueError(f"no {letter} error has syndrome {syndrome}")


@lru_cache(maxsize=None)
def build_table(code: CodeSpec, order: str = "gauge") -> LookupTable:
    """Lookup table from the single-fault behaviour of one syndrome round.

    Every single Pauli fault (all outcomes at every depolarizing location,
    plus bare single-qubit data errors before the round) is propagated to
    the end of a noiseless round; its data residual, reduced modulo the
    gauge group, is a candidate correction for the residual's own syndrome.
    The minimum-weight candidate wins, ties broken by qubit indices then
    X < Y < Z.  Syndromes no single fault produces fall back to the
    minimum-weight data error.
    """
    if code.L != 3:
        raise ValueError("lookup tables are built for distance-3 codes only")
    n = code.n_data
    rnd = syndrome_round(code, order)
    N = rnd.n_qubits
    x_best: dict[int, tuple] = {}
    z_best: dict[int, tuple] = {}

    def offer(residual: PauliString):
        data = residual.restrict(n)
        red = reduce_mod_gauge(code, PauliString(n, data.x, 0))
        zs = code.z_syndrome(red.x)
        k = _key(n, red.x, 0)
        if zs not in x_best or k < x_best[zs][0]:
            x_best[zs] = (k, red.x)
        red = reduce_mod_gauge(code, PauliString(n, 0, data.z))
        xs = code.x_syndrome(red.z)
        k = _key(n, 0, red.z)
        if xs not in z_best or k < z_best[xs][0]:
            z_best[xs] = (k, red.z)

    for q in range(n):
        for letter in "XYZ":
            offer(PauliString.single(N, letter, q))
    for j, op in enumerate(rnd.ops):
        if op.kind in ("measure_z", "measure_x"):
            continue  # readout flips leave no data residual
        paulis = []
        if len(op.qubits) == 2:
            for la, lb in itertools.product("IXYZ", repeat=2):
                if la == lb == "I":
                    continue
                p = PauliString(N)
                if la != "I":
                    p = p * PauliString.single(N, la, op.qubits[0])
                if lb != "I":
                    p = p * PauliString.single(N, lb, op.qubits[1])
                paulis.append(p)
        else:
            paulis = [PauliString.single(N, l, op.qubits[0]) for l in "XYZ"]
        for p in paulis:
            final, _ = propagate(rnd, p, j + 1)
            offer(final)

    nzs = 1 << len(code.z_stabilizers)
    nxs = 1 << len(code.x_stabilizers)
    x_corr = []
    for s in range(nzs):
        x_corr.append(x_best[s][1] if s in x_best else
                      _min_weight_preimage(code, code.z_syndrome, s, "X"))
    z_corr = []
    for s in range(nxs):
        z_corr.append(z_best[s][1] if s in z_best else
                      _min_weight_preimage(code, code.x_syndrome, s, "Z"))
    return LookupTable(code, tuple(x_corr), tuple(z_corr))


# -- adjudication ------------------------------------------------------------------
def _bits_to_mask(bits) -> int:
    m = 0
    for i, b in enumerate(bits):
        if b:
            m |= 1 << i
    return m


def adjudicate(code: CodeSpec, data_bits, frame: PauliString | int = 0,
               expected_logical: int = 0, table: LookupTable | None = None) -> bool:
    """Decide whether a transversal Z readout of the data yields the expected logical value.

    The frame's X part flips the raw bits; the Z-check parities of the
    flipped bits pick a final X correction from ``table``; the corrected
    logical-Z parity must equal ``expected_logical``.  Returns True on pass.
    """
    if len(data_bits) != code.n_data:
        raise ValueError("need one bit per data qubit")
    table = table or build_table(code)
    fx = frame.x if isinstance(frame, PauliString) else int(frame)
    bits = _bits_to_mask(data_bits) ^ fx
    bits ^= table.x_corr[code.z_syndrome(bits)]
    return ((bits & code.logical_z.z).bit_count() & 1) == expected_logical


# -- execution -------------------------------------------------------------------------
@dataclass
class TrialResult:
    failed: bool
    data_bits: tuple[int, ...]
    frame_x: int
    frame_z: int
    executed: list[str]
    prep_frame: PauliString | None = None
    syndromes: list[tuple[str, int, int]] = field(default_factory=list)
    qec_rounds: list[int] = field(default_factory=list)


def _majority(a, b, c):
    return (a & b) | (a & c) | (b & c)


class SimpleRunner:
    """Executes a segmented simple circuit with injected faults.

    Faults are ``(op_index, after, qubit, code)`` tuples (see
    :mod:`bsqec.noise`); those attached to segments the classical control
    skips are dropped.
    """

    def __init__(self, circuit: Circuit, code: CodeSpec, table: LookupTable | None = None,
                 backend=None):
        self.circuit = circuit
        self.code = code
        self.table = table or build_table(code)
        self.backend = backend or Tableau
        self.program = circuit.program()
        self.m = len(circuit.ops)
        self.n_words = (self.m + 63) // 64 or 1
        # measurement j of a Z-check ancilla sets bit i (check index), of an
        # X-check ancilla bit 16 + i: run_span ORs these into one word
        zi = {c.ancilla: i for i, c in enumerate(code.z_stabilizers)}
        xi = {c.ancilla: i for i, c in enumerate(code.x_stabilizers)}
        self.synw = np.zeros(self.m, dtype=np.int64)
        for j, op in enumerate(circuit.ops):
            if op.kind in ("measure_z", "measure_x"):
                q = op.qubits[0]
                if q in zi:
                    self.synw[j] = 1 << zi[q]
                elif q in xi:
                    self.synw[j] = 1 << (16 + xi[q])
        self.segments = circuit.segments
        self._no_faults = np.zeros((0, 3), dtype=np.int32)
        self._zsyn = [code.z_syndrome(m) for m in range(1 << code.n_data)] if code.n_data <= 16 else None

    @property
    def n_segments(self):
        return len(self.segments)

    def fault_array(self, faults) -> np.ndarray:
        """Pack ``(op_index, after, qubit, code)`` tuples for ``Tableau.run_span``."""
        if not faults:
            return self._no_faults
        arr = np.array([(2 * j + int(after), q, c) for j, after, q, c in faults], dtype=np.int32)
        if len(arr) > 1:
            arr = arr[np.argsort(arr[:, 0], kind="stable")]
        return arr

    def _exec(self, state, seg, farr, words, out):
        syn = state.run_span(self.program, seg.start, seg.stop, farr, words, out, self.synw)
        return syn & 0xFFFF, syn >> 16

    def run(self, faults=(), rng=None, expected_logical: int = 0) -> TrialResult:
        """Execute one trial.

        One random bit per op is drawn up front, so the generator advances
        by the same amount whatever branches the decoder takes.  Frame
        syndromes are tracked alongside the frame: a table correction for
        syndrome ``s`` has syndrome ``s``.
        """
        rng = rng if rng is not None else np.random.default_rng()
        code, table = self.code, self.table
        state = self.backend(self.circuit.n_qubits)
        farr = self.fault_array(faults)
        words = rng.bit_generator.random_raw(self.n_words)
        out = np.zeros(self.m, dtype=np.uint8)
        fx = fz = 0
        sfx = sfz = 0  # Z-check syndrome of fx, X-check syndrome of fz
        executed: list[str] = []
        history: list[tuple[str, int, int]] = []
        records: list[int] = []
        prep_frame = None
        qec_rounds: list[int] = []
        skip_b = -1
        data_bits = ()
        for seg in self.segments:
            role = seg.role
            if role == "qec_b" and seg.block == skip_b:
                continue
            if role == "prep_round" and seg.block == 2 and records[0] == records[1]:
                continue
            zs, xs = self._exec(state, seg, farr, words, out)
            executed.append(seg.name)
            if role == "qec_a":
                history.append((seg.name, zs, xs))
                if zs == sfx and xs == sfz:
                    skip_b = seg.block
                    qec_rounds.append(1)
                else:
                    qec_rounds.append(2)
            elif role == "qec_b":
                history.append((seg.name, zs, xs))
                ez, ex = zs ^ sfx, xs ^ sfz
                fx ^= table.x_corr[ez]
                fz ^= table.z_corr[ex]
                sfx, sfz = zs, xs
            elif role == "prep_round":
                history.append((seg.name, zs, xs))
                records.append(xs)
                accepted = None
                if seg.block == 1 and records[0] == records[1]:
                    accepted = xs
                elif seg.block == 2:
                    accepted = _majority(*records)
                if accepted is not None:
                    fz = table.z_corr[accepted]
                    sfz = accepted
                    prep_frame = PauliString(code.n_data, 0, fz)
            elif role == "measure":
                data_bits = out[seg.start:seg.start + code.n_data]
        failed = False
        if len(data_bits):
            bits = 0
            for i, b in enumerate(data_bits):
                if b:
                    bits |= 1 << i
            bits ^= fx
            zsyn = self._zsyn[bits] if self._zsyn is not None else code.z_syndrome(bits)
            bits ^= table.x_corr[zsyn]
            failed = ((bits & code.logical_z.z).bit_count() & 1) != expected_logical
            data_bits = tuple(int(b) for b in data_bits)
        return TrialResult(failed, data_bits, fx, fz, executed, prep_frame, history, qec_rounds)

    def failed(self, faults, rng) -> bool:
        return self.run(faults, rng).failed


def run_circuit(circuit: Circuit, code: CodeSpec, faults=(), rng=None,
                table: LookupTable | None = None) -> TrialResult:
    """Convenience wrapper: build a runner and execute one trial."""
    return SimpleRunner(circuit, code, table).run(faults, rng)


# -- session API -------------------------------------------------------------------
class QecSession:
    """A live tableau plus the classical state of repeated two-step QEC.

    Faults passed to :meth:`measure_round` are injection tuples indexed
    into one syndrome round.
    """

    def __init__(self, code: CodeSpec, state=None, table: LookupTable | None = None,
                 rng=None, frame: PauliString | None = None):
        self.code = code
        self.table = table or build_table(code)
        self.rng = rng if rng is not None else np.random.default_rng()
        self.state = state if state is not None else Tableau(code.n_qubits)
        f = frame or PauliString(code.n_data)
        self.frame_x, self.frame_z = f.x, f.z
        self.history: list[tuple[int, int]] = []
        self.rounds_run = 0
        self._round = syndrome_round(code)
        self._runner = SimpleRunner(self._round, code, self.table)

    @property
    def frame(self) -> PauliString:
        return PauliString(self.code.n_data, self.frame_x, self.frame_z)

    def inject(self, pauli: PauliString):
        """Apply a Pauli error to the live state right now."""
        if pauli.n != self.code.n_qubits:
            pauli = pauli.extend(self.code.n_qubits)
        self.state.pauli(pauli.x, pauli.z)

    def measure_round(self, faults=()):
        r = self._runner
        words = self.rng.bit_generator.random_raw(r.n_words)
        out = np.zeros(r.m, dtype=np.uint8)
        zs, xs = r._exec(self.state, r.segments[0], r.fault_array(list(faults)), words, out)
        self.rounds_run += 1
        self.history.append((zs, xs))
        return zs ^ self.code.z_syndrome(self.frame_x), xs ^ self.code.x_syndrome(self.frame_z)

    def readout(self) -> tuple[int, ...]:
        bits = []
        for q in range(self.code.n_data):
            b, _ = self.state.measure_z(q, int(self.rng.integers(2)))
            bits.append(int(b))
        return tuple(bits)


def two_step_qec(session: QecSession, faults_a=(), faults_b=()) -> QecSession:
    """One two-step block: measure; if anything fired, measure again and correct from that."""
    ez, ex = session.measure_round(faults_a)
    if ez == 0 and ex == 0:
        return session
    ez, ex = session.measure_round(faults_b)
    session.frame_x ^= session.table.x_corr[ez]
    session.frame_z ^= session.table.z_corr[ex]
    return session


# -- exhaustive single-fault check ---------------------------------------------------
def single_fault_failures(code: CodeSpec, rounds: int = 1, order: str = "gauge", seed: int = 0,
                          circuit: Circuit | None = None):
    """Run the simple circuit once per (location, Pauli outcome) under the depolarizing model.

    Returns ``(n_runs, failures)`` where each failure is
    ``(location_id, channel, fault)``.  The measurement randomness is seeded
    identically for every run.
    """
    from .circuits import simple_circuit
    from .noise import Depolarizing, enumerate_locations, outcomes

    circ = circuit if circuit is not None else simple_circuit(code, rounds, order)
    runner = SimpleRunner(circ, code)
    n_runs = 0
    failures = []
    for loc in enumerate_locations(circ, Depolarizing(1.0)):
        for fault, _ in outcomes(loc, circ):
            inj = [(loc.op_index, loc.after, q, c) for q, c in fault]
            n_runs += 1
            if runner.run(inj, np.random.default_rng(seed)).failed:
                failures.append((loc.location_id, loc.channel, fault))
    return n_runs, failures
