"""Linear-chain trapped-ion timing model and ion arrangement search.

Chain positions are indices into an arrangement, which lists qubit labels
left to right.  Two-qubit gate time grows with the separation of the two
ions; ancillas are split off the chain and moved to a measurement zone
before readout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit, MEASURES, NATIVE, PREPS, compile_to_ms, prep_bs13, syndrome_round
from .codes import CodeSpec


@dataclass(frozen=True)
class TimingParams:
    """Durations in microseconds."""

    t_1q: float = 10.0
    t_meas_batch: float = 100.0
    t_shuttle_op: float = 100.0
    t_base: float = 40.0
    t_slope: float = 20.0

    def __post_init__(self):
        for k, v in self.__dict__.items():
            if v < 0:
                raise ValueError(f"{k} must be >= 0")

    def t_2q(self, d):
        if np.any(np.asarray(d) < 1):
            raise ValueError("ion separation must be >= 1")
        return self.t_base + self.t_slope * (np.asarray(d) - 1) if np.ndim(d) else \
            self.t_base + self.t_slope * (d - 1)


@dataclass(frozen=True)
class IonArrangement:
    permutation: tuple[int, ...]  # chain position -> qubit label

    def __post_init__(self):
        p = tuple(int(x) for x in self.permutation)
        if sorted(p) != list(range(len(p))):
            raise ValueError("arrangement must be a permutation of 0..n-1")
        object.__setattr__(self, "permutation", p)

    def __len__(self):
        return len(self.permutation)

    @property
    def positions(self) -> np.ndarray:
        pos = np.empty(len(self.permutation), dtype=np.int64)
        pos[list(self.permutation)] = np.arange(len(self.permutation))
        return pos

    def reversed(self) -> IonArrangement:
        return IonArrangement(self.permutation[::-1])

    def to_text(self) -> str:
        return " ".join(map(str, self.permutation))

    @classmethod
    def from_text(cls, text: str) -> IonArrangement:
        return cls(tuple(int(t) for t in text.split()))


# Published optimized arrangements, keyed by (code name, label)
PUBLISHED_ARRANGEMENTS = {
    ("surface17", "SA"): "0 2 6 8 1 4 3 7 5 11 12 10 15 13 14 9 16",
    ("surface17", "MA"): "2 9 1 12 5 15 8 14 4 11 0 10 3 13 7 16 6",
    ("surface17", "MT"): "10 15 9 5 0 1 11 12 14 7 4 3 8 2 6 13 16",
    ("baconshor13", "SA"): "0 2 6 8 1 3 7 5 4 11 10 12 9",
    ("baconshor13", "MA"): "8 2 12 1 5 9 4 10 7 3 11 0 6",
    ("baconshor13", "MT"): "2 1 5 4 9 12 10 11 7 3 0 8 6",
}


def published_arrangement(code: CodeSpec, label: str) -> IonArrangement:
    try:
        return IonArrangement.from_text(PUBLISHED_ARRANGEMENTS[(code.name, label.upper())])
    except KeyError:
        raise ValueError(f"no published arrangement for {code.name} {label}") from None


# -- durations and scheduling ---------------------------------------------------------
def _require_native(circuit: Circuit):
    for op in circuit.ops:
        if op.kind not in NATIVE:
            raise ValueError(f"op {op.location_id} ({op.kind}) is not a trapped-ion native op; "
                             "compile_to_ms first")


def op_durations(circuit: Circuit, arrangement: IonArrangement, timing: TimingParams | None = None):
    """Duration of each op; preparation and readout are charged per batch, not per op."""
    timing = timing or TimingParams()
    _require_native(circuit)
    if len(arrangement) < circuit.n_qubits:
        raise ValueError("arrangement has fewer ions than the circuit has qubits")
    pos = arrangement.positions
    out = []
    for op in circuit.ops:
        if op.kind == "XX":
            a, b = op.qubits
            out.append(float(timing.t_2q(abs(int(pos[a]) - int(pos[b])))))
        elif op.kind in PREPS or op.kind in MEASURES:
            out.append(0.0)
        elif op.kind == "shuttle":
            out.append(timing.t_shuttle_op)
        else:
            out.append(timing.t_1q)
    return out


def assign_durations(circuit: Circuit, arrangement: IonArrangement | None = None,
                     timing: TimingParams | None = None) -> Circuit:
    if arrangement is None:
        arrangement = IonArrangement(tuple(range(circuit.n_qubits)))
    return circuit.with_durations(op_durations(circuit, arrangement, timing))


@dataclass
class ScheduleResult:
    logic_time: float
    shuttle_time: float
    meas_time: float
    total: float
    starts: list = field(default_factory=list)
    circuit: Circuit | None = None


def shuttle_meas_cost(arrangement: IonArrangement, ancillas, timing: TimingParams | None = None):
    """Time to split ancilla blocks off the chain, move them, and read them out.

    Each maximal run of adjacent ancillas is one readout batch.  A block in
    the middle of the chain needs a split on both sides, which costs two
    shuttle operations (split, then rejoin); a block at either end comes off
    with the move itself.  The move out and back is two more operations.
    """
    timing = timing or TimingParams()
    anc = set(ancillas)
    if not anc:
        return 0.0, 0.0
    perm = arrangement.permutation
    n = len(perm)
    blocks = []
    i = 0
    while i < n:
        if perm[i] in anc:
            j = i
            while j + 1 < n and perm[j + 1] in anc:
                j += 1
            blocks.append((i, j))
            i = j + 1
        else:
            i += 1
    interior = sum(1 for a, b in blocks if a > 0 and b < n - 1)
    return timing.t_shuttle_op * (2 * interior + 2), timing.t_meas_batch * len(blocks)


def _measured_ancillas(circuit: Circuit, ancillas):
    anc = set(ancillas)
    return sorted({q for op in circuit.ops if op.kind in MEASURES for q in op.qubits if q in anc})


def schedule(circuit: Circuit, arrangement: IonArrangement, mode: str = "serial",
             timing: TimingParams | None = None, ancillas=()) -> ScheduleResult:
    """List-schedule a native circuit on the chain.

    ``serial`` runs one op at a time.  ``parallel`` starts each op as soon
    as its qubits are free, with at most two XX gates in flight (one per
    radial mode family) and any number of single-ion ops.  Shuttle and
    readout cost is added for the ``ancillas`` the circuit measures.
    """
    timing = timing or TimingParams()
    if mode not in ("serial", "parallel"):
        raise ValueError(f"unknown mode {mode!r}")
    durs = op_durations(circuit, arrangement, timing)
    starts = []
    if mode == "serial":
        t = 0.0
        for d in durs:
            starts.append(t)
            t += d
        logic = t
    else:
        ready = [0.0] * circuit.n_qubits
        xx: list[tuple[float, float]] = []
        logic = 0.0
        for op, d in zip(circuit.ops, durs):
            s = max(ready[q] for q in op.qubits)
            if op.kind == "XX" and d > 0:
                s = _xx_slot(xx, s, d)
                xx.append((s, s + d))
            for q in op.qubits:
                ready[q] = s + d
            starts.append(s)
            logic = max(logic, s + d)
    measured = _measured_ancillas(circuit, ancillas)
    sh, me = shuttle_meas_cost(arrangement, measured, timing) if measured else (0.0, 0.0)
    return ScheduleResult(logic, sh, me, logic + sh + me, starts,
                          circuit.with_durations(durs))


def _xx_slot(busy, s, d, limit=2):
    """Earliest start >= s at which fewer than ``limit`` XX gates overlap [t, t + d)."""
    cands = sorted({s} | {e for _, e in busy if e > s})
    for t in cands:
        if sum(1 for a, b in busy if a < t + d and b > t) < limit:
            return t
    return cands[-1]


def avg_2q_time(circuit: Circuit, arrangement: IonArrangement, timing: TimingParams | None = None):
    timing = timing or TimingParams()
    pos = arrangement.positions
    ds = [abs(int(pos[op.qubits[0]]) - int(pos[op.qubits[1]]))
          for op in circuit.ops if op.kind == "XX"]
    if not ds:
        raise ValueError("circuit has no two-qubit gates")
    return float(np.mean(timing.t_2q(np.array(ds))))


# -- circuits whose times are reported ------------------------------------------------------
def qec_circuit(code: CodeSpec) -> Circuit:
    """One native syndrome-extraction step."""
    return compile_to_ms(syndrome_round(code))


def prep_circuit(code: CodeSpec) -> Circuit:
    """Native logical preparation: GHZ rows for Bacon-Shor, one X-check round for Surface-17."""
    if code.name == "surface17":
        return compile_to_ms(syndrome_round(code, kinds="X"))
    if code.subsystem and code.L == 3:
        return compile_to_ms(prep_bs13(code))
    raise ValueError(f"no preparation circuit for {code.name}")


@dataclass
class CircuitTimes:
    prep: tuple[float, float]
    qec: tuple[float, float]
    measure: float
    total: tuple[float, float]
    qec_step: ScheduleResult


def times(code: CodeSpec, arrangement: IonArrangement, mode: str = "serial",
          timing: TimingParams | None = None, rounds: int = 1) -> CircuitTimes:
    """Execution time ranges of the simple circuit.

    Ranges cover the data-dependent branches: Surface-17 preparation takes
    two or three X-check rounds, and each QEC block takes one or two
    syndrome steps.  Preparation time is gate time only.
    """
    timing = timing or TimingParams()
    step = schedule(qec_circuit(code), arrangement, mode, timing, code.ancillas)
    p = schedule(prep_circuit(code), arrangement, mode, timing).logic_time
    prep = (2 * p, 3 * p) if code.name == "surface17" else (p, p)
    qec = (rounds * step.total, 2 * rounds * step.total)
    meas = timing.t_meas_batch
    total = (prep[0] + qec[0] + meas, prep[1] + qec[1] + meas)
    return CircuitTimes(prep, qec, meas, total, step)


# -- simulated annealing ------------------------------------------------------------------------
@dataclass
class AnnealResult:
    arrangement: IonArrangement
    objective: float
    history: list = field(default_factory=list)


def objective_fn(circuit: Circuit, objective: str, ancillas, timing: TimingParams | None = None):
    """Callable ``perm -> cost`` for an objective label (MA, MT or SA)."""
    timing = timing or TimingParams()
    objective = objective.upper()
    xx = [op.qubits for op in circuit.ops if op.kind == "XX"]
    if objective in ("MA", "SA"):
        if not xx:
            raise ValueError("circuit has no two-qubit gates")
        a = np.array([q[0] for q in xx])
        b = np.array([q[1] for q in xx])

        def f(perm):
            pos = np.empty(len(perm), dtype=np.int64)
            pos[list(perm)] = np.arange(len(perm))
            d = np.abs(pos[a] - pos[b])
            return float(np.mean(timing.t_base + timing.t_slope * (d - 1)))
        return f
    if objective == "MT":
        def f(perm):
            return schedule(circuit, IonArrangement(tuple(perm)), "parallel", timing,
                            ancillas).total
        return f
    raise ValueError(f"unknown objective {objective!r}")


def anneal(circuit: Circuit, code: CodeSpec, objective: str = "MA", seed: int = 0,
           steps: int | None = None, cooling: float = 0.999, t0: float | None = None,
           timing: TimingParams | None = None, stagnation: int = 4000) -> AnnealResult:
    """Search chain arrangements minimising ``objective``.

    Moves swap two chain positions.  For SA the ancillas fill the right end
    of the chain and swaps stay within the data or ancilla part.  The best
    arrangement seen is returned; after ``stagnation`` steps without
    improvement the walk restarts from it with the temperature reset.
    Default step counts: 50000 for the cheap MA/SA costs, 20000 for MT,
    which schedules the whole round per proposal.
    """
    objective = objective.upper()
    _require_native(circuit)
    if steps is None:
        steps = 20_000 if objective == "MT" else 50_000
    rng = np.random.default_rng(seed)
    n = code.n_qubits
    anc = list(code.ancillas)
    data = [q for q in range(n) if q not in set(anc)]
    if objective == "SA":
        perm = list(rng.permutation(data)) + list(rng.permutation(anc))
    else:
        perm = list(rng.permutation(n))
    f = objective_fn(circuit, objective, anc, timing)
    cur = f(perm)
    best, best_perm = cur, list(perm)
    T0 = t0 if t0 is not None else 0.05 * cur
    T = T0
    since = 0
    history = []
    nd = len(data)
    for step in range(steps):
        if objective == "SA":
            if rng.random() < nd / n:
                i, j = rng.choice(nd, 2, replace=False)
            else:
                i, j = nd + rng.choice(n - nd, 2, replace=False)
        else:
            i, j = rng.choice(n, 2, replace=False)
        perm[i], perm[j] = perm[j], perm[i]
        new = f(perm)
        if new <= cur or (T > 0 and rng.random() < math.exp((cur - new) / T)):
            cur = new
            if new < best - 1e-12:
                best, best_perm = new, list(perm)
                since = 0
        else:
            perm[i], perm[j] = perm[j], perm[i]
        since += 1
        if since >= stagnation:
            perm, cur, T, since = list(best_perm), best, T0, 0
        T *= cooling
        if step % 1000 == 0:
            history.append(best)
    return AnnealResult(IonArrangement(tuple(int(x) for x in best_perm)), best, history)
