"""Stochastic Pauli channels and fault-location enumeration.

Every fault is a Pauli on one or two qubits attached to an op, either just
after it (gate and preparation errors) or just before it (readout flips).
Injected faults are ``(op_index, after, qubit, code)`` tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .circuits import Circuit, MEASURES, PREPS

X, Z, Y = 1, 2, 3  # fault codes: bit 0 = X part, bit 1 = Z part

_TWO_QUBIT_PAULIS = tuple(
    (a, b) for a, b in itertools.product((0, 1, 2, 3), repeat=2) if (a, b) != (0, 0)
)

CHANNELS = ("depol1", "depol2", "ms_flip", "rx_flip", "ry_flip", "heating", "dephasing", "meas_flip")


@dataclass(frozen=True)
class Depolarizing:
    """Every gate, preparation and measurement fails with probability ``p``."""

    p: float

    name = "depolarizing"

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError("p must lie in [0, 1]")

    def with_p(self, p):
        return Depolarizing(p)


@dataclass(frozen=True)
class IonTrap:
    """Trapped-ion Pauli model on MS-compiled circuits.

    ``p_xx`` is the MS control error; single-qubit rotations, preparation
    and readout fail at ``p_xx * single_scale``.  Heating probability is
    ``r_heating * t_MS * heating_factor`` and dephasing ``r_d * t_gate`` per
    qubit the gate touches (rates in 1/s, durations in us).  With
    ``idle_dephasing`` the qubits not involved dephase for the same time.
    """

    p_xx: float
    r_heating: float = 0.0
    r_d: float = 0.0
    heating_factor: float = 1.0
    single_scale: float = 0.1
    idle_dephasing: bool = False

    name = "iontrap"

    def __post_init__(self):
        for k in ("p_xx", "r_heating", "r_d", "heating_factor", "single_scale"):
            if getattr(self, k) < 0:
                raise ValueError(f"{k} must be >= 0")
        if self.p_xx > 1:
            raise ValueError("p_xx must be <= 1")

    @property
    def p_rx(self):
        return self.p_xx * self.single_scale

    @property
    def p_ry(self):
        return self.p_xx * self.single_scale

    def with_p(self, p):
        return IonTrap(p, self.r_heating, self.r_d, self.heating_factor, self.single_scale,
                       self.idle_dephasing)


@dataclass(frozen=True)
class FaultLocation:
    location_id: int  # id of the op the fault is attached to
    channel: str
    probability: float
    support: tuple[int, ...]
    op_index: int
    after: bool = True

    @property
    def slot(self) -> int:
        """Position in the op list the Pauli is inserted before."""
        return self.op_index + int(self.after)

    def __post_init__(self):
        if not 0 <= self.probability <= 1:
            raise ValueError(f"probability {self.probability} outside [0, 1]")
        want = 2 if self.channel in ("depol2", "ms_flip", "heating") else 1
        if len(self.support) != want:
            raise ValueError(f"{self.channel} needs {want} qubit(s)")


def _clip(p):
    return min(1.0, max(0.0, p))


def enumerate_locations(circuit: Circuit, model) -> list[FaultLocation]:
    """All fault locations of ``circuit`` under ``model``, in op order."""
    locs: list[FaultLocation] = []
    if isinstance(model, Depolarizing):
        p = model.p
        for j, op in enumerate(circuit.ops):
            if op.kind in MEASURES:
                locs.append(FaultLocation(op.location_id, "meas_flip", p, op.qubits, j, False))
            elif op.kind == "shuttle":
                continue
            elif len(op.qubits) == 2:
                locs.append(FaultLocation(op.location_id, "depol2", p, op.qubits, j))
            else:
                locs.append(FaultLocation(op.location_id, "depol1", p, op.qubits, j))
        return locs
    if isinstance(model, IonTrap):
        ps = model.p_xx * model.single_scale
        for j, op in enumerate(circuit.ops):
            k = op.kind
            if k in ("H", "CNOT", "prep_x", "measure_x", "S", "X", "Y", "Z"):
                raise ValueError(f"ion model needs an MS-compiled circuit (found {k})")
            if k == "shuttle":
                continue
            if k in MEASURES:
                locs.append(FaultLocation(op.location_id, "meas_flip", ps, op.qubits, j, False))
                continue
            if k in PREPS:
                locs.append(FaultLocation(op.location_id, "depol1", ps, op.qubits, j))
                continue
            if op.duration <= 0:
                raise ValueError(f"op {op.location_id} ({k}) has no duration; schedule it first")
            t = op.duration * 1e-6
            if k == "XX":
                locs.append(FaultLocation(op.location_id, "ms_flip", model.p_xx, op.qubits, j))
                ph = _clip(model.r_heating * t * model.heating_factor)
                locs.append(FaultLocation(op.location_id, "heating", ph, op.qubits, j))
            elif k.startswith("RX"):
                locs.append(FaultLocation(op.location_id, "rx_flip", ps, op.qubits, j))
            elif k.startswith("RY"):
                locs.append(FaultLocation(op.location_id, "ry_flip", ps, op.qubits, j))
            pd = _clip(model.r_d * t)
            for q in op.qubits:
                locs.append(FaultLocation(op.location_id, "dephasing", pd, (q,), j))
            if model.idle_dephasing:
                # serial execution: every other qubit waits out this gate
                for q in range(circuit.n_qubits):
                    if q not in op.qubits:
                        locs.append(FaultLocation(op.location_id, "dephasing", pd, (q,), j))
        return locs
    raise TypeError(f"unknown noise model {model!r}")


def _meas_flip_code(circuit: Circuit, loc: FaultLocation) -> int:
    return Z if circuit.ops[loc.op_index].kind == "measure_x" else X


def outcomes(loc: FaultLocation, circuit: Circuit | None = None):
    """Possible faults of a firing location with their conditional probabilities.

    Each outcome is a tuple of ``(qubit, code)`` pairs.  Probabilities are
    exact fractions so the channel bookkeeping can be checked exactly.
    """
    ch = loc.channel
    if ch == "depol1":
        q = loc.support[0]
        return [(((q, c),), Fraction(1, 3)) for c in (X, Y, Z)]
    if ch == "depol2":
        a, b = loc.support
        res = []
        for ca, cb in _TWO_QUBIT_PAULIS:
            fault = tuple((q, c) for q, c in ((a, ca), (b, cb)) if c)
            res.append((fault, Fraction(1, 15)))
        return res
    if ch in ("ms_flip", "heating"):
        a, b = loc.support
        return [(((a, X), (b, X)), Fraction(1))]
    if ch == "rx_flip":
        return [(((loc.support[0], X),), Fraction(1))]
    if ch == "ry_flip":
        return [(((loc.support[0], Y),), Fraction(1))]
    if ch == "dephasing":
        return [(((loc.support[0], Z),), Fraction(1))]
    if ch == "meas_flip":
        code = _meas_flip_code(circuit, loc) if circuit is not None else X
        return [(((loc.support[0], code),), Fraction(1))]
    raise ValueError(ch)


class FaultSampler:
    """Draws conditional fault outcomes for a fixed circuit's locations."""

    def __init__(self, circuit: Circuit, locations):
        self.circuit = circuit
        self.locations = list(locations)
        self._outs = [outcomes(l, circuit) for l in self.locations]

    def conditional(self, i: int, rng):
        """Fault at location ``i`` given that it fires, as injection tuples."""
        outs = self._outs[i]
        loc = self.locations[i]
        fault = outs[0][0] if len(outs) == 1 else outs[int(rng.integers(len(outs)))][0]
        return [(loc.op_index, loc.after, q, c) for q, c in fault]

    def sample(self, rng):
        """One unconditional draw over every location (direct Monte Carlo)."""
        faults = []
        probs = [l.probability for l in self.locations]
        u = rng.random(len(probs))
        for i, (ui, p) in enumerate(zip(u, probs)):
            if ui < p:
                faults.extend(self.conditional(i, rng))
        return faults


def sample_fault(loc: FaultLocation, rng, circuit: Circuit | None = None):
    """Sample one location: ``None`` if it does not fire, else its ``(qubit, code)`` pairs."""
    if rng.random() >= loc.probability:
        return None
    outs = outcomes(loc, circuit)
    if len(outs) == 1:
        return outs[0][0]
    return outs[int(rng.integers(len(outs)))][0]
