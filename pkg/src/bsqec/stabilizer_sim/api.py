"""Functional front end over the backend ``Tableau`` classes."""

from __future__ import annotations

import numpy as np

from .pauli import PauliString

_GATES_1Q = {"H", "S", "X", "Y", "Z", "RX+90", "RX-90", "RY+90", "RY-90"}
_GATES_2Q = {"CNOT", "XX"}


def _backend():
    from . import Tableau

    return Tableau


def new_state(n: int, backend=None):
    """Fresh ``|0...0>`` tableau on ``n`` qubits."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cls = backend if backend is not None else _backend()
    return cls(n)


def _check_qubits(state, qubits, arity):
    if len(qubits) != arity:
        raise ValueError(f"expected {arity} qubit(s), got {len(qubits)}")
    for q in qubits:
        if not 0 <= q < state.n:
            raise IndexError(f"qubit {q} out of range for {state.n} qubits")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"repeated qubit indices {qubits}")


def apply_clifford(state, gate: str, qubits):
    """Conjugate ``state`` by ``gate`` in place and return it."""
    if isinstance(qubits, int):
        qubits = (qubits,)
    qubits = tuple(int(q) for q in qubits)
    if gate in _GATES_1Q:
        _check_qubits(state, qubits, 1)
        q = qubits[0]
        if gate == "H":
            state.h(q)
        elif gate == "S":
            state.s(q)
        elif gate == "X":
            state.x(q)
        elif gate == "Y":
            state.y(q)
        elif gate == "Z":
            state.z(q)
        elif gate.startswith("RX"):
            state.rx(q, 1 if gate[2] == "+" else -1)
        else:
            state.ry(q, 1 if gate[2] == "+" else -1)
    elif gate in _GATES_2Q:
        _check_qubits(state, qubits, 2)
        if gate == "CNOT":
            state.cnot(*qubits)
        else:
            state.xx(*qubits)
    else:
        raise ValueError(f"unsupported gate {gate!r}")
    return state


def measure(state, qubit: int, basis: str = "Z", rng=None):
    """Projectively measure ``qubit``; returns ``(outcome, deterministic)``.

    A random bit is drawn from ``rng`` for every call so the stream position
    does not depend on the state.
    """
    if rng is None:
        rng = np.random.default_rng()
    bit = int(rng.integers(2))
    if basis == "Z":
        out, det = state.measure_z(qubit, bit)
    elif basis == "X":
        out, det = state.measure_x(qubit, bit)
    else:
        raise ValueError(f"basis must be 'Z' or 'X', not {basis!r}")
    return int(out), bool(det)


def apply_pauli(state, p: PauliString):
    if p.n != state.n:
        raise ValueError(f"Pauli on {p.n} qubits applied to {state.n}-qubit state")
    state.pauli(p.x, p.z)
    return state


def _row(state, i):
    x, z, r = state.row(i)
    return PauliString(state.n, x, z, 2 * r)


def stabilizer_rows(state) -> list[PauliString]:
    return [_row(state, state.n + i) for i in range(state.n)]


def destabilizer_rows(state) -> list[PauliString]:
    return [_row(state, i) for i in range(state.n)]


def expectation(state, p: PauliString) -> int:
    """Return +1/-1 if ``p`` has a definite value on the state, else 0."""
    if p.n != state.n:
        raise ValueError("size mismatch")
    stabs = stabilizer_rows(state)
    if not all(p.commutes(s) for s in stabs):
        return 0
    acc = PauliString.identity(state.n)
    for d, s in zip(destabilizer_rows(state), stabs):
        if not p.commutes(d):
            acc = s * acc
    if not acc.equal_up_to_phase(p):
        raise AssertionError("tableau inconsistent: commuting Pauli not in stabilizer group")
    return 1 if acc.phase == p.phase else -1


def is_valid(state) -> bool:
    """Check the symplectic structure and full GF(2) rank of the tableau."""
    n = state.n
    destabs = destabilizer_rows(state)
    stabs = stabilizer_rows(state)
    for i in range(n):
        for j in range(n):
            if not stabs[i].commutes(stabs[j]):
                return False
            anti = not destabs[i].commutes(stabs[j])
            if anti != (i == j):
                return False
            if i != j and not destabs[i].commutes(destabs[j]):
                return False
        if stabs[i].phase & 1:
            return False
    # rank over GF(2) of the 2n x 2n matrix
    rows = [r.x | (r.z << n) for r in destabs + stabs]
    rank = 0
    for bit in range(2 * n):
        piv = next((k for k in range(rank, len(rows)) if (rows[k] >> bit) & 1), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for k in range(len(rows)):
            if k != rank and (rows[k] >> bit) & 1:
                rows[k] ^= rows[rank]
        rank += 1
    return rank == 2 * n
