import numpy as np
import pytest

from bsqec.circuits import (
    Circuit,
    LocatedOp,
    compile_to_ms,
    prep_bs13,
    prep_surface17,
    propagate,
    simple_circuit,
    syndrome_round,
)
from bsqec.codes import baconshor, reduce_mod_gauge, surface17
from bsqec.stabilizer_sim import PauliString, expectation
from helpers import execute

BS = baconshor(3)
S17 = surface17()


def _check_ops(circ, ancilla):
    return [op for op in circ.ops if ancilla in op.qubits and op.kind == "CNOT"]


def test_bs13_cnot_orders():
    rnd = syndrome_round(BS)
    z1 = [op.qubits[0] for op in _check_ops(rnd, BS.z_stabilizers[0].ancilla)]
    assert z1 == [0, 3, 1, 4, 2, 5]
    x2 = [op.qubits[1] for op in _check_ops(rnd, BS.x_stabilizers[1].ancilla)]
    assert x2 == [1, 2, 4, 5, 7, 8]


def test_round_totals():
    rnd = syndrome_round(BS)
    assert rnd.count("CNOT") == 24
    assert rnd.count("prep_z") + rnd.count("prep_x") == 4
    assert rnd.count("measure_z") + rnd.count("measure_x") == 4
    r17 = syndrome_round(S17)
    assert r17.count("CNOT") == 24
    assert r17.count("measure_z") + r17.count("measure_x") == 8
    assert syndrome_round(S17, kinds="X").count("CNOT") == 12


def test_naive_order_differs():
    a = syndrome_round(BS, "naive")
    z1 = [op.qubits[0] for op in _check_ops(a, BS.z_stabilizers[0].ancilla)]
    assert z1 == [0, 1, 2, 3, 4, 5]
    with pytest.raises(ValueError):
        syndrome_round(BS, "zigzag")


def test_prep_bs13_counts_and_state():
    c = prep_bs13()
    assert c.count("prep_z") == 9 and c.count("H") == 12 and c.count("CNOT") == 6
    state, _ = execute(c, seed=3)
    for chk in BS.stabilizers:
        assert expectation(state, chk.pauli.extend(BS.n_qubits)) == 1
    assert expectation(state, BS.logical_z.extend(BS.n_qubits)) == 1
    for g in BS.x_gauges:
        assert expectation(state, g.extend(BS.n_qubits)) == 1


def test_prep_surface17_noiseless_two_rounds():
    from bsqec.decoders import build_table

    table = build_table(S17)
    for seed in range(5):
        circ, frame = prep_surface17(np.random.default_rng(seed))
        assert frame.x == 0
        rounds = [s for s in circ.segments if s.role == "prep_round"]
        assert len(rounds) == 2
        state, outs = execute(circ, seed=seed)
        # both rounds agree without noise; the last one fixes the X-check signs
        assert outs[:4] == outs[4:]
        fz = table.z_corr[sum(b << i for i, b in enumerate(outs[4:]))]
        corr = PauliString(S17.n_data, 0, fz)
        for i, chk in enumerate(S17.x_stabilizers):
            sign = expectation(state, chk.pauli.extend(S17.n_qubits))
            assert sign == (-1) ** outs[4 + i]
            assert corr.commutes(chk.pauli) == (outs[4 + i] == 0)
        for chk in S17.z_stabilizers:
            assert expectation(state, chk.pauli.extend(S17.n_qubits)) == 1


def test_simple_circuit_segments():
    c = simple_circuit(BS, 2)
    assert [s.name for s in c.segments] == ["prep", "qec1a", "qec1b", "qec2a", "qec2b", "measure"]
    c0 = simple_circuit(S17, 0)
    assert [s.role for s in c0.segments] == ["prep"] + ["prep_round"] * 3 + ["measure"]
    with pytest.raises(ValueError):
        simple_circuit(BS, -1)


def test_compile_counts():
    m = compile_to_ms(syndrome_round(BS))
    assert m.count("XX") == 24
    assert all(op.kind in ("prep_z", "measure_z", "XX") or op.kind.startswith("R") for op in m.ops)
    one = Circuit(2, (LocatedOp(0, "CNOT", (0, 1)),))
    mm = compile_to_ms(one)
    assert [op.kind for op in mm.ops] == ["RY+90", "XX", "RX-90", "RX-90", "RY-90"]


def test_compiled_round_same_outcomes():
    prep = prep_bs13()
    for order in ("gauge",):
        rnd = syndrome_round(BS, order)
        for circ in (rnd, compile_to_ms(rnd)):
            state, _ = execute(prep, seed=1)
            _, outs = execute(circ, state, seed=2)
            assert outs == [0, 0, 0, 0]


def test_compiled_segments_follow():
    c = simple_circuit(BS, 1)
    m = compile_to_ms(c)
    assert [s.name for s in m.segments] == [s.name for s in c.segments]
    assert m.segments[0].start == 0 and m.segments[-1].stop == len(m.ops)
    for a, b in zip(m.segments, m.segments[1:]):
        assert a.stop == b.start


def test_text_round_trip():
    for c in (simple_circuit(BS, 1), simple_circuit(S17, 1), compile_to_ms(simple_circuit(BS, 1))):
        back = Circuit.from_text(c.to_text(), c.code_name)
        assert back.ops == tuple(LocatedOp(o.location_id, o.kind, o.qubits) for o in c.ops)
        assert back.segments == c.segments
    with pytest.raises(ValueError):
        Circuit.from_text("0 H 0\n")


def test_circuit_validation():
    with pytest.raises(IndexError):
        Circuit(2, (LocatedOp(0, "H", (3,)),))
    with pytest.raises(ValueError):
        LocatedOp(0, "CNOT", (1, 1))
    with pytest.raises(ValueError):
        LocatedOp(0, "T", (0,))
    with pytest.raises(ValueError):
        Circuit(2, (LocatedOp(0, "H", (0,)), LocatedOp(0, "H", (1,))))


def test_propagate_examples():
    c = Circuit(2, (LocatedOp(0, "CNOT", (0, 1)), LocatedOp(1, "measure_z", (1,))))
    final, flips = propagate(c, PauliString.single(2, "X", 0), 0)
    assert final.label() == "+XX" and flips == [1]
    final, flips = propagate(c, PauliString.single(2, "Z", 1), 0)
    assert final.label() == "+ZZ" and flips == []


def test_naive_ancilla_fault_is_weight_two():
    # mid-way X fault on the first X-check ancilla under the naive order
    rnd = syndrome_round(BS, "naive")
    anc = BS.x_stabilizers[0].ancilla
    idx = [j for j, op in enumerate(rnd.ops) if op.kind == "CNOT" and op.qubits[0] == anc]
    final, _ = propagate(rnd, PauliString.single(BS.n_qubits, "X", anc), idx[2] + 1)
    red = reduce_mod_gauge(BS, final.restrict(BS.n_data))
    assert red.weight >= 2
