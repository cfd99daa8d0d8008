import numpy as np
import pytest

from bsqec.circuits import prep_bs13, simple_circuit
from bsqec.codes import baconshor, is_logical, surface17, syndrome_of
from bsqec.decoders import (
    QecSession,
    SimpleRunner,
    adjudicate,
    build_table,
    run_circuit,
    single_fault_failures,
    two_step_qec,
)
from bsqec.stabilizer_sim import PauliString
from helpers import execute

BS = baconshor(3)
S17 = surface17()


def test_bs13_table_entries():
    t = build_table(BS)
    assert t.x_corr[0] == 0 and t.z_corr[0] == 0
    assert t.x_corr[0b01] == 1 << 0  # Z syndrome 10 -> X0
    assert t.x_corr[0b11] == 1 << 3  # Z syndrome 11 -> X3
    assert "Z 10 -> X0" in t.dump()
    assert len(t) == 16


@pytest.mark.parametrize("code", [BS, S17], ids=["bs13", "s17"])
def test_table_is_sound(code):
    t = build_table(code)
    n = code.n_data
    for s, m in enumerate(t.x_corr):
        assert code.z_syndrome(m) == s
    for s, m in enumerate(t.z_corr):
        assert code.x_syndrome(m) == s
    for q in range(n):
        for letter in "XYZ":
            e = PauliString.single(n, letter, q)
            c = t[syndrome_of(code, e)]
            assert is_logical(code, (e * c).unsigned()) == 0


def test_table_rejects_large_lattice():
    with pytest.raises(ValueError):
        build_table(baconshor(5))


def test_adjudicate():
    zero = (0,) * 9
    assert adjudicate(BS, zero)
    for q in range(9):
        bits = [0] * 9
        bits[q] = 1
        assert adjudicate(BS, bits)
    bad = [0] * 9
    bad[0] = bad[4] = 1  # X errors in two different rows
    assert not adjudicate(BS, bad)
    assert adjudicate(BS, bad, frame=PauliString.single(9, "X", [0, 4]))
    with pytest.raises(ValueError):
        adjudicate(BS, zero[:4])


def _session(seed=0):
    state, _ = execute(prep_bs13(), seed=seed)
    return QecSession(BS, state=state, rng=np.random.default_rng(seed))


def test_two_step_quiet():
    s = two_step_qec(_session())
    assert s.rounds_run == 1 and s.frame.is_identity
    assert adjudicate(BS, s.readout(), s.frame)


def test_two_step_corrects_data_error():
    s = _session(1)
    s.inject(PauliString.single(9, "X", 4))
    two_step_qec(s)
    assert s.rounds_run == 2
    assert s.frame.x == 1 << 3  # X3 is gauge-equivalent to X4
    assert s.history[0][0] == 0b11
    assert adjudicate(BS, s.readout(), s.frame)


def test_runner_noiseless_passes():
    for code in (BS, S17):
        for rounds in (0, 1, 3):
            res = run_circuit(simple_circuit(code, rounds), code, rng=np.random.default_rng(rounds))
            assert not res.failed
            assert res.qec_rounds == [1] * rounds


def test_runner_skips_faults_in_unrun_segments():
    c = simple_circuit(BS, 1)
    seg = c.segment("qec1b")
    r = SimpleRunner(c, BS)
    big = [(seg.start + 1, True, q, 1) for q in range(3)]
    res = r.run(big, np.random.default_rng(0))
    assert "qec1b" not in res.executed and not res.failed


def test_runner_two_faults_can_fail():
    c = simple_circuit(BS, 1)
    m = c.segment("measure")
    res = SimpleRunner(c, BS).run([(m.start, False, 0, 1), (m.start, False, 4, 1)],
                                  np.random.default_rng(0))
    assert res.failed


def test_single_fault_small():
    n, fails = single_fault_failures(BS, rounds=0)
    assert n > 0 and fails == []
