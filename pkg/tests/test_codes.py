import pytest
from hypothesis import given, settings, strategies as st

from bsqec.codes import (
    baconshor,
    get_code,
    is_logical,
    reduce_mod_gauge,
    split_syndrome,
    surface17,
    syndrome_of,
)
from bsqec.stabilizer_sim import PauliString

BS = baconshor(3)
S17 = surface17()


def single(n, letter, qs):
    return PauliString.single(n, letter, qs)


def test_surface17_structure():
    assert len(S17.x_stabilizers) == 4 and len(S17.z_stabilizers) == 4
    assert {c.pauli.weight for c in S17.stabilizers} == {2, 4}
    for a in S17.stabilizers:
        for b in S17.stabilizers:
            assert a.pauli.commutes(b.pauli)
    assert sorted(S17.ancillas) == list(range(9, 17))
    assert not S17.logical_x.commutes(S17.logical_z)


def test_baconshor_structure():
    zs = [set(c.pauli.support) for c in BS.z_stabilizers]
    assert zs == [set(range(0, 6)), set(range(3, 9))]
    assert len(BS.stabilizers) == 4
    assert all(c.pauli.weight == 6 for c in BS.stabilizers)
    b5 = baconshor(5)
    assert len(b5.stabilizers) == 8
    assert all(c.pauli.weight == 10 for c in b5.stabilizers)
    assert len(b5.x_gauges) + len(b5.z_gauges) == 40
    for g in b5.x_gauges + b5.z_gauges:
        for c in b5.stabilizers:
            assert g.commutes(c.pauli)
        assert g.commutes(b5.logical_x) and g.commutes(b5.logical_z)


def test_syndrome_examples():
    zs, xs = split_syndrome(BS, syndrome_of(BS, single(9, "X", [4])))
    assert zs == (1, 1) and xs == (0, 0)
    assert syndrome_of(BS, PauliString.identity(9)) == (0, 0, 0, 0)
    _, xs = split_syndrome(BS, syndrome_of(BS, single(9, "Z", [0])))
    assert xs == (1, 0)
    assert BS.z_syndrome(1 << 4) == 0b11


def test_reduce_examples():
    assert reduce_mod_gauge(BS, single(9, "Z", [2, 5])).is_identity
    r = reduce_mod_gauge(BS, single(9, "Z", [4, 2, 5]))
    assert r.weight == 1
    # Z1 Z4 is itself a gauge, so either column-1 qubit is a valid representative
    assert is_logical(BS, (r * single(9, "Z", [4])).unsigned()) == 0
    for code in (BS, S17):
        for q in range(9):
            for letter in "XYZ":
                assert reduce_mod_gauge(code, single(9, letter, [q])).weight == 1


def test_is_logical_examples():
    assert is_logical(BS, single(9, "X", [0, 3, 6])) == 1
    for g in BS.x_gauges + BS.z_gauges:
        assert is_logical(BS, g) == 0
    assert is_logical(BS, single(9, "Z", [3, 4, 5])) == 1
    with pytest.raises(ValueError):
        is_logical(BS, single(9, "X", [0]))


def test_get_code():
    assert get_code("bs13") == BS
    assert get_code("Surface-17") == S17
    assert get_code("baconshor5").L == 5
    with pytest.raises(ValueError):
        get_code("steane")
    with pytest.raises(ValueError):
        baconshor(1)


def test_size_mismatch():
    with pytest.raises(ValueError):
        syndrome_of(BS, PauliString.identity(4))


paulis9 = st.tuples(st.integers(0, 2**9 - 1), st.integers(0, 2**9 - 1))
paulis25 = st.tuples(st.integers(0, 2**25 - 1), st.integers(0, 2**25 - 1))


@settings(max_examples=80, deadline=None)
@given(paulis9)
def test_reduction_stays_in_coset(xz):
    for code in (BS, S17):
        e = PauliString(9, *xz)
        r = reduce_mod_gauge(code, e)
        assert syndrome_of(code, r) == syndrome_of(code, e)
        assert is_logical(code, (e * r).unsigned()) == 0
        assert r.weight <= e.weight


@settings(max_examples=80, deadline=None)
@given(paulis9)
def test_parity_rule_matches_exhaustive_weight(xz):
    e = PauliString(9, *xz)
    a = reduce_mod_gauge(BS, e, "exhaustive")
    b = reduce_mod_gauge(BS, e, "parity")
    assert a.weight == b.weight
    assert is_logical(BS, (a * b).unsigned()) == 0


@settings(max_examples=50, deadline=None)
@given(paulis25)
def test_parity_rule_large_lattice(xz):
    code = baconshor(5)
    e = PauliString(25, *xz)
    r = reduce_mod_gauge(code, e)
    assert syndrome_of(code, r) == syndrome_of(code, e)
    assert is_logical(code, (e * r).unsigned()) == 0
