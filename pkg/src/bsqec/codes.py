"""Surface-17, Bacon-Shor-13 and general L x L Bacon-Shor code definitions.

Data qubits are labelled row-major, ``q = L*row + col``; ancillas follow the
data qubits.  For the distance-3 codes the ancilla labels match the ion-chain
arrangements published for these codes (Surface-17: X-ancillas 9, 11, 14, 16
and Z-ancillas 10, 12, 13, 15; Bacon-Shor-13: Z-ancillas 9, 10, X-ancillas
11, 12).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .stabilizer_sim import PauliString


@dataclass(frozen=True)
class Check:
    """A stabilizer generator measured by its own bare ancilla."""

    kind: str  # "X" or "Z"
    pauli: PauliString
    ancilla: int
    # two-qubit-gate order along the gauge bonds (data qubits)
    order: tuple[int, ...]

    @property
    def mask(self) -> int:
        return self.pauli.x if self.kind == "X" else self.pauli.z


@dataclass(frozen=True)
class CodeSpec:
    name: str
    L: int
    n_data: int
    n_ancilla: int
    data_coords: dict
    x_stabilizers: tuple[Check, ...]
    z_stabilizers: tuple[Check, ...]
    x_gauges: tuple[PauliString, ...]
    z_gauges: tuple[PauliString, ...]
    logical_x: PauliString
    logical_z: PauliString
    subsystem: bool
    # weight-2 bonds each stabilizer is built from (compass-model view)
    bonds: dict = field(default_factory=dict, compare=False)

    @property
    def n_qubits(self) -> int:
        return self.n_data + self.n_ancilla

    @property
    def stabilizers(self) -> tuple[Check, ...]:
        """All checks, Z-type first; this is the syndrome bit order."""
        return self.z_stabilizers + self.x_stabilizers

    @property
    def ancillas(self) -> tuple[int, ...]:
        return tuple(c.ancilla for c in self.stabilizers)

    def check_for_ancilla(self, a: int) -> Check:
        for c in self.stabilizers:
            if c.ancilla == a:
                return c
        raise KeyError(a)

    # -- integer fast paths ------------------------------------------------------
    def z_syndrome(self, xmask: int) -> int:
        """Bit i set iff an X error ``xmask`` flips Z-check i."""
        s = 0
        for i, c in enumerate(self.z_stabilizers):
            s |= ((c.mask & xmask).bit_count() & 1) << i
        return s

    def x_syndrome(self, zmask: int) -> int:
        s = 0
        for i, c in enumerate(self.x_stabilizers):
            s |= ((c.mask & zmask).bit_count() & 1) << i
        return s

    def gauge_generators(self):
        """(X-type, Z-type) generator masks of the group errors are reduced by.

        For the subsystem code this is the gauge group; for the surface code,
        which has no gauge qubits, it is the stabilizer group.
        """
        if self.subsystem:
            return [g.x for g in self.x_gauges], [g.z for g in self.z_gauges]
        return [c.mask for c in self.x_stabilizers], [c.mask for c in self.z_stabilizers]

    def __hash__(self):
        return hash((self.name, self.L))

    def __eq__(self, other):
        return isinstance(other, CodeSpec) and (self.name, self.L) == (other.name, other.L)


def _mask(qubits) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


def baconshor(L: int) -> CodeSpec:
    """Bacon-Shor code on an L x L lattice with one bare ancilla per stabilizer.

    Z-check ``i`` acts on rows ``i, i+1``; X-check ``j`` on columns ``j, j+1``.
    Gate orders walk the ZZ (vertical) or XX (horizontal) gauge pairs.
    """
    if L < 2:
        raise ValueError("Bacon-Shor needs L >= 2")
    n = L * L

    def q(r, c):
        return L * r + c

    z_checks = []
    for i in range(L - 1):
        order = tuple(v for c in range(L) for v in (q(i, c), q(i + 1, c)))
        z_checks.append(Check("Z", PauliString(n, 0, _mask(order)), n + i, order))
    x_checks = []
    for j in range(L - 1):
        order = tuple(v for r in range(L) for v in (q(r, j), q(r, j + 1)))
        x_checks.append(Check("X", PauliString(n, _mask(order), 0), n + (L - 1) + j, order))
    x_gauges = tuple(
        PauliString(n, _mask((q(r, c), q(r, c + 1))), 0) for r in range(L) for c in range(L - 1)
    )
    z_gauges = tuple(
        PauliString(n, 0, _mask((q(r, c), q(r + 1, c)))) for c in range(L) for r in range(L - 1)
    )
    return CodeSpec(
        name="baconshor13" if L == 3 else f"baconshor{L}",
        L=L,
        n_data=n,
        n_ancilla=2 * (L - 1),
        data_coords={q(r, c): (r, c) for r in range(L) for c in range(L)},
        x_stabilizers=tuple(x_checks),
        z_stabilizers=tuple(z_checks),
        x_gauges=x_gauges,
        z_gauges=z_gauges,
        logical_x=PauliString(n, _mask(q(r, 0) for r in range(L)), 0),
        logical_z=PauliString(n, 0, _mask(q(0, c) for c in range(L))),
        subsystem=True,
    )


def surface17() -> CodeSpec:
    """Rotated distance-3 surface code with 8 bare ancillas (labels 9-16).

    Weight-2 Z checks sit on the left/right boundary as vertical ZZ bonds,
    weight-2 X checks on the top/bottom boundary as horizontal XX bonds.  Each
    weight-4 check is the product of two parallel bonds of its type and is
    measured bond by bond, which steers hook errors perpendicular to the
    logical operator of the same type.
    """
    n = 9
    # (kind, ancilla, bonds in gate order)
    layout = [
        ("X", 9, ((1, 2),)),
        ("Z", 10, ((0, 3),)),
        ("X", 11, ((0, 1), (3, 4))),
        ("Z", 12, ((1, 4), (2, 5))),
        ("Z", 13, ((3, 6), (4, 7))),
        ("X", 14, ((4, 5), (7, 8))),
        ("Z", 15, ((5, 8),)),
        ("X", 16, ((6, 7),)),
    ]
    x_checks, z_checks, bonds = [], [], {}
    for kind, anc, bond_list in layout:
        order = tuple(v for b in bond_list for v in b)
        m = _mask(order)
        p = PauliString(n, m, 0) if kind == "X" else PauliString(n, 0, m)
        (x_checks if kind == "X" else z_checks).append(Check(kind, p, anc, order))
        bonds[anc] = bond_list
    x_bonds = tuple(PauliString(n, _mask(b), 0) for k, _, bl in layout if k == "X" for b in bl)
    z_bonds = tuple(PauliString(n, 0, _mask(b)) for k, _, bl in layout if k == "Z" for b in bl)
    return CodeSpec(
        name="surface17",
        L=3,
        n_data=n,
        n_ancilla=8,
        data_coords={3 * r + c: (r, c) for r in range(3) for c in range(3)},
        x_stabilizers=tuple(x_checks),
        z_stabilizers=tuple(z_checks),
        x_gauges=x_bonds,
        z_gauges=z_bonds,
        logical_x=PauliString(n, _mask((0, 3, 6)), 0),
        logical_z=PauliString(n, 0, _mask((0, 1, 2))),
        subsystem=False,
        bonds=bonds,
    )


def get_code(name: str) -> CodeSpec:
    """Look up a code by CLI-style name: ``surface17``, ``baconshor13`` or ``baconshor<L>``."""
    name = name.lower().replace("-", "").replace("_", "")
    if name in ("surface17", "s17"):
        return surface17()
    if name in ("baconshor13", "bs13"):
        return baconshor(3)
    if name.startswith("baconshor"):
        try:
            return baconshor(int(name[len("baconshor"):]))
        except ValueError:
            pass
    raise ValueError(f"unknown code {name!r}")


# -- syndromes -------------------------------------------------------------------
def _as_data_pauli(code, error):
    if error.n != code.n_data:
        raise ValueError(f"error acts on {error.n} qubits, code has {code.n_data} data qubits")
    return error


def syndrome_of(code: CodeSpec, error: PauliString) -> tuple[int, ...]:
    """Syndrome bits in ``code.stabilizers`` order (Z-checks, then X-checks)."""
    _as_data_pauli(code, error)
    return tuple(0 if error.commutes(c.pauli) else 1 for c in code.stabilizers)


def split_syndrome(code: CodeSpec, syndrome) -> tuple[tuple[int, ...], tuple[int, ...]]:
    nz = len(code.z_stabilizers)
    return tuple(syndrome[:nz]), tuple(syndrome[nz:])


# -- gauge reduction ---------------------------------------------------------------
@lru_cache(maxsize=None)
def _span(gens: tuple[int, ...]) -> tuple[int, ...]:
    elems = {0}
    for g in gens:
        elems |= {e ^ g for e in elems}
    return tuple(sorted(elems))


def _tiebreak_key(n, x, z):
    sup = x | z
    qs = tuple(q for q in range(n) if (sup >> q) & 1)
    letters = tuple(((x >> q) & 1) * 1 + ((z >> q) & 1) * 2 for q in qs)
    # X (1) before Y (3) before Z (2): map to 0, 1, 2
    rank = tuple({1: 0, 3: 1, 2: 2}[v] for v in letters)
    return (len(qs), qs, rank)


@lru_cache(maxsize=65536)
def _reduce_exhaustive(code, x, z):
    xg, zg = code.gauge_generators()
    n = code.n_data
    best = None
    best_w = n + 1
    for gx in _span(tuple(xg)):
        xx = x ^ gx
        for gz in _span(tuple(zg)):
            zz = z ^ gz
            w = (xx | zz).bit_count()
            if w > best_w:
                continue
            key = _tiebreak_key(n, xx, zz)
            if best is None or key < best[0]:
                best = (key, xx, zz)
                best_w = w
    return best[1], best[2]


def _reduce_parity(code, x, z):
    # X errors matter only through each row's parity, Z errors through each column's
    L = code.L
    odd_rows = [r for r in range(L) if (sum((x >> (L * r + c)) & 1 for c in range(L)) & 1)]
    odd_cols = [c for c in range(L) if (sum((z >> (L * r + c)) & 1 for r in range(L)) & 1)]
    rx = rz = 0
    k = min(len(odd_rows), len(odd_cols))
    for r, c in zip(odd_rows[:k], odd_cols[:k]):
        rx |= 1 << (L * r + c)
        rz |= 1 << (L * r + c)
    for r in odd_rows[k:]:
        rx |= 1 << (L * r)
    for c in odd_cols[k:]:
        rz |= 1 << c
    return rx, rz


def reduce_mod_gauge(code: CodeSpec, error: PauliString, method: str = "auto") -> PauliString:
    """Minimum-weight representative of ``error`` times the gauge group.

    ``method="exhaustive"`` searches the whole group (used for distance 3);
    ``"parity"`` applies the Bacon-Shor row/column parity rule, exact for
    any L.  Phases are dropped.
    """
    _as_data_pauli(code, error)
    if method == "auto":
        method = "exhaustive" if (not code.subsystem or code.L <= 3) else "parity"
    if method == "exhaustive":
        x, z = _reduce_exhaustive(code, error.x, error.z)
    elif method == "parity":
        if not code.subsystem:
            raise ValueError("parity reduction only applies to Bacon-Shor codes")
        x, z = _reduce_parity(code, error.x, error.z)
    else:
        raise ValueError(f"unknown method {method!r}")
    return PauliString(code.n_data, x, z)


def is_logical(code: CodeSpec, residual: PauliString) -> int:
    """1 if a syndrome-free ``residual`` acts nontrivially on the logical qubit."""
    if any(syndrome_of(code, residual)):
        raise ValueError("residual has a nonzero syndrome; correct it first")
    anti = (not residual.commutes(code.logical_z)) or (not residual.commutes(code.logical_x))
    return int(anti)
