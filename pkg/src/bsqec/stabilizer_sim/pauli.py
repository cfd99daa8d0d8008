"""Signed Pauli strings in X/Z bitmask form."""

from __future__ import annotations

_LETTERS = "IXZY"  # index = x | (z << 1)


def _mul_phase(x1, z1, x2, z2):
    """Exponent of i (mod 4) picked up by the letter-wise product P1 * P2."""
    plus = (x1 & z1 & z2 & ~x2) | (x1 & ~z1 & z2 & x2) | (~x1 & z1 & x2 & ~z2)
    minus = (x1 & z1 & x2 & ~z2) | (x1 & ~z1 & z2 & ~x2) | (~x1 & z1 & x2 & z2)
    return (plus.bit_count() - minus.bit_count()) & 3


class PauliString:
    """An n-qubit Pauli operator ``i**phase * P_0 (x) ... (x) P_{n-1}``.

    Letters are stored as two bitmasks: qubit ``q`` carries X if bit ``q`` of
    ``x`` is set, Z if bit ``q`` of ``z`` is set, and Y if both are set.
    Hermitian operators have ``phase`` in {0, 2}; products of anticommuting
    operators can yield odd phases, which ``sign`` refuses to report.
    """

    __slots__ = ("n", "x", "z", "phase")

    def __init__(self, n: int, x: int = 0, z: int = 0, phase: int = 0):
        if n < 0:
            raise ValueError("negative qubit count")
        full = (1 << n) - 1
        if x & ~full or z & ~full:
            raise ValueError("Pauli support exceeds qubit count")
        self.n = n
        self.x = x
        self.z = z
        self.phase = phase & 3

    # -- constructors ----------------------------------------------------------
    @classmethod
    def identity(cls, n):
        return cls(n)

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        """Parse ``"+XIZY"`` / ``"-ZZ"`` style labels (qubit 0 first)."""
        phase = 0
        if label[:1] in "+-":
            phase = 2 if label[0] == "-" else 0
            label = label[1:]
        x = z = 0
        for q, ch in enumerate(label):
            if ch not in "IXYZ_":
                raise ValueError(f"bad Pauli letter {ch!r}")
            if ch in "XY":
                x |= 1 << q
            if ch in "ZY":
                z |= 1 << q
        return cls(len(label), x, z, phase)

    @classmethod
    def single(cls, n: int, letter: str, qubits) -> PauliString:
        """``letter`` on every qubit in ``qubits``, identity elsewhere."""
        if isinstance(qubits, int):
            qubits = (qubits,)
        mask = 0
        for q in qubits:
            if not 0 <= q < n:
                raise IndexError(q)
            mask |= 1 << q
        return cls(n, mask if letter in "XY" else 0, mask if letter in "ZY" else 0)

    # -- basic properties --------------------------------------------------------
    @property
    def sign(self) -> int:
        if self.phase & 1:
            raise ValueError("operator is anti-Hermitian (phase ±i)")
        return -1 if self.phase == 2 else 1

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def support(self) -> tuple[int, ...]:
        m = self.x | self.z
        return tuple(q for q in range(self.n) if (m >> q) & 1)

    def letter(self, q: int) -> str:
        return _LETTERS[((self.x >> q) & 1) | (((self.z >> q) & 1) << 1)]

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def unsigned(self) -> PauliString:
        return PauliString(self.n, self.x, self.z)

    def x_part(self) -> PauliString:
        return PauliString(self.n, self.x, 0)

    def z_part(self) -> PauliString:
        return PauliString(self.n, 0, self.z)

    # -- algebra -------------------------------------------------------------------
    def _same_size(self, other):
        if self.n != other.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")

    def __mul__(self, other: PauliString) -> PauliString:
        self._same_size(other)
        ph = self.phase + other.phase + _mul_phase(self.x, self.z, other.x, other.z)
        return PauliString(self.n, self.x ^ other.x, self.z ^ other.z, ph)

    def commutes(self, other: PauliString) -> bool:
        self._same_size(other)
        return ((self.x & other.z) ^ (self.z & other.x)).bit_count() % 2 == 0

    def equal_up_to_phase(self, other: PauliString) -> bool:
        return self.n == other.n and self.x == other.x and self.z == other.z

    def __eq__(self, other):
        if not isinstance(other, PauliString):
            return NotImplemented
        return (self.n, self.x, self.z, self.phase) == (other.n, other.x, other.z, other.phase)

    def __hash__(self):
        return hash((self.n, self.x, self.z, self.phase))

    def restrict(self, n: int) -> PauliString:
        """Drop qubits ``>= n`` (e.g. ancillas after they are measured)."""
        full = (1 << n) - 1
        return PauliString(n, self.x & full, self.z & full, self.phase)

    def extend(self, n: int) -> PauliString:
        if n < self.n:
            raise ValueError("cannot extend to fewer qubits")
        return PauliString(n, self.x, self.z, self.phase)

    # -- Heisenberg propagation through Cliffords ------------------------------
    def conjugated(self, kind: str, qubits) -> PauliString:
        """Return ``U P U^dagger`` for the Clifford ``kind`` acting on ``qubits``."""
        x, z, ph = self.x, self.z, self.phase
        a = qubits[0]
        xa = (x >> a) & 1
        za = (z >> a) & 1
        flip = 0
        if kind == "H":
            flip = xa & za
            x, z = _setbit(x, a, za), _setbit(z, a, xa)
        elif kind == "S":
            flip = xa & za
            z = _setbit(z, a, za ^ xa)
        elif kind in ("X", "Y", "Z"):
            code = {"X": 1, "Z": 2, "Y": 3}[kind]
            flip = ((code & 1) & za) ^ (((code >> 1) & 1) & xa)
        elif kind == "RX+90":
            flip = za & (1 - xa)
            x = _setbit(x, a, xa ^ za)
        elif kind == "RX-90":
            flip = za & xa
            x = _setbit(x, a, xa ^ za)
        elif kind == "RY+90":
            flip = xa & (1 - za)
            x, z = _setbit(x, a, za), _setbit(z, a, xa)
        elif kind == "RY-90":
            flip = za & (1 - xa)
            x, z = _setbit(x, a, za), _setbit(z, a, xa)
        elif kind == "CNOT":
            b = qubits[1]
            xb = (x >> b) & 1
            zb = (z >> b) & 1
            flip = xa & zb & (1 - (xb ^ za))
            x = _setbit(x, b, xb ^ xa)
            z = _setbit(z, a, za ^ zb)
        elif kind == "XX":
            b = qubits[1]
            xb = (x >> b) & 1
            zb = (z >> b) & 1
            m = za ^ zb
            flip = m & ((za & (1 - xa)) | (zb & (1 - xb)))
            x = _setbit(x, a, xa ^ m)
            x = _setbit(x, b, xb ^ m)
        else:
            raise ValueError(f"cannot conjugate by {kind!r}")
        return PauliString(self.n, x, z, ph + 2 * flip)

    # -- presentation ----------------------------------------------------------------
    def label(self, signed: bool = True) -> str:
        body = "".join(self.letter(q) for q in range(self.n))
        if not signed:
            return body
        return ["+", "+i", "-", "-i"][self.phase] + body

    def sparse(self) -> str:
        """Compact form such as ``X0*Z3*Y5`` (``I`` for the identity)."""
        parts = [f"{self.letter(q)}{q}" for q in self.support]
        return "*".join(parts) if parts else "I"

    def __repr__(self):
        return f"PauliString({self.label()!r})"


def _setbit(v, q, bit):
    return (v | (1 << q)) if bit else (v & ~(1 << q))
