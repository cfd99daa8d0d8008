"""Pure-Python tableau backend.

Same column-major layout as the compiled core, with each column stored as
an arbitrary-precision ``int`` bitmask over tableau rows.  Gates therefore
cost a handful of big-int operations regardless of qubit count.
"""

from . import ops


class Tableau:
    __slots__ = ("n", "X", "Z", "R", "_stab", "_destab", "_all")

    def __init__(self, n):
        if n < 1:
            raise ValueError("tableau needs at least one qubit")
        self.n = n
        self.X = [1 << i for i in range(n)]
        self.Z = [1 << (n + i) for i in range(n)]
        self.R = 0
        self._destab = (1 << n) - 1
        self._stab = self._destab << n
        self._all = self._destab | self._stab

    def copy(self):
        t = Tableau.__new__(Tableau)
        t.n = self.n
        t.X = list(self.X)
        t.Z = list(self.Z)
        t.R = self.R
        t._stab, t._destab, t._all = self._stab, self._destab, self._all
        return t

    def _check(self, q):
        if q < 0 or q >= self.n:
            raise IndexError(f"qubit {q} out of range for {self.n}-qubit tableau")

    # -- gates (unchecked) ---------------------------------------------------
    def _h(self, a):
        X, Z = self.X, self.Z
        self.R ^= X[a] & Z[a]
        X[a], Z[a] = Z[a], X[a]

    def _s(self, a):
        X, Z = self.X, self.Z
        self.R ^= X[a] & Z[a]
        Z[a] ^= X[a]

    def _pauli(self, a, code):
        if code & 1:
            self.R ^= self.Z[a]
        if code & 2:
            self.R ^= self.X[a]

    def _cnot(self, a, b):
        X, Z = self.X, self.Z
        self.R ^= X[a] & Z[b] & ~(X[b] ^ Z[a])
        X[b] ^= X[a]
        Z[a] ^= Z[b]

    def _rx(self, a, plus):
        X, Z = self.X, self.Z
        if plus:
            self.R ^= Z[a] & ~X[a]
        else:
            self.R ^= Z[a] & X[a]
        X[a] ^= Z[a]

    def _ry(self, a, plus):
        X, Z = self.X, self.Z
        if plus:
            self.R ^= X[a] & ~Z[a]
        else:
            self.R ^= Z[a] & ~X[a]
        X[a], Z[a] = Z[a], X[a]

    def _xx(self, a, b):
        X, Z = self.X, self.Z
        m = Z[a] ^ Z[b]
        self.R ^= m & ((Z[a] & ~X[a]) | (Z[b] & ~X[b]))
        X[a] ^= m
        X[b] ^= m

    def _rowsum_into(self, mask, p):
        # left-multiply rows in ``mask`` by row p, tracking i-powers bit-sliced mod 4
        X, Z = self.X, self.Z
        c0 = c1 = 0
        for q in range(self.n):
            x1 = (X[q] >> p) & 1
            z1 = (Z[q] >> p) & 1
            if not (x1 or z1):
                continue
            x2 = X[q]
            z2 = Z[q]
            if x1 and z1:
                plus = z2 & ~x2
                minus = x2 & ~z2
            elif x1:
                plus = z2 & x2
                minus = z2 & ~x2
            else:
                plus = x2 & ~z2
                minus = x2 & z2
            plus &= mask
            minus &= mask
            c1 ^= c0 & plus
            c0 ^= plus
            c1 ^= ~c0 & minus
            c0 ^= minus
            if x1:
                X[q] ^= mask
            if z1:
                Z[q] ^= mask
        if (self.R >> p) & 1:
            self.R ^= (c1 ^ mask) & mask
        else:
            self.R ^= c1 & mask

    def _measure_z(self, a, rand_bit):
        n = self.n
        X, Z = self.X, self.Z
        hits = X[a] & self._stab
        if hits:
            p = (hits & -hits).bit_length() - 1
            pb = 1 << p
            self._rowsum_into(X[a] & self._all & ~pb, p)
            d = p - n
            db = 1 << d
            for q in range(n):
                xq = X[q]
                zq = Z[q]
                xq = (xq | db) if xq & pb else (xq & ~db)
                zq = (zq | db) if zq & pb else (zq & ~db)
                X[q] = xq & ~pb
                Z[q] = zq & ~pb
            r = self.R
            r = (r | db) if r & pb else (r & ~db)
            Z[a] |= pb
            bit = rand_bit & 1
            self.R = (r | pb) if bit else (r & ~pb)
            return bit, False
        s = 2 * n
        sb = 1 << s
        for q in range(n):
            X[q] &= ~sb
            Z[q] &= ~sb
        self.R &= ~sb
        hits = X[a] & self._destab
        while hits:
            low = hits & -hits
            i = low.bit_length() - 1
            hits ^= low
            self._rowsum_into(sb, i + n)
        return (self.R >> s) & 1, True

    def _reset_z(self, a, rand_bit):
        out, _ = self._measure_z(a, rand_bit)
        if out:
            self._pauli(a, 1)

    # -- public API ------------------------------------------------------------
    def h(self, q):
        self._check(q)
        self._h(q)

    def s(self, q):
        self._check(q)
        self._s(q)

    def x(self, q):
        self._check(q)
        self._pauli(q, 1)

    def y(self, q):
        self._check(q)
        self._pauli(q, 3)

    def z(self, q):
        self._check(q)
        self._pauli(q, 2)

    def cnot(self, c, t):
        self._check(c)
        self._check(t)
        if c == t:
            raise ValueError("CNOT needs two distinct qubits")
        self._cnot(c, t)

    def rx(self, q, sign):
        self._check(q)
        self._rx(q, sign > 0)

    def ry(self, q, sign):
        self._check(q)
        self._ry(q, sign > 0)

    def xx(self, a, b):
        self._check(a)
        self._check(b)
        if a == b:
            raise ValueError("XX needs two distinct qubits")
        self._xx(a, b)

    def pauli(self, xmask, zmask):
        for q in range(self.n):
            code = ((xmask >> q) & 1) | (((zmask >> q) & 1) << 1)
            if code:
                self._pauli(q, code)

    def measure_z(self, q, rand_bit=0):
        self._check(q)
        return self._measure_z(q, rand_bit)

    def measure_x(self, q, rand_bit=0):
        self._check(q)
        self._h(q)
        out = self._measure_z(q, rand_bit)
        self._h(q)
        return out

    def reset_z(self, q, rand_bit=0):
        self._check(q)
        self._reset_z(q, rand_bit)

    def row(self, i):
        if i < 0 or i >= 2 * self.n:
            raise IndexError(i)
        xm = zm = 0
        for q in range(self.n):
            if (self.X[q] >> i) & 1:
                xm |= 1 << q
            if (self.Z[q] >> i) & 1:
                zm |= 1 << q
        return xm, zm, (self.R >> i) & 1

    def _do(self, op, a, b, bit):
        if op == ops.CNOT:
            self._cnot(a, b)
        elif op == ops.H:
            self._h(a)
        elif op == ops.XX:
            self._xx(a, b)
        elif op == ops.RX_P:
            self._rx(a, True)
        elif op == ops.RX_M:
            self._rx(a, False)
        elif op == ops.RY_P:
            self._ry(a, True)
        elif op == ops.RY_M:
            self._ry(a, False)
        elif op == ops.MEAS_Z:
            return self._measure_z(a, bit)[0]
        elif op == ops.MEAS_X:
            self._h(a)
            r = self._measure_z(a, bit)[0]
            self._h(a)
            return r
        elif op == ops.PREP_Z:
            self._reset_z(a, bit)
        elif op == ops.PREP_X:
            self._reset_z(a, bit)
            self._h(a)
        elif op == ops.S:
            self._s(a)
        elif op == ops.X:
            self._pauli(a, 1)
        elif op == ops.Y:
            self._pauli(a, 3)
        elif op == ops.Z:
            self._pauli(a, 2)
        elif op != ops.NOP:
            raise ValueError(f"unknown opcode {op}")
        return -1

    def _check_program(self, program, start, stop):
        for j in range(start, stop):
            a, b = int(program[j][1]), int(program[j][2])
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise IndexError("program qubit out of range")

    def run(self, program, fault_pos, fault_qubit, fault_code, rand_bits, out):
        m = len(program)
        self._check_program(program, 0, m)
        n_rand = n_out = 0
        for j in range(m):
            op = int(program[j][0])
            if op in ops.MEASURE_OPS:
                n_out += 1
            if op in ops.RANDOM_OPS:
                n_rand += 1
        if len(rand_bits) < n_rand or len(out) < n_out:
            raise ValueError("rand_bits/out buffers too small for program")
        if len(fault_qubit) != len(fault_pos) or len(fault_code) != len(fault_pos):
            raise ValueError("fault arrays differ in length")
        for q in fault_qubit:
            if q < 0 or q >= self.n:
                raise IndexError("fault qubit out of range")
        nf = len(fault_pos)
        fpos = [int(v) for v in fault_pos]
        fi = ri = oi = 0
        for j in range(m):
            while fi < nf and fpos[fi] == j:
                self._pauli(int(fault_qubit[fi]), int(fault_code[fi]))
                fi += 1
            op, a, b = int(program[j][0]), int(program[j][1]), int(program[j][2])
            if op in ops.RANDOM_OPS:
                r = self._do(op, a, b, int(rand_bits[ri]))
                ri += 1
                if r >= 0:
                    out[oi] = r
                    oi += 1
            else:
                self._do(op, a, b, 0)
        while fi < nf:
            self._pauli(int(fault_qubit[fi]), int(fault_code[fi]))
            fi += 1
        return oi

    def run_span(self, program, start, stop, faults, rand_words, out, synw):
        m = len(program)
        if not 0 <= start <= stop <= m:
            raise IndexError("span outside program")
        if len(rand_words) * 64 < stop or len(out) < stop or len(synw) < stop:
            raise ValueError("rand_words/out/synw must be indexable by op")
        self._check_program(program, start, stop)
        rows = [(int(k), int(q), int(c)) for k, q, c in faults]
        for _, q, _ in rows:
            if not 0 <= q < self.n:
                raise IndexError("fault qubit out of range")
        fi = 0
        nf = len(rows)
        syn = 0
        while fi < nf and rows[fi][0] < 2 * start:
            fi += 1
        for j in range(start, stop):
            while fi < nf and rows[fi][0] == 2 * j:
                self._pauli(rows[fi][1], rows[fi][2])
                fi += 1
            op, a, b = int(program[j][0]), int(program[j][1]), int(program[j][2])
            bit = (int(rand_words[j >> 6]) >> (j & 63)) & 1
            r = self._do(op, a, b, bit)
            if r >= 0:
                out[j] = r
                if r:
                    syn |= int(synw[j])
            while fi < nf and rows[fi][0] == 2 * j + 1:
                self._pauli(rows[fi][1], rows[fi][2])
                fi += 1
        return syn
