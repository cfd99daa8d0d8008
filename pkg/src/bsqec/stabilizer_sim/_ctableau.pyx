# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Aaronson-Gottesman tableau.

Column-major layout: for every qubit ``q`` the arrays ``X[q]`` and ``Z[q]``
are bitmasks over tableau rows (rows ``0..n-1`` destabilizers, ``n..2n-1``
stabilizers, ``2n`` scratch).  Single-qubit and two-qubit Cliffords touch
two columns only, so a gate costs ``O(W)`` word operations where ``W`` is
the number of 64-bit words needed for ``2n + 1`` rows.
"""

from libc.stdint cimport uint64_t, int32_t, int64_t, uint8_t
from libc.stdlib cimport calloc, free
from libc.string cimport memcpy, memset

import numpy as np

# opcodes shared with the pure-Python backend (see ``ops.py``)
cdef enum:
    OP_PREP_Z = 0
    OP_PREP_X = 1
    OP_H = 2
    OP_S = 3
    OP_X = 4
    OP_Y = 5
    OP_Z = 6
    OP_CNOT = 7
    OP_RX_P = 8
    OP_RX_M = 9
    OP_RY_P = 10
    OP_RY_M = 11
    OP_XX = 12
    OP_MEAS_Z = 13
    OP_MEAS_X = 14
    OP_NOP = 15


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int _ctz(uint64_t v) noexcept nogil:
    return __builtin_ctzll(v)


cdef class Tableau:
    cdef readonly int n
    cdef int W
    cdef uint64_t* X
    cdef uint64_t* Z
    cdef uint64_t* R
    cdef uint64_t* c0
    cdef uint64_t* c1
    cdef uint64_t* M
    cdef uint64_t* stab_mask
    cdef uint64_t* destab_mask
    cdef uint64_t* all_mask

    def __cinit__(self, int n):
        if n < 1:
            raise ValueError("tableau needs at least one qubit")
        self.n = n
        self.W = (2 * n + 1 + 63) // 64
        cdef int W = self.W
        self.X = <uint64_t*> calloc(n * W, sizeof(uint64_t))
        self.Z = <uint64_t*> calloc(n * W, sizeof(uint64_t))
        self.R = <uint64_t*> calloc(W, sizeof(uint64_t))
        self.c0 = <uint64_t*> calloc(W, sizeof(uint64_t))
        self.c1 = <uint64_t*> calloc(W, sizeof(uint64_t))
        self.M = <uint64_t*> calloc(W, sizeof(uint64_t))
        self.stab_mask = <uint64_t*> calloc(W, sizeof(uint64_t))
        self.destab_mask = <uint64_t*> calloc(W, sizeof(uint64_t))
        self.all_mask = <uint64_t*> calloc(W, sizeof(uint64_t))
        if (self.X == NULL or self.Z == NULL or self.R == NULL or self.c0 == NULL
                or self.c1 == NULL or self.M == NULL or self.stab_mask == NULL
                or self.destab_mask == NULL or self.all_mask == NULL):
            raise MemoryError()
        cdef int i
        for i in range(n):
            self._setbit(self.X, i, i)
            self._setbit(self.Z, i, n + i)
            self._setmask(self.destab_mask, i)
            self._setmask(self.stab_mask, n + i)
            self._setmask(self.all_mask, i)
            self._setmask(self.all_mask, n + i)

    def __dealloc__(self):
        free(self.X)
        free(self.Z)
        free(self.R)
        free(self.c0)
        free(self.c1)
        free(self.M)
        free(self.stab_mask)
        free(self.destab_mask)
        free(self.all_mask)

    # -- bit helpers -------------------------------------------------------
    cdef inline void _setbit(self, uint64_t* col, int q, int row) noexcept nogil:
        col[q * self.W + (row >> 6)] |= (<uint64_t> 1) << (row & 63)

    cdef inline void _clearbit(self, uint64_t* col, int q, int row) noexcept nogil:
        col[q * self.W + (row >> 6)] &= ~((<uint64_t> 1) << (row & 63))

    cdef inline int _getbit(self, uint64_t* col, int q, int row) noexcept nogil:
        return <int> ((col[q * self.W + (row >> 6)] >> (row & 63)) & 1)

    cdef inline void _setmask(self, uint64_t* m, int row) noexcept nogil:
        m[row >> 6] |= (<uint64_t> 1) << (row & 63)

    cdef inline int _rbit(self, int row) noexcept nogil:
        return <int> ((self.R[row >> 6] >> (row & 63)) & 1)

    cdef inline void _set_rbit(self, int row, int v) noexcept nogil:
        cdef uint64_t b = (<uint64_t> 1) << (row & 63)
        if v:
            self.R[row >> 6] |= b
        else:
            self.R[row >> 6] &= ~b

    def copy(self):
        cdef Tableau t = Tableau(self.n)
        memcpy(t.X, self.X, self.n * self.W * sizeof(uint64_t))
        memcpy(t.Z, self.Z, self.n * self.W * sizeof(uint64_t))
        memcpy(t.R, self.R, self.W * sizeof(uint64_t))
        return t

    # -- gates ---------------------------------------------------------------
    cdef inline void _h(self, int a) noexcept nogil:
        cdef int w
        cdef uint64_t* xa = self.X + a * self.W
        cdef uint64_t* za = self.Z + a * self.W
        cdef uint64_t t
        for w in range(self.W):
            self.R[w] ^= xa[w] & za[w]
            t = xa[w]
            xa[w] = za[w]
            za[w] = t

    cdef inline void _s(self, int a) noexcept nogil:
        cdef int w
        cdef uint64_t* xa = self.X + a * self.W
        cdef uint64_t* za = self.Z + a * self.W
        for w in range(self.W):
            self.R[w] ^= xa[w] & za[w]
            za[w] ^= xa[w]

    cdef inline void _pauli(self, int a, int code) noexcept nogil:
        # code bit 0 -> X component, bit 1 -> Z component
        cdef int w
        cdef uint64_t* xa = self.X + a * self.W
        cdef uint64_t* za = self.Z + a * self.W
        for w in range(self.W):
            if code & 1:
                self.R[w] ^= za[w]
            if code & 2:
                self.R[w] ^= xa[w]

    cdef inline void _cnot(self, int a, int b) noexcept nogil:
        cdef int w
        cdef uint64_t* xa = self.X + a * self.W
        cdef uint64_t* za = self.Z + a * self.W
        cdef uint64_t* xb = self.X + b * self.W
        cdef uint64_t* zb = self.Z + b * self.W
        for w in range(self.W):
            self.R[w] ^= xa[w] & zb[w] & ~(xb[w] ^ za[w])
            xb[w] ^= xa[w]
            za[w] ^= zb[w]

    cdef inline void _rx(self, int a, int plus) noexcept nogil:
        cdef int w
        cdef uint64_t* xa = self.X + a * self.W
        cdef uint64_t* za = self.Z + a * self.W
        for w in range(self.W):
            if plus:
                self.R[w] ^= za[w] & ~xa[w]
            else:
                self.R[w] ^= za[w] & xa[w]
            xa[w] ^= za[w]

    cdef inline void _ry(self, int a, int plus) noexcept nogil:
        cdef int w
        cdef uint64_t* xa = self.X + a * self.W
        cdef uint64_t* za = self.Z + a * self.W
        cdef uint64_t t
        for w in range(self.W):
            if plus:
                self.R[w] ^= xa[w] & ~za[w]
            else:
                self.R[w] ^= za[w] & ~xa[w]
            t = xa[w]
            xa[w] = za[w]
            za[w] = t

    cdef inline void _xx(self, int a, int b) noexcept nogil:
        cdef int w
        cdef uint64_t* xa = self.X + a * self.W
        cdef uint64_t* za = self.Z + a * self.W
        cdef uint64_t* xb = self.X + b * self.W
        cdef uint64_t* zb = self.Z + b * self.W
        cdef uint64_t m
        for w in range(self.W):
            m = za[w] ^ zb[w]
            self.R[w] ^= m & ((za[w] & ~xa[w]) | (zb[w] & ~xb[w]))
            xa[w] ^= m
            xb[w] ^= m

    # -- row products --------------------------------------------------------
    cdef void _rowsum_into(self, int p) noexcept nogil:
        """Left-multiply every row selected by ``self.M`` by row ``p``."""
        cdef int W = self.W
        cdef int q, w
        cdef int pw = p >> 6
        cdef uint64_t pb = (<uint64_t> 1) << (p & 63)
        cdef uint64_t *xq
        cdef uint64_t *zq
        cdef uint64_t m, x2, z2, plus, minus
        cdef int x1, z1
        for w in range(W):
            self.c0[w] = 0
            self.c1[w] = 0
        for q in range(self.n):
            xq = self.X + q * W
            zq = self.Z + q * W
            x1 = (xq[pw] & pb) != 0
            z1 = (zq[pw] & pb) != 0
            if not (x1 or z1):
                continue
            for w in range(W):
                m = self.M[w]
                if m == 0:
                    continue
                x2 = xq[w]
                z2 = zq[w]
                if x1 and z1:
                    plus = z2 & ~x2
                    minus = x2 & ~z2
                elif x1:
                    plus = z2 & x2
                    minus = z2 & ~x2
                else:
                    plus = x2 & ~z2
                    minus = x2 & z2
                plus &= m
                minus &= m
                self.c1[w] ^= self.c0[w] & plus
                self.c0[w] ^= plus
                self.c1[w] ^= ~self.c0[w] & minus
                self.c0[w] ^= minus
                if x1:
                    xq[w] ^= m
                if z1:
                    zq[w] ^= m
        cdef uint64_t rp = (self.R[pw] & pb) != 0
        for w in range(W):
            m = self.M[w]
            if rp:
                self.R[w] ^= (self.c1[w] ^ m) & m
            else:
                self.R[w] ^= self.c1[w] & m

    cdef int _measure_z(self, int a, int rand_bit, int* deterministic) noexcept nogil:
        cdef int W = self.W
        cdef int n = self.n
        cdef uint64_t* xa = self.X + a * W
        cdef int w, p = -1, q, s
        cdef uint64_t hits
        for w in range(W):
            hits = xa[w] & self.stab_mask[w]
            if hits:
                p = (w << 6) + _ctz(hits)
                break
        if p >= 0:
            deterministic[0] = 0
            for w in range(W):
                self.M[w] = xa[w] & self.all_mask[w]
            self.M[p >> 6] &= ~((<uint64_t> 1) << (p & 63))
            self._rowsum_into(p)
            # destabilizer p-n takes the old stabilizer row p
            for q in range(n):
                if self._getbit(self.X, q, p):
                    self._setbit(self.X, q, p - n)
                else:
                    self._clearbit(self.X, q, p - n)
                if self._getbit(self.Z, q, p):
                    self._setbit(self.Z, q, p - n)
                else:
                    self._clearbit(self.Z, q, p - n)
                self._clearbit(self.X, q, p)
                self._clearbit(self.Z, q, p)
            self._set_rbit(p - n, self._rbit(p))
            self._setbit(self.Z, a, p)
            self._set_rbit(p, rand_bit & 1)
            return rand_bit & 1
        deterministic[0] = 1
        s = 2 * n
        for q in range(n):
            self._clearbit(self.X, q, s)
            self._clearbit(self.Z, q, s)
        self._set_rbit(s, 0)
        for w in range(W):
            self.M[w] = 0
        self._setmask(self.M, s)
        for w in range(W):
            hits = xa[w] & self.destab_mask[w]
            while hits:
                p = (w << 6) + _ctz(hits)
                hits &= hits - 1
                self._rowsum_into(p + n)
        return self._rbit(s)

    cdef inline void _reset_z(self, int a, int rand_bit) noexcept nogil:
        cdef int det
        if self._measure_z(a, rand_bit, &det):
            self._pauli(a, 1)

    # -- Python API ----------------------------------------------------------
    cdef inline void _check(self, int q) except *:
        if q < 0 or q >= self.n:
            raise IndexError(f"qubit {q} out of range for {self.n}-qubit tableau")

    def h(self, int q):
        self._check(q)
        self._h(q)

    def s(self, int q):
        self._check(q)
        self._s(q)

    def x(self, int q):
        self._check(q)
        self._pauli(q, 1)

    def y(self, int q):
        self._check(q)
        self._pauli(q, 3)

    def z(self, int q):
        self._check(q)
        self._pauli(q, 2)

    def cnot(self, int c, int t):
        self._check(c)
        self._check(t)
        if c == t:
            raise ValueError("CNOT needs two distinct qubits")
        self._cnot(c, t)

    def rx(self, int q, int sign):
        self._check(q)
        self._rx(q, sign > 0)

    def ry(self, int q, int sign):
        self._check(q)
        self._ry(q, sign > 0)

    def xx(self, int a, int b):
        self._check(a)
        self._check(b)
        if a == b:
            raise ValueError("XX needs two distinct qubits")
        self._xx(a, b)

    def pauli(self, xmask, zmask):
        """Apply the Pauli ``X^xmask Z^zmask`` (bitmasks over qubits, phase ignored)."""
        cdef int q
        for q in range(self.n):
            code = ((xmask >> q) & 1) | (((zmask >> q) & 1) << 1)
            if code:
                self._pauli(q, code)

    def measure_z(self, int q, int rand_bit=0):
        cdef int det
        self._check(q)
        out = self._measure_z(q, rand_bit, &det)
        return out, bool(det)

    def measure_x(self, int q, int rand_bit=0):
        cdef int det
        self._check(q)
        self._h(q)
        out = self._measure_z(q, rand_bit, &det)
        self._h(q)
        return out, bool(det)

    def reset_z(self, int q, int rand_bit=0):
        self._check(q)
        self._reset_z(q, rand_bit)

    def row(self, int i):
        """Return ``(xmask, zmask, sign_bit)`` of tableau row ``i``."""
        if i < 0 or i >= 2 * self.n:
            raise IndexError(i)
        xm = 0
        zm = 0
        cdef int q
        for q in range(self.n):
            if self._getbit(self.X, q, i):
                xm |= 1 << q
            if self._getbit(self.Z, q, i):
                zm |= 1 << q
        return xm, zm, self._rbit(i)

    cdef int _do(self, int op, int a, int b, int bit) noexcept nogil:
        """Apply one encoded op; returns the outcome for measurements, else -1."""
        cdef int det, r
        if op == OP_CNOT:
            self._cnot(a, b)
        elif op == OP_H:
            self._h(a)
        elif op == OP_XX:
            self._xx(a, b)
        elif op == OP_RX_P:
            self._rx(a, 1)
        elif op == OP_RX_M:
            self._rx(a, 0)
        elif op == OP_RY_P:
            self._ry(a, 1)
        elif op == OP_RY_M:
            self._ry(a, 0)
        elif op == OP_MEAS_Z:
            return self._measure_z(a, bit, &det)
        elif op == OP_MEAS_X:
            self._h(a)
            r = self._measure_z(a, bit, &det)
            self._h(a)
            return r
        elif op == OP_PREP_Z:
            self._reset_z(a, bit)
        elif op == OP_PREP_X:
            self._reset_z(a, bit)
            self._h(a)
        elif op == OP_S:
            self._s(a)
        elif op == OP_X:
            self._pauli(a, 1)
        elif op == OP_Y:
            self._pauli(a, 3)
        elif op == OP_Z:
            self._pauli(a, 2)
        return -1

    cdef void _check_program(self, const int32_t[:, ::1] program, Py_ssize_t start,
                             Py_ssize_t stop) except *:
        cdef Py_ssize_t j
        for j in range(start, stop):
            if (program[j, 1] < 0 or program[j, 1] >= self.n or program[j, 2] < 0
                    or program[j, 2] >= self.n):
                raise IndexError("program qubit out of range")
            if program[j, 0] < 0 or program[j, 0] > OP_NOP:
                raise ValueError(f"unknown opcode {program[j, 0]}")

    def run(self, const int32_t[:, ::1] program, const int32_t[::1] fault_pos,
            const int32_t[::1] fault_qubit, const uint8_t[::1] fault_code,
            const uint8_t[::1] rand_bits, uint8_t[::1] out):
        """Execute an encoded op program with Pauli faults injected.

        Faults with ``fault_pos == j`` are applied immediately before op ``j``
        (``j == len(program)`` means after the last op).  ``rand_bits`` holds
        one bit per measurement/preparation op; ``out`` receives one outcome
        per measurement op.  Returns the number of outcomes written.
        """
        cdef Py_ssize_t m = program.shape[0]
        cdef Py_ssize_t nf = fault_pos.shape[0]
        cdef Py_ssize_t j, fi = 0, ri = 0, oi = 0
        cdef int op, r
        cdef Py_ssize_t n_rand = 0, n_out = 0
        self._check_program(program, 0, m)
        for j in range(m):
            op = program[j, 0]
            if op == OP_MEAS_Z or op == OP_MEAS_X:
                n_out += 1
                n_rand += 1
            elif op == OP_PREP_Z or op == OP_PREP_X:
                n_rand += 1
        if rand_bits.shape[0] < n_rand or out.shape[0] < n_out:
            raise ValueError("rand_bits/out buffers too small for program")
        if fault_qubit.shape[0] != nf or fault_code.shape[0] != nf:
            raise ValueError("fault arrays differ in length")
        for fi in range(nf):
            if fault_qubit[fi] < 0 or fault_qubit[fi] >= self.n:
                raise IndexError("fault qubit out of range")
        fi = 0
        with nogil:
            for j in range(m):
                while fi < nf and fault_pos[fi] == j:
                    self._pauli(fault_qubit[fi], fault_code[fi])
                    fi += 1
                op = program[j, 0]
                if op == OP_MEAS_Z or op == OP_MEAS_X or op == OP_PREP_Z or op == OP_PREP_X:
                    r = self._do(op, program[j, 1], program[j, 2], rand_bits[ri])
                    ri += 1
                    if r >= 0:
                        out[oi] = r
                        oi += 1
                else:
                    self._do(op, program[j, 1], program[j, 2], 0)
            while fi < nf:
                self._pauli(fault_qubit[fi], fault_code[fi])
                fi += 1
        return oi

    def run_span(self, const int32_t[:, ::1] program, Py_ssize_t start, Py_ssize_t stop,
                 const int32_t[:, ::1] faults, const uint64_t[::1] rand_words,
                 uint8_t[::1] out, const int64_t[::1] synw):
        """Execute ``program[start:stop]`` with op-indexed buffers.

        ``faults`` rows are ``(key, qubit, code)`` sorted by key, where key
        ``2*j`` injects just before op ``j`` and ``2*j + 1`` just after it;
        rows outside the span are ignored.  Bit ``j`` of the packed
        ``rand_words`` feeds random op ``j``; ``out[j]`` receives the outcome
        of measurement ``j``.  Returns the OR of ``synw[j]`` over
        measurements in the span that gave 1 (a packed syndrome word).
        """
        cdef Py_ssize_t m = program.shape[0]
        cdef Py_ssize_t nf = faults.shape[0]
        cdef Py_ssize_t j, fi = 0
        cdef int r
        cdef int64_t syn = 0
        if not (0 <= start <= stop <= m):
            raise IndexError("span outside program")
        if rand_words.shape[0] * 64 < stop or out.shape[0] < stop or synw.shape[0] < stop:
            raise ValueError("rand_words/out/synw must be indexable by op")
        if nf and faults.shape[1] != 3:
            raise ValueError("faults must have shape (k, 3)")
        self._check_program(program, start, stop)
        for fi in range(nf):
            if faults[fi, 1] < 0 or faults[fi, 1] >= self.n:
                raise IndexError("fault qubit out of range")
        fi = 0
        with nogil:
            while fi < nf and faults[fi, 0] < 2 * start:
                fi += 1
            for j in range(start, stop):
                while fi < nf and faults[fi, 0] == 2 * j:
                    self._pauli(faults[fi, 1], faults[fi, 2])
                    fi += 1
                r = self._do(program[j, 0], program[j, 1], program[j, 2],
                             <int> ((rand_words[j >> 6] >> (j & 63)) & 1))
                if r >= 0:
                    out[j] = r
                    if r:
                        syn |= synw[j]
                while fi < nf and faults[fi, 0] == 2 * j + 1:
                    self._pauli(faults[fi, 1], faults[fi, 2])
                    fi += 1
        return syn
