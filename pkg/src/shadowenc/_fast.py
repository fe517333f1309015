"""Compiled kernels: dense gate application, uniform symplectic/Clifford
sampling, tableau-to-circuit synthesis, and phase-exact stabilizer amplitude
evaluation in a superposition-of-affine-subspaces form.

Conventions shared by every kernel here:

- Qubit q occupies bit position ``n - 1 - q`` of a basis index (qubit 0 is
  the most significant bit), and every bitmask in this module (tableau rows,
  affine columns, kets) uses basis-index bit positions directly.
- Gate opcodes: 0 RX, 1 RY, 2 RZ, 3 H, 4 S, 5 X, 6 Z, 7 CNOT, 8 SDG.
  Opcode rows are ``(code, a, b)`` with ``a`` the (control) qubit.
- A Clifford tableau is stored as three arrays of length 2n: ``tx``/``tz``
  bitmasks and ``tp`` phases mod 4.  Row i is the conjugation image of X_i,
  row n+i of Z_i, each represented as ``i^p * prod_q X^x Z^z``.
- An affine-form stabilizer state is ``2^(-r/2) * eps^w *
  sum_x i^(L.x) (-1)^(sum_{a<b} Q_ab x_a x_b) |C x + t>`` with
  ``eps = exp(i pi/4)``; ``C`` columns are kept full rank.

Set NUMBA_DISABLE_JIT=1 to run these as plain Python for debugging.
"""

import numpy as np
from numba import njit

OP_RX, OP_RY, OP_RZ, OP_H, OP_S, OP_X, OP_Z, OP_CNOT, OP_SDG = range(9)

_EVEN = np.int64(0x5555555555555555)


# ---------------------------------------------------------------------------
# bit utilities
# ---------------------------------------------------------------------------


@njit(cache=True)
def _popcount(x):
    x = x - ((x >> 1) & 0x5555555555555555)
    x = (x & 0x3333333333333333) + ((x >> 2) & 0x3333333333333333)
    x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0F
    return (x * 0x0101010101010101) >> 56


@njit(cache=True)
def _ctz(x):
    i = 0
    while (x >> i) & 1 == 0:
        i += 1
    return i


# ---------------------------------------------------------------------------
# dense state kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def apply_ops(amps, n, ops, angles, m):
    """Apply ``m`` opcode rows to a dense state in place."""
    size = 1 << n
    for g in range(m):
        code = ops[g, 0]
        pos = n - 1 - ops[g, 1]
        if code == OP_CNOT:
            posc = pos
            post = n - 1 - ops[g, 2]
            tbit = 1 << post
            for i in range(size):
                if (i >> posc) & 1 == 1 and (i >> post) & 1 == 0:
                    j = i | tbit
                    tmp = amps[i]
                    amps[i] = amps[j]
                    amps[j] = tmp
        else:
            stride = 1 << pos
            if code == OP_RX or code == OP_RY or code == OP_RZ:
                half = 0.5 * angles[g]
                c = np.cos(half)
                s = np.sin(half)
                if code == OP_RX:
                    u00 = c + 0j
                    u01 = -1j * s
                    u10 = -1j * s
                    u11 = c + 0j
                elif code == OP_RY:
                    u00 = c + 0j
                    u01 = -s + 0j
                    u10 = s + 0j
                    u11 = c + 0j
                else:
                    u00 = np.exp(-1j * half)
                    u01 = 0j
                    u10 = 0j
                    u11 = np.exp(1j * half)
                for hi in range(0, size, stride << 1):
                    for lo in range(stride):
                        i0 = hi + lo
                        i1 = i0 + stride
                        a0 = amps[i0]
                        a1 = amps[i1]
                        amps[i0] = u00 * a0 + u01 * a1
                        amps[i1] = u10 * a0 + u11 * a1
            elif code == OP_H:
                inv = 0.7071067811865476
                for hi in range(0, size, stride << 1):
                    for lo in range(stride):
                        i0 = hi + lo
                        i1 = i0 + stride
                        a0 = amps[i0]
                        a1 = amps[i1]
                        amps[i0] = (a0 + a1) * inv
                        amps[i1] = (a0 - a1) * inv
            elif code == OP_S:
                for hi in range(0, size, stride << 1):
                    for lo in range(stride):
                        amps[hi + lo + stride] *= 1j
            elif code == OP_SDG:
                for hi in range(0, size, stride << 1):
                    for lo in range(stride):
                        amps[hi + lo + stride] *= -1j
            elif code == OP_X:
                for hi in range(0, size, stride << 1):
                    for lo in range(stride):
                        i0 = hi + lo
                        i1 = i0 + stride
                        tmp = amps[i0]
                        amps[i0] = amps[i1]
                        amps[i1] = tmp
            elif code == OP_Z:
                for hi in range(0, size, stride << 1):
                    for lo in range(stride):
                        amps[hi + lo + stride] *= -1.0


@njit(cache=True)
def sample_index(probs_like, u):
    """Sample an index from unnormalized weights given a uniform draw."""
    total = 0.0
    for i in range(probs_like.shape[0]):
        total += probs_like[i]
    acc = 0.0
    target = u * total
    for i in range(probs_like.shape[0]):
        acc += probs_like[i]
        if target < acc:
            return i
    return probs_like.shape[0] - 1


# ---------------------------------------------------------------------------
# symplectic sampling (canonical-form construction over F_2)
# ---------------------------------------------------------------------------
# Vectors at "level j" are 2j-bit masks in pair order: bit 2q is the X part
# and bit 2q+1 the Z part of qubit q.  The per-level draws (k, b) map
# bijectively onto group elements, so uniform draws give a uniform element.


@njit(cache=True)
def _symp_inner(v, w):
    return (_popcount((v & (w >> 1)) & _EVEN) + _popcount(((v >> 1) & w) & _EVEN)) & 1


@njit(cache=True)
def _transvect(k, v):
    if k == 0:
        return v
    if _symp_inner(k, v) == 1:
        return v ^ k
    return v


@njit(cache=True)
def _find_transvection(x, y, nn):
    """Find (h1, h2) with  y = Z_h1 Z_h2 x  over nn-bit vectors."""
    if x == y:
        return np.int64(0), np.int64(0)
    if _symp_inner(x, y) == 1:
        return x ^ y, np.int64(0)
    z = np.int64(0)
    for q in range(nn // 2):
        ii = 2 * q
        xa = (x >> ii) & 3
        ya = (y >> ii) & 3
        if xa != 0 and ya != 0:
            za = xa ^ ya
            if za == 0:
                za = 2
                if (xa & 1) != ((xa >> 1) & 1):
                    za |= 1
            return x ^ (za << ii), y ^ (za << ii)
    # no shared support: pick a pair where x is nonzero and y is zero ...
    for q in range(nn // 2):
        ii = 2 * q
        xa = (x >> ii) & 3
        ya = (y >> ii) & 3
        if xa != 0 and ya == 0:
            if (xa & 1) == ((xa >> 1) & 1):
                za = 2
            else:
                za = ((xa & 1) << 1) | ((xa >> 1) & 1)
            z |= za << ii
            break
    # ... and a pair where y is nonzero and x is zero
    for q in range(nn // 2):
        ii = 2 * q
        xa = (x >> ii) & 3
        ya = (y >> ii) & 3
        if xa == 0 and ya != 0:
            if (ya & 1) == ((ya >> 1) & 1):
                za = 2
            else:
                za = ((ya & 1) << 1) | ((ya >> 1) & 1)
            z |= za << ii
            break
    return x ^ z, y ^ z


@njit(cache=True)
def symplectic_rows(n, kdraws, bitdraws, rows):
    """Build a uniform symplectic matrix from per-level draws.

    kdraws[j-1] in [1, 2^(2j) - 1], bitdraws[j-1] in [0, 2^(2j-1)), for
    j = 1..n.  ``rows`` receives 2n pair-order masks: rows 2q and 2q+1 are
    the images of the X/Z generators of qubit q.
    """
    for j in range(1, n + 1):
        nn = 2 * j
        if j == 1:
            rows[0] = 1
            rows[1] = 2
        else:
            for r in range(2 * (j - 1) - 1, -1, -1):
                rows[r + 2] = rows[r] << 2
            rows[0] = 1
            rows[1] = 2
        f1 = kdraws[j - 1]
        e1 = np.int64(1)
        t0, t1 = _find_transvection(e1, f1, nn)
        bits = bitdraws[j - 1]
        eprime = np.int64(1) | ((bits >> 1) << 2)
        h0 = _transvect(t0, eprime)
        h0 = _transvect(t1, h0)
        if bits & 1:
            f1 = np.int64(0)
        for r in range(nn):
            v = _transvect(t0, rows[r])
            v = _transvect(t1, v)
            v = _transvect(h0, v)
            rows[r] = _transvect(f1, v)


@njit(cache=True)
def symplectic_to_tableau(n, rows, signs, tx, tz, tp):
    """Convert pair-order symplectic rows plus a 2n-bit sign mask into a
    tableau (masks in basis-index bit positions)."""
    for q in range(n):
        for half in range(2):
            row = q + half * n
            v = rows[2 * q + half]
            xm = np.int64(0)
            zm = np.int64(0)
            for p in range(n):
                pos = n - 1 - p
                xm |= ((v >> (2 * p)) & 1) << pos
                zm |= ((v >> (2 * p + 1)) & 1) << pos
            tx[row] = xm
            tz[row] = zm
            tp[row] = (_popcount(xm & zm) + 2 * ((signs >> row) & 1)) % 4


@njit(cache=True)
def tableau_is_valid(n, tx, tz, tp):
    for i in range(2 * n):
        if tp[i] % 2 != _popcount(tx[i] & tz[i]) % 2:
            return False
        for j in range(i, 2 * n):
            prod = (_popcount(tx[i] & tz[j]) + _popcount(tz[i] & tx[j])) & 1
            want = 1 if j - i == n else 0
            if prod != want:
                return False
    return True


# ---------------------------------------------------------------------------
# tableau conjugation and circuit synthesis
# ---------------------------------------------------------------------------


@njit(cache=True)
def _conj_gate(tx, tz, tp, nrows, code, posa, posb):
    """Conjugate every tableau row by one Clifford gate: row -> g row g^dag."""
    if code == OP_H:
        for r in range(nrows):
            xb = (tx[r] >> posa) & 1
            zb = (tz[r] >> posa) & 1
            tp[r] = (tp[r] + 2 * (xb & zb)) % 4
            if xb != zb:
                tx[r] ^= np.int64(1) << posa
                tz[r] ^= np.int64(1) << posa
    elif code == OP_S:
        for r in range(nrows):
            if (tx[r] >> posa) & 1:
                tp[r] = (tp[r] + 1) % 4
                tz[r] ^= np.int64(1) << posa
    elif code == OP_X:
        for r in range(nrows):
            tp[r] = (tp[r] + 2 * ((tz[r] >> posa) & 1)) % 4
    elif code == OP_Z:
        for r in range(nrows):
            tp[r] = (tp[r] + 2 * ((tx[r] >> posa) & 1)) % 4
    elif code == OP_CNOT:
        for r in range(nrows):
            if (tx[r] >> posa) & 1:
                tx[r] ^= np.int64(1) << posb
            if (tz[r] >> posb) & 1:
                tz[r] ^= np.int64(1) << posa


@njit(cache=True)
def synthesize(n, tx, tz, tp, ops):
    """Reduce a tableau to the identity with conjugation gates and emit the
    inverse sequence: a circuit over {H, S, CNOT, X, Z} whose conjugation
    action equals the tableau (including signs).  The input arrays are
    consumed.  Returns the number of opcode rows written.
    """
    # conjugation gates applied during the reduction, in order
    gl_code = np.empty(6 * n * n + 8 * n + 8, dtype=np.int64)
    gl_a = np.empty(gl_code.shape[0], dtype=np.int64)
    gl_b = np.empty(gl_code.shape[0], dtype=np.int64)
    ng = 0

    for i in range(n):
        rx = i
        rz = n + i
        pos_i = n - 1 - i
        # rowX -> pure X string
        for q in range(i, n):
            pq = n - 1 - q
            if (tz[rx] >> pq) & 1:
                if (tx[rx] >> pq) & 1:
                    code = OP_S
                else:
                    code = OP_H
                _conj_gate(tx, tz, tp, 2 * n, code, pq, 0)
                gl_code[ng] = code
                gl_a[ng] = q
                gl_b[ng] = 0
                ng += 1
        # pivot x bit onto qubit i (SWAP = 3 CNOTs)
        if (tx[rx] >> pos_i) & 1 == 0:
            for q in range(i + 1, n):
                pq = n - 1 - q
                if (tx[rx] >> pq) & 1:
                    for step in range(3):
                        if step == 1:
                            a, b = q, i
                        else:
                            a, b = i, q
                        _conj_gate(tx, tz, tp, 2 * n, OP_CNOT, n - 1 - a, n - 1 - b)
                        gl_code[ng] = OP_CNOT
                        gl_a[ng] = a
                        gl_b[ng] = b
                        ng += 1
                    break
        # clear remaining x bits of rowX
        for q in range(i + 1, n):
            pq = n - 1 - q
            if (tx[rx] >> pq) & 1:
                _conj_gate(tx, tz, tp, 2 * n, OP_CNOT, pos_i, pq)
                gl_code[ng] = OP_CNOT
                gl_a[ng] = i
                gl_b[ng] = q
                ng += 1
        # rowZ: clear x parts on qubits > i (local Y -> X -> Z, local X -> Z)
        for q in range(i + 1, n):
            pq = n - 1 - q
            if (tx[rz] >> pq) & 1:
                if (tz[rz] >> pq) & 1:
                    _conj_gate(tx, tz, tp, 2 * n, OP_S, pq, 0)
                    gl_code[ng] = OP_S
                    gl_a[ng] = q
                    gl_b[ng] = 0
                    ng += 1
                _conj_gate(tx, tz, tp, 2 * n, OP_H, pq, 0)
                gl_code[ng] = OP_H
                gl_a[ng] = q
                gl_b[ng] = 0
                ng += 1
        # rowZ local Y on qubit i: H S H maps Y -> Z while fixing X
        if (tx[rz] >> pos_i) & 1:
            for step in range(3):
                code = OP_S if step == 1 else OP_H
                _conj_gate(tx, tz, tp, 2 * n, code, pos_i, 0)
                gl_code[ng] = code
                gl_a[ng] = i
                gl_b[ng] = 0
                ng += 1
        # clear rowZ z bits on qubits > i
        for q in range(i + 1, n):
            pq = n - 1 - q
            if (tz[rz] >> pq) & 1:
                _conj_gate(tx, tz, tp, 2 * n, OP_CNOT, pq, pos_i)
                gl_code[ng] = OP_CNOT
                gl_a[ng] = q
                gl_b[ng] = i
                ng += 1
    # fix signs
    for i in range(n):
        if tp[i] == 2:
            _conj_gate(tx, tz, tp, 2 * n, OP_Z, n - 1 - i, 0)
            gl_code[ng] = OP_Z
            gl_a[ng] = i
            gl_b[ng] = 0
            ng += 1
        if tp[n + i] == 2:
            _conj_gate(tx, tz, tp, 2 * n, OP_X, n - 1 - i, 0)
            gl_code[ng] = OP_X
            gl_a[ng] = i
            gl_b[ng] = 0
            ng += 1

    # circuit = reversed inverses (S^dag emitted as Z then S)
    m = 0
    for g in range(ng - 1, -1, -1):
        code = gl_code[g]
        if code == OP_S:
            ops[m, 0] = OP_Z
            ops[m, 1] = gl_a[g]
            ops[m, 2] = 0
            m += 1
        ops[m, 0] = code
        ops[m, 1] = gl_a[g]
        ops[m, 2] = gl_b[g]
        m += 1
    return m


def synth_buffer(n):
    return np.empty((12 * n * n + 20 * n + 16, 3), dtype=np.int64)


# ---------------------------------------------------------------------------
# affine-form stabilizer amplitudes
# ---------------------------------------------------------------------------

_EPS8 = np.exp(1j * np.pi * np.arange(8) / 4.0)


@njit(cache=True)
def _qflip(Q, a, b):
    Q[a] ^= np.int64(1) << b
    Q[b] ^= np.int64(1) << a


@njit(cache=True)
def _zexpand(L, Q, c, emask):
    """Multiply the phase by (i^c)^(xor of variables in emask)."""
    if c == 0:
        return
    e = emask
    while e:
        a = _ctz(e)
        e &= e - 1
        L[a] = (L[a] + c) & 3
        if c & 1:
            Q[a] ^= emask & ~(np.int64(1) << a)


@njit(cache=True)
def _subst_xor(cols, L, Q, a, s):
    """Re-parameterize x_a <- u_a xor u_s (all other variables unchanged)."""
    cols[s] ^= cols[a]
    la = L[a]
    qa = Q[a]
    L[s] = (L[s] + la) & 3
    if la & 1:
        _qflip(Q, a, s)
    if (qa >> s) & 1:
        L[s] = (L[s] + 2) & 3
    rest = qa & ~(np.int64(1) << s)
    while rest:
        b = _ctz(rest)
        rest &= rest - 1
        _qflip(Q, s, b)


@njit(cache=True)
def _remove_var(cols, L, Q, meta, v):
    """Drop variable v (caller has zeroed its column, L and Q row)."""
    r = meta[2]
    last = r - 1
    if v != last:
        cols[v], cols[last] = cols[last], cols[v]
        L[v], L[last] = L[last], L[v]
        Q[v], Q[last] = Q[last], Q[v]
        for u in range(r):
            bv = (Q[u] >> v) & 1
            bl = (Q[u] >> last) & 1
            if bv != bl:
                Q[u] ^= (np.int64(1) << v) | (np.int64(1) << last)
    cols[last] = 0
    L[last] = 0
    Q[last] = 0
    meta[2] = last


@njit(cache=True)
def _sum_out(cols, L, Q, meta, s):
    """Integrate out variable s, whose column is zero.  Unitary evolution
    guarantees the constraint branch always has coupled variables left."""
    r = meta[2]
    ls = L[s]
    d = Q[s]
    Q[s] = 0
    L[s] = 0
    rest = d
    while rest:
        b = _ctz(rest)
        rest &= rest - 1
        Q[b] &= ~(np.int64(1) << s)
    _remove_var(cols, L, Q, meta, s)
    # variable previously at slot r-1 now lives at slot s
    if s != r - 1 and (d >> (r - 1)) & 1:
        d = (d & ~(np.int64(1) << (r - 1))) | (np.int64(1) << s)
    if ls & 1:
        # sum = (1 +/- i) * (-/+ i)^(xor over d)
        if ls == 1:
            meta[1] = (meta[1] + 1) % 8
            _zexpand(L, Q, 3, d)
        else:
            meta[1] = (meta[1] + 7) % 8
            _zexpand(L, Q, 1, d)
    else:
        # parity constraint  xor_d u = ls/2  on the remaining variables
        c = ls >> 1
        bstar = _ctz(d)
        e = d & ~(np.int64(1) << bstar)
        lb = L[bstar]
        qb = Q[bstar]
        if c:
            meta[0] ^= cols[bstar]
        rest = e
        while rest:
            x = _ctz(rest)
            rest &= rest - 1
            cols[x] ^= cols[bstar]
        if c:
            meta[1] = (meta[1] + 2 * lb) % 8
            _zexpand(L, Q, (4 - lb) & 3, e)
        else:
            _zexpand(L, Q, lb, e)
        rest = qb
        while rest:
            b = _ctz(rest)
            rest &= rest - 1
            if c:
                L[b] = (L[b] + 2) & 3
            inner = e
            while inner:
                x = _ctz(inner)
                inner &= inner - 1
                if x == b:
                    L[b] = (L[b] + 2) & 3
                else:
                    _qflip(Q, x, b)
            Q[b] &= ~(np.int64(1) << bstar)
        Q[bstar] = 0
        L[bstar] = 0
        cols[bstar] = 0
        _remove_var(cols, L, Q, meta, bstar)


@njit(cache=True)
def _aff_h(cols, L, Q, meta, pos):
    r = meta[2]
    amask = np.int64(0)
    for a in range(r):
        if (cols[a] >> pos) & 1:
            amask |= np.int64(1) << a
    tb = (meta[0] >> pos) & 1
    v = r
    Q[v] = 0
    L[v] = 2 * tb
    cols[v] = 0
    rest = amask
    while rest:
        a = _ctz(rest)
        rest &= rest - 1
        cols[a] ^= np.int64(1) << pos
        _qflip(Q, a, v)
    meta[0] &= ~(np.int64(1) << pos)
    cols[v] = np.int64(1) << pos
    meta[2] = r + 1
    if amask == 0:
        return
    # the old columns may have lost rank; find the (unique) null combination
    tmp = np.empty(r, dtype=np.int64)
    combo = np.empty(r, dtype=np.int64)
    nkept = 0
    null = np.int64(0)
    for a in range(r):
        cur = cols[a]
        comb = np.int64(1) << a
        for b in range(nkept):
            low = tmp[b] & -tmp[b]
            if cur & low:
                cur ^= tmp[b]
                comb ^= combo[b]
        if cur == 0:
            null = comb
            break
        tmp[nkept] = cur
        combo[nkept] = comb
        nkept += 1
    if null != 0:
        s = _ctz(null)
        rest = null & ~(np.int64(1) << s)
        while rest:
            a = _ctz(rest)
            rest &= rest - 1
            _subst_xor(cols, L, Q, a, s)
        _sum_out(cols, L, Q, meta, s)


@njit(cache=True)
def aff_init(cols, L, Q, meta, ket):
    meta[0] = ket
    meta[1] = 0
    meta[2] = 0


@njit(cache=True)
def aff_apply_ops(cols, L, Q, meta, n, ops, m, invert):
    """Propagate through ``m`` Clifford opcode rows (forward, or through the
    inverse circuit when ``invert`` is nonzero)."""
    for step in range(m):
        g = m - 1 - step if invert else step
        code = ops[g, 0]
        pos = n - 1 - ops[g, 1]
        if invert and code == OP_S:
            code = OP_SDG
        elif invert and code == OP_SDG:
            code = OP_S
        if code == OP_X:
            meta[0] ^= np.int64(1) << pos
        elif code == OP_Z:
            if (meta[0] >> pos) & 1:
                meta[1] = (meta[1] + 4) % 8
            for a in range(meta[2]):
                if (cols[a] >> pos) & 1:
                    L[a] = (L[a] + 2) & 3
        elif code == OP_S or code == OP_SDG:
            tb = (meta[0] >> pos) & 1
            if code == OP_S:
                c = 3 if tb else 1
                if tb:
                    meta[1] = (meta[1] + 2) % 8
            else:
                c = 1 if tb else 3
                if tb:
                    meta[1] = (meta[1] + 6) % 8
            emask = np.int64(0)
            for a in range(meta[2]):
                if (cols[a] >> pos) & 1:
                    emask |= np.int64(1) << a
            _zexpand(L, Q, c, emask)
        elif code == OP_CNOT:
            post = n - 1 - ops[g, 2]
            for a in range(meta[2]):
                if (cols[a] >> pos) & 1:
                    cols[a] ^= np.int64(1) << post
            if (meta[0] >> pos) & 1:
                meta[0] ^= np.int64(1) << post
        elif code == OP_H:
            _aff_h(cols, L, Q, meta, pos)
        else:
            raise ValueError("non-Clifford opcode in stabilizer propagation")


@njit(cache=True)
def aff_amplitude(cols, L, Q, meta, n, ket):
    """Amplitude <ket|state> of the affine-form state."""
    r = meta[2]
    d = ket ^ meta[0]
    # solve  sum_a x_a cols[a] = d  (rows indexed by qubit bit position)
    x = np.int64(0)
    if r > 0:
        rows = np.empty(n, dtype=np.int64)
        for p in range(n):
            m = np.int64(0)
            for a in range(r):
                m |= ((cols[a] >> p) & 1) << a
            m |= ((d >> p) & 1) << r
            rows[p] = m
        piv_of = np.full(r, -1, dtype=np.int64)
        used = np.zeros(n, dtype=np.int64)
        for a in range(r):
            sel = -1
            for p in range(n):
                if used[p] == 0 and (rows[p] >> a) & 1:
                    sel = p
                    break
            if sel < 0:
                return 0.0 + 0.0j  # unreachable for full-rank columns
            used[sel] = 1
            piv_of[a] = sel
            for p in range(n):
                if p != sel and (rows[p] >> a) & 1:
                    rows[p] ^= rows[sel]
        for p in range(n):
            if used[p] == 0 and (rows[p] >> r) & 1:
                return 0.0 + 0.0j
        for a in range(r):
            x |= ((rows[piv_of[a]] >> r) & 1) << a
    elif d != 0:
        return 0.0 + 0.0j
    lsum = 0
    qtot = 0
    rest = x
    while rest:
        a = _ctz(rest)
        rest &= rest - 1
        lsum += L[a]
        qtot += _popcount(Q[a] & x)
    oct_ = (meta[1] + 2 * lsum + 4 * ((qtot >> 1) & 1)) % 8
    scale = 2.0 ** (-0.5 * r)
    c = np.cos(np.pi * oct_ / 4.0)
    s = np.sin(np.pi * oct_ / 4.0)
    return scale * (c + 1j * s)


@njit(cache=True)
def aff_dot_conj(cols, L, Q, meta, n, coeffs, floor):
    """sum_k coeffs[k] * conj(<k|state>), skipping |coeffs| <= floor."""
    r = meta[2]
    ket = meta[0]
    oct_ = meta[1]
    scale = 2.0 ** (-0.5 * r)
    acc = 0.0 + 0.0j
    c = coeffs[ket]
    if abs(c) > floor:
        w = oct_ % 8
        acc += c * scale * (np.cos(np.pi * w / 4.0) - 1j * np.sin(np.pi * w / 4.0))
    gray = np.int64(0)
    for g in range(1, 1 << r):
        a = _ctz(np.int64(g))
        newgray = np.int64(g) ^ (np.int64(g) >> 1)
        bit = (newgray >> a) & 1
        gray = newgray
        ket ^= cols[a]
        if bit:
            oct_ += 2 * L[a]
        else:
            oct_ -= 2 * L[a]
        oct_ += 4 * (_popcount(Q[a] & (gray & ~(np.int64(1) << a))) & 1)
        c = coeffs[ket]
        if abs(c) > floor:
            w = oct_ % 8
            acc += c * scale * (np.cos(np.pi * w / 4.0) - 1j * np.sin(np.pi * w / 4.0))
    return acc


# ---------------------------------------------------------------------------
# fused shadow-snapshot pipeline
# ---------------------------------------------------------------------------


@njit(cache=True)
def estimate_batch(state, coeffs, n, kdraws, bitdraws, signdraws, unifs, floor):
    """Collect classical snapshots of ``state`` and return the mean shadow
    fidelity estimate against ``coeffs`` ((2^n + 1)|<b|U|Data>|^2 - 1)."""
    n_shot = unifs.shape[0]
    size = 1 << n
    rows = np.empty(2 * n, dtype=np.int64)
    tx = np.empty(2 * n, dtype=np.int64)
    tz = np.empty(2 * n, dtype=np.int64)
    tp = np.empty(2 * n, dtype=np.int64)
    ops = np.empty((12 * n * n + 20 * n + 16, 3), dtype=np.int64)
    angles = np.zeros(1, dtype=np.float64)
    work = np.empty(size, dtype=np.complex128)
    probs = np.empty(size, dtype=np.float64)
    cols = np.zeros(n + 2, dtype=np.int64)
    L = np.zeros(n + 2, dtype=np.int64)
    Q = np.zeros(n + 2, dtype=np.int64)
    meta = np.zeros(3, dtype=np.int64)
    acc = 0.0
    for i in range(n_shot):
        symplectic_rows(n, kdraws[i], bitdraws[i], rows)
        symplectic_to_tableau(n, rows, signdraws[i], tx, tz, tp)
        m = synthesize(n, tx, tz, tp, ops)
        for k in range(size):
            work[k] = state[k]
        apply_ops(work, n, ops, angles, m)
        for k in range(size):
            pr = work[k]
            probs[k] = pr.real * pr.real + pr.imag * pr.imag
        b = sample_index(probs, unifs[i])
        aff_init(cols, L, Q, meta, b)
        aff_apply_ops(cols, L, Q, meta, n, ops, m, 1)
        ov = aff_dot_conj(cols, L, Q, meta, n, coeffs, floor)
        acc += (size + 1) * (ov.real * ov.real + ov.imag * ov.imag) - 1.0
    return acc / n_shot
