"""Word-level loops compiled with numba.

Everything here works on little-endian ``uint64`` limb arrays.  The kernels
know nothing about normalization or immutability; the Python layer in
``limbcore`` owns those rules and only ever hands out fresh arrays.

numba promotes ``uint64 op int64`` to float64, so every literal that meets a
limb is spelled as one of the typed constants below.
"""

import numpy as np
from numba import njit

U64 = np.uint64
ZERO = np.uint64(0)
ONE = np.uint64(1)
MAX = np.uint64(0xFFFFFFFFFFFFFFFF)
M32 = np.uint64(0xFFFFFFFF)
S32 = np.uint64(32)
B32 = np.uint64(1 << 32)
S63 = np.uint64(63)
S64 = np.uint64(64)

_jit = njit(cache=True, nogil=True)
_inline = njit(inline="always", cache=True)


# ---------------------------------------------------------------------------
# single-word helpers


@_inline
def umul(a, b):
    """Full 64x64 -> 128 product as (hi, lo)."""
    a0 = a & M32
    a1 = a >> S32
    b0 = b & M32
    b1 = b >> S32
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    p11 = a1 * b1
    mid = (p00 >> S32) + (p01 & M32) + (p10 & M32)
    lo = (mid << S32) | (p00 & M32)
    hi = p11 + (p01 >> S32) + (p10 >> S32) + (mid >> S32)
    return hi, lo


@_inline
def umulhi(a, b):
    hi, lo = umul(a, b)
    return hi


@_inline
def clz(x):
    if x == ZERO:
        return 64
    n = 0
    while (x >> S63) == ZERO:
        x = x << ONE
        n += 1
    return n


@_inline
def udiv_qrnnd(u1, u0, d):
    """Divide the two-word value (u1, u0) by a normalized d; needs u1 < d.

    Half-word long division on 32-bit digits.  Returns (q, r).
    """
    dh = d >> S32
    dl = d & M32
    u0h = u0 >> S32
    u0l = u0 & M32

    q1 = u1 // dh
    rhat = u1 - q1 * dh
    while q1 >= B32 or q1 * dl > ((rhat << S32) | u0h):
        q1 -= ONE
        rhat += dh
        if rhat >= B32:
            break
    # wraps mod 2^64 by design; the true value is < d
    u21 = (u1 << S32) + u0h - q1 * d

    q0 = u21 // dh
    rhat = u21 - q0 * dh
    while q0 >= B32 or q0 * dl > ((rhat << S32) | u0l):
        q0 -= ONE
        rhat += dh
        if rhat >= B32:
            break
    r = (u21 << S32) + u0l - q0 * d
    return (q1 << S32) + q0, r


@_inline
def mulmod(a, b, p):
    """a*b mod p for arbitrary 64-bit a, b and any p > 0."""
    a = a % p
    b = b % p
    hi, lo = umul(a, b)
    s = clz(p)
    d = p << U64(s)
    if s > 0:
        hi = (hi << U64(s)) | (lo >> U64(64 - s))
        lo = lo << U64(s)
    # a, b < p keeps the shifted product's high word below d
    q, r = udiv_qrnnd(hi, lo, d)
    return r >> U64(s)


@_inline
def powmod(a, e, p):
    r = ONE % p
    a = a % p
    while e > ZERO:
        if e & ONE:
            r = mulmod(r, a, p)
        a = mulmod(a, a, p)
        e = e >> ONE
    return r


@_inline
def shoup_factor(w, p):
    """floor(w * 2^64 / p) for w < p."""
    s = clz(p)
    d = p << U64(s)
    # (w << s, 0) / d  gives floor(w*2^(64+s)/d) = floor(w*2^64/p)
    hi = w << U64(s) if s > 0 else w
    q, r = udiv_qrnnd(hi, ZERO, d)
    return q


@_inline
def mulmod_shoup(a, w, wq, p):
    """a*w mod p with precomputed wq = shoup_factor(w, p); needs p < 2^63."""
    q = umulhi(a, wq)
    r = a * w - q * p
    if r >= p:
        r -= p
    return r


# ---------------------------------------------------------------------------
# multi-word primitives


@_jit
def normlen(a):
    n = a.shape[0]
    while n > 0 and a[n - 1] == ZERO:
        n -= 1
    return n


@_jit
def cmp_n(a, b):
    """Compare two normalized arrays."""
    na = a.shape[0]
    nb = b.shape[0]
    if na != nb:
        return 1 if na > nb else -1
    for i in range(na - 1, -1, -1):
        if a[i] != b[i]:
            return 1 if a[i] > b[i] else -1
    return 0


@_jit
def add_n(a, b):
    if a.shape[0] < b.shape[0]:
        a, b = b, a
    na = a.shape[0]
    nb = b.shape[0]
    out = np.empty(na + 1, np.uint64)
    carry = ZERO
    for i in range(nb):
        s = a[i] + carry
        c1 = s < carry
        t = s + b[i]
        c2 = t < s
        out[i] = t
        carry = ONE if (c1 or c2) else ZERO
    for i in range(nb, na):
        s = a[i] + carry
        carry = ONE if s < carry else ZERO
        out[i] = s
    out[na] = carry
    return out


@_jit
def sub_n(a, b):
    """a - b with len(a) >= len(b); returns (diff, borrow_out)."""
    na = a.shape[0]
    nb = b.shape[0]
    out = np.empty(na, np.uint64)
    borrow = ZERO
    for i in range(nb):
        t = a[i]
        d = t - b[i]
        b1 = d > t
        d2 = d - borrow
        b2 = d2 > d
        out[i] = d2
        borrow = ONE if (b1 or b2) else ZERO
    for i in range(nb, na):
        t = a[i]
        d = t - borrow
        borrow = ONE if d > t else ZERO
        out[i] = d
    return out, borrow


@_jit
def add_into(acc, part, offset):
    """acc[offset:] += part in place; acc must be long enough to absorb carries."""
    carry = ZERO
    n = part.shape[0]
    i = 0
    for i in range(n):
        s = acc[offset + i] + carry
        c1 = s < carry
        t = s + part[i]
        c2 = t < s
        acc[offset + i] = t
        carry = ONE if (c1 or c2) else ZERO
    k = offset + n
    while carry != ZERO:
        s = acc[k] + carry
        carry = ONE if s < carry else ZERO
        acc[k] = s
        k += 1


@_jit
def sub_from(acc, part, offset):
    """acc[offset:] -= part in place; the caller guarantees no final borrow."""
    borrow = ZERO
    n = part.shape[0]
    for i in range(n):
        t = acc[offset + i]
        d = t - part[i]
        b1 = d > t
        d2 = d - borrow
        b2 = d2 > d
        acc[offset + i] = d2
        borrow = ONE if (b1 or b2) else ZERO
    k = offset + n
    while borrow != ZERO:
        t = acc[k]
        d = t - borrow
        borrow = ONE if d > t else ZERO
        acc[k] = d
        k += 1


@_jit
def lshift(a, bits):
    """a * 2^bits for bits >= 0."""
    na = a.shape[0]
    limbs = bits // 64
    r = bits % 64
    out = np.zeros(na + limbs + 1, np.uint64)
    if r == 0:
        for i in range(na):
            out[i + limbs] = a[i]
    else:
        rs = U64(r)
        ls = U64(64 - r)
        carry = ZERO
        for i in range(na):
            out[i + limbs] = (a[i] << rs) | carry
            carry = a[i] >> ls
        out[na + limbs] = carry
    return out


@_jit
def rshift(a, bits):
    """floor(a / 2^bits) for bits >= 0."""
    na = a.shape[0]
    limbs = bits // 64
    r = bits % 64
    if limbs >= na:
        return np.zeros(0, np.uint64)
    n = na - limbs
    out = np.empty(n, np.uint64)
    if r == 0:
        for i in range(n):
            out[i] = a[i + limbs]
    else:
        rs = U64(r)
        ls = U64(64 - r)
        for i in range(n - 1):
            out[i] = (a[i + limbs] >> rs) | (a[i + limbs + 1] << ls)
        out[n - 1] = a[na - 1] >> rs
    return out


@_jit
def low_bits_nonzero(a, bits):
    """True when a mod 2^bits != 0."""
    limbs = bits // 64
    r = bits % 64
    na = a.shape[0]
    for i in range(min(limbs, na)):
        if a[i] != ZERO:
            return True
    if r and limbs < na:
        mask = (ONE << U64(r)) - ONE
        if a[limbs] & mask:
            return True
    return False


@_jit
def trailing_zeros(a):
    for i in range(a.shape[0]):
        x = a[i]
        if x != ZERO:
            n = 0
            while (x & ONE) == ZERO:
                x = x >> ONE
                n += 1
            return 64 * i + n
    return -1


@_jit
def mul_basecase(a, b):
    na = a.shape[0]
    nb = b.shape[0]
    out = np.zeros(na + nb, np.uint64)
    for i in range(nb):
        bi = b[i]
        if bi == ZERO:
            continue
        carry = ZERO
        for j in range(na):
            hi, lo = umul(a[j], bi)
            lo += carry
            if lo < carry:
                hi += ONE
            t = out[i + j]
            lo += t
            if lo < t:
                hi += ONE
            out[i + j] = lo
            carry = hi
        out[i + na] = carry
    return out


@_jit
def sqr_basecase(a):
    n = a.shape[0]
    out = np.zeros(2 * n, np.uint64)
    # off-diagonal products a[i]*a[j], i < j
    for i in range(n - 1):
        ai = a[i]
        if ai == ZERO:
            continue
        carry = ZERO
        for j in range(i + 1, n):
            hi, lo = umul(a[j], ai)
            lo += carry
            if lo < carry:
                hi += ONE
            t = out[i + j]
            lo += t
            if lo < t:
                hi += ONE
            out[i + j] = lo
            carry = hi
        out[i + n] = carry
    # double
    top = ZERO
    for k in range(2 * n):
        x = out[k]
        out[k] = (x << ONE) | top
        top = x >> S63
    # add the diagonal squares
    carry = ZERO
    for i in range(n):
        hi, lo = umul(a[i], a[i])
        s = out[2 * i] + carry
        c1 = s < carry
        t = s + lo
        c2 = t < s
        out[2 * i] = t
        hi += ONE if (c1 or c2) else ZERO
        s = out[2 * i + 1] + hi
        carry = ONE if s < hi else ZERO
        out[2 * i + 1] = s
    return out


@_jit
def mul_1(a, m):
    n = a.shape[0]
    out = np.empty(n + 1, np.uint64)
    carry = ZERO
    for i in range(n):
        hi, lo = umul(a[i], m)
        lo += carry
        if lo < carry:
            hi += ONE
        out[i] = lo
        carry = hi
    out[n] = carry
    return out


@_jit
def divrem_1(a, d):
    """Single-limb divisor; returns (quotient array, remainder word)."""
    n = a.shape[0]
    s = clz(d)
    dn = d << U64(s)
    q = np.empty(n, np.uint64)
    r = ZERO
    if s == 0:
        for i in range(n - 1, -1, -1):
            q[i], r = udiv_qrnnd(r, a[i], dn)
        return q, r
    ls = U64(s)
    rs = U64(64 - s)
    # feed the shifted dividend one word at a time
    top = a[n - 1] >> rs
    r = top
    for i in range(n - 1, -1, -1):
        lo = a[i] << ls
        if i > 0:
            lo = lo | (a[i - 1] >> rs)
        q[i], r = udiv_qrnnd(r, lo, dn)
    return q, r >> ls


@_jit
def divrem_knuth(u, v):
    """Normalized long division.

    ``v`` has n >= 2 limbs with its top bit set; ``u`` has been shifted by
    the same amount and carries one extra top limb.  Returns (q, u) where u
    now holds the (still shifted) remainder in its low n limbs.
    """
    u = u.copy()
    n = v.shape[0]
    m = u.shape[0] - n
    q = np.zeros(max(m, 0), np.uint64)
    vtop = v[n - 1]
    vnext = v[n - 2]
    for j in range(m - 1, -1, -1):
        ujn = u[j + n]
        ujn1 = u[j + n - 1]
        ujn2 = u[j + n - 2]
        check = True
        if ujn >= vtop:
            qhat = MAX
            rhat = ujn1 + vtop
            if rhat < ujn1:
                check = False
        else:
            qhat, rhat = udiv_qrnnd(ujn, ujn1, vtop)
        while check:
            ph, pl = umul(qhat, vnext)
            if ph > rhat or (ph == rhat and pl > ujn2):
                qhat -= ONE
                old = rhat
                rhat += vtop
                if rhat < old:
                    break
            else:
                break
        # u[j .. j+n] -= qhat * v
        carry = ZERO
        borrow = ZERO
        for i in range(n):
            ph, pl = umul(qhat, v[i])
            pl += carry
            if pl < carry:
                ph += ONE
            carry = ph
            t = u[i + j]
            d = t - pl
            b1 = d > t
            d2 = d - borrow
            b2 = d2 > d
            u[i + j] = d2
            borrow = ONE if (b1 or b2) else ZERO
        t = u[j + n]
        d = t - carry
        b1 = d > t
        d2 = d - borrow
        b2 = d2 > d
        u[j + n] = d2
        if b1 or b2:
            qhat -= ONE
            c = ZERO
            for i in range(n):
                s = u[i + j] + c
                c1 = s < c
                s2 = s + v[i]
                c2 = s2 < s
                u[i + j] = s2
                c = ONE if (c1 or c2) else ZERO
            u[j + n] += c
        q[j] = qhat
    return q, u


@_jit
def muladd_1_inplace(acc, size, m, c):
    """acc[:size] = acc[:size]*m + c; returns the new used size."""
    carry = c
    for i in range(size):
        hi, lo = umul(acc[i], m)
        lo += carry
        if lo < carry:
            hi += ONE
        acc[i] = lo
        carry = hi
    if carry != ZERO:
        acc[size] = carry
        size += 1
    return size


@_jit
def chunks_base(a, chunk_div, chunk_count_hint):
    """Repeated single-word division: base-``chunk_div`` digits, little-endian."""
    work = a.copy()
    n = normlen(work)
    out = np.empty(chunk_count_hint, np.uint64)
    k = 0
    s = clz(chunk_div)
    dn = chunk_div << U64(s)
    while n > 0:
        r = ZERO
        if s == 0:
            for i in range(n - 1, -1, -1):
                work[i], r = udiv_qrnnd(r, work[i], dn)
        else:
            ls = U64(s)
            rs = U64(64 - s)
            r = work[n - 1] >> rs
            for i in range(n - 1, -1, -1):
                lo = work[i] << ls
                if i > 0:
                    lo = lo | (work[i - 1] >> rs)
                work[i], r = udiv_qrnnd(r, lo, dn)
            r = r >> ls
        out[k] = r
        k += 1
        while n > 0 and work[n - 1] == ZERO:
            n -= 1
    return out[:k]


@_jit
def gcd_binary(a, b):
    """Binary (shift/subtract) GCD of two nonzero normalized arrays."""
    x = a.copy()
    y = b.copy()
    nx = x.shape[0]
    ny = y.shape[0]
    zx = trailing_zeros(x)
    zy = trailing_zeros(y)
    common = min(zx, zy)
    nx = _rshift_inplace(x, nx, zx)
    ny = _rshift_inplace(y, ny, zy)
    while True:
        c = _cmp_prefix(x, nx, y, ny)
        if c == 0:
            break
        if c < 0:
            x, y = y, x
            nx, ny = ny, nx
        # x > y, both odd: x - y is even and nonzero
        _sub_inplace(x, nx, y, ny)
        while nx > 0 and x[nx - 1] == ZERO:
            nx -= 1
        nx = _rshift_inplace(x, nx, trailing_zeros(x[:nx]))
    res = x[:nx].copy()
    return lshift(res, common)


@_inline
def _cmp_prefix(a, na, b, nb):
    if na != nb:
        return 1 if na > nb else -1
    for i in range(na - 1, -1, -1):
        if a[i] != b[i]:
            return 1 if a[i] > b[i] else -1
    return 0


@_inline
def _sub_inplace(x, nx, y, ny):
    borrow = ZERO
    for i in range(ny):
        t = x[i]
        d = t - y[i]
        b1 = d > t
        d2 = d - borrow
        b2 = d2 > d
        x[i] = d2
        borrow = ONE if (b1 or b2) else ZERO
    i = ny
    while borrow != ZERO and i < nx:
        t = x[i]
        d = t - borrow
        borrow = ONE if d > t else ZERO
        x[i] = d
        i += 1


@_jit
def _rshift_inplace(x, n, bits):
    if bits <= 0:
        return n
    limbs = bits // 64
    r = bits % 64
    m = n - limbs
    if m <= 0:
        for i in range(n):
            x[i] = ZERO
        return 0
    if r == 0:
        for i in range(m):
            x[i] = x[i + limbs]
    else:
        rs = U64(r)
        ls = U64(64 - r)
        for i in range(m - 1):
            x[i] = (x[i + limbs] >> rs) | (x[i + limbs + 1] << ls)
        x[m - 1] = x[n - 1] >> rs
    for i in range(m, n):
        x[i] = ZERO
    while m > 0 and x[m - 1] == ZERO:
        m -= 1
    return m


# ---------------------------------------------------------------------------
# Montgomery reduction


@_jit
def redc(t, n, n_prime, k):
    """t * beta^-k mod n for t < n * beta^k (word-by-word REDC)."""
    work = np.zeros(2 * k + 2, np.uint64)
    for i in range(t.shape[0]):
        work[i] = t[i]
    for i in range(k):
        m = work[i] * n_prime
        carry = ZERO
        for j in range(k):
            hi, lo = umul(m, n[j])
            lo += carry
            if lo < carry:
                hi += ONE
            s = work[i + j]
            lo += s
            if lo < s:
                hi += ONE
            work[i + j] = lo
            carry = hi
        idx = i + k
        while carry != ZERO:
            s = work[idx] + carry
            carry = ONE if s < carry else ZERO
            work[idx] = s
            idx += 1
    res = work[k:2 * k + 1].copy()
    # conditional subtract
    big = False
    if res[k] != ZERO:
        big = True
    else:
        big = True
        for j in range(k - 1, -1, -1):
            if res[j] != n[j]:
                big = res[j] > n[j]
                break
    if big:
        borrow = ZERO
        for j in range(k):
            tt = res[j]
            d = tt - n[j]
            b1 = d > tt
            d2 = d - borrow
            b2 = d2 > d
            res[j] = d2
            borrow = ONE if (b1 or b2) else ZERO
        res[k] -= borrow
    return res


@_jit
def word_inverse_neg(n0):
    """-n0^-1 mod 2^64 for odd n0 by Newton/Hensel lifting."""
    x = n0  # correct to 3 bits since n0*n0 = 1 mod 8
    for _ in range(5):
        x = x * (U64(2) - n0 * x)
    return ZERO - x


# ---------------------------------------------------------------------------
# number-theoretic transform


@_jit
def ntt_tables(p, root, log_n, inverse):
    """Twiddles (and their Shoup factors) for a length-2^log_n transform.

    Layout: stage tables of size half concatenated, half = 1, 2, 4, ...
    Entry [half + j] is w_{2*half}^j.
    """
    n = 1 << log_n
    w = np.zeros(max(n, 2), np.uint64)
    wq = np.zeros(max(n, 2), np.uint64)
    half = 1
    s = 1
    while half < n:
        # primitive (2*half)-th root
        base = root
        # root has order 2^m_max; the caller passes the order-2^log_n root
        e = log_n - s
        for _ in range(e):
            base = mulmod(base, base, p)
        if inverse:
            base = powmod(base, p - U64(2), p)
        x = ONE
        for j in range(half):
            w[half + j] = x
            wq[half + j] = shoup_factor(x, p)
            x = mulmod(x, base, p)
        half *= 2
        s += 1
    return w, wq


@_jit
def ntt_dif(x, p, w, wq):
    """In-place decimation-in-frequency transform; output in bit-reversed order."""
    n = x.shape[0]
    half = n // 2
    while half >= 1:
        for start in range(0, n, 2 * half):
            for j in range(half):
                a = x[start + j]
                b = x[start + j + half]
                s = a + b
                if s >= p:
                    s -= p
                d = a - b if a >= b else a + p - b
                x[start + j] = s
                x[start + j + half] = mulmod_shoup(d, w[half + j], wq[half + j], p)
        half //= 2


@_jit
def ntt_dit(x, p, w, wq):
    """In-place decimation-in-time transform taking bit-reversed input."""
    n = x.shape[0]
    half = 1
    while half < n:
        for start in range(0, n, 2 * half):
            for j in range(half):
                a = x[start + j]
                b = mulmod_shoup(x[start + j + half], w[half + j], wq[half + j], p)
                s = a + b
                if s >= p:
                    s -= p
                d = a - b if a >= b else a + p - b
                x[start + j] = s
                x[start + j + half] = d
        half *= 2


@_jit
def bit_reverse(x):
    n = x.shape[0]
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            t = x[i]
            x[i] = x[j]
            x[j] = t


@_jit
def scale(x, c, p):
    cq = shoup_factor(c, p)
    for i in range(x.shape[0]):
        x[i] = mulmod_shoup(x[i], c, cq, p)


@_jit
def pointwise(x, y, p):
    for i in range(x.shape[0]):
        x[i] = mulmod(x[i], y[i], p)


@_jit
def reduce_mod(a, p, n):
    out = np.zeros(n, np.uint64)
    for i in range(a.shape[0]):
        out[i] = a[i] % p
    return out


@_jit
def convolve_mod(a, b, p, root, log_n, square):
    """Cyclic convolution of zero-padded a, b modulo p via DIF/DIT."""
    n = 1 << log_n
    w, wq = ntt_tables(p, root, log_n, False)
    wi, wiq = ntt_tables(p, root, log_n, True)
    x = reduce_mod(a, p, n)
    ntt_dif(x, p, w, wq)
    if square:
        pointwise(x, x, p)
    else:
        y = reduce_mod(b, p, n)
        ntt_dif(y, p, w, wq)
        pointwise(x, y, p)
    ntt_dit(x, p, wi, wiq)
    ninv = powmod(U64(n), p - U64(2), p)
    scale(x, ninv, p)
    return x


@_jit
def crt3_carry(r1, r2, r3, p1, p2, p3, inv_p1_mod_p2, inv_p1p2_mod_p3,
               p1p2_hi, p1p2_lo, out_len):
    """Garner-lift three residue vectors and carry-propagate in radix 2^64."""
    out = np.zeros(out_len + 4, np.uint64)
    p1_mod_p3 = p1 % p3
    p1p2_mod_p3 = mulmod(p1_mod_p3, p2 % p3, p3)
    n = r1.shape[0]
    for k in range(n):
        a1 = r1[k]
        # y2 = (r2 - a1) * inv(p1) mod p2
        a1m2 = a1 % p2
        d = r2[k] - a1m2 if r2[k] >= a1m2 else r2[k] + p2 - a1m2
        y2 = mulmod(d, inv_p1_mod_p2, p2)
        # x12 = a1 + p1*y2  (< p1*p2)
        h, l = umul(p1, y2)
        l2 = l + a1
        if l2 < l:
            h += ONE
        # y3 = (r3 - x12 mod p3) * inv(p1p2) mod p3
        x12m3 = (a1 % p3 + mulmod(p1_mod_p3, y2, p3)) % p3
        d3 = r3[k] - x12m3 if r3[k] >= x12m3 else r3[k] + p3 - x12m3
        y3 = mulmod(d3, inv_p1p2_mod_p3, p3)
        # p1p2 * y3 as three words
        h1, l1 = umul(p1p2_lo, y3)
        h2, l2b = umul(p1p2_hi, y3)
        w0 = l1
        w1 = h1 + l2b
        c1 = ONE if w1 < h1 else ZERO
        w2 = h2 + c1
        # add x12 = (h, l2)
        v0 = w0 + l2
        c = ONE if v0 < w0 else ZERO
        t = w1 + c
        c = ONE if t < c else ZERO
        v1 = t + h
        c += ONE if v1 < t else ZERO
        v2 = w2 + c
        # accumulate at position k
        s = out[k] + v0
        c = ONE if s < v0 else ZERO
        out[k] = s
        t = out[k + 1] + c
        c = ONE if t < c else ZERO
        s = t + v1
        c += ONE if s < t else ZERO
        out[k + 1] = s
        t = out[k + 2] + c
        c = ONE if t < c else ZERO
        s = t + v2
        c += ONE if s < t else ZERO
        out[k + 2] = s
        idx = k + 3
        while c != ZERO:
            s = out[idx] + c
            c = ONE if s < c else ZERO
            out[idx] = s
            idx += 1
    return out


# ---------------------------------------------------------------------------
# subquadratic multiplication (Karatsuba / Toom-3 / NTT dispatch)
#
# ``plan`` packs the NTT constants: primes[0:3], roots[3:6], log_orders[6:9],
# inv(p1) mod p2, inv(p1*p2) mod p3, hi and lo words of p1*p2, max_log_len.
# ``force`` selects the algorithm for the top call only: 0 = dispatch by size,
# 1 = Karatsuba step, 2 = Toom-3 step.


@_jit
def _nrm(a):
    return a[:normlen(a)]


@_jit
def _addn(a, b):
    if a.shape[0] == 0:
        return b
    if b.shape[0] == 0:
        return a
    return _nrm(add_n(a, b))


@_jit
def _subn(a, b):
    if b.shape[0] == 0:
        return a
    out, borrow = sub_n(a, b)
    return _nrm(out)


@_jit
def _absdiff(a, b):
    c = cmp_n(a, b)
    if c == 0:
        return a[:0], 0
    if c > 0:
        return _subn(a, b), 1
    return _subn(b, a), -1


@_jit
def _shl(a, bits):
    return _nrm(lshift(a, bits))


@_jit
def _half_exact(a):
    # callers only pass even values; interpolation identities guarantee it
    return _nrm(rshift(a, 1))


@_jit
def _third_exact(a):
    if a.shape[0] == 0:
        return a
    q, r = divrem_1(a, U64(3))
    return _nrm(q)


@_jit
def _bitlen(x):
    n = 0
    while x > 0:
        x >>= 1
        n += 1
    return n


@_jit
def ntt_mul(a, b, plan, square):
    """Product via three modular convolutions; empty result if too long."""
    total = a.shape[0] + b.shape[0]
    log_n = max(_bitlen(total - 1), 1)
    if log_n > int(plan[13]):
        return np.zeros(0, np.uint64)
    conv = []
    for i in range(3):
        p = plan[i]
        root = plan[3 + i]
        for _ in range(int(plan[6 + i]) - log_n):
            root = mulmod(root, root, p)
        conv.append(convolve_mod(a, b, p, root, log_n, square))
    out = crt3_carry(conv[0], conv[1], conv[2], plan[0], plan[1], plan[2],
                     plan[9], plan[10], plan[11], plan[12], 1 << log_n)
    return _nrm(out[:total])


@_jit
def _toom_eval(x, k):
    x0 = _nrm(x[:k])
    x1 = _nrm(x[k:2 * k]) if x.shape[0] > k else x[:0]
    x2 = x[2 * k:] if x.shape[0] > 2 * k else x[:0]
    s02 = _addn(x0, x2)
    p1 = _addn(s02, x1)
    pm1, sm1 = _absdiff(s02, x1)
    p2 = _addn(x0, _shl(_addn(x1, _shl(x2, 1)), 1))
    return x0, p1, pm1, sm1, p2, x2


@_jit
def _toom_interp(v0, v1, vm1, sm1, v2, vinf, k, size):
    # c(t) = c0 + c1 t + ... + c4 t^4 from its values at 0, 1, -1, 2, inf
    if sm1 >= 0:
        t1 = _half_exact(_addn(v1, vm1))   # c0 + c2 + c4
        t2 = _half_exact(_subn(v1, vm1))   # c1 + c3
    else:
        t1 = _half_exact(_subn(v1, vm1))
        t2 = _half_exact(_addn(v1, vm1))
    c2 = _subn(_subn(t1, v0), vinf)
    r = _subn(v2, v0)
    r = _subn(r, _shl(c2, 2))
    r = _subn(r, _shl(vinf, 4))
    r = _half_exact(r)                     # c1 + 4 c3
    c3 = _third_exact(_subn(r, t2))
    c1 = _subn(t2, c3)
    acc = np.zeros(size + 2, np.uint64)
    acc[:v0.shape[0]] = v0
    if c1.shape[0]:
        add_into(acc, c1, k)
    if c2.shape[0]:
        add_into(acc, c2, 2 * k)
    if c3.shape[0]:
        add_into(acc, c3, 3 * k)
    if vinf.shape[0]:
        add_into(acc, vinf, 4 * k)
    return _nrm(acc)


_BLOCK = 1
_KARA = 2
_TOOM = 3


@_jit
def _c(x):
    return np.ascontiguousarray(x)


@_jit
def mul_tree(a, b, square, kf, tf, nf, plan, force):
    """Karatsuba / Toom-3 / NTT product driven by an explicit work stack.

    Numba cannot cache self-recursive functions, so the recursion is unrolled:
    a task either produces its product directly or expands into child tasks
    plus a combine step that runs after all of them (postfix order).  Child
    results are pushed on ``results`` in order.
    """
    empty = np.zeros(0, np.uint64)
    opa = [_c(a)]
    opb = [_c(b)]
    sq = [square]
    forced = [force]
    kind = [0]
    split = [0]
    sign = [0]
    size = [0]
    nchild = [0]
    work = [0]
    results = [empty]
    results.pop()
    while len(work):
        item = work.pop()
        t = item >> 1
        if item & 1:
            c = nchild[t]
            total = size[t]
            if kind[t] == _BLOCK:
                acc = np.zeros(total + 1, np.uint64)
                for j in range(c - 1, -1, -1):
                    part = results.pop()
                    if part.shape[0]:
                        add_into(acc, part, j * split[t])
                results.append(_c(_nrm(acc)))
            elif kind[t] == _KARA:
                zm = results.pop()
                z2 = results.pop()
                z0 = results.pop()
                m = split[t]
                middle = _addn(z0, z2)
                if sign[t] > 0:
                    middle = _addn(middle, zm)
                elif sign[t] < 0:
                    middle = _subn(middle, zm)
                acc = np.zeros(total + 1, np.uint64)
                acc[:z0.shape[0]] = z0
                acc[2 * m:2 * m + z2.shape[0]] = z2
                if middle.shape[0]:
                    add_into(acc, middle, m)
                results.append(_c(_nrm(acc)))
            else:
                vinf = results.pop()
                v2 = results.pop()
                vm1 = results.pop()
                v1 = results.pop()
                v0 = results.pop()
                results.append(_c(_toom_interp(v0, v1, vm1, sign[t], v2, vinf,
                                               split[t], total)))
            continue

        x = opa[t]
        y = opb[t]
        s = sq[t]
        f = forced[t]
        opa[t] = empty
        opb[t] = empty
        nx = x.shape[0]
        ny = y.shape[0]
        if nx == 0 or ny == 0:
            results.append(empty)
            continue
        n = min(nx, ny)
        big = max(nx, ny)
        if n < 2 or (f == 0 and n < kf):
            if s:
                results.append(sqr_basecase(x))
            else:
                results.append(mul_basecase(x, y))
            continue
        if 2 * n > big and f == 0 and n >= nf:
            r = ntt_mul(x, y, plan, s)
            if r.shape[0]:
                results.append(_c(r))
                continue

        kids_a = [empty]
        kids_b = [empty]
        kids_a.pop()
        kids_b.pop()
        child_force = 0
        if 2 * n <= big:
            # unbalanced: slice the longer operand into blocks of the shorter's size
            lo = x if nx >= ny else y
            sh = y if nx >= ny else x
            for i in range(0, big, n):
                kids_a.append(_c(_nrm(lo[i:i + n])))
                kids_b.append(sh)
            kind[t] = _BLOCK
            split[t] = n
            child_force = f
        elif n >= 3 and (f == 2 or (f == 0 and n >= tf)):
            k = (big + 2) // 3
            x0, xp1, xpm1, sx, xp2, xinf = _toom_eval(x, k)
            if s:
                y0, yp1, ypm1, sy, yp2, yinf = x0, xp1, xpm1, sx, xp2, xinf
            else:
                y0, yp1, ypm1, sy, yp2, yinf = _toom_eval(y, k)
            kids_a.append(_c(x0))
            kids_a.append(_c(xp1))
            kids_a.append(_c(xpm1))
            kids_a.append(_c(xp2))
            kids_a.append(_c(xinf))
            kids_b.append(_c(y0))
            kids_b.append(_c(yp1))
            kids_b.append(_c(ypm1))
            kids_b.append(_c(yp2))
            kids_b.append(_c(yinf))
            kind[t] = _TOOM
            split[t] = k
            sign[t] = sx * sy
        else:
            # subtractive Karatsuba: a0*b1 + a1*b0 = z0 + z2 + (a0 - a1)(b1 - b0)
            m = (big + 1) // 2
            x0 = _nrm(x[:m])
            x1 = x[m:] if nx > m else x[:0]
            y0 = _nrm(y[:m])
            y1 = y[m:] if ny > m else y[:0]
            dx, sx = _absdiff(x0, x1)
            if s:
                dy = dx
                sy = -sx
            else:
                dy, sy = _absdiff(y1, y0)
            kids_a.append(_c(x0))
            kids_a.append(_c(x1))
            kids_a.append(_c(dx))
            kids_b.append(_c(y0))
            kids_b.append(_c(y1))
            kids_b.append(_c(dy))
            kind[t] = _KARA
            split[t] = m
            sign[t] = sx * sy
        size[t] = nx + ny
        nchild[t] = len(kids_a)
        work.append(2 * t + 1)
        for j in range(len(kids_a) - 1, -1, -1):
            work.append(2 * len(opa))
            opa.append(kids_a[j])
            opb.append(kids_b[j])
            sq.append(s)
            forced.append(child_force)
            kind.append(0)
            split.append(0)
            sign.append(0)
            size.append(0)
            nchild.append(0)
    return results[0]
