# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for truncated power-series arithmetic mod m.

Every kernel here has a numpy twin in ``regulus._fallback`` with the same
signature and bit-identical results.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint8_t, uint16_t, uint32_t, uint64_t, int64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset

cnp.import_array()

cdef extern from "_ntt.h" nogil:
    size_t RG_SMALL
    uint32_t rg_mred(uint64_t t, uint32_t p, uint32_t pinv)
    uint64_t rg_modm(uint64_t x, uint64_t m, uint64_t minv)
    void rg_fill_powers(uint32_t* tw, size_t h, uint32_t w, uint32_t one,
                        uint32_t p, uint32_t pinv)
    void rg_ntt_dif(uint32_t* a, size_t n, uint32_t* tw, const uint32_t* roots,
                    const uint32_t* small_tw, uint32_t one, uint32_t p, uint32_t pinv)
    void rg_ntt_dit(uint32_t* a, size_t n, uint32_t* tw, const uint32_t* iroots,
                    const uint32_t* small_tw, uint32_t one, uint32_t p, uint32_t pinv)
    void rg_pointwise(uint32_t* x, const uint32_t* y, size_t n, uint32_t p, uint32_t pinv)
    void rg_scale(uint32_t* x, uint32_t c, size_t n, uint32_t p, uint32_t pinv)

ctypedef fused coeff_t:
    uint8_t
    uint16_t
    uint32_t

# (prime, primitive root, 2-adic valuation of p - 1); all below 2**31 so the
# Montgomery reduction never overflows 64 bits.
NTT_PRIMES = ((2013265921, 31, 27), (1811939329, 13, 26), (469762049, 3, 26))
MAX_NTT_LOG = 26

# output chunk for the direct product; keeps the uint64 accumulator in L2
DEF CHUNK = 1 << 15


cdef class _Prime:
    """Montgomery constants and root tables for one NTT prime."""
    cdef uint32_t p
    cdef uint32_t pinv   # -p^{-1} mod 2^32
    cdef uint32_t r2     # 2^64 mod p
    cdef uint32_t one    # 2^32 mod p
    cdef uint32_t roots[32]
    cdef uint32_t iroots[32]
    cdef uint32_t* small_fwd
    cdef uint32_t* small_inv

    def __cinit__(self, uint32_t p, uint32_t g, int maxlog):
        cdef uint32_t inv = 1
        cdef int s
        cdef size_t h
        for s in range(5):
            inv *= 2 - p * inv
        self.p = p
        self.pinv = <uint32_t>(0 - inv)
        self.r2 = <uint32_t>(pow(2, 64, p))
        self.one = <uint32_t>(pow(2, 32, p))
        for s in range(maxlog + 1):
            w = pow(g, (p - 1) >> s, p)
            self.roots[s] = self.mont(w)
            self.iroots[s] = self.mont(pow(w, p - 2, p))
        self.small_fwd = <uint32_t*>malloc(RG_SMALL * sizeof(uint32_t))
        self.small_inv = <uint32_t*>malloc(RG_SMALL * sizeof(uint32_t))
        if self.small_fwd == NULL or self.small_inv == NULL:
            raise MemoryError()
        h = 1
        s = 1
        while h < RG_SMALL:
            rg_fill_powers(self.small_fwd + h, h, self.roots[s], self.one, p, self.pinv)
            rg_fill_powers(self.small_inv + h, h, self.iroots[s], self.one, p, self.pinv)
            h <<= 1
            s += 1

    def __dealloc__(self):
        free(self.small_fwd)
        free(self.small_inv)

    cdef inline uint32_t mont(self, uint64_t x) noexcept nogil:
        return rg_mred(<uint64_t>(<uint32_t>x) * self.r2, self.p, self.pinv)


_PRIMES = [_Prime(p, g, s) for p, g, s in NTT_PRIMES]


cdef void load_block(uint32_t* dst, size_t size, const coeff_t[::1] src,
                     Py_ssize_t start, Py_ssize_t length, _Prime P) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(length):
        dst[i] = rg_mred(<uint64_t>src[start + i] * P.r2, P.p, P.pinv)
    for i in range(length, <Py_ssize_t>size):
        dst[i] = 0


def ntt_primes_needed(Py_ssize_t length, uint64_t m):
    """Number of NTT primes whose product exceeds ``length * (m - 1)**2``."""
    bound = length * (m - 1) * (m - 1)
    prod = 1
    for k, (p, _, _) in enumerate(NTT_PRIMES):
        prod *= p
        if prod > bound:
            return k + 1
    raise ValueError("modulus too large for the NTT path")


def ntt_mul(const coeff_t[::1] a, const coeff_t[::1] b, uint64_t m, Py_ssize_t n,
            int max_log=25):
    """Truncated product of residue vectors via NTT over word primes + CRT.

    Operands longer than ``2**(max_log - 1)`` are cut into blocks so a single
    transform never exceeds ``2**max_log`` words.
    """
    cdef Py_ssize_t la = min(a.shape[0], n), lb = min(b.shape[0], n)
    out_arr = np.zeros(max(n, 0), dtype=np.asarray(a).dtype)
    if n <= 0 or la == 0 or lb == 0:
        return out_arr
    max_log = min(max_log, MAX_NTT_LOG)
    cdef coeff_t[::1] out = out_arr
    cdef Py_ssize_t L = max(la, lb) if la + lb - 1 <= (1 << max_log) else 1 << (max_log - 1)
    cdef int npr = ntt_primes_needed(min(L, la, lb), m)
    cdef size_t size = 1
    while size < <size_t>(min(la, L) + min(lb, L) - 1):
        size <<= 1

    cdef uint32_t* A = <uint32_t*>malloc(size * sizeof(uint32_t))
    cdef uint32_t* B = <uint32_t*>malloc(size * sizeof(uint32_t))
    cdef uint32_t* tw = <uint32_t*>malloc((size // 2 + 1) * sizeof(uint32_t))
    cdef uint32_t* R0 = <uint32_t*>malloc(size * sizeof(uint32_t)) if npr >= 2 else NULL
    cdef uint32_t* R1 = <uint32_t*>malloc(size * sizeof(uint32_t)) if npr >= 3 else NULL
    if A == NULL or B == NULL or tw == NULL or (npr >= 2 and R0 == NULL) or (npr >= 3 and R1 == NULL):
        free(A); free(B); free(tw); free(R0); free(R1)
        raise MemoryError()

    cdef _Prime P
    cdef _Prime P0 = _PRIMES[0], P1 = _PRIMES[1], P2 = _PRIMES[2]
    cdef Py_ssize_t ia, jb, lena, lenb, off, t, lim
    cdef size_t sz
    cdef int k
    cdef uint32_t ninv, x0, x1, x2, y1, y2
    cdef uint64_t val
    cdef uint64_t p1 = P1.p, p2 = P2.p
    cdef uint64_t inv01 = pow(int(P0.p), -1, int(p1))
    cdef uint64_t inv02 = pow(int(P0.p), -1, int(p2))
    cdef uint64_t inv12 = pow(int(p1), -1, int(p2))
    cdef uint64_t p0m = P0.p % m, p01m = (<uint64_t>P0.p * p1) % m
    cdef uint64_t minv = 0xFFFFFFFFFFFFFFFF // m
    # with one prime the transform of an a-block is reused across b-blocks
    cdef bint cache_a = npr == 1
    cdef Py_ssize_t cached_ia = -1
    cdef size_t cached_sz = 0

    try:
        ia = 0
        while ia < la:
            lena = min(L, la - ia)
            jb = 0
            while jb < lb and ia + jb < n:
                lenb = min(L, lb - jb)
                sz = 1
                while sz < <size_t>(lena + lenb - 1):
                    sz <<= 1
                for k in range(npr):
                    P = _PRIMES[k]
                    ninv = <uint32_t>pow(int(sz), int(P.p) - 2, int(P.p))
                    with nogil:
                        if not (cache_a and cached_ia == ia and cached_sz == sz):
                            load_block(A, sz, a, ia, lena, P)
                            rg_ntt_dif(A, sz, tw, P.roots, P.small_fwd, P.one, P.p, P.pinv)
                            cached_ia = ia
                            cached_sz = sz
                        load_block(B, sz, b, jb, lenb, P)
                        rg_ntt_dif(B, sz, tw, P.roots, P.small_fwd, P.one, P.p, P.pinv)
                        rg_pointwise(B, A, sz, P.p, P.pinv)
                        rg_ntt_dit(B, sz, tw, P.iroots, P.small_inv, P.one, P.p, P.pinv)
                        # B is sz * conv in Montgomery form; a plain 1/sz both
                        # rescales and leaves Montgomery form
                        rg_scale(B, ninv, sz, P.p, P.pinv)
                        if npr >= 2 and k == 0:
                            memcpy(R0, B, sz * sizeof(uint32_t))
                        elif npr >= 3 and k == 1:
                            memcpy(R1, B, sz * sizeof(uint32_t))
                    if not cache_a:
                        cached_ia = -1
                off = ia + jb
                lim = min(lena + lenb - 1, n - off)
                with nogil:
                    if npr == 1:
                        for t in range(lim):
                            val = out[off + t] + rg_modm(B[t], m, minv)
                            out[off + t] = <coeff_t>(val - m if val >= m else val)
                    elif npr == 2:
                        for t in range(lim):
                            x0 = R0[t]
                            x1 = B[t]
                            y1 = <uint32_t>(((x1 + p1 - x0 % p1) % p1) * inv01 % p1)
                            val = rg_modm(x0 + p0m * rg_modm(y1, m, minv), m, minv)
                            val += out[off + t]
                            out[off + t] = <coeff_t>(val - m if val >= m else val)
                    else:
                        for t in range(lim):
                            x0 = R0[t]
                            x1 = R1[t]
                            x2 = B[t]
                            y1 = <uint32_t>(((x1 + p1 - x0 % p1) % p1) * inv01 % p1)
                            y2 = <uint32_t>(((x2 + p2 - x0 % p2) % p2) * inv02 % p2)
                            y2 = <uint32_t>(((y2 + p2 - y1 % p2) % p2) * inv12 % p2)
                            val = rg_modm(x0 + p0m * rg_modm(y1, m, minv)
                                          + p01m * rg_modm(y2, m, minv), m, minv)
                            val += out[off + t]
                            out[off + t] = <coeff_t>(val - m if val >= m else val)
                jb += L
            ia += L
    finally:
        free(A); free(B); free(tw); free(R0); free(R1)
    return out_arr


def direct_mul(const coeff_t[::1] a, const coeff_t[::1] b, uint64_t m, Py_ssize_t n):
    """Schoolbook truncated product; zero coefficients of ``a`` are skipped.

    Accumulates in 64-bit registers and reduces only when the next batch of
    products could overflow.
    """
    cdef Py_ssize_t la = min(a.shape[0], n), lb = min(b.shape[0], n)
    out_arr = np.zeros(max(n, 0), dtype=np.asarray(a).dtype)
    if n <= 0 or la == 0 or lb == 0:
        return out_arr
    cdef coeff_t[::1] out = out_arr
    cdef uint64_t sq = (m - 1) * (m - 1)
    cdef uint64_t limit = 0xFFFFFFFFFFFFFFFF // sq if sq else 0xFFFFFFFF
    limit -= 1
    if limit > 0x7FFFFFFF:
        limit = 0x7FFFFFFF
    cdef uint64_t* acc = <uint64_t*>malloc(CHUNK * sizeof(uint64_t))
    if acc == NULL:
        raise MemoryError()
    cdef Py_ssize_t c0, c1, i, t, t0, t1, w
    cdef uint64_t ai, cnt
    with nogil:
        c0 = 0
        while c0 < n:
            c1 = min(n, c0 + CHUNK)
            memset(acc, 0, CHUNK * sizeof(uint64_t))
            cnt = 0
            for i in range(min(la, c1)):
                ai = a[i]
                if ai == 0:
                    continue
                t0 = c0 - i if c0 > i else 0
                t1 = min(lb, c1 - i)
                if t0 >= t1:
                    continue
                w = i - c0
                for t in range(t0, t1):
                    acc[w + t] += ai * b[t]
                cnt += 1
                if cnt >= limit:
                    for t in range(c1 - c0):
                        acc[t] %= m
                    cnt = 0
            for t in range(c1 - c0):
                out[c0 + t] = <coeff_t>(acc[t] % m)
            c0 = c1
    free(acc)
    return out_arr


def partition_recurrence(long k, uint64_t m, Py_ssize_t n):
    """k-regular partition counts mod m from the pentagonal recurrence.

    b(i) = e(i/k) - sum_{g >= 1} s_g b(i - g), where (q;q) = sum s_g q^g and
    e are the coefficients of (q^k;q^k). Cost O(n sqrt n).
    """
    dtype = np.uint8 if m <= 256 else (np.uint16 if m <= 65536 else np.uint32)
    out_arr = np.zeros(max(n, 0), dtype=np.uint64)
    if n <= 0:
        return out_arr.astype(dtype)
    # generalized pentagonal numbers and signs
    pent = []
    j = 1
    while True:
        g1 = j * (3 * j - 1) // 2
        if g1 >= n:
            break
        s = -1 if j % 2 else 1
        pent.append((g1, s))
        g2 = j * (3 * j + 1) // 2
        if g2 < n:
            pent.append((g2, s))
        j += 1
    num = np.zeros(n, dtype=np.int64)
    num[0] = 1
    j = 1
    while k * (j * (3 * j - 1) // 2) < n:
        s = -1 if j % 2 else 1
        num[k * (j * (3 * j - 1) // 2)] += s
        g2 = k * (j * (3 * j + 1) // 2)
        if g2 < n:
            num[g2] += s
        j += 1
    cdef Py_ssize_t npent = len(pent)
    cdef int64_t[::1] gs = np.array([g for g, _ in pent] + [n], dtype=np.int64)
    cdef int64_t[::1] sg = np.array([s for _, s in pent] + [0], dtype=np.int64)
    cdef int64_t[::1] nm = num
    cdef uint64_t[::1] out = out_arr
    cdef Py_ssize_t i, t
    cdef uint64_t pos, neg
    cdef int64_t e
    with nogil:
        for i in range(n):
            e = nm[i]
            pos = <uint64_t>(e if e > 0 else 0)
            neg = <uint64_t>(-e if e < 0 else 0)
            t = 0
            while gs[t] <= i:
                # subtracting s_g * b(i-g)
                if sg[t] > 0:
                    neg += out[i - gs[t]]
                else:
                    pos += out[i - gs[t]]
                t += 1
            out[i] = (pos % m + m - neg % m) % m
    return out_arr.astype(dtype)
