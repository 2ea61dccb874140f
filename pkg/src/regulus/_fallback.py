"""Pure numpy versions of the kernels in ``_core.pyx``.

Same signatures and bit-identical results; used when the extension is not
built or ``REGULUS_BACKEND=python`` is set.
"""
import numpy as np

NTT_PRIMES = ((2013265921, 31, 27), (1811939329, 13, 26), (469762049, 3, 26))
MAX_NTT_LOG = 26

# largest value a uint64 accumulator may reach before reduction
_U64_MAX = (1 << 64) - 1


def ntt_primes_needed(length, m):
    """Number of NTT primes whose product exceeds ``length * (m - 1)**2``."""
    bound = length * (m - 1) ** 2
    prod = 1
    for k, (p, _, _) in enumerate(NTT_PRIMES):
        prod *= p
        if prod > bound:
            return k + 1
    raise ValueError("modulus too large for the NTT path")


def _powers(w, h, p):
    out = np.ones(h, dtype=np.uint64)
    filled = 1
    step = w
    while filled < h:
        take = min(filled, h - filled)
        out[filled:filled + take] = out[:take] * np.uint64(step) % np.uint64(p)
        filled += take
        step = step * step % p
    return out


def _ntt(a, p, g, inverse):
    n = a.shape[0]
    pp = np.uint64(p)
    if not inverse:
        h = n // 2
        while h >= 1:
            w = pow(g, (p - 1) // (2 * h), p)
            tw = _powers(w, h, p)
            v = a.reshape(-1, 2, h)
            x = v[:, 0, :].copy()
            y = v[:, 1, :]
            v[:, 0, :] = (x + y) % pp
            v[:, 1, :] = (x + pp - y) % pp * tw % pp
            h //= 2
    else:
        h = 1
        while h < n:
            w = pow(g, p - 1 - (p - 1) // (2 * h), p)
            tw = _powers(w, h, p)
            v = a.reshape(-1, 2, h)
            x = v[:, 0, :].copy()
            y = v[:, 1, :] * tw % pp
            v[:, 0, :] = (x + y) % pp
            v[:, 1, :] = (x + pp - y) % pp
            h *= 2
    return a


def _convolve_prime(x, y, size, prime):
    p, g, _ = prime
    A = np.zeros(size, dtype=np.uint64)
    B = np.zeros(size, dtype=np.uint64)
    A[:x.shape[0]] = x % np.uint64(p)
    B[:y.shape[0]] = y % np.uint64(p)
    _ntt(A, p, g, False)
    _ntt(B, p, g, False)
    A = A * B % np.uint64(p)
    _ntt(A, p, g, True)
    return A * np.uint64(pow(size, p - 2, p)) % np.uint64(p)


def _crt_mod(residues, m):
    mm = np.uint64(m)
    x0 = residues[0]
    if len(residues) == 1:
        return x0 % mm
    (p0, _, _), (p1, _, _) = NTT_PRIMES[0], NTT_PRIMES[1]
    P1 = np.uint64(p1)
    y1 = (residues[1] + P1 - x0 % P1) % P1 * np.uint64(pow(p0, -1, p1)) % P1
    val = (x0 % mm + np.uint64(p0 % m) * (y1 % mm)) % mm
    if len(residues) == 2:
        return val
    p2 = NTT_PRIMES[2][0]
    P2 = np.uint64(p2)
    y2 = (residues[2] + P2 - x0 % P2) % P2 * np.uint64(pow(p0, -1, p2)) % P2
    y2 = (y2 + P2 - y1 % P2) % P2 * np.uint64(pow(p1, -1, p2)) % P2
    return (val + np.uint64(p0 * p1 % m) * (y2 % mm)) % mm


def ntt_mul(a, b, m, n, max_log=25):
    """Truncated product of residue vectors via NTT over word primes + CRT."""
    la, lb = min(len(a), n), min(len(b), n)
    out = np.zeros(max(n, 0), dtype=np.asarray(a).dtype)
    if n <= 0 or la == 0 or lb == 0:
        return out
    max_log = min(max_log, MAX_NTT_LOG)
    L = max(la, lb) if la + lb - 1 <= (1 << max_log) else 1 << (max_log - 1)
    npr = ntt_primes_needed(min(L, la, lb), m)
    a64 = np.asarray(a[:la], dtype=np.uint64)
    b64 = np.asarray(b[:lb], dtype=np.uint64)
    acc = np.zeros(n, dtype=np.uint64)
    mm = np.uint64(m)
    for ia in range(0, la, L):
        x = a64[ia:ia + L]
        for jb in range(0, lb, L):
            off = ia + jb
            if off >= n:
                break
            y = b64[jb:jb + L]
            size = 1
            while size < len(x) + len(y) - 1:
                size *= 2
            residues = [_convolve_prime(x, y, size, NTT_PRIMES[k]) for k in range(npr)]
            lim = min(len(x) + len(y) - 1, n - off)
            val = _crt_mod([r[:lim] for r in residues], m)
            acc[off:off + lim] = (acc[off:off + lim] + val) % mm
    out[:] = acc
    return out


def direct_mul(a, b, m, n):
    """Schoolbook truncated product; zero coefficients of ``a`` are skipped."""
    la, lb = min(len(a), n), min(len(b), n)
    out = np.zeros(max(n, 0), dtype=np.asarray(a).dtype)
    if n <= 0 or la == 0 or lb == 0:
        return out
    mm = np.uint64(m)
    limit = max(1, _U64_MAX // max((m - 1) ** 2, 1) - 1)
    acc = np.zeros(n, dtype=np.uint64)
    b64 = np.asarray(b[:lb], dtype=np.uint64)
    cnt = 0
    for i in np.flatnonzero(np.asarray(a[:la])):
        i = int(i)
        t = min(lb, n - i)
        acc[i:i + t] += np.uint64(int(a[i])) * b64[:t]
        cnt += 1
        if cnt >= limit:
            acc %= mm
            cnt = 0
    out[:] = acc % mm
    return out


def partition_recurrence(k, m, n):
    """k-regular partition counts mod m from the pentagonal recurrence."""
    dtype = np.uint8 if m <= 256 else (np.uint16 if m <= 65536 else np.uint32)
    if n <= 0:
        return np.zeros(0, dtype=dtype)
    pent = []
    j = 1
    while j * (3 * j - 1) // 2 < n:
        s = -1 if j % 2 else 1
        pent.append((j * (3 * j - 1) // 2, s))
        if j * (3 * j + 1) // 2 < n:
            pent.append((j * (3 * j + 1) // 2, s))
        j += 1
    num = [0] * n
    num[0] = 1
    j = 1
    while k * (j * (3 * j - 1) // 2) < n:
        s = -1 if j % 2 else 1
        num[k * (j * (3 * j - 1) // 2)] += s
        if k * (j * (3 * j + 1) // 2) < n:
            num[k * (j * (3 * j + 1) // 2)] += s
        j += 1
    b = [0] * n
    for i in range(n):
        acc = num[i]
        for g, s in pent:
            if g > i:
                break
            acc -= s * b[i - g]
        b[i] = acc % m
    return np.array(b, dtype=dtype)
