"""Truncated power series over Z/mZ.

An :class:`FpSeries` holds the coefficients c[0..N) of a q-series reduced
mod m. Products go through the kernel backend (compiled or numpy), which
offers a schoolbook product and an NTT product; both give identical
results and the choice is a pure speed decision.
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from regulus import _backend

MAX_MODULUS = 1 << 31

#: below this many output coefficients the schoolbook product is used
MUL_THRESHOLD = 1024

#: NTT block cap (log2 of the largest transform); bounds peak memory
NTT_MAX_LOG = 25

CACHE_MAGIC = b"QSER"
CACHE_VERSION = 1


def coeff_dtype(modulus: int) -> np.dtype:
    """Narrowest unsigned dtype holding residues mod ``modulus``."""
    if modulus <= 256:
        return np.dtype(np.uint8)
    if modulus <= 65536:
        return np.dtype(np.uint16)
    return np.dtype(np.uint32)


def _check_modulus(modulus: int) -> int:
    modulus = int(modulus)
    if not 2 <= modulus < MAX_MODULUS:
        raise ValueError(f"modulus must lie in [2, 2**31), got {modulus}")
    return modulus


class FpSeries:
    """Truncated power series sum c[i] q^i with coefficients in Z/mZ.

    Instances are immutable; the coefficient array is read-only.
    """

    __slots__ = ("modulus", "coeffs", "_digest")

    def __init__(self, coeffs, modulus: int):
        modulus = _check_modulus(modulus)
        dtype = coeff_dtype(modulus)
        arr = np.asarray(coeffs)
        if arr.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if arr.dtype == dtype and (arr.size == 0 or int(arr.max()) < modulus):
            arr = arr.copy()
        elif arr.dtype.kind in "iu" and arr.dtype.itemsize <= 8:
            arr = np.mod(arr.astype(np.int64) if arr.dtype.kind == "i" else arr, modulus).astype(dtype)
        else:
            arr = np.array([int(c) % modulus for c in arr.tolist()], dtype=dtype)
        if arr.size == 0:
            raise ValueError("truncation must be at least 1")
        arr.flags.writeable = False
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "_digest", None)

    @classmethod
    def _wrap(cls, arr: np.ndarray, modulus: int) -> "FpSeries":
        # trusted constructor: arr is already reduced and of the right dtype
        obj = cls.__new__(cls)
        arr.flags.writeable = False
        object.__setattr__(obj, "modulus", modulus)
        object.__setattr__(obj, "coeffs", arr)
        object.__setattr__(obj, "_digest", None)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("FpSeries is immutable")

    @classmethod
    def zero(cls, modulus: int, truncation: int) -> "FpSeries":
        modulus = _check_modulus(modulus)
        if truncation < 1:
            raise ValueError("truncation must be at least 1")
        return cls._wrap(np.zeros(truncation, dtype=coeff_dtype(modulus)), modulus)

    @classmethod
    def one(cls, modulus: int, truncation: int) -> "FpSeries":
        z = cls.zero(modulus, truncation).coeffs.copy()
        z[0] = 1
        return cls._wrap(z, int(modulus))

    @classmethod
    def from_terms(cls, terms: Mapping[int, int] | Iterable[tuple[int, int]],
                   modulus: int, truncation: int) -> "FpSeries":
        """Series from sparse ``{exponent: coefficient}`` data; exponents past
        the truncation are dropped."""
        modulus = _check_modulus(modulus)
        if truncation < 1:
            raise ValueError("truncation must be at least 1")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, int] = {}
        for e, c in items:
            if 0 <= e < truncation:
                acc[e] = (acc.get(e, 0) + int(c)) % modulus
        out = np.zeros(truncation, dtype=coeff_dtype(modulus))
        if acc:
            out[np.fromiter(acc, np.int64, len(acc))] = np.fromiter(acc.values(), np.int64, len(acc))
        return cls._wrap(out, modulus)

    @property
    def truncation(self) -> int:
        return int(self.coeffs.shape[0])

    def __len__(self) -> int:
        return self.truncation

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return FpSeries._wrap(self.coeffs[idx].copy(), self.modulus)
        return int(self.coeffs[idx])

    def to_list(self) -> list[int]:
        return [int(c) for c in self.coeffs]

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:8].tolist())
        more = ", ..." if self.truncation > 8 else ""
        return f"FpSeries([{head}{more}], modulus={self.modulus}, N={self.truncation})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpSeries):
            return NotImplemented
        return (self.modulus == other.modulus
                and self.truncation == other.truncation
                and bool(np.array_equal(self.coeffs, other.coeffs)))

    __hash__ = None

    def _pair(self, other: "FpSeries") -> tuple[np.ndarray, np.ndarray, int]:
        if not isinstance(other, FpSeries):
            raise TypeError(f"expected FpSeries, got {type(other).__name__}")
        if other.modulus != self.modulus:
            raise ValueError(f"modulus mismatch: {self.modulus} vs {other.modulus}")
        n = min(self.truncation, other.truncation)
        return (self.coeffs[:n].astype(np.int64), other.coeffs[:n].astype(np.int64), n)

    def __add__(self, other: "FpSeries") -> "FpSeries":
        a, b, _ = self._pair(other)
        return FpSeries._wrap(((a + b) % self.modulus).astype(self.coeffs.dtype), self.modulus)

    def __sub__(self, other: "FpSeries") -> "FpSeries":
        a, b, _ = self._pair(other)
        return FpSeries._wrap(((a - b) % self.modulus).astype(self.coeffs.dtype), self.modulus)

    def __neg__(self) -> "FpSeries":
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, FpSeries):
            return mul(self, other)
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        return NotImplemented

    def scale(self, c: int) -> "FpSeries":
        c = int(c) % self.modulus
        out = (self.coeffs.astype(np.uint64) * np.uint64(c)) % np.uint64(self.modulus)
        return FpSeries._wrap(out.astype(self.coeffs.dtype), self.modulus)

    def truncate(self, n: int) -> "FpSeries":
        if not 1 <= n <= self.truncation:
            raise ValueError(f"cannot truncate a length-{self.truncation} series to {n}")
        return FpSeries._wrap(self.coeffs[:n].copy(), self.modulus)

    def shift(self, k: int) -> "FpSeries":
        """Multiply by q^k (k >= 0), keeping the truncation."""
        if k < 0:
            raise ValueError("shift must be nonnegative")
        out = np.zeros_like(self.coeffs)
        if k < self.truncation:
            out[k:] = self.coeffs[:self.truncation - k]
        return FpSeries._wrap(out, self.modulus)

    def reduce(self, modulus: int) -> "FpSeries":
        """Reduce to a modulus dividing the current one."""
        if self.modulus % modulus:
            raise ValueError(f"{modulus} does not divide {self.modulus}")
        return FpSeries(self.coeffs % modulus, modulus)

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def first_nonzero(self) -> int | None:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[0]) if nz.size else None

    def digest(self) -> str:
        """sha256 over modulus, length and coefficient values (cached)."""
        if self._digest is None:
            h = hashlib.sha256()
            h.update(struct.pack("<QQ", self.modulus, self.truncation))
            h.update(self.coeffs.astype("<u4").tobytes())
            object.__setattr__(self, "_digest", h.hexdigest())
        return self._digest


@dataclass(frozen=True)
class QExpansion:
    """q^(prefactor24/24) times a truncated series."""

    prefactor24: int
    series: FpSeries

    def __mul__(self, other: "QExpansion") -> "QExpansion":
        return QExpansion(self.prefactor24 + other.prefactor24, mul(self.series, other.series))


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a coefficientwise comparison."""

    passed: bool
    first_failure: int | None = None
    checked: int = 0
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def compare_series(a: FpSeries, b: FpSeries, n: int | None = None) -> CheckResult:
    """Coefficientwise equality on the shared prefix (or the first ``n`` terms)."""
    if a.modulus != b.modulus:
        raise ValueError(f"modulus mismatch: {a.modulus} vs {b.modulus}")
    k = min(a.truncation, b.truncation) if n is None else n
    if k > min(a.truncation, b.truncation):
        raise ValueError(f"cannot compare {k} terms of series of length "
                         f"{a.truncation} and {b.truncation}")
    diff = np.flatnonzero(a.coeffs[:k] != b.coeffs[:k])
    if diff.size:
        i = int(diff[0])
        return CheckResult(False, i, k, f"coefficient {i}: {a[i]} != {b[i]}")
    return CheckResult(True, None, k)


# ---------------------------------------------------------------- products

def _pick_method(a: np.ndarray, b: np.ndarray, n: int, threshold: int) -> tuple[str, bool]:
    if min(len(a), len(b), n) < threshold:
        return "schoolbook", len(a) > len(b)
    nza = int(np.count_nonzero(a))
    nzb = int(np.count_nonzero(b))
    # direct product over the sparser operand beats the transforms when the
    # number of nonzero terms is below a few times log2(n)
    if min(nza, nzb) <= 8 * max(1, n.bit_length()):
        return "schoolbook", nzb < nza
    return "ntt", False


def mul(a: FpSeries, b: FpSeries, *, method: str | None = None,
        threshold: int | None = None) -> FpSeries:
    """Cauchy product truncated to the shorter operand.

    ``method`` forces 'schoolbook' or 'ntt'; by default the schoolbook path
    is used below ``threshold`` coefficients (or when one factor is sparse)
    and the NTT path otherwise.
    """
    if a.modulus != b.modulus:
        raise ValueError(f"modulus mismatch: {a.modulus} vs {b.modulus}")
    n = min(a.truncation, b.truncation)
    return FpSeries._wrap(_mul_arrays(a.coeffs, b.coeffs, a.modulus, n, method, threshold), a.modulus)


def _mul_arrays(x: np.ndarray, y: np.ndarray, m: int, n: int,
                method: str | None = None, threshold: int | None = None) -> np.ndarray:
    k = _backend.kernels
    x = np.ascontiguousarray(x[:n])
    y = np.ascontiguousarray(y[:n])
    swap = False
    if method is None:
        method, swap = _pick_method(x, y, n, MUL_THRESHOLD if threshold is None else threshold)
    if method == "schoolbook":
        if swap:
            x, y = y, x
        return k.direct_mul(x, y, m, n)
    if method == "ntt":
        return k.ntt_mul(x, y, m, n, NTT_MAX_LOG)
    raise ValueError(f"unknown multiplication method {method!r}")


def invert(a: FpSeries) -> FpSeries:
    """Multiplicative inverse by Newton iteration, doubling precision each step."""
    m = a.modulus
    N = a.truncation
    try:
        c0 = pow(int(a.coeffs[0]), -1, m)
    except ValueError:
        raise ValueError(f"constant term {int(a.coeffs[0])} is not invertible mod {m}") from None
    f = a.coeffs
    g = np.empty(N, dtype=f.dtype)
    g[0] = c0
    prec = 1
    # temporaries stay in the coefficient dtype; at N ~ 1e8 int64 copies dominate memory
    top = f.dtype.type(m - 1)
    while prec < N:
        new = min(2 * prec, N)
        h = _mul_arrays(f[:new], g[:prec], m, new)
        # 1 - f g vanishes below prec; its tail drives the correction
        e = h[prec:new].copy()
        del h
        np.subtract(top, e, out=e)
        e += 1  # m - e; e = 0 gives m, which wraps to 0 when m fills the dtype
        e[e == m] = 0
        g[prec:new] = _mul_arrays(g[:new - prec], e, m, new - prec)
        del e
        prec = new
    return FpSeries._wrap(g, m)


def power(a: FpSeries, e: int) -> FpSeries:
    """a**e by square-and-multiply; negative e inverts."""
    if e < 0:
        return invert(power(a, -e))
    result = FpSeries.one(a.modulus, a.truncation)
    base = a
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


# ------------------------------------------------------ eta and partitions

def pentagonal_terms(limit: int) -> list[tuple[int, int]]:
    """(exponent, sign) pairs of (q;q)_inf = sum (-1)^k q^{k(3k-1)/2}, exponent < limit."""
    terms = [(0, 1)] if limit > 0 else []
    k = 1
    while k * (3 * k - 1) // 2 < limit:
        s = -1 if k % 2 else 1
        terms.append((k * (3 * k - 1) // 2, s))
        if k * (3 * k + 1) // 2 < limit:
            terms.append((k * (3 * k + 1) // 2, s))
        k += 1
    return terms


def _euler(delta: int, modulus: int, N: int) -> FpSeries:
    # prod (1 - q^{delta n}) from the pentagonal number theorem
    limit = (N - 1) // delta + 1
    return FpSeries.from_terms(((delta * e, s) for e, s in pentagonal_terms(limit)), modulus, N)


def eta_power_series(delta: int, r: int, modulus: int, N: int) -> FpSeries:
    """prod_{n>=1} (1 - q^{delta n})^r to N terms (the q^{delta r/24} factor omitted)."""
    if delta < 1:
        raise ValueError("delta must be positive")
    if N < 1:
        raise ValueError("truncation must be at least 1")
    modulus = _check_modulus(modulus)
    if r == 0:
        return FpSeries.one(modulus, N)
    if r == 1:
        return _euler(delta, modulus, N)
    # build at the undilated length, then spread out by delta
    base_len = (N - 1) // delta + 1
    e = _euler(1, modulus, base_len)
    s = invert(e) if r == -1 else power(e, r)
    return dilate(s, delta, N) if delta > 1 else s


def eta_quotient_expansion(eq, modulus: int, N: int) -> QExpansion:
    """Expansion of prod eta(delta z)^{r_delta}: prefactor24 = sum delta r_delta."""
    if N < 1:
        raise ValueError("truncation must be at least 1")
    exps = getattr(eq, "exponents", eq)
    modulus = _check_modulus(modulus)
    pre = 0
    num = FpSeries.one(modulus, N)
    den = None
    for delta, r in sorted(exps.items()):
        if r == 0:
            continue
        if delta < 1:
            raise ValueError(f"eta argument {delta} must be positive")
        pre += delta * r
        factor = eta_power_series(delta, abs(r), modulus, N)
        if r > 0:
            num = mul(num, factor)
        else:
            den = factor if den is None else mul(den, factor)
    series = num if den is None else mul(num, invert(den))
    return QExpansion(pre, series)


def regular_partition_series(reg_k: int, modulus: int, N: int, *,
                             method: str = "fast") -> FpSeries:
    """sum b_k(n) q^n mod m to N terms.

    ``method='fast'`` multiplies the sparse numerator (q^k;q^k) by the Newton
    inverse of (q;q); ``method='recurrence'`` runs the O(N sqrt N)
    pentagonal recurrence.
    """
    if reg_k < 2:
        raise ValueError("reg_k must be at least 2")
    if N < 1:
        raise ValueError("truncation must be at least 1")
    modulus = _check_modulus(modulus)
    if method == "recurrence":
        return FpSeries._wrap(_backend.kernels.partition_recurrence(reg_k, modulus, N), modulus)
    if method != "fast":
        raise ValueError(f"unknown method {method!r}")
    inv = invert(_euler(1, modulus, N))
    return mul(_euler(reg_k, modulus, N), inv)


def bk_exact(reg_k: int, n: int, *, limit: int = 60) -> int:
    """Exact number of partitions of n with no part divisible by reg_k."""
    if reg_k < 2:
        raise ValueError("reg_k must be at least 2")
    if n < 0:
        return 0
    if n > limit:
        raise ValueError(f"n={n} exceeds the exact-mode limit {limit}")
    ways = [1] + [0] * n
    for part in range(1, n + 1):
        if part % reg_k == 0:
            continue
        for t in range(part, n + 1):
            ways[t] += ways[t - part]
    return ways[n]


# ---------------------------------------------------------- index maps

def u_operator(a: FpSeries, j: int) -> FpSeries:
    """sum a(jn) q^n; the truncation becomes floor((N-1)/j) + 1."""
    if j < 1:
        raise ValueError("j must be positive")
    return FpSeries._wrap(a.coeffs[::j].copy(), a.modulus)


def dilate(a: FpSeries, j: int, N: int | None = None) -> FpSeries:
    """a(q^j): coefficient a(n) moves to jn. Known exactly up to j*len(a) terms."""
    if j < 1:
        raise ValueError("j must be positive")
    full = a.truncation * j
    if N is None:
        N = full
    if N > full:
        raise ValueError(f"dilation by {j} of a length-{a.truncation} series is "
                         f"known to {full} terms, {N} requested")
    out = np.zeros(N, dtype=a.coeffs.dtype)
    src = a.coeffs[:(N - 1) // j + 1]
    out[::j] = src
    return FpSeries._wrap(out, a.modulus)


def frobenius_congruence_check(m: int, N: int) -> CheckResult:
    """Check (q;q)^m == (q^m;q^m) mod m coefficientwise to N terms.

    Holds for m prime; composite m fails, and the first failing index is
    reported.
    """
    lhs = power(_euler(1, m, N), m)
    rhs = dilate(_euler(1, m, (N - 1) // m + 1), m, N)
    return compare_series(lhs, rhs)


# ------------------------------------------------------------- disk cache

def save_series(series: FpSeries, path: str | Path) -> None:
    """Write the binary coefficient cache (one byte per coefficient)."""
    if series.modulus > 256:
        raise ValueError("the coefficient cache stores one byte per residue; modulus must be <= 256")
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(bytes([CACHE_VERSION]))
        fh.write(struct.pack("<QQ", series.modulus, series.truncation))
        fh.write(series.coeffs.astype(np.uint8).tobytes())
    tmp.replace(path)


def load_series(path: str | Path, modulus: int | None = None) -> FpSeries:
    """Read a coefficient cache written by :func:`save_series`."""
    with open(path, "rb") as fh:
        head = fh.read(21)
        if len(head) < 21 or head[:4] != CACHE_MAGIC:
            raise ValueError(f"{path}: not a series cache (bad magic)")
        if head[4] != CACHE_VERSION:
            raise ValueError(f"{path}: unsupported cache version {head[4]}")
        mod, length = struct.unpack("<QQ", head[5:21])
        if modulus is not None and mod != modulus:
            raise ValueError(f"{path}: cached modulus {mod} does not match requested {modulus}")
        data = fh.read()
    if len(data) != length:
        raise ValueError(f"{path}: expected {length} coefficients, found {len(data)}")
    arr = np.frombuffer(data, dtype=np.uint8).copy()
    if length == 0 or (arr.size and int(arr.max()) >= mod):
        raise ValueError(f"{path}: corrupt coefficient data")
    return FpSeries._wrap(arr, int(mod))
