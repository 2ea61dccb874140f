"""Ramanujan-type congruence families b_k(A n + B) = 0 (mod m) and their checks."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from regulus.etaq import is_prime, kronecker
from regulus.fpseries import FpSeries, regular_partition_series
from regulus.engine.forms import FamilyConstruction

PAPER_EXAMPLE = "paper_example"
HECKE_SPECIALIZED = "hecke_specialized"
MOD3_FAMILY = "mod3_family"
PARITY = "parity"
CRT_COMPOSED = "crt_composed"
PROVENANCES = (PAPER_EXAMPLE, HECKE_SPECIALIZED, MOD3_FAMILY, PARITY, CRT_COMPOSED)


@dataclass(frozen=True)
class CongruenceFamily:
    """The claim b_{reg_k}(A n + B) = 0 (mod modulus) for every n >= 0.

    A modulus of 1 is allowed and denotes the trivially true family; it is
    the identity for :func:`compose_crt`.
    """

    reg_k: int
    modulus: int
    A: int
    B: int
    provenance: str = PAPER_EXAMPLE
    derivation: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.reg_k < 2:
            raise ValueError("reg_k must be at least 2")
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if self.A < 1 or not 0 <= self.B < self.A:
            raise ValueError(f"need A > 0 and 0 <= B < A, got A={self.A}, B={self.B}")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def __str__(self) -> str:
        return f"b{self.reg_k}({self.A}n + {self.B}) = 0 (mod {self.modulus})"

    def indices(self, n_max: int) -> np.ndarray:
        return self.A * np.arange(n_max + 1, dtype=np.int64) + self.B

    def to_dict(self) -> dict:
        return {"reg_k": self.reg_k, "modulus": self.modulus, "A": self.A, "B": self.B,
                "provenance": self.provenance, "derivation": dict(self.derivation)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "CongruenceFamily":
        return cls(int(d["reg_k"]), int(d["modulus"]), int(d["A"]), int(d["B"]),
                   d.get("provenance", PAPER_EXAMPLE), dict(d.get("derivation", {})))

    @classmethod
    def from_json(cls, text: str) -> "CongruenceFamily":
        return cls.from_dict(json.loads(text))


def _family(reg_k, modulus, A, B, provenance, **derivation) -> CongruenceFamily:
    # offsets beyond A are still valid: they describe the same progression
    return CongruenceFamily(reg_k, modulus, A, B % A, provenance, derivation)


def _check_l(fc: FamilyConstruction, l: int) -> None:
    if not is_prime(l) or l == 2:
        raise ValueError(f"l must be an odd prime, got {l}")
    if l == fc.m:
        raise ValueError("l must differ from m")
    if math.gcd(l, fc.shift_d) != 1:
        raise ValueError(f"l={l} must be coprime to {fc.shift_d}")


def specialize_proposition(reg_k: int, m: int, l: int, j: int | None = None) -> list[CongruenceFamily]:
    """Families b(M l (l n + j) + (M s l^2 - c)/d) = 0 (mod m) for 1 <= j <= l-1.

    Here M is the multiplier (m, or 25 in the b6 m = 5 case) and s solves
    M s l^2 = c (mod d); s = m for b4 and s = 5 for the b6 m = 5 case,
    giving offsets (m^2 l^2 - 1)/8 and (125 l^2 - 5)/24. These follow from
    F | T(l) = 0 (mod m) and only hold for the l where that was verified.
    """
    fc = FamilyConstruction.for_family(reg_k, m)
    _check_l(fc, l)
    M, c, d = fc.multiplier, fc.shift_c, fc.shift_d
    if reg_k == 4:
        s = m
    elif M == 25:
        s = 5
    else:
        s = c * pow(M * l * l, -1, d) % d
    assert (M * s * l * l - c) % d == 0
    off = (M * s * l * l - c) // d
    A = M * l * l
    js = range(1, l) if j is None else [j]
    out = []
    for jj in js:
        if not 1 <= jj <= l - 1:
            raise ValueError(f"j must lie in [1, {l - 1}]")
        out.append(_family(reg_k, m, A, M * l * jj + off, HECKE_SPECIALIZED,
                           m=m, l=l, j=jj, multiplier=M))
    return out


@dataclass(frozen=True)
class MinimalSpecialization:
    family: CongruenceFamily
    residue: int  # r: the preimage index is n_t = d (l t + u) + r
    u: int

    def preimage(self, t: int) -> int:
        d = self.family.derivation["d"]
        l = self.family.derivation["l"]
        return d * (l * t + self.u) + self.residue


def specialize_minimal(reg_k: int, m: int, l: int) -> MinimalSpecialization:
    """Smallest-offset progression from T(l) F = 0 (mod m).

    Solves M l n = c (mod d) for the least residue r, takes
    n_t = d (l t + u) + r with the least u making n_t coprime to l, and
    returns A = M l^2, B = (M l (d u + r) - c)/d.
    """
    fc = FamilyConstruction.for_family(reg_k, m)
    _check_l(fc, l)
    M, c, d = fc.multiplier, fc.shift_c, fc.shift_d
    r = c * pow(M * l, -1, d) % d
    u = next((u for u in range(l) if (d * u + r) % l), None)
    assert u is not None, "no coprime preimage class; impossible for l coprime to d"
    n0 = d * u + r
    # n_t = n0 + d l t, so both conditions hold for every t once they hold at t = 0
    assert (M * l * n0 - c) % d == 0
    assert n0 % l != 0
    A = M * l * l
    B = (M * l * n0 - c) // d
    fam = CongruenceFamily(reg_k, m, A, B, HECKE_SPECIALIZED,
                           {"m": m, "l": l, "multiplier": M, "c": c, "d": d, "r": r, "u": u})
    return MinimalSpecialization(fam, r, u)


# ------------------------------------------------------------ verification

@dataclass(frozen=True)
class FamilyCheck:
    passed: bool
    checked: int
    counterexample: int | None = None   # failing n
    index: int | None = None            # A n + B at the failure
    residue: int | None = None

    def __bool__(self) -> bool:
        return self.passed


def verify_family(f: CongruenceFamily, n_max: int, series: FpSeries | None = None) -> FamilyCheck:
    """Direct check of b(A n + B) mod m for 0 <= n <= n_max.

    ``series`` may supply a precomputed b_k series mod m (or mod a multiple
    of m) of sufficient length.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if f.modulus == 1:
        return FamilyCheck(True, n_max + 1)
    need = f.A * n_max + f.B + 1
    if series is None:
        series = regular_partition_series(f.reg_k, f.modulus, need)
    if series.truncation < need:
        raise ValueError(f"series has {series.truncation} terms, {need} needed")
    if series.modulus % f.modulus:
        raise ValueError(f"series modulus {series.modulus} is not a multiple of {f.modulus}")
    vals = series.coeffs[f.indices(n_max)].astype(np.int64) % f.modulus
    bad = np.flatnonzero(vals)
    if bad.size:
        n = int(bad[0])
        return FamilyCheck(False, n_max + 1, n, f.A * n + f.B, int(vals[n]))
    return FamilyCheck(True, n_max + 1)


# ------------------------------------------------------------ mod 3 and 2

MOD3_RESIDUES = (13, 17, 19, 23)
MOD3_BRANCHES = {"l2": 1, "9l2": 9}


@dataclass(frozen=True)
class Mod3Result:
    l: int
    accepted: bool
    symbol: int
    families: dict[str, list[CongruenceFamily]]


def mod3_families(l: int, j: int | None = None) -> Mod3Result:
    """b4(3l(ln+j) + (l^2-1)/8) and b4(3l(ln+j) + (9l^2-1)/8) = 0 (mod 3).

    Accepted exactly when kronecker(-6, l) = -1.
    """
    if not is_prime(l):
        raise ValueError(f"l must be prime, got {l}")
    sym = kronecker(-6, l)
    if sym != -1:
        return Mod3Result(l, False, sym, {})
    A = 3 * l * l
    js = range(1, l) if j is None else [j]
    fams = {}
    for name, t in MOD3_BRANCHES.items():
        off = (t * l * l - 1) // 8
        fams[name] = [_family(4, 3, A, 3 * l * jj + off, MOD3_FAMILY, l=l, j=jj, branch=name)
                      for jj in js]
    return Mod3Result(l, True, sym, fams)


def mod3_offset(l: int, t: int, j: int, n: int = 0) -> int:
    """Index 3l(ln+j) + (t l^2 - 1)/8 for a branch multiplier t (1, 9, 17, ...)."""
    return 3 * l * (l * n + j) + (t * l * l - 1) // 8


def parity_families(m: int) -> list[CongruenceFamily]:
    """b4(m^2 n + j) = 0 (mod 2) for every j in [0, m^2) with m || 8j+1."""
    if m == 2 or not is_prime(m):
        raise ValueError(f"m must be an odd prime, got {m}")
    out = []
    for j in range(m * m):
        v = 8 * j + 1
        if v % m == 0 and v % (m * m):
            out.append(CongruenceFamily(4, 2, m * m, j, PARITY, {"m": m, "j": j}))
    return out


def parity_scan(N: int, series: FpSeries | None = None) -> FamilyCheck:
    """b4(n) is odd exactly when n is triangular, for 0 <= n <= N."""
    if series is None:
        series = regular_partition_series(4, 2, N + 1)
    n = np.arange(N + 1, dtype=np.int64)
    s = np.sqrt(8 * n + 1).astype(np.int64)
    s += (s * s < 8 * n + 1)
    s -= (s * s > 8 * n + 1)
    tri = (s * s == 8 * n + 1)
    odd = series.coeffs[:N + 1].astype(bool)
    bad = np.flatnonzero(odd != tri)
    if bad.size:
        i = int(bad[0])
        return FamilyCheck(False, N + 1, i, i, int(odd[i]))
    return FamilyCheck(True, N + 1)


# ---------------------------------------------------------------- CRT

def compose_crt(f1: CongruenceFamily, f2: CongruenceFamily) -> CongruenceFamily:
    """Family mod m1*m2 on the intersection of the two progressions."""
    if f1.reg_k != f2.reg_k:
        raise ValueError("families concern different partition functions")
    if math.gcd(f1.modulus, f2.modulus) != 1:
        raise ValueError(f"moduli {f1.modulus} and {f2.modulus} are not coprime")
    if f2.modulus == 1 and f2.A == 1:
        return f1
    if f1.modulus == 1 and f1.A == 1:
        return f2
    g = math.gcd(f1.A, f2.A)
    if (f2.B - f1.B) % g:
        raise ValueError(f"progressions {f1.A}n+{f1.B} and {f2.A}n+{f2.B} do not meet")
    A = f1.A // g * f2.A
    # x = B1 + A1 t with A1 t = B2 - B1 (mod A2)
    t = (f2.B - f1.B) // g * pow(f1.A // g, -1, f2.A // g) % (f2.A // g)
    B = (f1.B + f1.A * t) % A
    return CongruenceFamily(f1.reg_k, f1.modulus * f2.modulus, A, B, CRT_COMPOSED,
                            {"parts": [f1.to_dict(), f2.to_dict()]})
