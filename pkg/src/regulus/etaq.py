"""Eta quotients on Gamma_0(N): admissibility, characters, cusp orders, Sturm bounds.

Orders of vanishing are kept as exact :class:`fractions.Fraction` values,
so half-integral orders at irregular cusps are never rounded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np


# ------------------------------------------------------------ arithmetic

def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (n is small here: levels, deltas)."""
    if n < 1:
        raise ValueError("can only factor positive integers")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    out = n
    for p in factorize(n):
        out -= out // p
    return out


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p < hi (sieve of Eratosthenes)."""
    if hi <= 2:
        return []
    sieve = np.ones(hi, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(hi - 1) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return [int(p) for p in np.flatnonzero(sieve) if p >= lo]


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for arbitrary integers D, n."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    # factor out powers of two: (D/2) = 0 if D even, else +-1 by D mod 8
    v = (n & -n).bit_length() - 1
    n >>= v
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 and D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D/n) for odd positive n
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def squarefree_kernel(factors: Mapping[int, int], sign: int = 1) -> int:
    """sign * product of primes with odd exponent (the square class)."""
    out = 1
    for p, e in factors.items():
        if e % 2:
            out *= p
    return sign * out


def index_gamma0(N: int) -> Fraction:
    """N * prod_{p | N} (1 + 1/p), the index of Gamma_0(N) in SL_2(Z)."""
    out = Fraction(N)
    for p in factorize(N):
        out *= Fraction(p + 1, p)
    return out


# -------------------------------------------------------------- types

@dataclass(frozen=True)
class FormSpace:
    """Weight, level and nebentypus n -> kronecker(character_disc, n)."""

    weight: int
    level: int
    character_disc: int = 1

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be positive")
        if self.weight < 0:
            raise ValueError("weight must be nonnegative")

    def character(self, n: int) -> int:
        return kronecker(self.character_disc, n)

    def to_dict(self) -> dict:
        return {"weight": self.weight, "level": self.level, "character_disc": self.character_disc}


@dataclass(frozen=True)
class EtaQuotient:
    """prod_{delta | level} eta(delta z)^{r_delta}."""

    level: int
    exponents: Mapping[int, int]

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be positive")
        clean = {int(d): int(r) for d, r in self.exponents.items() if r != 0}
        if not clean:
            raise ValueError("an eta quotient needs at least one nonzero exponent")
        for d in clean:
            if d < 1 or self.level % d:
                raise ValueError(f"{d} is not a divisor of the level {self.level}")
        object.__setattr__(self, "exponents", dict(sorted(clean.items())))

    @classmethod
    def parse(cls, text: str, level: int | None = None) -> "EtaQuotient":
        """Parse ``"8:3,16:-4,32:5"``; the level defaults to the lcm of the deltas."""
        exps: dict[int, int] = {}
        try:
            for part in text.replace(" ", "").split(","):
                if not part:
                    continue
                d, r = part.split(":")
                exps[int(d)] = exps.get(int(d), 0) + int(r)
        except ValueError:
            raise ValueError(f"cannot parse eta quotient {text!r}; expected 'delta:r,...'") from None
        if level is None:
            level = math.lcm(*exps) if exps else 1
        return cls(level, exps)

    def __str__(self) -> str:
        return ",".join(f"{d}:{r}" for d, r in self.exponents.items())

    @property
    def prefactor24(self) -> int:
        return sum(d * r for d, r in self.exponents.items())

    def with_level(self, level: int) -> "EtaQuotient":
        return EtaQuotient(level, self.exponents)


@dataclass(frozen=True)
class GordonHughesResult:
    ok: bool
    weight: int | None = None
    character_disc: int | None = None
    violations: tuple[str, ...] = ()

    def space(self, level: int) -> FormSpace:
        if not self.ok:
            raise ValueError("quotient fails the admissibility conditions: " + "; ".join(self.violations))
        return FormSpace(self.weight, level, self.character_disc)


@dataclass(frozen=True)
class CuspOrderTable:
    level: int
    orders: dict[int, Fraction]
    multiplicities: dict[int, int]
    holomorphic: bool = field(init=False)
    cuspidal: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "holomorphic", all(v >= 0 for v in self.orders.values()))
        object.__setattr__(self, "cuspidal", all(v > 0 for v in self.orders.values()))

    @property
    def cusp_count(self) -> int:
        return sum(self.multiplicities.values())

    def total(self) -> Fraction:
        return sum((self.multiplicities[d] * v for d, v in self.orders.items()), Fraction(0))


# ------------------------------------------------------------ operations

def gordon_hughes_check(eq: EtaQuotient) -> GordonHughesResult:
    """Weight and character of an eta quotient, or the violated conditions."""
    N = eq.level
    s1 = sum(d * r for d, r in eq.exponents.items())
    s2 = sum(N // d * r for d, r in eq.exponents.items())
    s3 = sum(eq.exponents.values())
    bad = []
    if s1 % 24:
        bad.append(f"sum delta*r = {s1} is not divisible by 24")
    if s2 % 24:
        bad.append(f"sum N*r/delta = {s2} is not divisible by 24")
    if s3 % 2:
        bad.append(f"sum r = {s3} is odd, so the weight is not an integer")
    if bad:
        return GordonHughesResult(False, violations=tuple(bad))
    k = s3 // 2
    # only the square class of (-1)^k prod delta^r matters
    prime_exps: dict[int, int] = {}
    for d, r in eq.exponents.items():
        for p, e in factorize(d).items():
            prime_exps[p] = prime_exps.get(p, 0) + e * r
    disc = squarefree_kernel(prime_exps, -1 if k % 2 else 1)
    return GordonHughesResult(True, k, disc)


def cusp_order(eq: EtaQuotient, d: int) -> Fraction:
    """Order of vanishing at a cusp c/d (independent of c)."""
    N = eq.level
    if d < 1 or N % d:
        raise ValueError(f"{d} does not divide the level {N}")
    g = math.gcd(d * d, N)
    total = sum((Fraction(r * math.gcd(d * d, delta * delta), delta * g)
                 for delta, r in eq.exponents.items()), Fraction(0))
    return Fraction(N, 24) * total


def cusp_table(eq: EtaQuotient) -> CuspOrderTable:
    N = eq.level
    divs = divisors(N)
    return CuspOrderTable(
        N,
        {d: cusp_order(eq, d) for d in divs},
        {d: euler_phi(math.gcd(d, N // d)) for d in divs},
    )


def sturm_bound(weight: int, level: int) -> int:
    """floor(k N / 12 * prod_{p | N} (1 + 1/p))."""
    if weight < 1 or level < 1:
        raise ValueError("weight and level must be positive")
    return math.floor(Fraction(weight, 12) * index_gamma0(level))


@dataclass(frozen=True)
class ValenceResult:
    passed: bool
    lhs: Fraction
    rhs: Fraction

    def __bool__(self) -> bool:
        return self.passed


def valence_check(eq: EtaQuotient) -> ValenceResult:
    """Weighted sum of cusp orders against (k/12) * index of Gamma_0(N)."""
    gh = gordon_hughes_check(eq)
    if not gh.ok:
        raise ValueError("quotient fails the admissibility conditions: " + "; ".join(gh.violations))
    lhs = cusp_table(eq).total()
    rhs = Fraction(gh.weight, 12) * index_gamma0(eq.level)
    return ValenceResult(lhs == rhs, lhs, rhs)
