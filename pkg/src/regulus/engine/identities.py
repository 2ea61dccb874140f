"""Theta series and the q-series identities behind the b4 congruences.

Exact identities are checked modulo a large word-size prime; congruences
mod 3 are checked mod 3. Each side is built by an independent route
(partition series versus eta products or direct theta enumeration).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from regulus.etaq import kronecker
from regulus.fpseries import (FpSeries, compare_series, eta_power_series, invert, mul,
                              regular_partition_series)

DEFAULT_CHECK_PRIME = 2**31 - 1


def theta_phi(N: int, modulus: int = DEFAULT_CHECK_PRIME) -> FpSeries:
    """phi(q) = sum_{n in Z} q^{n^2}."""
    terms = {0: 1}
    for n in range(1, math.isqrt(max(N - 1, 0)) + 1):
        terms[n * n] = 2
    return FpSeries.from_terms(terms, modulus, N)


def theta_psi(N: int, modulus: int = DEFAULT_CHECK_PRIME) -> FpSeries:
    """psi(q) = sum_{n >= 0} q^{n(n+1)/2}."""
    terms = {}
    n = 0
    while n * (n + 1) // 2 < N:
        terms[n * (n + 1) // 2] = 1
        n += 1
    return FpSeries.from_terms(terms, modulus, N)


def _E(delta: int, r: int, p: int, N: int) -> FpSeries:
    # (q^delta; q^delta)^r
    return eta_power_series(delta, r, p, N)


def _prod(*fs: FpSeries) -> FpSeries:
    out = fs[0]
    for f in fs[1:]:
        out = mul(out, f)
    return out


def _section(s: FpSeries, step: int, offset: int, N: int, sign_alternating: bool = False) -> FpSeries:
    vals = s.coeffs[offset:offset + step * (N - 1) + 1:step].astype(np.int64)
    if sign_alternating:
        vals[1::2] = -vals[1::2]
    return FpSeries(vals, s.modulus)


@dataclass(frozen=True)
class IdentityResult:
    name: str
    passed: bool
    modulus: int
    checked: int
    first_failure: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def _result(name, lhs, rhs) -> IdentityResult:
    c = compare_series(lhs, rhs)
    return IdentityResult(name, c.passed, lhs.modulus, c.checked, c.first_failure, c.detail)


def identity_b4_9n7(N: int, p: int) -> IdentityResult:
    """sum b4(9n+7) q^n = 12 E2^4 E3^6 E4 / E1^11."""
    b4 = regular_partition_series(4, p, 9 * (N - 1) + 8)
    lhs = _section(b4, 9, 7, N)
    rhs = _prod(_E(2, 4, p, N), _E(3, 6, p, N), _E(4, 1, p, N), invert(_E(1, 11, p, N))).scale(12)
    return _result("b4(9n+7) eta product", lhs, rhs)


def identity_b4_3n(N: int, p: int) -> IdentityResult:
    """sum b4(3n) q^n = E4 E6^4 / (E1^3 E12^2)."""
    lhs = _section(regular_partition_series(4, p, 3 * (N - 1) + 1), 3, 0, N)
    rhs = _prod(_E(4, 1, p, N), _E(6, 4, p, N), invert(mul(_E(1, 3, p, N), _E(12, 2, p, N))))
    return _result("b4(3n) eta quotient", lhs, rhs)


def identity_weighted_theta(N: int, p: int) -> IdentityResult:
    """E2^13 / (E1^5 E4^5) = sum_{m >= 1} (-6/m) m q^{(m^2-1)/24}."""
    lhs = _prod(_E(2, 13, p, N), invert(mul(_E(1, 5, p, N), _E(4, 5, p, N))))
    terms: dict[int, int] = {}
    m = 1
    while (m * m - 1) // 24 < N:
        if (m * m - 1) % 24 == 0:
            terms[(m * m - 1) // 24] = terms.get((m * m - 1) // 24, 0) + kronecker(-6, m) * m
        m += 1
    return _result("E2^13/(E1^5 E4^5) weighted theta", lhs, FpSeries.from_terms(terms, p, N))


def identity_signed_theta(N: int, p: int) -> IdentityResult:
    """E1^2 / E2 = sum_{k in Z} (-1)^k q^{k^2}."""
    lhs = mul(_E(1, 2, p, N), invert(_E(2, 1, p, N)))
    terms = {0: 1}
    for k in range(1, math.isqrt(N - 1) + 1):
        terms[k * k] = 2 * (-1) ** k
    return _result("E1^2/E2 signed theta", lhs, FpSeries.from_terms(terms, p, N))


def identity_b4_3n_mod3(N: int) -> IdentityResult:
    """sum b4(3n) q^n = sum_{m>=1} sum_{k in Z} (-1)^k (-6/m) m q^{k^2 + (m^2-1)/24} (mod 3)."""
    lhs = _section(regular_partition_series(4, 3, 3 * (N - 1) + 1), 3, 0, N)
    acc = np.zeros(N, dtype=np.int64)
    m = 1
    while (m * m - 1) // 24 < N:
        if (m * m - 1) % 24 == 0 and m % 3:
            base = (m * m - 1) // 24
            w = kronecker(-6, m) * m
            k = 0
            while base + k * k < N:
                acc[base + k * k] += w * (1 if k == 0 else 2 * (-1) ** k)
                k += 1
        m += 1
    return _result("b4(3n) double theta sum mod 3", lhs, FpSeries(acc, 3))


def _alternating_b4_3n1(N: int, p: int) -> FpSeries:
    return _section(regular_partition_series(4, p, 3 * (N - 1) + 2), 3, 1, N, sign_alternating=True)


def identity_phi_psi(N: int, p: int) -> IdentityResult:
    """sum (-1)^n b4(3n+1) q^n = phi(q^3) psi(q^3) / phi(q)^2."""
    lhs = _alternating_b4_3n1(N, p)
    phi3 = FpSeries.from_terms({3 * e: c for e, c in enumerate(theta_phi(N, p).to_list()) if c}, p, N)
    psi3 = FpSeries.from_terms({3 * e: c for e, c in enumerate(theta_psi(N, p).to_list()) if c}, p, N)
    phi = theta_phi(N, p)
    rhs = _prod(phi3, psi3, invert(mul(phi, phi)))
    return _result("alternating b4(3n+1) theta quotient", lhs, rhs)


def identity_phi_psi_mod3(N: int) -> IdentityResult:
    """sum (-1)^n b4(3n+1) q^n = phi(q) psi(q^3) (mod 3), the right side by
    enumerating q^{m^2 + 3k(k+1)/2} over m in Z, k >= 0."""
    lhs = _alternating_b4_3n1(N, 3)
    acc = np.zeros(N, dtype=np.int64)
    k = 0
    while 3 * k * (k + 1) // 2 < N:
        t = 3 * k * (k + 1) // 2
        m = 0
        while t + m * m < N:
            acc[t + m * m] += 1 if m == 0 else 2
            m += 1
        k += 1
    return _result("alternating b4(3n+1) mod 3 theta product", lhs, FpSeries(acc, 3))


IDENTITIES = (
    ("b4_9n7", identity_b4_9n7, True),
    ("b4_3n", identity_b4_3n, True),
    ("weighted_theta", identity_weighted_theta, True),
    ("signed_theta", identity_signed_theta, True),
    ("b4_3n_mod3", identity_b4_3n_mod3, False),
    ("phi_psi", identity_phi_psi, True),
    ("phi_psi_mod3", identity_phi_psi_mod3, False),
)


def identity_suite(N: int = 2000, check_prime: int = DEFAULT_CHECK_PRIME) -> dict[str, IdentityResult]:
    """Run all seven identities to N terms; exact ones mod ``check_prime``."""
    if N < 1:
        raise ValueError("N must be positive")
    out = {}
    for key, fn, exact in IDENTITIES:
        out[key] = fn(N, check_prime) if exact else fn(N)
    return out
