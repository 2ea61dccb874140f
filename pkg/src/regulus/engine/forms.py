"""The forms F(m; z) = sum b_k((M n - c)/d) q^n and the search for Hecke primes."""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from regulus.etaq import EtaQuotient, FormSpace, is_prime, primes_between, sturm_bound
from regulus.fpseries import (CheckResult, FpSeries, compare_series,
                              eta_quotient_expansion, regular_partition_series)
from regulus.hecke import (PARTIAL, VERIFIED, HeckeCertificate, HeckeForm,
                           required_truncation, verify_vanishing)

log = logging.getLogger(__name__)

B6_UNSUPPORTED = ("b6 needs m >= 5: no construction of this kind exists for m in {2, 3}; "
                  "the mod-2 question is open and mod-3 congruences for b6 come from "
                  "other identities")


@dataclass(frozen=True)
class FamilyConstruction:
    """F(m; z) with n-th coefficient b_k((multiplier*n - shift_c)/shift_d) mod m.

    For b4 the multiplier is m, (c, d) = (1, 8) and the space is
    M_{3m-3}(Gamma_0(256)). For b6 it is m, (c, d) = (5, 24) and
    S_{2m-2}(Gamma_0(3456), chi_6); for b6 with m = 5 the multiplier is 25
    and the weight 48.
    """

    reg_k: int
    m: int
    multiplier: int
    shift_c: int
    shift_d: int
    space: FormSpace

    @classmethod
    def for_family(cls, reg_k: int, m: int) -> "FamilyConstruction":
        if not is_prime(m):
            raise ValueError(f"m must be prime, got {m}")
        if reg_k == 4:
            if m < 3:
                raise ValueError("b4 constructions need an odd prime m; use the parity tools for m = 2")
            return cls(4, m, m, 1, 8, FormSpace(3 * m - 3, 256, 1))
        if reg_k == 6:
            if m < 5:
                raise ValueError(B6_UNSUPPORTED)
            if m == 5:
                return cls(6, 5, 25, 5, 24, FormSpace(48, 3456, 6))
            return cls(6, m, m, 5, 24, FormSpace(2 * m - 2, 3456, 6))
        raise ValueError(f"no form construction for reg_k={reg_k}; only 4 and 6 are supported")

    @property
    def tag(self) -> str:
        return f"b{self.reg_k} m={self.m} multiplier={self.multiplier}"

    def family_dict(self) -> dict:
        return {"reg_k": self.reg_k, "m": self.m, "multiplier": self.multiplier}

    def index(self, n: int) -> int | None:
        """Partition index feeding coefficient n, or None off the support."""
        t = self.multiplier * n - self.shift_c
        if t < 0 or t % self.shift_d:
            return None
        return t // self.shift_d

    def base_length(self, N: int) -> int:
        """Partition-series length needed for a form truncated at N."""
        return max((self.multiplier * (N - 1) - self.shift_c) // self.shift_d, 0) + 1

    def required_truncation(self, l: int, bound: int) -> int:
        return required_truncation(self, l, bound)


def build_form(fc: FamilyConstruction, N: int, base: FpSeries | None = None) -> HeckeForm:
    """F(m; z) to N terms. ``base`` may supply a precomputed b_k series mod m."""
    if N < 1:
        raise ValueError("truncation must be at least 1")
    need = fc.base_length(N)
    if base is None:
        base = regular_partition_series(fc.reg_k, fc.m, need)
    elif base.modulus != fc.m:
        raise ValueError(f"base series is mod {base.modulus}, construction needs mod {fc.m}")
    elif base.truncation < need:
        raise ValueError(f"base series has {base.truncation} terms, {need} needed")
    M, c, d = fc.multiplier, fc.shift_c, fc.shift_d
    out = np.zeros(N, dtype=base.coeffs.dtype)
    # support: M n = c (mod d), gcd(M, d) = 1
    n0 = c * pow(M, -1, d) % d
    ns = np.arange(n0, N, d, dtype=np.int64)
    idx = (M * ns - c) // d
    ok = idx >= 0
    out[ns[ok]] = base.coeffs[idx[ok]]
    return HeckeForm(FpSeries._wrap(out, fc.m), fc.space, fc.tag, fc.family_dict())


# ------------------------------------------------- congruence of constructions

def construction_quotients(reg_k: int, m: int) -> tuple[dict[int, int], dict[int, int]]:
    """(f(m;z), its reduction mod m) as eta exponent maps.

    b4: eta(4z)/eta(z) eta^a(4mz)/eta^a(mz) eta^6(2mz) with a = 4 - (m mod 8),
    reducing to eta^{am+1}(4z) eta^{6m}(2z) eta^{-am-1}(z).
    b6 (m >= 7): eta(6z)/eta(z) eta^a(mz) eta^b(2mz) eta^c(3mz) eta^d(6mz),
    reducing to eta^{am-1}(z) eta^{bm}(2z) eta^{cm}(3z) eta^{dm+1}(6z).
    b6 (m = 5): eta(6z)/eta(z) eta^3(75z) eta^2(150z)/eta(50z).
    """
    def add(dct, k, v):
        dct[k] = dct.get(k, 0) + v

    if reg_k == 4:
        if m < 3 or not is_prime(m):
            raise ValueError("b4 constructions need an odd prime m")
        a = 4 - m % 8
        f: dict[int, int] = {}
        for d, r in ((4, 1), (1, -1), (4 * m, a), (m, -a), (2 * m, 6)):
            add(f, d, r)
        red = {4: a * m + 1, 2: 6 * m, 1: -a * m - 1}
        return f, red
    if reg_k == 6:
        if m < 5 or not is_prime(m):
            raise ValueError(B6_UNSUPPORTED)
        if m == 5:
            f = {6: 1, 1: -1, 75: 3, 150: 2, 50: -1}
            return f, {1: -1, 2: -25, 3: 75, 6: 51}
        a, b, c, d = b6_exponents(m)
        f = {}
        for dd, r in ((6, 1), (1, -1), (m, a), (2 * m, b), (3 * m, c), (6 * m, d)):
            add(f, dd, r)
        return f, {1: a * m - 1, 2: b * m, 3: c * m, 6: d * m + 1}
    raise ValueError(f"no construction for reg_k={reg_k}")


def b6_exponents(m: int) -> tuple[int, int, int, int]:
    """(a, b, c, d) for the b6 construction, from m' = m mod 24."""
    mp = m % 24
    return mp % 5 - 1, mp // 5 - 1, 3 - mp // 5, 3 - mp % 5


def construction_congruence_check(reg_k: int, m: int, N: int) -> CheckResult:
    """Expand f(m;z) and its claimed reduction mod m and compare N terms."""
    f, red = construction_quotients(reg_k, m)
    lhs = eta_quotient_expansion(f, m, N)
    rhs = eta_quotient_expansion(red, m, N)
    if lhs.prefactor24 != rhs.prefactor24:
        return CheckResult(False, 0, 0, f"prefactors differ: {lhs.prefactor24}/24 vs {rhs.prefactor24}/24")
    return compare_series(lhs.series, rhs.series)


def eta_corpus(reg_k: int, m: int) -> dict[str, EtaQuotient]:
    """The eta quotients whose admissibility and cusp orders underlie F(m; z)."""
    f, red = construction_quotients(reg_k, m)
    if reg_k == 4:
        a = 4 - m % 8
        return {
            "reduced": EtaQuotient(4, red),
            "cusp_factor": EtaQuotient(4, {1: 4, 2: 2, 4: 4}),
            "level_256": EtaQuotient(256, {8: 4 + a, 32: 4 - a, 16: -4}),
        }
    if m == 5:
        return {
            "reduced": EtaQuotient(6, red),
            "cusp_factor": EtaQuotient(6, {1: 2, 2: 2, 3: 2, 6: 2}),
            "level_3456": EtaQuotient(3456, {24: 2, 48: 3, 72: -1}),
        }
    a, b, c, d = b6_exponents(m)
    return {
        "reduced": EtaQuotient(6, red),
        "cusp_factor": EtaQuotient(6, {1: 2, 2: 2, 3: 2, 6: 2}),
        "level_3456": EtaQuotient(3456, {24: 2 - a, 48: 2 - b, 72: 2 - c, 144: 2 - d}),
    }


# --------------------------------------------------------------- search

@dataclass
class SearchReport:
    construction: FamilyConstruction
    bound: int
    certificates: dict[int, HeckeCertificate] = field(default_factory=dict)
    skipped: dict[int, str] = field(default_factory=dict)

    @property
    def verified(self) -> list[int]:
        return sorted(l for l, c in self.certificates.items() if c.status == VERIFIED)

    @property
    def vanishing(self) -> list[int]:
        """Primes whose checked prefix vanished (verified or partial)."""
        return sorted(l for l, c in self.certificates.items() if c.first_nonzero is None)

    @property
    def partial(self) -> list[int]:
        return sorted(l for l, c in self.certificates.items() if c.status == PARTIAL)


def default_workers() -> int:
    env = os.environ.get("REGULUS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def search_hecke_primes(fc: FamilyConstruction, l_min: int, l_max: int,
                        bound: int | None = None, *, base: FpSeries | None = None,
                        truncation: int | None = None,
                        workers: int | None = None) -> SearchReport:
    """Run verify_vanishing for every prime l in [l_min, l_max).

    Primes dividing the level and l = m are skipped and listed in the
    report. The form is built once, long enough for the largest l, unless
    ``truncation`` caps it (shortfalls then show up as partial status).
    """
    sb = sturm_bound(fc.space.weight, fc.space.level)
    if bound is None:
        bound = sb
    report = SearchReport(fc, bound)
    todo = []
    for l in primes_between(l_min, l_max):
        if fc.space.level % l == 0:
            report.skipped[l] = "divides the level"
        elif l == fc.m:
            report.skipped[l] = "equals m"
        else:
            todo.append(l)
    if not todo:
        return report
    N = max(todo) * bound + 1
    if truncation is not None:
        N = min(N, truncation)
    log.info("building %s to %d terms (base series %d)", fc.tag, N, fc.base_length(N))
    form = build_form(fc, N, base)
    form.expansion.digest()  # hash once before fanning out
    nw = workers or default_workers()

    def run(l):
        return l, verify_vanishing(form, l, bound)

    if nw > 1 and len(todo) > 1:
        with ThreadPoolExecutor(nw) as ex:
            results = list(ex.map(run, todo))
    else:
        results = [run(l) for l in todo]
    for l, cert in results:
        report.certificates[l] = cert
    return report
