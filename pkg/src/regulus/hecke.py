"""Hecke operators on q-expansions mod m and Sturm-bound vanishing certificates."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from regulus import __version__
from regulus.etaq import FormSpace, is_prime, kronecker, sturm_bound
from regulus.fpseries import FpSeries

VERIFIED = "verified"
REFUTED = "refuted"
PARTIAL = "partial"


@dataclass(frozen=True)
class HeckeForm:
    """A q-expansion mod m together with the space it is known to lie in.

    ``family`` carries the parameters of the construction (reg_k, m,
    multiplier); it is copied into certificates.
    """

    expansion: FpSeries
    space: FormSpace
    family_tag: str = ""
    family: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.space.weight < 1:
            raise ValueError("forms acted on by Hecke operators need weight >= 1")

    @property
    def modulus(self) -> int:
        return self.expansion.modulus


@dataclass
class HeckeCertificate:
    """Record of a T(l) vanishing check on a coefficient prefix."""

    family: dict
    space: FormSpace
    sturm_bound: int
    checked_to: int
    status: str
    first_nonzero: int | None = None
    base_series_hash: str = ""
    tool_version: str = __version__
    kind: str = "hecke_vanishing"

    def __post_init__(self):
        if self.status not in (VERIFIED, REFUTED, PARTIAL):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == VERIFIED and self.checked_to < self.sturm_bound:
            raise ValueError("a verified certificate must cover the Sturm bound")
        if self.status == REFUTED and self.first_nonzero is None:
            raise ValueError("a refuted certificate needs the first nonzero index")

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "family": dict(self.family),
            "space": self.space.to_dict(),
            "sturm_bound": self.sturm_bound,
            "checked_to": self.checked_to,
            "status": self.status,
        }
        if self.first_nonzero is not None:
            d["first_nonzero"] = self.first_nonzero
        d["base_series_hash"] = self.base_series_hash
        d["tool_version"] = self.tool_version
        return d

    def to_json(self, **extra) -> str:
        return json.dumps({**self.to_dict(), **extra}, indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "HeckeCertificate":
        sp = d["space"]
        return cls(
            family=dict(d["family"]),
            space=FormSpace(sp["weight"], sp["level"], sp["character_disc"]),
            sturm_bound=int(d["sturm_bound"]),
            checked_to=int(d["checked_to"]),
            status=d["status"],
            first_nonzero=d.get("first_nonzero"),
            base_series_hash=d.get("base_series_hash", ""),
            tool_version=d.get("tool_version", ""),
            kind=d.get("kind", "hecke_vanishing"),
        )

    @classmethod
    def from_json(cls, text: str) -> "HeckeCertificate":
        return cls.from_dict(json.loads(text))


def _check_l(f: HeckeForm, l: int) -> None:
    if not is_prime(l):
        raise ValueError(f"T(l) needs a prime l, got {l}")
    if f.space.level % l == 0:
        raise ValueError(f"l={l} divides the level {f.space.level}; only l coprime to the level is supported")


def t_operator(f: HeckeForm, l: int, length: int | None = None) -> FpSeries:
    """Coefficients a(l n) + chi(l) l^(k-1) a(n/l) for 0 <= n < length."""
    _check_l(f, l)
    a = f.expansion.coeffs
    N = a.shape[0]
    avail = (N - 1) // l + 1
    if length is None:
        length = avail
    if length < 1:
        raise ValueError("output length must be positive")
    if length > avail:
        raise ValueError(f"T({l}) to {length} terms needs {l * (length - 1) + 1} input "
                         f"coefficients, have {N}")
    m = f.modulus
    eps = kronecker(f.space.character_disc, l) * pow(l, f.space.weight - 1, m) % m
    out = a[:l * (length - 1) + 1:l].astype(np.uint64)
    if eps:
        # a(n/l) contributes only at multiples of l
        src = a[:(length - 1) // l + 1].astype(np.uint64)
        out[::l] += np.uint64(eps) * src
        out %= np.uint64(m)
    return FpSeries._wrap(out.astype(a.dtype), m)


def verify_vanishing(f: HeckeForm, l: int, bound: int | None = None) -> HeckeCertificate:
    """Check that T(l) f vanishes mod m for coefficients 0..bound.

    ``bound`` defaults to the Sturm bound of the form's space. A smaller
    bound, or an expansion too short to reach it, gives status partial.
    """
    _check_l(f, l)
    sb = sturm_bound(f.space.weight, f.space.level)
    if bound is None:
        bound = sb
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    N = f.expansion.truncation
    reach = min(bound, (N - 1) // l)
    image = t_operator(f, l, reach + 1)
    nz = image.first_nonzero()
    fam = {**f.family, "l": l}
    h = f.expansion.digest()
    if nz is not None:
        return HeckeCertificate(fam, f.space, sb, reach, REFUTED, nz, h)
    status = VERIFIED if reach >= sb else PARTIAL
    return HeckeCertificate(fam, f.space, sb, reach, status, None, h)


def required_truncation(family, l: int, bound: int) -> int:
    """Length of the partition series needed to check T(l) of a family's form to ``bound``.

    ``family`` is anything with ``multiplier``, ``shift_c`` and ``shift_d``
    attributes (the form's n-th coefficient is b((multiplier*n - c)/d)).
    The largest index touched is (multiplier*l*bound - c)/d, rounded down.
    """
    top = family.multiplier * l * bound - family.shift_c
    return max(top // family.shift_d, 0) + 1
