"""k-regular partition functions mod m, eta quotients, Hecke operators and
Ramanujan-type congruence certificates."""

__version__ = "0.1.0"
