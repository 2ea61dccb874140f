"""Form constructions, Hecke-prime search, congruence families and identities."""
from regulus.engine.forms import (FamilyConstruction, SearchReport, build_form,
                                  construction_congruence_check, construction_quotients,
                                  eta_corpus, search_hecke_primes)
from regulus.engine.families import (CongruenceFamily, FamilyCheck, Mod3Result,
                                     compose_crt, mod3_families, mod3_offset,
                                     parity_families, parity_scan, specialize_minimal,
                                     specialize_proposition, verify_family)
from regulus.engine.identities import identity_suite, theta_phi, theta_psi

__all__ = [
    "FamilyConstruction", "SearchReport", "build_form", "construction_congruence_check",
    "construction_quotients", "eta_corpus", "search_hecke_primes",
    "CongruenceFamily", "FamilyCheck", "Mod3Result", "compose_crt", "mod3_families",
    "mod3_offset", "parity_families", "parity_scan", "specialize_minimal",
    "specialize_proposition", "verify_family",
    "identity_suite", "theta_phi", "theta_psi",
]
