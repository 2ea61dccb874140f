"""Command-line front end.

Machine-readable results go to stdout (or --output); progress goes to
stderr. Exit status: 0 pass/verified, 1 refuted/failed/shortfall, 2 usage.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from regulus import __version__

log = logging.getLogger("regulus")

FORMATS = ("json", "csv", "binary-cache", "text")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------- helpers

def _emit(args, payload, text: str | None = None) -> None:
    fmt = args.format
    if fmt == "json":
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif fmt == "text" and text is not None:
        out = text + "\n"
    elif fmt == "csv":
        rows = payload if isinstance(payload, list) else [payload]
        buf = io.StringIO()
        keys = list(rows[0].keys()) if rows else []
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in r.items()})
        out = buf.getvalue()
    else:
        raise UsageError(f"format {fmt!r} is not supported by this subcommand")
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)


def _family_args(p):
    p.add_argument("--family", choices=("b4", "b6"), required=True)
    p.add_argument("--m", type=int, required=True, help="congruence prime")


def _construction(args):
    from regulus.engine import FamilyConstruction
    try:
        return FamilyConstruction.for_family(int(args.family[1:]), args.m)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _base_series(fc, length: int, cache: str | None):
    """b_k series mod m, reusing or refreshing a binary cache."""
    from regulus.fpseries import load_series, regular_partition_series, save_series
    if cache and Path(cache).exists():
        s = load_series(cache, fc.m)
        if s.truncation >= length:
            log.info("loaded %d coefficients from %s", s.truncation, cache)
            return s
        log.info("cache %s too short (%d < %d), recomputing", cache, s.truncation, length)
    t = time.perf_counter()
    s = regular_partition_series(fc.reg_k, fc.m, length)
    log.info("b%d mod %d to %d terms in %.2fs", fc.reg_k, fc.m, length, time.perf_counter() - t)
    if cache:
        save_series(s, cache)
        log.info("wrote cache %s", cache)
    return s


def _created() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


# ------------------------------------------------------------ subcommands

def cmd_bk(args) -> int:
    from regulus.fpseries import FpSeries, bk_exact, regular_partition_series, save_series
    if args.k < 2 or args.limit < 1:
        raise UsageError("need --k >= 2 and --limit >= 1")
    if args.exact:
        if args.limit > 61:
            raise UsageError("--exact supports --limit up to 61")
        vals = [bk_exact(args.k, n) for n in range(args.limit)]
        rows = [{"n": n, "b": v % args.modulus if args.modulus else v} for n, v in enumerate(vals)]
        series = None
    else:
        if not args.modulus:
            raise UsageError("--modulus is required unless --exact is given")
        series = regular_partition_series(args.k, args.modulus, args.limit, method=args.method)
        rows = [{"n": n, "b": v} for n, v in enumerate(series.to_list())]
    if args.format == "binary-cache":
        if not args.output:
            raise UsageError("--format binary-cache needs --output")
        if series is None:
            series = FpSeries([r["b"] for r in rows], args.modulus)
        save_series(series, args.output)
        return 0
    if args.format == "json":
        _emit(args, {"k": args.k, "modulus": args.modulus, "limit": args.limit,
                     "coefficients": [r["b"] for r in rows]})
    else:
        _emit(args, rows, "\n".join(str(r["b"]) for r in rows))
    return 0


def cmd_eta(args) -> int:
    from regulus.etaq import EtaQuotient, cusp_table, gordon_hughes_check, valence_check
    try:
        eq = EtaQuotient.parse(args.quotient, args.level)
    except ValueError as e:
        raise UsageError(str(e)) from None
    gh = gordon_hughes_check(eq)
    out = {"quotient": str(eq), "level": eq.level, "admissible": gh.ok,
           "violations": list(gh.violations)}
    if gh.ok:
        tab = cusp_table(eq)
        val = valence_check(eq)
        out.update({
            "weight": gh.weight, "character_disc": gh.character_disc,
            "cusps": [{"d": d, "order": str(o), "multiplicity": tab.multiplicities[d]}
                      for d, o in tab.orders.items()],
            "holomorphic": tab.holomorphic, "cuspidal": tab.cuspidal,
            "valence": {"passed": val.passed, "lhs": str(val.lhs), "rhs": str(val.rhs)},
        })
    text = "\n".join(f"{k}: {v}" for k, v in out.items() if k != "cusps")
    if args.format == "csv":
        _emit(args, out.get("cusps", []))
    else:
        _emit(args, out, text)
    return 0 if gh.ok and out["valence"]["passed"] else 1


def cmd_sturm(args) -> int:
    from regulus.etaq import sturm_bound
    if args.weight < 1 or args.level < 1:
        raise UsageError("--weight and --level must be positive")
    b = sturm_bound(args.weight, args.level)
    _emit(args, {"weight": args.weight, "level": args.level, "sturm_bound": b}, str(b))
    return 0


def _mode_bound(args, fc) -> tuple[int, bool]:
    from regulus.etaq import sturm_bound
    sb = sturm_bound(fc.space.weight, fc.space.level)
    if args.bound is not None:
        return args.bound, args.quick
    if args.quick:
        return min(sb, args.quick_bound), True
    return sb, False


def cmd_hecke(args) -> int:
    from regulus.engine import build_form
    from regulus.hecke import PARTIAL, REFUTED, VERIFIED, verify_vanishing
    fc = _construction(args)
    bound, quick = _mode_bound(args, fc)
    if fc.space.level % args.l == 0 or args.l == fc.m:
        raise UsageError(f"l={args.l} must be coprime to the level {fc.space.level} and differ from m")
    N = args.l * bound + 1
    if args.truncation:
        N = min(N, args.truncation)
    base = _base_series(fc, fc.base_length(N), args.cache)
    form = build_form(fc, N, base)
    cert = verify_vanishing(form, args.l, bound)
    log.info("T(%d): status %s, checked to %d", args.l, cert.status, cert.checked_to)
    extra = {"created": _created(), "mode": "quick" if quick else "full", "requested_bound": bound}
    text = cert.to_json(**extra)
    if args.cert:
        Path(args.cert).write_text(text + "\n")
    if args.format == "json":
        if args.output:
            Path(args.output).write_text(text + "\n")
        else:
            sys.stdout.write(text + "\n")
    else:
        _emit(args, {**cert.to_dict(), **extra}, cert.status)
    if cert.status == VERIFIED:
        return 0
    if cert.status == REFUTED:
        return 1
    assert cert.status == PARTIAL
    # a deliberately short prefix that vanishes is a pass; a truncation shortfall is not
    return 0 if cert.checked_to >= bound else 1


def cmd_search(args) -> int:
    from regulus.engine import search_hecke_primes
    from regulus.etaq import primes_between
    from regulus.hecke import required_truncation
    fc = _construction(args)
    bound, quick = _mode_bound(args, fc)
    ls = [l for l in primes_between(args.l_min, args.l_max)
          if fc.space.level % l and l != fc.m]
    base = None
    if ls:
        need = required_truncation(fc, max(ls), bound)
        if args.truncation:
            need = min(need, fc.base_length(args.truncation))
        base = _base_series(fc, need, args.cache)
    rep = search_hecke_primes(fc, args.l_min, args.l_max, bound, base=base,
                              truncation=args.truncation, workers=args.threads)
    out = {
        "family": fc.family_dict(), "space": fc.space.to_dict(), "bound": bound,
        "mode": "quick" if quick else "full",
        "verified": rep.verified, "vanishing": rep.vanishing, "partial": rep.partial,
        "skipped": {str(l): why for l, why in rep.skipped.items()},
        "certificates": {str(l): c.to_dict() for l, c in rep.certificates.items()},
        "created": _created(),
    }
    if args.format == "csv":
        _emit(args, [{"l": l, "status": c.status, "checked_to": c.checked_to,
                      "first_nonzero": c.first_nonzero} for l, c in sorted(rep.certificates.items())])
    else:
        _emit(args, out, " ".join(map(str, rep.vanishing if quick else rep.verified)))
    shortfall = any(c.checked_to < bound for c in rep.certificates.values() if c.first_nonzero is None)
    return 1 if shortfall else 0


def cmd_specialize(args) -> int:
    from regulus.engine import specialize_minimal, specialize_proposition, verify_family
    reg_k = int(args.family[1:])
    try:
        if args.proposition:
            fams = specialize_proposition(reg_k, args.m, args.l, args.j)
        else:
            fams = [specialize_minimal(reg_k, args.m, args.l).family]
    except ValueError as e:
        raise UsageError(str(e)) from None
    rows = [f.to_dict() for f in fams]
    rc = 0
    if args.verify is not None:
        for f, row in zip(fams, rows):
            chk = verify_family(f, args.verify)
            row["check"] = {"n_max": args.verify, "passed": chk.passed,
                            "counterexample": chk.counterexample}
            rc |= 0 if chk.passed else 1
    _emit(args, rows if args.proposition else rows[0],
          "\n".join(f"{r['A']} {r['B']}" for r in rows))
    return rc


def cmd_verify_ap(args) -> int:
    from regulus.engine import CongruenceFamily, verify_family
    try:
        fam = CongruenceFamily(args.k, args.modulus, args.A, args.B % args.A if args.A > 0 else args.B)
    except ValueError as e:
        raise UsageError(str(e)) from None
    chk = verify_family(fam, args.n_max)
    out = {**fam.to_dict(), "n_max": args.n_max, "passed": chk.passed,
           "counterexample": chk.counterexample, "index": chk.index, "residue": chk.residue}
    _emit(args, out, "pass" if chk.passed else f"fail at n={chk.counterexample} (index {chk.index})")
    return 0 if chk.passed else 1


def cmd_mod3(args) -> int:
    from regulus.engine import mod3_families, verify_family
    from regulus.etaq import is_prime
    if not is_prime(args.l):
        raise UsageError(f"--l must be prime, got {args.l}")
    res = mod3_families(args.l, args.j)
    out = {"l": args.l, "accepted": res.accepted, "kronecker_-6_l": res.symbol,
           "families": {k: [f.to_dict() for f in v] for k, v in res.families.items()}}
    rc = 0 if res.accepted else 1
    if res.accepted and args.verify is not None:
        from regulus.fpseries import regular_partition_series
        A = 3 * args.l ** 2
        series = regular_partition_series(4, 3, A * (args.verify + 1) + 1)
        fails = []
        for fams in res.families.values():
            for f in fams:
                chk = verify_family(f, args.verify, series)
                if not chk.passed:
                    fails.append({**f.to_dict(), "counterexample": chk.counterexample})
        out["verified_to"] = args.verify
        out["failures"] = fails
        rc = 1 if fails else 0
    rows = [f for v in out["families"].values() for f in v]
    if args.format == "csv":
        _emit(args, rows or [{"l": args.l, "accepted": False}])
    else:
        _emit(args, out, "accepted" if res.accepted else f"rejected: kronecker(-6,{args.l}) = {res.symbol}")
    return rc


def cmd_parity(args) -> int:
    from regulus.engine import parity_families, parity_scan, verify_family
    if args.scan is None and args.m is None:
        raise UsageError("parity needs --m or --scan")
    out: dict = {}
    rc = 0
    if args.m is not None:
        try:
            fams = parity_families(args.m)
        except ValueError as e:
            raise UsageError(str(e)) from None
        out["families"] = [f.to_dict() for f in fams]
        if args.verify is not None:
            checks = [verify_family(f, args.verify) for f in fams]
            out["verified_to"] = args.verify
            out["all_passed"] = all(c.passed for c in checks)
            rc |= 0 if out["all_passed"] else 1
    if args.scan is not None:
        chk = parity_scan(args.scan)
        out["scan"] = {"N": args.scan, "passed": chk.passed, "first_failure": chk.counterexample}
        rc |= 0 if chk.passed else 1
    if args.format == "csv":
        _emit(args, out.get("families") or [out["scan"]])
    else:
        _emit(args, out, "pass" if rc == 0 else "fail")
    return rc


def cmd_identities(args) -> int:
    from regulus.engine import identity_suite
    res = identity_suite(args.N, args.check_prime)
    rows = [{"identity": k, "name": r.name, "passed": r.passed, "modulus": r.modulus,
             "checked": r.checked, "first_failure": r.first_failure} for k, r in res.items()]
    ok = all(r.passed for r in res.values())
    if args.format == "json":
        _emit(args, {"N": args.N, "check_prime": args.check_prime, "passed": ok, "identities": rows})
    else:
        _emit(args, rows, "\n".join(f"{'PASS' if r['passed'] else 'FAIL'} {r['name']}" for r in rows))
    return 0 if ok else 1


def _load_family(text: str):
    from regulus.engine import CongruenceFamily
    p = Path(text)
    if not text.lstrip().startswith("{") and p.exists():
        text = p.read_text()
    try:
        return CongruenceFamily.from_json(text)
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(f"cannot read family {text[:60]!r}: {e}") from None


def cmd_compose(args) -> int:
    from regulus.engine import compose_crt, verify_family
    f1, f2 = _load_family(args.first), _load_family(args.second)
    f = compose_crt(f1, f2)  # incompatible inputs surface as exit 1
    out = f.to_dict()
    rc = 0
    if args.verify is not None:
        chk = verify_family(f, args.verify)
        out["check"] = {"n_max": args.verify, "passed": chk.passed, "counterexample": chk.counterexample}
        rc = 0 if chk.passed else 1
    _emit(args, out, str(f))
    return rc


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, help="default json (text for sturm)")
    common.add_argument("--output", "-o", help="write results here instead of stdout")
    common.add_argument("--threads", type=int, help="worker threads (default: REGULUS_THREADS or all cores)")
    common.add_argument("--verbose", "-v", action="store_true", help="progress on stderr")

    p = _Parser(prog="regulus", description="k-regular partition congruences mod primes")
    p.add_argument("--version", action="version", version=f"regulus {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("bk", parents=[common], help="b_k(n) table")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--modulus", type=int)
    s.add_argument("--limit", type=int, required=True, help="number of coefficients")
    s.add_argument("--method", choices=("fast", "recurrence"), default="fast")
    s.add_argument("--exact", action="store_true", help="exact integers (limit <= 61)")
    s.set_defaults(func=cmd_bk)

    s = sub.add_parser("eta", parents=[common], help="eta-quotient admissibility and cusp orders")
    s.add_argument("--quotient", required=True, help="e.g. '8:3,16:-4,32:5'")
    s.add_argument("--level", type=int)
    s.set_defaults(func=cmd_eta)

    s = sub.add_parser("sturm", parents=[common], help="Sturm bound")
    s.add_argument("--weight", type=int, required=True)
    s.add_argument("--level", type=int, required=True)
    s.set_defaults(func=cmd_sturm, default_format="text")

    def hecke_opts(s):
        _family_args(s)
        g = s.add_mutually_exclusive_group()
        g.add_argument("--quick", action="store_true", help="prefix check only (status partial)")
        g.add_argument("--full", action="store_true", help="check to the Sturm bound (default)")
        s.add_argument("--bound", type=int, help="override the coefficient bound")
        s.add_argument("--quick-bound", type=int, default=1000)
        s.add_argument("--truncation", type=int, help="cap the form length")
        s.add_argument("--cache", help="binary coefficient cache for the base series")

    s = sub.add_parser("hecke", parents=[common], help="certify T(l) F = 0 (mod m)")
    hecke_opts(s)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--cert", help="write the certificate JSON here")
    s.set_defaults(func=cmd_hecke)

    s = sub.add_parser("search", parents=[common], help="scan primes l for T(l) F = 0 (mod m)")
    hecke_opts(s)
    s.add_argument("--l-min", type=int, required=True)
    s.add_argument("--l-max", type=int, required=True, help="exclusive")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("specialize", parents=[common], help="turn (m, l) into explicit progressions")
    _family_args(s)
    s.add_argument("--l", type=int, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--minimal", action="store_true", help="smallest-offset progression (default)")
    g.add_argument("--proposition", action="store_true", help="the j-indexed families")
    s.add_argument("--j", type=int)
    s.add_argument("--verify", type=int, metavar="N_MAX")
    s.set_defaults(func=cmd_specialize)

    s = sub.add_parser("verify-ap", parents=[common], help="check b_k(A n + B) = 0 (mod m) directly")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--modulus", type=int, required=True)
    s.add_argument("--A", type=int, required=True)
    s.add_argument("--B", type=int, required=True)
    s.add_argument("--n-max", type=int, default=100)
    s.set_defaults(func=cmd_verify_ap)

    s = sub.add_parser("mod3", parents=[common], help="mod-3 families of b4 for a prime l")
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--j", type=int)
    s.add_argument("--verify", type=int, metavar="N_MAX")
    s.set_defaults(func=cmd_mod3)

    s = sub.add_parser("parity", parents=[common], help="b4 mod 2 families and triangular scan")
    s.add_argument("--m", type=int)
    s.add_argument("--scan", type=int, metavar="N")
    s.add_argument("--verify", type=int, metavar="N_MAX")
    s.set_defaults(func=cmd_parity)

    s = sub.add_parser("identities", parents=[common], help="run the q-series identity suite")
    s.add_argument("--N", type=int, default=2000)
    s.add_argument("--check-prime", type=int, default=2**31 - 1)
    s.set_defaults(func=cmd_identities)

    s = sub.add_parser("compose", parents=[common], help="CRT-combine two families")
    s.add_argument("first", help="family JSON or a path to it")
    s.add_argument("second", help="family JSON or a path to it")
    s.add_argument("--verify", type=int, metavar="N_MAX")
    s.set_defaults(func=cmd_compose)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 2
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(message)s", stream=sys.stderr)
    if args.format is None:
        args.format = getattr(args, "default_format", "json")
    if args.threads is not None:
        if args.threads < 1:
            print("--threads must be positive", file=sys.stderr)
            return 2
        os.environ["REGULUS_THREADS"] = str(args.threads)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"regulus {args.command}: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"regulus {args.command}: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
