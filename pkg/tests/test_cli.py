import csv
import io
import json

from regulus.cli import run
from regulus.fpseries import load_series, regular_partition_series


def call(capsys, *argv):
    rc = run(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_bk_csv_row_398(capsys):
    rc, out, _ = call(capsys, "bk", "--k", "4", "--modulus", "3", "--limit", "500", "--format", "csv")
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 500
    assert rows[398] == {"n": "398", "b": "1"}


def test_bk_json_and_exact(capsys):
    rc, out, _ = call(capsys, "bk", "--k", "6", "--modulus", "100", "--limit", "7")
    assert rc == 0 and json.loads(out)["coefficients"] == [1, 1, 2, 3, 5, 7, 10]
    rc, out, _ = call(capsys, "bk", "--k", "4", "--exact", "--limit", "8", "--format", "text")
    assert out.split() == ["1", "1", "2", "3", "4", "6", "9", "12"]
    rc, out, _ = call(capsys, "bk", "--k", "4", "--modulus", "7", "--limit", "50", "--method", "recurrence")
    assert json.loads(out)["coefficients"] == regular_partition_series(4, 7, 50).to_list()


def test_bk_usage_errors(capsys):
    assert call(capsys, "bk", "--k", "4", "--limit", "10")[0] == 2
    assert call(capsys, "bk", "--k", "4", "--exact", "--limit", "100")[0] == 2
    assert call(capsys, "bk", "--k", "1", "--modulus", "3", "--limit", "10")[0] == 2
    rc, _, err = call(capsys, "bk", "--k", "4", "--limit", "5", "--bogus")
    assert rc == 2 and "--bogus" in err
    assert call(capsys, "frobnicate")[0] == 2
    assert call(capsys)[0] == 2


def test_sturm(capsys):
    rc, out, _ = call(capsys, "sturm", "--weight", "12", "--level", "256")
    assert rc == 0 and out.strip() == "384"
    rc, out, _ = call(capsys, "sturm", "--weight", "48", "--level", "3456", "--format", "json")
    assert json.loads(out)["sturm_bound"] == 27648
    assert call(capsys, "sturm", "--weight", "0", "--level", "4")[0] == 2


def test_eta(capsys):
    rc, out, _ = call(capsys, "eta", "--quotient", "8:3,16:-4,32:5", "--level", "256")
    d = json.loads(out)
    assert rc == 0 and d["weight"] == 2 and d["character_disc"] == 1
    orders = {c["d"]: c["order"] for c in d["cusps"]}
    assert orders[16] == "0" and orders[1] == "3" and orders[256] == "5"
    assert d["holomorphic"] and not d["cuspidal"] and d["valence"]["passed"]
    rc, out, _ = call(capsys, "eta", "--quotient", "1:1")
    assert rc == 1 and not json.loads(out)["admissible"]
    assert call(capsys, "eta", "--quotient", "8:x")[0] == 2
    rc, out, _ = call(capsys, "eta", "--quotient", "1:4,2:2,4:4", "--format", "csv")
    assert "2,1/2,1" in out


def test_hecke_full_verified(capsys, tmp_path):
    cert = tmp_path / "out.json"
    rc, out, _ = call(capsys, "hecke", "--family", "b4", "--m", "5", "--l", "809", "--full",
                      "--cert", str(cert))
    assert rc == 0
    d = json.loads(cert.read_text())
    assert d["status"] == "verified" and d["checked_to"] == 384 and d["mode"] == "full"
    assert json.loads(out) == d


def test_hecke_refuted_and_quick(capsys):
    rc, out, _ = call(capsys, "hecke", "--family", "b4", "--m", "5", "--l", "811")
    assert rc == 1 and json.loads(out)["status"] == "refuted"
    rc, out, _ = call(capsys, "hecke", "--family", "b4", "--m", "5", "--l", "809", "--quick",
                      "--quick-bound", "100")
    d = json.loads(out)
    assert rc == 0 and d["status"] == "partial" and d["mode"] == "quick"


def test_hecke_quick_never_verified(capsys):
    # quick bound above the Sturm bound is clamped, and a vanishing prefix is still not "verified"
    rc, out, _ = call(capsys, "hecke", "--family", "b4", "--m", "5", "--l", "809", "--quick",
                      "--bound", "200")
    assert json.loads(out)["status"] == "partial"


def test_hecke_truncation_shortfall(capsys):
    rc, out, _ = call(capsys, "hecke", "--family", "b4", "--m", "5", "--l", "809",
                      "--truncation", "10000")
    d = json.loads(out)
    assert rc == 1 and d["status"] == "partial" and d["checked_to"] < 384


def test_hecke_usage(capsys):
    assert call(capsys, "hecke", "--family", "b6", "--m", "3", "--l", "13")[0] == 2
    assert call(capsys, "hecke", "--family", "b4", "--m", "5", "--l", "2")[0] == 2
    assert call(capsys, "hecke", "--family", "b4", "--m", "5", "--l", "5")[0] == 2
    assert call(capsys, "hecke", "--family", "b4", "--m", "5", "--l", "809",
                "--quick", "--full")[0] == 2


def test_hecke_cache(capsys, tmp_path):
    cache = tmp_path / "b4m5.qser"
    args = ("hecke", "--family", "b4", "--m", "5", "--l", "839", "--cache", str(cache))
    rc, out1, _ = call(capsys, *args)
    assert rc == 0 and cache.exists()
    s = load_series(cache, 5)
    assert s == regular_partition_series(4, 5, s.truncation)
    rc, out2, _ = call(capsys, *args)
    a, b = json.loads(out1), json.loads(out2)
    a.pop("created"), b.pop("created")
    assert a == b
    raw = cache.read_bytes()
    cache.write_bytes(raw[:-10])
    rc, _, err = call(capsys, *args)
    assert rc == 1 and "expected" in err
    cache.write_bytes(raw)
    rc, _, err = call(capsys, "hecke", "--family", "b4", "--m", "7", "--l", "839", "--cache", str(cache))
    assert rc == 1 and "modulus" in err


def test_reproducible_json(capsys, tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"c{i}.json"
        call(capsys, "hecke", "--family", "b4", "--m", "5", "--l", "811", "--output", str(p))
        outs.append(p.read_text())
    strip = lambda t: "\n".join(l for l in t.splitlines() if '"created"' not in l)
    assert strip(outs[0]) == strip(outs[1])


def test_search(capsys):
    rc, out, _ = call(capsys, "search", "--family", "b4", "--m", "5", "--l-min", "800",
                      "--l-max", "850", "--threads", "2")
    d = json.loads(out)
    assert rc == 0 and d["verified"] == [809, 839]
    rc, out, _ = call(capsys, "search", "--family", "b4", "--m", "5", "--l-min", "800",
                      "--l-max", "850", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {r["l"] for r in rows if r["status"] == "verified"} == {"809", "839"}
    rc, out, _ = call(capsys, "search", "--family", "b6", "--m", "7", "--l-min", "2",
                      "--l-max", "30", "--quick", "--quick-bound", "100", "--format", "text")
    assert rc == 0 and out.strip() == ""
    assert call(capsys, "search", "--family", "b4", "--m", "5", "--l-min", "800",
                "--l-max", "850", "--threads", "0")[0] == 2


def test_specialize(capsys):
    rc, out, _ = call(capsys, "specialize", "--family", "b4", "--m", "5", "--l", "809")
    d = json.loads(out)
    assert (d["A"], d["B"]) == (3272405, 2528)
    rc, out, _ = call(capsys, "specialize", "--family", "b4", "--m", "3", "--l", "13",
                      "--proposition", "--verify", "5")
    rows = json.loads(out)
    assert rc == 0 and len(rows) == 12 and all(r["check"]["passed"] for r in rows)
    rc, out, _ = call(capsys, "specialize", "--family", "b6", "--m", "5", "--l", "1973",
                      "--format", "text")
    assert out.strip() == "97318225 2055"
    assert call(capsys, "specialize", "--family", "b4", "--m", "5", "--l", "9")[0] == 2


def test_verify_ap(capsys):
    rc, out, _ = call(capsys, "verify-ap", "--k", "4", "--modulus", "3", "--A", "507",
                      "--B", "34", "--n-max", "200")
    assert rc == 0 and json.loads(out)["passed"]
    rc, out, _ = call(capsys, "verify-ap", "--k", "4", "--modulus", "3", "--A", "507",
                      "--B", "35", "--format", "text")
    assert rc == 1 and out.startswith("fail at n=0")
    assert call(capsys, "verify-ap", "--k", "4", "--modulus", "3", "--A", "0", "--B", "1")[0] == 2


def test_mod3(capsys):
    rc, out, _ = call(capsys, "mod3", "--l", "13", "--verify", "10")
    d = json.loads(out)
    assert rc == 0 and d["accepted"] and d["failures"] == []
    assert len(d["families"]["l2"]) == 12
    rc, out, _ = call(capsys, "mod3", "--l", "5", "--format", "text")
    assert rc == 1 and "kronecker(-6,5) = 1" in out
    rc, out, _ = call(capsys, "mod3", "--l", "17", "--j", "1", "--format", "csv")
    assert len(list(csv.DictReader(io.StringIO(out)))) == 2
    assert call(capsys, "mod3", "--l", "15")[0] == 2


def test_parity(capsys):
    rc, out, _ = call(capsys, "parity", "--m", "3", "--verify", "100", "--scan", "10000")
    d = json.loads(out)
    assert rc == 0 and [f["B"] for f in d["families"]] == [4, 7]
    assert d["all_passed"] and d["scan"]["passed"]
    assert call(capsys, "parity")[0] == 2
    assert call(capsys, "parity", "--m", "4")[0] == 2


def test_identities(capsys):
    rc, out, _ = call(capsys, "identities", "--N", "500")
    d = json.loads(out)
    assert rc == 0 and d["passed"] and len(d["identities"]) == 7
    rc, out, _ = call(capsys, "identities", "--N", "200", "--format", "text")
    assert out.count("PASS") == 7


def test_compose(capsys, tmp_path):
    f1 = json.dumps({"reg_k": 4, "modulus": 3, "A": 507, "B": 34})
    p = tmp_path / "f2.json"
    p.write_text(json.dumps({"reg_k": 4, "modulus": 2, "A": 9, "B": 4, "provenance": "parity"}))
    rc, out, _ = call(capsys, "compose", f1, str(p), "--verify", "20")
    d = json.loads(out)
    assert rc == 0 and (d["modulus"], d["A"]) == (6, 1521) and d["check"]["passed"]
    bad = json.dumps({"reg_k": 4, "modulus": 5, "A": 6, "B": 1})
    rc, _, err = call(capsys, "compose", json.dumps({"reg_k": 4, "modulus": 3, "A": 4, "B": 2}), bad)
    assert rc == 1 and "do not meet" in err
    assert call(capsys, "compose", "{not json", f1)[0] == 2


def test_binary_cache_output(capsys, tmp_path):
    p = tmp_path / "s.qser"
    rc, out, _ = call(capsys, "bk", "--k", "4", "--modulus", "5", "--limit", "1000",
                      "--format", "binary-cache", "--output", str(p))
    assert rc == 0 and out == ""
    assert load_series(p) == regular_partition_series(4, 5, 1000)
    assert call(capsys, "bk", "--k", "4", "--modulus", "5", "--limit", "10",
                "--format", "binary-cache")[0] == 2
    assert call(capsys, "sturm", "--weight", "2", "--level", "4", "--format", "binary-cache")[0] == 2


def test_version_and_help(capsys):
    assert call(capsys, "--version")[0] == 0
    assert call(capsys, "bk", "--help")[0] == 0


def test_verbose_progress_off_stdout(capsys, caplog):
    with caplog.at_level("INFO", logger="regulus"):
        rc, out, err = call(capsys, "hecke", "--family", "b4", "--m", "5", "--l", "811", "-v")
    json.loads(out)  # stdout stays machine-readable
    assert any("T(811)" in r.getMessage() for r in caplog.records)
