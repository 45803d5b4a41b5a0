import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from hyperdescent.cli import SCHEMA, main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out)
    return code, out.getvalue()


def structured(*argv):
    code, text = run(*argv, "--format", "structured")
    return code, [json.loads(line) for line in text.splitlines()]


def test_check_topology():
    assert run("check-topology", DATA / "pseudocircle.json")[0] == 0
    code, text = run("check-topology", DATA / "no_union.json")
    assert code == 1 and "not open" in text


def test_input_errors():
    assert run("check-topology", DATA / "malformed.json")[0] == 2
    assert run("check-topology", DATA / "missing.json")[0] == 2
    assert run("no-such-command")[0] == 2
    assert run("roundtrip", DATA / "sierpinski.json", "--cap", "-1")[0] == 2


def test_minimal_basis_reports_stability():
    code, recs = structured("minimal-basis", DATA / "pseudocircle.json")
    assert code == 0
    rec = recs[-1]
    assert rec["schema"] == SCHEMA and rec["command"] == "minimal-basis"
    assert "intersection_stable" in json.dumps(rec)


def test_cech_then_check(tmp_path):
    path = tmp_path / "h.json"
    assert run("cech", DATA / "pseudocircle.json", "--cover", "a,b,c", "a,b,d",
               "--trunc", "3", "-o", path)[0] == 0
    assert run("check-hypercover", path, "--trunc", "3")[0] == 0
    data = json.loads(path.read_text())
    for entry in data["hypercover"]["assignment"]:
        if entry[:2] == [1, 0]:
            entry[2] = ["a"]
    path.write_text(json.dumps(data))
    code, recs = structured("check-hypercover", path, "--trunc", "3")
    # the triangles over the edge still carry {a,b}
    assert code == 1
    assert recs[-1]["witness"]["kind"] == "open not inside face open"


def test_covering_witness(tmp_path):
    path = tmp_path / "h.json"
    run("cech", DATA / "pseudocircle.json", "--cover", "a,b,c", "a,b,d", "--trunc", "1", "-o", path)
    data = json.loads(path.read_text())
    for entry in data["hypercover"]["assignment"]:
        if entry[:2] == [1, 0]:
            entry[2] = ["a"]
    path.write_text(json.dumps(data))
    code, recs = structured("check-hypercover", path, "--trunc", "1")
    assert code == 1
    assert recs[-1]["witness"]["fillers_cover"] == "{a}"
    assert recs[-1]["witness"]["facets_meet"] == "{a,b}"


def test_cech_rejects_non_cover():
    assert run("cech", DATA / "pseudocircle.json", "--cover", "a,b,c")[0] == 1


def test_refine(tmp_path):
    src = tmp_path / "h.json"
    out = tmp_path / "r.json"
    run("cech", DATA / "pseudocircle.json", "--cover", "a,b,c", "a,b,d", "--trunc", "2", "-o", src)
    assert run("refine", src, "--trunc", "2", "-o", out)[0] == 0
    assert run("check-hypercover", out, "--trunc", "2")[0] == 0


def test_sheaf_checks():
    space = DATA / "pseudocircle.json"
    assert run("check-sheaf", space, DATA / "maps_all_nonempty.json", "--basis", "all")[0] == 0
    code, recs = structured("check-hypersheaf", space, DATA / "broken_restriction.json", "--basis", "all")
    assert code == 1
    assert recs[-1]["witness"]["kind"] == "not-injective"
    assert run("check-hypersheaf", space, DATA / "maps_minimal.json")[0] == 0


def test_kan_extend(tmp_path):
    out = tmp_path / "ext.json"
    assert run("kan-extend", DATA / "pseudocircle.json", DATA / "maps_minimal.json", "-o", out)[0] == 0
    values = {tuple(v["open"]): len(v["elements"]) for v in json.loads(out.read_text())["values"]}
    assert values[("a", "b", "c", "d")] == 16


def test_roundtrip_small():
    code, recs = structured("roundtrip", DATA / "sierpinski.json", "--basis", "all")
    assert code == 0
    assert recs[0]["basis_accepted"] == recs[0]["space_accepted"] == 11


def test_roundtrip_rejects_claimed_hypersheaf():
    code, recs = structured("roundtrip", DATA / "pseudocircle.json", "--basis", "all",
                            "--cap", "0", "--presheaf", DATA / "broken_restriction.json")
    assert code == 1
    failures = [r for r in recs if r["kind"] == "failure"]
    assert failures[0]["check"] == "supplied-not-hypersheaf"
    assert failures[0]["witness"]["kind"] == "not-injective"


def test_coinitial():
    assert run("coinitial", DATA / "identity_map.json")[0] == 0


def test_sym_coinitial():
    code, text = run("sym-coinitial", "simplex:1", "--trunc", "2", "--degree", "2")
    assert code == 0
    assert run("sym-coinitial", "nonsense:1")[0] == 2


def test_counterexample():
    code, text = run("counterexample")
    assert code == 0 and "empty comma poset over: 0'" in text
    assert run("counterexample", "--posets", DATA / "glued_triangles_perturbed.json")[0] == 1


def test_structured_output_is_deterministic():
    argv = ("roundtrip", DATA / "pseudocircle.json", "--cap", "1", "--samples", "5", "--seed", "7",
            "--format", "structured")
    assert run(*argv) == run(*argv)
    for line in run(*argv)[1].splitlines():
        rec = json.loads(line)
        assert rec["seed"] == 7
        assert not any("time" in k for k in rec)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hyperdescent", "counterexample"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
