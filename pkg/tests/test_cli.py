import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from oracles import DATA
from ramsey_lab.cli import main, threshold_table, wilson_interval


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_density_k4(capsys, monkeypatch):
    code, out, _ = run(capsys, "density", stdin="C~\n", monkeypatch=monkeypatch)
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == "ramsey-lab/1"
    row = doc["results"][0]
    assert (row["m"], row["m1"], row["m2"]) == ("3/2", "2", "5/2")


def test_density_pair(capsys, monkeypatch):
    code, out, _ = run(capsys, "density", "--heavy", "K4", "--light", "K3", stdin="C~\n", monkeypatch=monkeypatch)
    pair = json.loads(out)["pair"]
    assert pair["alpha"] == "12/5" and pair["lemmas"]["ok"]
    assert pair["light_strictly_2_balanced"] == [True]


def test_density_malformed(capsys, monkeypatch):
    code, _, err = run(capsys, "density", stdin="C~\nC~~\n", monkeypatch=monkeypatch)
    assert code == 2 and "line 2" in err


def test_density_csv(capsys, monkeypatch):
    code, out, _ = run(capsys, "density", "--format", "csv", stdin="C~\n", monkeypatch=monkeypatch)
    lines = out.splitlines()
    assert lines[0].startswith("graph6,n,e,m") and lines[1].startswith("C~,4,6,3/2")


def test_ramsey_and_decompose(capsys, tmp_path):
    f = tmp_path / "g.g6"
    f.write_text("D~{\nE~~w\n")
    code, out, _ = run(capsys, "ramsey", str(f), "--families", "K3", "K3")
    verdicts = [r["verdict"] for r in json.loads(out)["results"]]
    assert verdicts == ["not-ramsey", "ramsey"]
    code, out, _ = run(capsys, "ramsey", str(f), "--families", "K3", "K3", "--budget-nodes", "2")
    assert json.loads(out)["results"][1]["verdict"] == "budget"
    code, out, _ = run(capsys, "decompose", str(f), "--heavy", "K4", "--light", "K3")
    rows = json.loads(out)["results"]
    assert rows[0]["status"] == "colored" and rows[0]["verified"]
    assert rows[1]["status"] == "refused"


def test_conjecture_scan(capsys, tmp_path):
    f = tmp_path / "g.g6"
    f.write_text("D~{\nE~~w\nG~~~~{\n")
    code, out, _ = run(capsys, "conjecture-scan", str(f), "--budget-edges", "20")
    doc = json.loads(out)
    assert code == 0
    assert [r["verdict"] for r in doc["results"]] == ["forest", "forest", "budget"]
    empty = tmp_path / "empty.g6"
    empty.write_text("")
    code, out, _ = run(capsys, "conjecture-scan", str(empty))
    assert code == 0 and json.loads(out)["results"] == []


def test_explore(capsys, tmp_path):
    code, out, _ = run(capsys, "explore", str(DATA / "k6_symmetric.json"))
    doc = json.loads(out)
    assert code == 0 and doc["report"]["ok"]
    bal = [doc["initial_balance"]] + [s["balance"] for s in doc["steps"]]
    assert [Fraction(b) for b in bal] == sorted(Fraction(b) for b in bal)
    code, out, _ = run(capsys, "explore", str(DATA / "rook44.json"), "--vertex-cap", "5")
    assert json.loads(out)["stop_reason"] == "vertex-cap"
    bad = json.loads((DATA / "rook33.json").read_text())
    bad["F_L"] = bad["F_L"][:3]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    code, _, err = run(capsys, "explore", str(p))
    assert code == 2 and "not a core" in err


def test_wilson():
    lo, hi = wilson_interval(0, 200)
    assert lo == 0 and 0 < hi < 0.02
    lo, hi = wilson_interval(200, 200)
    assert hi == 1 and lo > 0.98
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and abs((lo + hi) / 2 - 0.5) < 1e-12


def test_threshold_small():
    rows = threshold_table("K3", "K3", [8], [1.0, 4.0], 5, seed=1)
    assert [r["p"] for r in rows] == ["0", "0.353553", "1", "1"]
    assert rows[0]["ramsey_count"] == 0 and rows[-1]["ramsey_count"] == 5
    budget = threshold_table("K3", "K3", [8], [], 2, seed=1, budget=2)
    assert budget[-1]["status"] == "budget" and budget[-1]["ramsey_count"] == ""


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "ramsey_lab", "density", "-"], input="C~\n",
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["results"][0]["m2"] == "5/2"


@pytest.mark.parametrize("argv", [["density", "--workers", "0"], ["nonsense"]])
def test_bad_flags(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2
