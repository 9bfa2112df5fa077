import json
import subprocess
import sys

import pytest

from sigmakit import io
from sigmakit.cli import RunConfig, main

BUILTIN_K = {"circle": 1, "torus": 2, "wedge-s1-s2": 2, "trefoil": 2, "bs12": 2}


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def verdict_map(obj):
    return {(tuple(v["xi"]), v["k"]): v["status"] for v in obj["verdicts"]}


def test_scan_bs12(capsys):
    code, out, _ = run(["scan", "bs12", "--k", "1", "--coeff", "Z"], capsys)
    assert code == 0
    v = verdict_map(json.loads(out))
    assert v[((-1,), 1)] == "Yes" and v[((1,), 1)] == "No"


def test_decide_torus(capsys):
    code, out, _ = run(["decide", "torus", "--xi", "3,5", "--k", "2", "--coeff", "Q"], capsys)
    assert code == 0
    (v,) = json.loads(out)["verdicts"]
    assert v["status"] == "Yes" and v["certificate"] is not None and v["xi"] == [3, 5]


def test_decide_accepts_rational_direction(capsys):
    code, out, _ = run(["decide", "torus", "--xi", "3/2,5/2", "--k", "1"], capsys)
    assert code == 0 and json.loads(out)["verdicts"][0]["xi"] == [3, 5]


def test_dominate_trefoil(tmp_path, capsys):
    out_path = tmp_path / "D.json"
    code, out, _ = run(["dominate", "trefoil", "--k", "2", "--out", str(out_path)], capsys)
    assert code == 0
    assert "H0(D) = Z" in out and "H1(D) = Z^2" in out
    obj = json.loads(out_path.read_text())
    assert io.complex_from_json(obj["D"]).deck_rank == 0


def test_undecided_exit_code(tmp_path, capsys):
    # rank-2 deck group, 1-cell boundary t1 - 2: no certificate towards (1,0) and no negative answers in rank 2
    cfile = tmp_path / "c.json"
    cfile.write_text(
        json.dumps(
            {
                "ring": {"coefficients": "Z", "deck_rank": 2},
                "ranks": [1, 1],
                "boundaries": [{"degree": 1, "entries": [{"row": 0, "col": 0, "terms": [[[1, 0], 1], [[0, 0], -2]]}]}],
            }
        )
    )
    code, out, _ = run(["decide", str(cfile), "--xi", "1,0", "--k", "0", "--retries", "0"], capsys)
    assert code == 2 and json.loads(out)["verdicts"][0]["status"] == "Undecided"


def test_env_window(monkeypatch, capsys):
    monkeypatch.setenv("SIGMA_DEFAULT_WINDOW", "7")
    code, out, _ = run(["decide", "circle", "--xi", "1", "--k", "1"], capsys)
    assert code == 0 and json.loads(out)["verdicts"][0]["diagnostics"]["window"] == 7
    code, out, _ = run(["decide", "circle", "--xi", "1", "--k", "1", "--window", "9"], capsys)
    assert json.loads(out)["verdicts"][0]["diagnostics"]["window"] == 9


@pytest.mark.parametrize(
    "args",
    [
        ["decide", "circle", "--xi", "1", "--k", "-1"],
        ["decide", "circle", "--xi", "1", "--window", "0"],
        ["decide", "circle", "--xi", "1,1"],
        ["decide", "circle", "--xi", "0"],
        ["scan", "nosuchfile.json"],
        ["scan", "circle", "--coeff", "R"],
        ["scan", "circle", "--directions", "1;2,3"],
    ],
)
def test_errors_exit_one(args, capsys):
    code, _, err = run(args, capsys)
    assert code == 1 and err.startswith("sigma: error:")


def test_runconfig_invariants():
    with pytest.raises(ValueError):
        RunConfig("circle", "scan", k=-1)
    with pytest.raises(ValueError):
        RunConfig("circle", "scan", window=0)


def test_validate_rejects_tampered_file(tmp_path, capsys):
    obj = json.loads(io.data_path("bs12.json").read_text())
    obj["boundaries"][0]["entries"].append({"row": 0, "col": 0, "terms": [[[0], 1]]})
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, _, err = run(["validate", str(bad)], capsys)
    assert code == 1 and "(0,0)" in err


def test_validate_ok(capsys):
    code, out, _ = run(["validate", str(io.data_path("circle.json"))], capsys)
    assert code == 0 and out.startswith("ok")


def test_scan_csv_and_summary(tmp_path, capsys):
    rep, csv = tmp_path / "r.json", tmp_path / "r.csv"
    code, out, _ = run(["scan", "bs12", "--k", "1", "--out", str(rep), "--csv", str(csv)], capsys)
    assert code == 0 and "NOT of finite type" in out
    lines = csv.read_text().splitlines()
    assert lines[0] == "xi1,k,ring,status,layer" and "1,1,Z,No,L2" in lines


def test_scan_flags_reach_provenance(capsys):
    code, out, _ = run(["scan", "trefoil", "--k", "2", "--sigma2-pi1", "--connectivity", "1"], capsys)
    obj = json.loads(out)
    provs = [c["provenance"] for c in obj["conclusions"]]
    assert ["hurewicz+assertion"] in provs and any("connectivity" in p for p in provs)
    assert obj["flags"] == {"connectivity": 1, "sigma2_pi1_asserted": True}


def test_movable(capsys):
    code, out, _ = run(["movable", "wedge-s1-s2", "--xi", "1", "--q", "0", "--z", "0:1"], capsys)
    m = json.loads(out)["movability"]
    assert code == 0 and m["status"] == "Movable" and m["delta"] == [[[0], 1], [[1], -1]]


def test_movable_rejects_non_cycle(capsys):
    code, _, _ = run(["movable", "wedge-s1-s2", "--xi", "1", "--q", "1", "--z", "0:1"], capsys)
    assert code == 1


def test_cat_bound(tmp_path, capsys):
    code, out, _ = run(["cat-bound", "circle", "--xi", "1", "--out", str(tmp_path / "c.json")], capsys)
    assert code == 0 and "<= 0" in out
    code, out, _ = run(["cat-bound", "bs12", "--xi", "-1"], capsys)
    assert json.loads(out)["cat_bound"]["bound"] == 2


def test_examples_write(tmp_path, capsys):
    code, out, _ = run(["examples", "--write", str(tmp_path)], capsys)
    assert code == 0 and sorted(p.name for p in tmp_path.iterdir()) == sorted(f"{n}.json" for n in BUILTIN_K)
    for p in tmp_path.iterdir():
        assert p.read_bytes() == io.data_path(p.name).read_bytes()


@pytest.mark.parametrize("name", sorted(BUILTIN_K))
def test_golden_reports(name, tmp_path, capsys):
    out_path = tmp_path / "r.json"
    code, _, _ = run(["scan", name, "--k", str(BUILTIN_K[name]), "--coeff", "Z", "--out", str(out_path)], capsys)
    assert code == 0
    assert out_path.read_bytes() == io.data_path(f"golden/{name}.report.json").read_bytes()


@pytest.mark.parametrize("name", sorted(BUILTIN_K))
def test_verify_golden(name, capsys):
    code, out, _ = run(["verify", str(io.data_path(f"golden/{name}.report.json"))], capsys)
    assert code == 0 and "REJECTED" not in out


def test_verify_catches_tampering(tmp_path, capsys):
    obj = json.loads(io.data_path("golden/circle.report.json").read_text())
    yes = next(v for v in obj["verdicts"] if v["status"] == "Yes" and v["k"] == 1)
    yes["certificate"]["epsilon"] = "5"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, out, _ = run(["verify", str(bad)], capsys)
    assert code == 1 and "REJECTED" in out


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "sigmakit.cli", "scan", "circle", "--k", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["complex_id"] == "circle"


def test_jobs_do_not_change_the_report(capsys):
    _, one, _ = run(["scan", "torus", "--k", "1"], capsys)
    _, many, _ = run(["scan", "torus", "--k", "1", "--jobs", "3"], capsys)
    assert one == many
