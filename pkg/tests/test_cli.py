import json
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from hjlab import __version__
from hjlab.cli import main
from hjlab.grid import make_constant
from hjlab.interval import IntervalValue
from hjlab.lower import IntervalColoring, lift_to_grid
from hjlab.report import SCHEMA, CheckRecord, SuiteReport, emit_report, jsonable, without_elapsed
from hjlab.suites import RunConfig, run_suite


def hjlab(*args, env=None):
    full_env = dict(os.environ, **(env or {}))
    return subprocess.run(
        [sys.executable, "-m", "hjlab.cli", *args], capture_output=True, text=True, env=full_env, timeout=600
    )


def test_certify_positive_exit_zero():
    r = hjlab("bound", "certify", "--n", "100000000000", "--kappa", "368")
    assert r.returncode == 0, r.stderr
    rec = json.loads(r.stdout)["records"][0]
    assert rec["values"]["verdict"] == "positive"
    lo, hi = rec["values"]["margin"]
    assert 0 < float(lo) <= float(hi)


def test_certify_negative_exit_one():
    r = hjlab("bound", "certify", "--n", "1000000000", "--kappa", "240")
    assert r.returncode == 1
    assert json.loads(r.stdout)["overall"] == "fail"


@pytest.mark.parametrize(
    "args",
    [
        ["nonsense"],
        ["lemma1", "--bogus"],
        ["bound", "certify", "--n", "10"],
        ["bound", "certify", "--n", "100", "--kappa", "240"],
        ["bound", "certify", "--n", "100000000000", "--kappa", "368", "--precision", "16"],
        ["lower", "ap-free", "--workers", "0"],
        ["gadget", "--check-incidence", "--exhaustive"],
    ],
)
def test_usage_errors_exit_two(args):
    assert hjlab(*args).returncode == 2


def test_env_worker_count_validated():
    assert hjlab("gadget", "--check-incidence", env={"HJLAB_WORKERS": "0"}).returncode == 2
    assert hjlab("gadget", "--check-incidence", env={"HJLAB_WORKERS": "many"}).returncode == 2
    r = hjlab("gadget", "--check-incidence", env={"HJLAB_WORKERS": "3"})
    assert r.returncode == 0 and json.loads(r.stdout)["config"]["workers"] == 3


def test_unreadable_coloring_exit_two(tmp_path):
    bad = tmp_path / "bad.hjc"
    bad.write_bytes(b"garbage")
    assert hjlab("lower", "verify", "--coloring", str(bad)).returncode == 2
    assert hjlab("lower", "verify", "--coloring", str(tmp_path / "missing.hjc")).returncode == 2


def test_verify_failure_exit_one(tmp_path):
    path = tmp_path / "const.hjc"
    make_constant(4, 3, 1).save(path)
    r = hjlab("lower", "verify", "--coloring", str(path))
    assert r.returncode == 1
    assert json.loads(r.stdout)["records"][0]["values"]["mono_lines"] == 61


def test_lower_pipeline_through_files(tmp_path):
    base, grid = tmp_path / "base.txt", tmp_path / "grid.hjc"
    out = tmp_path / "report.json"
    assert hjlab("lower", "ap-free", "--N", "34", "--t", "4", "--save", str(base)).returncode == 0
    assert hjlab("lower", "lift", "--t", "4", "--n", "6", "--base", str(base), "--save", str(grid)).returncode == 0
    r = hjlab("lower", "verify", "--coloring", str(grid), "--out", str(out))
    assert r.returncode == 0 and r.stdout == ""
    rec = json.loads(out.read_text())["records"][0]
    assert rec["values"]["mono_lines"] == 0 and rec["values"]["lines"] == 5**6 - 4**6


def test_lift_rejects_short_base(tmp_path):
    base = tmp_path / "base.txt"
    base.write_text("0101\n")
    assert hjlab("lower", "lift", "--t", "4", "--n", "6", "--base", str(base)).returncode == 2
    base.write_text("01x1\n")
    assert hjlab("lower", "lift", "--t", "4", "--n", "1", "--base", str(base)).returncode == 2


def test_unwritable_report_path_exit_two(tmp_path):
    r = hjlab("gadget", "--check-incidence", "--out", str(tmp_path / "no" / "such" / "dir.json"))
    assert r.returncode == 2 and "dir.json" in r.stderr


def test_same_config_gives_identical_reports(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["lemma2", "--n", "6", "--kappa", "1", "--samples", "40", "--seed", "3"]
    assert hjlab(*args, "--out", str(a)).returncode == 0
    assert hjlab(*args, "--out", str(b)).returncode == 0
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    assert without_elapsed(da) == without_elapsed(db)


def test_serial_and_parallel_runs_agree():
    serial = run_suite(RunConfig("lower", {"action": "lift", "t": 4, "n": 7}, workers=1)).to_dict()
    parallel = run_suite(RunConfig("lower", {"action": "lift", "t": 4, "n": 7}, workers=4)).to_dict()
    for d in (serial, parallel):
        d["config"].pop("workers")
    assert without_elapsed(serial) == without_elapsed(parallel)


def test_lemma1_custom_run(capsys):
    code = main(["lemma1", "--n", "4", "--kappa", "3", "--exhaustive"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    v = data["records"][0]["values"]
    assert v["checked"] == 65536 and v["violations"] == 0


def test_multiplicity_custom_run(capsys):
    assert main(["multiplicity", "--n", "5", "--k", "1", "--oracle"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["records"][0]["values"]["mismatches"] == []


def test_lemma4_custom_run(capsys):
    assert main(["lemma4", "--n", "5", "--k", "1", "--seeds", "1", "2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["records"][0]["values"]["M"] == [4, 0, 0, 24]


def test_bound_search_run(capsys):
    assert main(["bound", "search", "--kappa-min", "236", "--kappa-max", "244"]) == 0
    v = json.loads(capsys.readouterr().out)["records"][0]["values"]
    assert v["kappa"] == 240 and v["n"] == 19012590257


def test_empty_report_is_valid_json(tmp_path):
    rep = SuiteReport("empty", __version__, {})
    path = tmp_path / "e.json"
    emit_report(rep, path)
    data = json.loads(path.read_text())
    assert data["records"] == [] and data["overall"] == "pass" and data["schema"] == SCHEMA


def test_report_round_trip_and_field_order():
    rep = SuiteReport("demo", __version__, {"seed": 1})
    rep.run("a", lambda: (True, {"q": Fraction(-7, 9), "iv": IntervalValue(Fraction(1, 3), Fraction(1, 2)), "elapsed": 3}))
    rep.records.append(CheckRecord("b", False, {"n": 3}))
    data = json.loads(rep.to_json())
    assert list(data) == ["schema", "suite", "version", "config", "overall", "records"]
    assert list(data["records"][0]) == ["name", "status", "values", "elapsed"]
    assert "elapsed" not in data["records"][0]["values"]
    assert Fraction(data["records"][0]["values"]["q"]) == Fraction(-7, 9)
    lo, hi = data["records"][0]["values"]["iv"]
    assert Fraction(lo) <= Fraction(1, 3) and Fraction(hi) >= Fraction(1, 2)
    back = SuiteReport.from_dict(data)
    assert back.to_dict() == data and not back.passed


def test_round_trip_rejects_inconsistent_overall():
    data = SuiteReport("x", __version__, {}, [CheckRecord("a", False, {})]).to_dict()
    data["overall"] = "pass"
    with pytest.raises(ValueError):
        SuiteReport.from_dict(data)


def test_jsonable_rejects_unknown():
    with pytest.raises(TypeError):
        jsonable(object())


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig("lemma1", workers=0)
    with pytest.raises(ValueError):
        RunConfig("lemma1", precision=31)
    with pytest.raises(ValueError):
        run_suite(RunConfig("nope"))


def test_all_suite_report(tmp_path):
    out = tmp_path / "all.json"
    code = main(["all", "--out", str(out)])
    data = json.loads(out.read_text())
    names = [r["name"] for r in data["records"]]
    for expected in (
        "gadget incidence",
        "gadget exhaustive",
        "lemma1 exhaustive [2]^4 kappa=2",
        "chain average identity [2]^5",
        "density identities [4]^4",
        "checkerboard q(odd k) = 1/3",
        "type recombination [4]^5",
        "multiplicity oracle [4]^4 k=1",
        "min length-1 multiplicity [4]^9",
        "lemma4 [4]^5 k=1, 20 colorings",
        "certify n=10^11 kappa=368",
        "R-series kappa=240",
        "interval soundness",
        "lifted [4]^11 line-free",
        "[3]^3 witness line-free",
    ):
        assert expected in names
    failing = sorted(r["name"] for r in data["records"] if r["status"] == "fail")
    assert failing == ["R-series kappa=240", "min length-1 multiplicity [4]^9"]
    assert code == 1 and data["overall"] == "fail"
