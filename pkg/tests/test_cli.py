import json
import subprocess
import sys

import pytest

from sphere_drc.cli import EXIT_REFUSED, EXIT_USAGE, main


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.setenv("SPHERE_DRC_DIR", str(tmp_path))
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_then_verify(workdir, capsys):
    code, out, _ = run(capsys, "construct", "--p", "1", "--q", "3", "--k", "8", "--t", "3",
                       "--n", "500", "--seed", "42")
    assert code == 0
    rep = json.loads(out)
    assert rep["pass"] and rep["metrics"]["N"] == 1500
    assert (workdir / "coloring.bin").exists() and (workdir / "coloring.family.bin").exists()
    code, out, _ = run(capsys, "verify", "--check", "exactly-p")
    assert code == 0
    assert json.loads(out)["metrics"]["checks"]["exactly-p"]["violations"] == 0


def test_verify_other_checks(workdir, capsys):
    run(capsys, "construct", "--p", "2", "--q", "3", "--k", "6", "--t", "3", "--n", "150")
    code, out, _ = run(capsys, "verify", "--check", "density", "--check", "isomorphism")
    rep = json.loads(out)
    assert code == 0, rep
    assert rep["metrics"]["checks"]["isomorphism"]["checked"] == 9


def test_resolved_defaults_and_caps_recorded(workdir, capsys):
    code, out, _ = run(capsys, "construct", "--p", "1", "--q", "2", "--n", "20", "--eps", "0.9")
    rep = json.loads(out)
    assert code == 0
    resolved = rep["parameters"]["resolved"]
    assert resolved["t"] == 12 and resolved["k"] == 64
    assert resolved["eta"] == 0.9 / (132 * 2)
    assert "t" not in rep["parameters"]["caps_applied"]
    assert rep["parameters"]["caps_applied"]["k"]["cap"] == 64


def test_strict_flag_refuses(workdir, capsys):
    code, out, _ = run(capsys, "construct", "--p", "1", "--q", "3", "--eps", "0.1", "--strict-paper-params")
    assert code == EXIT_REFUSED
    payload = json.loads(out)
    assert payload["refused"] and payload["uncapped"]["t"] == 150
    assert payload["uncapped"]["k"] == 27 * 10**10
    assert not (workdir / "coloring.bin").exists()


@pytest.mark.parametrize("argv,needle", [
    (["construct", "--kind", "c2", "--p", "1", "--q", "3"], "p/q > 1/2"),
    (["construct", "--kind", "c1", "--p", "2", "--q", "3"], "p/q <= 1/2"),
    (["construct", "--p", "3", "--q", "3"], "1 <= p < q"),
    (["construct", "--k", "65"], "cap 64"),
    (["construct", "--eps", "1.5"], "eps"),
    (["estimate", "--nu", "-1"], "nu"),
])
def test_usage_errors_name_the_constraint(workdir, capsys, argv, needle):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert needle in err


def test_estimate_strip(workdir, capsys):
    code, out, _ = run(capsys, "estimate", "--what", "strip", "--k", "8", "--nu", "0.1",
                       "--samples", "1000000")
    rep = json.loads(out)
    assert code == 0 and rep["metrics"]["value"] <= 0.3


def test_estimate_cap(workdir, capsys):
    code, out, _ = run(capsys, "estimate", "--what", "cap", "--k", "8", "--nu", "0.1",
                       "--samples", "200000")
    assert code == 0 and json.loads(out)["metrics"]["bound_ok"]


def test_drc_on_random_graph(workdir, capsys):
    run(capsys, "construct", "--kind", "random", "--n", "100", "--density", "0.5", "--seed", "1",
        "--artifact", str(workdir / "g.bin"))
    code, out, _ = run(capsys, "drc", "--input", str(workdir / "g.bin"), "--t", "2", "--r", "2",
                       "--m", "5", "--a", "12")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] and rep["metrics"]["size"] >= 12


def test_failure_exit_code(workdir, capsys):
    run(capsys, "construct", "--kind", "random", "--n", "30", "--density", "0.0")
    code, out, _ = run(capsys, "drc", "--t", "1", "--r", "2", "--m", "1", "--a", "3", "--max-retries", "2")
    assert code == 1 and json.loads(out)["pass"] is False


def test_audits(workdir, capsys):
    run(capsys, "construct", "--kind", "random", "--n", "400", "--density", "0.7", "--seed", "3")
    code, out, _ = run(capsys, "audit", "--what", "proposition", "--p", "1", "--q", "2",
                       "--eps", "0.1", "--samples", "2000")
    assert code == 0, out
    code, out, _ = run(capsys, "audit", "--what", "rich", "--s", "2", "--eps", "0.2")
    assert code == 0
    run(capsys, "construct", "--p", "1", "--q", "2", "--k", "4", "--t", "2", "--n", "300")
    code, out, _ = run(capsys, "audit", "--what", "j-complement")
    assert code == 0 and json.loads(out)["operation"] == "j_complement_audit"


def test_reports_byte_identical(workdir, capsys):
    args = ["construct", "--p", "1", "--q", "3", "--k", "4", "--t", "2", "--n", "40", "--seed", "5"]
    _, first, _ = run(capsys, *args)
    bytes1 = (workdir / "coloring.bin").read_bytes()
    _, second, _ = run(capsys, *args)
    assert first == second and (workdir / "coloring.bin").read_bytes() == bytes1
    est = ["estimate", "--samples", "70000", "--seed", "3"]
    assert run(capsys, *est)[1] == run(capsys, *est, "--threads", "2")[1]


def test_report_to_file_and_timing(workdir, capsys):
    out_path = workdir / "r.json"
    code, out, _ = run(capsys, "estimate", "--samples", "1000", "--out", str(out_path), "--timing")
    assert out == "" and "elapsed_s" in json.loads(out_path.read_text())["meta"]


def test_missing_input(workdir, capsys):
    code, _, err = run(capsys, "verify", "--input", str(workdir / "nope.bin"))
    assert code == 1 and "nope.bin" in err


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "sphere_drc", "estimate", "--samples", "1000"],
                         capture_output=True, text=True, cwd=tmp_path)
    assert res.returncode == 0 and json.loads(res.stdout)["operation"] == "estimate_strip"
