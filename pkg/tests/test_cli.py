import json
import subprocess
import sys

import pytest

from sublevel import cli


def run(*argv):
    code, report, _ = cli.run(list(argv))
    return code, report


def strip_time(report):
    report = dict(report)
    report.pop("generated_at")
    return report


def test_analyze_disk():
    code, rep = run("analyze", "-n", "2", "-f", "x1^2+x2^2")
    assert code == 0 and rep["schema_version"] == cli.SCHEMA_VERSION
    p = rep["results"][0]["profile"]
    assert p["volume_finite"] and p["lattice_finite"]
    assert (p["theta"], p["k"], p["theta_prime"], p["k_prime"]) == ([1, 1], 1, [1, 1], 1)
    assert rep["results"][0]["mg"]["satisfied"]


def test_analyze_hyperbola():
    code, rep = run("analyze", "-n", "2", "-f", "x1*x2")
    p = rep["results"][0]["profile"]
    assert code == 0 and not p["volume_finite"]
    assert p["theta_prime"] == [1, 1] and p["log_exp_lattice"] == 1


def test_analyze_infinite_both():
    code, rep = run("analyze", "-n", "2", "-f", "x1^2")
    p = rep["results"][0]["profile"]
    assert code == 0 and not p["volume_finite"] and not p["lattice_finite"]


def test_parse_error_exit_code():
    code, rep = run("analyze", "-n", "2", "-f", "2x1")
    assert code == 2 and rep["error"]["type"] == "parse" and rep["error"]["position"] == 1
    code, _ = run("analyze", "-f", "x1")
    assert code == 2


def test_consistency_error_exit_code(monkeypatch):
    from sublevel import asym
    from sublevel.errors import ConsistencyError

    def broken(f, *a, **k):
        raise ConsistencyError("routes disagree")

    monkeypatch.setattr(asym, "lp_cross_check", broken)
    code, rep = run("analyze", "-n", "2", "-f", "x1^2+x2^2")
    assert code == 3 and rep["error"]["type"] == "consistency"


def test_check_mg_violation():
    code, rep = run("check-mg", "-n", "2", "-f", "x1^2-x2^2")
    assert code == 4
    v = rep["results"][0]["verdicts"][0]
    assert v["status"] == "VIOLATION_CERTIFIED" and v["witness"] == [[1, 1], [1, 1]]


def test_check_mg_pass():
    code, rep = run("check-mg", "-n", "2", "-f", "x1^2+x2^2")
    assert code == 0 and all(v["status"] == "PASSED" for v in rep["results"][0]["verdicts"])
    assert rep["results"][0]["estimate"]["c1_hat"] == pytest.approx(1)


def test_check_mg_perturb():
    code, rep = run("check-mg", "-n", "2", "-f", "x1^2+x2^2", "--perturb", "100", "--epsilon", "auto")
    assert code == 0
    assert rep["results"][0]["perturbation"]["fraction_unfalsified"] == 1.0


def test_verify_lattice_hyperbola(tmp_path, capsys):
    csv_path = tmp_path / "sweep.csv"
    code, rep = run("verify", "--kind", "lattice", "-n", "2", "-f", "x1*x2",
                    "--schedule", "100,316.2,1000,3162.3,10000", "--csv", str(csv_path))
    assert code == 0
    block = rep["results"][0]
    assert block["predicted"] == {"theta": [1, 1], "log_exponent": 1}
    assert abs(block["fit_fixed"]["theta_hat"] - 1) <= 0.05
    assert csv_path.read_text().startswith("r,measurement,stderr\n100,")
    assert "predicted" in capsys.readouterr().err


def test_verify_volume_disk():
    code, rep = run("verify", "--kind", "volume", "-n", "2", "-f", "x1^2+x2^2",
                    "--schedule", "100,1000,10000,100000")
    assert code == 0
    assert abs(rep["results"][0]["fit_fixed"]["theta_hat"] - 1) <= 0.03


def test_verify_refuses_infinite():
    code, rep = run("verify", "--kind", "volume", "-n", "2", "-f", "x1^2")
    assert code == 5 and rep["results"][0]["error"]["type"] == "empirics"


def test_file_input_and_out(tmp_path):
    src = tmp_path / "map.txt"
    src.write_text("x1^6 + x2^4\n")
    out = tmp_path / "report.json"
    assert cli.main(["analyze", "-n", "2", "--file", str(src), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["results"][0]["profile"]["theta"] == [5, 12]


def test_preset_analyze():
    code, rep = run("analyze", "--preset", "paper-examples")
    assert code == 0 and len(rep["results"]) == 5


def test_reports_reproducible_across_threads():
    a = strip_time(run("check-mg", "-n", "2", "-f", "x1^2+x1*x2+x2^2", "--seed", "7",
                       "--perturb", "5", "--epsilon", "0.05")[1])
    b = strip_time(run("check-mg", "-n", "2", "-f", "x1^2+x1*x2+x2^2", "--seed", "7",
                       "--perturb", "5", "--epsilon", "0.05", "--threads", "4")[1])
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sublevel", "check-mg", "-n", "2", "-f", "x1^2-x2^2"],
                          capture_output=True, text=True)
    assert proc.returncode == 4
    assert json.loads(proc.stdout)["command"] == "check-mg"
