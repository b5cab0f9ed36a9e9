import json
import math
import subprocess
import sys

import numpy as np
import pytest

from dichotomy import cli
from dichotomy.classical import ClassicalDichotomy, build_channels
from dichotomy.cm import qubit_pair
from dichotomy.qdichotomy import QuantumDichotomy
from dichotomy.zoo import divergence

from conftest import EXAMPLE_P, EXAMPLE_Q, PLUS


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def dm(M):
    M = np.asarray(M, dtype=complex)
    return {"dim": M.shape[0], "re": M.real.tolist(), "im": M.imag.tolist()}


@pytest.fixture
def files(tmp_path):
    f = {}
    f["example"] = write(tmp_path / "example.json", {"p": list(EXAMPLE_P), "q": list(EXAMPLE_Q)})
    f["two"] = write(tmp_path / "two.json", {"p": ["1/2", "1/2"], "q": ["3/4", "1/4"]})
    f["two_split"] = write(tmp_path / "two_split.json", {"p": ["1/4", "1/4", "1/2"], "q": ["3/8", "3/8", "1/4"]})
    f["sure"] = write(tmp_path / "sure.json", {"p": [1, 0], "q": ["1/2", "1/2"]})
    f["flat"] = write(tmp_path / "flat.json", {"p": ["1/2", "1/2"], "q": ["1/2", "1/2"]})
    r = np.array([[0.6, 0.1 + 0.2j], [0.1 - 0.2j, 0.4]])
    f["same"] = write(tmp_path / "same.json", {"rho": dm(r), "sigma": dm(r)})
    d = qubit_pair(0.3)
    f["qubit"] = write(tmp_path / "qubit.json", {"rho": dm(d.rho), "sigma": dm(d.sigma)})
    f["pure1"] = write(tmp_path / "pure1.json", {"rho": dm(PLUS), "sigma": dm(np.eye(2) / 2)})
    f["pure2"] = write(tmp_path / "pure2.json", {"rho": dm([[1, 0], [0, 0]]), "sigma": dm(np.eye(2) / 2)})
    f["mixed"] = write(tmp_path / "mixed.json", dm(np.eye(2) / 2))
    f["ham"] = write(tmp_path / "ham.json", {**dm(np.diag([1.0, -1.0])), "beta": 1})
    f["bad"] = str(tmp_path / "bad.json")
    (tmp_path / "bad.json").write_text("{not json")
    f["dir"] = tmp_path
    return f


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_minimal_form(files, capsys):
    code, out, _ = run(["minimal-form", files["example"]], capsys)
    assert code == 0
    js = json.loads(out)
    assert js["p_tilde"] == ["1/12", "1/2", "1/4", "1/6", "0/1"]
    assert js["q_tilde"] == ["0/1", "1/12", "1/12", "1/3", "1/2"]
    assert js["blocks"] == [[0], [1], [2], [3, 4], [5]]


def test_channels_exact(files, capsys):
    code, out, _ = run(["channels", files["example"]], capsys)
    assert code == 0
    T, R = build_channels(ClassicalDichotomy(EXAMPLE_P, EXAMPLE_Q))
    assert json.loads(out) == json.loads(cli.dumps({"T": T.to_json(), "R": R.to_json()}))


def test_divergence_equal_states_zero(files, capsys):
    code, out, _ = run(["divergence", files["same"], "--family", "sandwiched", "--alpha", "1"], capsys)
    assert code == 0
    assert json.loads(out)["results"][0]["value"] == pytest.approx(0, abs=1e-12)


def test_divergence_matches_library_exactly(files, capsys):
    code, out, _ = run(["divergence", files["qubit"], "--family", "petz", "--alpha", "1.5", "0.5"], capsys)
    d = QuantumDichotomy(qubit_pair(0.3).rho, qubit_pair(0.3).sigma)
    res = json.loads(out)["results"]
    assert [r["alpha"] for r in res] == [0.5, 1.5]
    for r in res:
        assert r["value"] == divergence(d, "petz", r["alpha"]).value


def test_divergence_alpha_range_and_csv(files, capsys):
    code, out, _ = run(["divergence", files["two"], "--family", "classical", "--alpha-range", "0.5", "2", "4",
                        "--format", "csv"], capsys)
    assert code == 0
    lines = out.split("\n")
    assert lines[0] == "alpha,value,dpi_valid" and len(lines) == 6
    assert "\r" not in out


def test_out_of_range_alpha_is_domain_error(files, capsys):
    code, _, err = run(["divergence", files["qubit"], "--family", "petz", "--alpha", "3"], capsys)
    assert code == 1
    e = json.loads(err)
    assert e["error"] == "domain" and "message" in e


def test_lorenz_csv(files, capsys):
    code, out, _ = run(["lorenz", files["example"], "--simplify"], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "x,y,x_exact,y_exact"
    assert lines[-1].split(",")[2:] == ["1/1", "1/1"]


def test_check_convert(files, capsys):
    code, out, _ = run(["check-convert", files["sure"], files["flat"]], capsys)
    assert json.loads(out) == {"convertible_1_to_2": True, "convertible_2_to_1": False, "interconvertible": False}


def test_interconvertible_classical(files, capsys):
    code, out, _ = run(["interconvertible", files["two"], files["two_split"]], capsys)
    js = json.loads(out)
    assert code == 0 and js["interconvertible"] and js["path"] == "classical"


def test_interconvertible_pure(files, capsys):
    code, out, _ = run(["interconvertible", files["pure1"], files["pure2"]], capsys)
    js = json.loads(out)
    assert code == 0 and js["path"] == "pure-state" and js["interconvertible"]
    assert max(js["residuals"]) <= 1e-8


def test_sample_then_decide(files, capsys):
    paths = []
    for name in ("sure", "flat"):
        out_path = str(files["dir"] / f"{name}.samples.json")
        assert run(["sample", files[name], "-o", out_path], capsys)[0] == 0
        paths.append(out_path)
    code, out, _ = run(["decide-from-divergences", *paths], capsys)
    js = json.loads(out)
    assert code == 0 and js["convertible_1_to_2"] and not js["convertible_2_to_1"]


def test_simulate(files, capsys):
    code, out, _ = run(["simulate-classical", files["qubit"], "--method", "maximal"], capsys)
    js = json.loads(out)
    assert code == 0 and sum(js["p"]) == pytest.approx(1) and sum(js["q"]) == pytest.approx(1)


def test_cm_check_json_and_csv(files, capsys):
    code, out, _ = run(["cm-check", files["two"], "--alpha", "0.5", "1", "--max-order", "2"], capsys)
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(["cm-check", files["qubit"], "--alpha-range", "0.5", "1.5", "3", "--max-order", "2",
                        "--format", "csv"], capsys)
    assert code == 0 and out.startswith("alpha,order_0,order_1,order_2\n")


def test_thermo(files, capsys):
    code, out, _ = run(["thermo", files["mixed"], files["ham"], "--family", "petz", "--alpha", "1"], capsys)
    assert code == 0
    js = json.loads(out)
    # D(I/2 || exp(-Z)/(2 cosh 1)) = log(2 cosh 1) - log 2 = log cosh 1
    assert js["results"][0]["divergence"] == pytest.approx(math.log(math.cosh(1)), abs=1e-14)
    assert js["log_partition"] == pytest.approx(math.log(2 * math.cosh(1)), abs=1e-14)


@pytest.mark.parametrize("argv", [
    ["minimal-form", "/nonexistent/file.json"],
    ["minimal-form", "BAD"],
    ["divergence", "BAD", "--alpha", "1"],
    ["no-such-command"],
    ["divergence", "X", "--family", "alpha-z", "--alpha", "1"],
])
def test_parse_errors_exit_2(files, capsys, argv):
    argv = [files["bad"] if a in ("BAD", "X") else a for a in argv]
    code, _, err = run(argv, capsys)
    assert code == 2


def test_schema_error_exit_2(files, capsys, tmp_path):
    p = write(tmp_path / "odd.json", {"p": [1, 0]})
    code, _, err = run(["minimal-form", p], capsys)
    assert code == 2 and json.loads(err)["error"] == "parse"


def test_invalid_dichotomy_is_domain_error(tmp_path, capsys):
    p = write(tmp_path / "sum.json", {"p": ["1/2", "1/3"], "q": ["1/2", "1/2"]})
    assert run(["minimal-form", p], capsys)[0] == 1


def test_float17_formatting():
    assert cli.format_float(0.1) == "0.10000000000000001"
    assert json.loads(cli.dumps({"x": 1 / 3}))["x"] == 1 / 3
    assert json.loads(cli.dumps({"x": math.inf}))["x"] == "inf"


def test_subprocess_determinism(files):
    cmd = [sys.executable, "-m", "dichotomy", "cm-check", files["qubit"], "--alpha", "0.5", "1.0", "2.0",
           "--max-order", "3", "--format", "csv"]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True, env={"DICHOTOMY_THREADS": "2", "PATH": ""})
    assert a.stdout == b.stdout
    assert b"\r\n" not in a.stdout


def test_measured_seeded(files, capsys):
    argv = ["divergence", files["qubit"], "--family", "measured", "--alpha", "1.5", "--seed", "3"]
    a = run(argv, capsys)[1]
    b = run(argv, capsys)[1]
    assert a == b and json.loads(a)["results"][0]["lower_bound"]
