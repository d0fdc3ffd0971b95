import json
import subprocess
import sys

import pytest

from padop import cli, io, padic
from padop.linalg import PMatrix


@pytest.fixture(autouse=True)
def restore_precision():
    prec = padic.default_prec()
    yield
    padic.set_default_prec(prec)


def run(tmp_path, argv, payload=None):
    inp = tmp_path / "in.json"
    out = tmp_path / "out.json"
    inp.write_text(payload if isinstance(payload, str) else json.dumps(payload or {}))
    code = cli.main(argv + ["--in", str(inp), "--out", str(out)])
    return code, json.loads(out.read_text()), out.read_bytes()


def test_ldu_report(tmp_path):
    code, rep, _ = run(tmp_path, ["ldu", "-p", "5"], {"matrix": [[1, 2], [3, 4]]})
    assert code == 0 and rep["error"] is None
    C = io.parse_matrix(rep["result"]["C"])
    T = io.parse_matrix(rep["result"]["T"])
    E = io.parse_matrix(rep["result"]["E"])
    assert C.equals(PMatrix.from_entries(5, [[1, 0], [3, 1]]))
    assert T.equals(PMatrix.from_entries(5, [[1, 0], [0, -2]]))
    assert E.equals(PMatrix.from_entries(5, [[1, 2], [0, 1]]))
    assert rep["certification"]["reconstruction_residual"] == "ZERO"
    assert rep["timing"] is None


def test_deriv_solve_report(tmp_path):
    payload = {"p": 5, "algebra": {"kind": "full", "n": 2}, "ad": [[0, 1], [0, 0]]}
    code, rep, _ = run(tmp_path, ["deriv-solve"], payload)
    assert code == 0
    assert rep["result"]["status"] == "inner"
    assert io.parse_matrix(rep["result"]["witness"]).equals(PMatrix.unit(5, 2, 0, 1))
    assert rep["certification"]["residual"] == "ZERO"


def test_not_inner_is_domain_error(tmp_path):
    payload = {"p": 5, "algebra": {"kind": "diagonal", "n": 2}, "ad": [[0, 1], [0, 0]]}
    code, rep, _ = run(tmp_path, ["deriv-solve"], payload)
    assert code == 2 and rep["error"]["name"] == "NotInner"


@pytest.mark.parametrize("payload", [
    {"p": 7, "scalar": {"p": 7, "v": 0, "digits": [0, 1]}},
    {"p": 4, "scalar": 1},
    {"p": 5, "matrix": [[1, 2]]},
    "{not json",
])
def test_malformed_input_exit_3(tmp_path, payload):
    code, rep, _ = run(tmp_path, ["norm"], payload)
    assert code == 3 and rep["error"]["name"] == "MalformedInput"


def test_precision_range(tmp_path):
    code, rep, _ = run(tmp_path, ["norm", "-p", "5", "--prec", "300"], {"scalar": 1})
    assert code == 3
    code, rep, _ = run(tmp_path, ["norm", "-p", "5", "--prec", "8"], {"scalar": "1/25"})
    assert code == 0 and rep["prec"] == 8 and rep["result"]["norm_exponent"] == -2


@pytest.mark.parametrize("command, payload, key", [
    ("eig", {"p": 7, "matrix": [[0, 1], [1, 0]]}, "reconstruction_residual"),
    ("sqrt", {"p": 7, "matrix": [[4, 0], [0, 9]]}, "power_residual"),
    ("root", {"p": 5, "scalar": 8, "n": 3}, "residual"),
    ("funcalc", {"p": 5, "matrix": [[1, 2], [3, 4]], "polynomial": {"coeffs": [0, 0, 1]}, "method": "triangular"},
     "discrepancy_from_direct"),
    ("funcalc", {"p": 5, "matrix": [[2, 1], [1, 2]], "function": {"domain": "Zp", "samples": [0, 1, 4]}},
     "norm_bound"),
    ("clamp", {"p": 5, "scalar": "1/25"}, "norm"),
    ("deriv-check", {"p": 5, "algebra": {"kind": "full", "n": 2}, "derivation": "transpose"}, "leibniz_defect"),
    ("deriv-space", {"p": 5, "algebra": {"kind": "blocks", "sizes": [2, 3]}}, "max_leibniz_defect"),
    ("carrier", {"p": 5, "algebra": {"kind": "blocks", "sizes": [1, 1]}, "matrix": [[1, 0], [0, 0]]},
     "carrier_times_input_residual"),
    ("killing", {"p": 7, "algebra": {"kind": "full", "n": 2}}, "det_valuation"),
])
def test_commands_certify(tmp_path, command, payload, key):
    code, rep, _ = run(tmp_path, [command], payload)
    assert code == 0, rep["error"]
    assert key in rep["certification"]


def test_norm_bound_reports_both_sides(tmp_path):
    payload = {"p": 5, "matrix": [[2, 1], [1, 2]], "function": {"samples": [0, 1, 4]}}
    _, rep, _ = run(tmp_path, ["funcalc"], payload)
    nb = rep["certification"]["norm_bound"]
    assert set(nb) == {"achieved_exp", "bound_exp", "holds"} and nb["holds"]


def test_center_commutant(tmp_path):
    _, rep, _ = run(tmp_path, ["center"], {"p": 5, "algebra": {"kind": "blocks", "sizes": [2, 3]}})
    assert rep["result"]["dimension"] == 2
    _, rep, _ = run(tmp_path, ["commutant"], {"p": 5, "algebra": {"kind": "tensor", "k": 2, "m": 2}})
    assert rep["result"]["dimension"] == 4


def test_selftest_quick_is_deterministic(tmp_path):
    code1, rep1, raw1 = run(tmp_path, ["selftest", "--seed", "7", "--quick"])
    code2, rep2, raw2 = run(tmp_path, ["selftest", "--seed", "7", "--quick"])
    assert code1 == code2 == 0
    assert raw1 == raw2
    assert rep1["result"]["all_passed"]


def test_timing_flag(tmp_path):
    _, rep, _ = run(tmp_path, ["norm", "-p", "5", "--timing"], {"scalar": 1})
    assert rep["timing"]["seconds"] >= 0


def test_module_entry_point_stdio():
    proc = subprocess.run([sys.executable, "-m", "padop", "norm", "-p", "7"],
                          input='{"scalar": {"p": 7, "v": 2, "digits": [3]}}', capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["norm_exponent"] == 2
