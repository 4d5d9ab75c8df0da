import csv
import io
import json
import subprocess
import sys

import pytest

from conftest import shared_instance
from nulattice.adjoint import adjoint_summary
from nulattice.cli import main
from nulattice.fixtures import LATTICES, RACAH_ROOTS
from nulattice.hypeq import EquationSpec, lambda_n, rodrigues_eval
from nulattice.lattice import LatticeSpec
from nulattice.solutions.racah import racah_equation
from nulattice.solutions.sums import make_solution, solve_on_grid

RACAH = {
    "lattice": {"kind": "quadratic", "c": [1, 0, 0]},
    "equation": {"sigma_roots": list(RACAH_ROOTS), "lambda": "root"},
}


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_lattice_suite(tmp_path, capsys):
    cfg = _write(tmp_path, {"lattice": {"kind": "quadratic", "c": [1, 1, 1]}, "suites": ["lattice"]})
    out = tmp_path / "r.json"
    code, _, _ = _run(["verify", "--config", cfg, "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["pass"] and rep["suites"] == ["lattice"]
    assert {e["check_id"] for e in rep["entries"]} >= {"lattice.midpoint", "lattice.step_sum"}


def test_unknown_suite_exits_2(capsys):
    code, _, err = _run(["verify", "--suite", "nope"], capsys)
    assert code == 2 and "nope" in err


@pytest.mark.parametrize(
    "cfg",
    [
        {"lattice": {"kind": "cubic", "c": [1, 1, 1]}},
        {"lattice": {"kind": "q-quadratic", "c": [1, 1, 1]}},
        {"surprise": 1},
        {"tolerances": {"lattice.midpoint": -1}},
        {"seed": "x"},
        {"fault_injection": {"sigma_scale": 2}},
        {"suites": ["lattice", "nope"]},
        {"equation": {"sigma_tilde": [1, 2, 3, 4], "tau_tilde": [1, 1]}},
    ],
)
def test_bad_config_exits_2(tmp_path, capsys, cfg):
    code, _, err = _run(["verify", "--config", _write(tmp_path, cfg)], capsys)
    assert code == 2 and err.startswith("error:")


def test_unreadable_config_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert _run(["verify", "--config", str(p)], capsys)[0] == 2
    assert _run(["verify", "--config", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_missing_subcommand_exits_2():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2


def test_fault_injection_exits_1(tmp_path, capsys):
    cfg = _write(tmp_path, {"suites": ["adjoint"], "fault_injection": {"tau_star_scale": 1.01}})
    code, out, _ = _run(["verify", "--config", cfg], capsys)
    assert code == 1
    assert not json.loads(out)["pass"]


def test_global_tol_can_fail(capsys):
    assert _run(["verify", "--suite", "lattice", "--tol", "1e-30"], capsys)[0] == 1
    assert _run(["verify", "--suite", "lattice", "--tol", "-1"], capsys)[0] == 2


def test_tolerance_override_in_config(tmp_path, capsys):
    cfg = _write(tmp_path, {"suites": ["lattice"], "tolerances": {"lattice.step_sum": 1e-30}})
    code, out, _ = _run(["verify", "--config", cfg], capsys)
    assert code == 1
    failed = [e["check_id"] for e in json.loads(out)["entries"] if not e["pass"]]
    assert failed == ["lattice.step_sum"]


def test_verify_is_byte_deterministic(tmp_path, capsys):
    cfg = _write(tmp_path, {"suites": ["diffops", "adjoint"], "seed": 11})
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert _run(["verify", "--config", cfg, "--out", str(a)], capsys)[0] == 0
    assert _run(["verify", "--config", cfg, "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_adjoint_diagonal_lambda_star(capsys):
    code, out, _ = _run(["adjoint", "--nu", "1", "--mu", "1"], capsys)
    assert code == 0
    data = json.loads(out)
    assert set(data) >= {"sigma_star_samples", "tau_star_fit", "lambda_star", "checks"}
    lat = LatticeSpec.quadratic(1, 1, 1)
    eq = EquationSpec(lat, (0.3, -0.7, 1.1), (0.4, 2.3), 0.37)
    lam_star = complex(*data["lambda_star"])
    assert lam_star == pytest.approx(eq.lam - eq.kappa(-1), rel=1e-12)
    # thin shell: same numbers as the library call
    lib, _ = adjoint_summary(eq, 1.0, 1.0)
    assert data["sigma_star_samples"] == lib["sigma_star_samples"]
    assert data["tau_star_fit"] == lib["tau_star_fit"]


def test_adjoint_json_round_trip(capsys):
    _, out, _ = _run(["adjoint", "--nu", "1.5", "--mu", "0.5"], capsys)
    data = json.loads(out)
    assert json.loads(json.dumps(data, sort_keys=True, indent=2)) == data
    assert out == json.dumps(data, sort_keys=True, indent=2) + "\n"


def test_adjoint_fault_exits_1(tmp_path, capsys):
    cfg = _write(tmp_path, {"fault_injection": {"tau_star_scale": 1.01}})
    assert _run(["adjoint", "--config", cfg, "--nu", "1", "--mu", "0"], capsys)[0] == 1


def _csv_rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_solve_racah_polynomial_case(tmp_path, capsys):
    cfg = _write(tmp_path, RACAH)
    argv = ["solve", "--config", cfg, "--form", "thm52", "--nu", "1", "--a", "-1.3", "--b", "1.7", "--grid", "2.4:6"]
    code, out, _ = _run(argv, capsys)
    assert code == 0
    rows = _csv_rows(out)
    assert rows[0] == ["z_re", "z_im", "y_re", "y_im", "residual"]
    assert len(rows) == 7
    assert all(float(r[4]) <= 1e-7 for r in rows[1:])
    eq = racah_equation(RACAH_ROOTS, lambda_n(racah_equation(RACAH_ROOTS), 2))
    lib = solve_on_grid(make_solution(eq, "thm52", 1.0, None, -1.3, 1.7), eq, [2.4 + k for k in range(6)])
    for r, (z, y, res) in zip(rows[1:], lib):
        assert float(r[2]) == pytest.approx(y.real, rel=1e-12)
    # proportional to the Rodrigues polynomial of degree 2
    yr = rodrigues_eval(eq, 2, [2.4 + k for k in range(6)])
    ratios = [float(r[2]) / v.real for r, v in zip(rows[1:], yr)]
    assert max(ratios) - min(ratios) < 1e-7 * abs(ratios[0])


def test_solve_empty_grid_header_only(tmp_path, capsys):
    cfg = _write(tmp_path, RACAH)
    argv = ["solve", "--config", cfg, "--form", "thm52", "--nu", "1", "--a", "-1.3", "--b", "1.7", "--grid", "2.4:0"]
    code, out, _ = _run(argv, capsys)
    assert code == 0 and out == "z_re,z_im,y_re,y_im,residual\n"


@pytest.mark.parametrize("name", ["quadratic", "q2"])
def test_solve_weighted_and_power_forms_same_equation(tmp_path, capsys, name):
    lat = LATTICES[name]
    eq = shared_instance(lat, 1.0, 0.4, 3, 0.65, 3)
    d = eq.to_dict()
    d["lambda"] = "root"
    cfg = _write(tmp_path, {"lattice": lat.to_dict(), "equation": d})
    grid = ["--grid", "2.13:5"]
    code1, out1, _ = _run(["solve", "--config", cfg, "--form", "thm52", "--nu", "1", "--a", "0.4", "--b", "3.4", *grid], capsys)
    code2, out2, _ = _run(["solve", "--config", cfg, "--form", "cor52", "--nu", "2", "--a", "0.65", "--b", "3.65", *grid], capsys)
    assert code1 == 0 and code2 == 0
    for out in (out1, out2):
        assert all(float(r[4]) <= 1e-7 for r in _csv_rows(out)[1:])


def test_solve_errors(tmp_path, capsys):
    cfg = _write(tmp_path, RACAH)
    assert _run(["solve", "--config", cfg, "--nu", "1", "--a", "0", "--b", "1"], capsys)[0] == 2
    assert _run(["solve", "--config", cfg, "--form", "thm52", "--a", "0", "--b", "1"], capsys)[0] == 2
    assert _run(["solve", "--config", cfg, "--form", "thm52", "--nu", "1", "--a", "0", "--b", "1.5"], capsys)[0] == 2
    base = ["solve", "--config", cfg, "--form", "thm52", "--nu", "1", "--a", "-1.3", "--b", "1.7"]
    assert _run(base + ["--grid", "bad"], capsys)[0] == 2
    assert _run(base + ["--grid", "1:-1"], capsys)[0] == 2


def test_solve_violated_root_suppresses_output(tmp_path, capsys):
    cfg = _write(tmp_path, {"equation": {"sigma_tilde": [0.3, -0.7, 1.1], "tau_tilde": [0.4, 2.3], "lambda": 0.37}})
    code, out, err = _run(["solve", "--config", cfg, "--form", "thm51", "--nu", "1.3", "--mu", "2", "--a", "0.4", "--b", "5.4", "--grid", "2.13:3"], capsys)
    assert code == 1 and out == "" and "spectral condition" in err


def test_root_lambda_only_for_solve(tmp_path, capsys):
    cfg = _write(tmp_path, RACAH)
    assert _run(["verify", "--config", cfg, "--suite", "lattice"], capsys)[0] == 2


def test_rodrigues_command(capsys):
    code, out, _ = _run(["rodrigues", "--n", "2", "--grid", "0.37:6"], capsys)
    assert code == 0
    data = json.loads(out)
    eq = EquationSpec(LatticeSpec.quadratic(1, 1, 1), (0.3, -0.7, 1.1), (0.4, 2.3), 0.37)
    want = rodrigues_eval(eq, 2, [0.37 + k for k in range(6)])
    assert [v[2] for v in data["values"]] == pytest.approx([w.real for w in want], rel=1e-14)
    assert complex(*data["lambda_n"]) == pytest.approx(lambda_n(eq, 2))
    assert _run(["rodrigues"], capsys)[0] == 2


def test_lattice_info(capsys):
    code, out, _ = _run(["lattice-info", "--nu", "1", "--grid", "0:3"], capsys)
    data = json.loads(out)
    assert code == 0 and data["gamma"] == 1.0 and len(data["points"]) == 3
    assert data["points"][1]["x_nu"] == [1.5**2 + 1.5 + 1, 0.0]


def test_module_entry_point(tmp_path):
    cfg = _write(tmp_path, {"suites": ["lattice"]})
    proc = subprocess.run(
        [sys.executable, "-m", "nulattice", "verify", "--config", cfg], capture_output=True, text=True
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["pass"]
