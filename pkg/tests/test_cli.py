import json

import pytest

from danielewski.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_verify_exit_codes(capsys):
    assert run(capsys, "verify", "--p", "z^3 - z", "--nmax", "5")[0] == 0
    assert run(capsys, "verify", "--p", "z^2")[0] == 2
    assert run(capsys, "verify", "--p", "z^2", "--allow-singular")[0] == 0
    assert run(capsys, "verify", "--p", "z")[0] == 0
    assert run(capsys, "verify", "--p", "z^^2")[0] == 2


def test_verify_text_table(capsys):
    code, out = run(capsys, "verify", "--p", "z^2 - 1", "--nmax", "2", "--format", "text")
    assert code == 0
    assert out.splitlines()[0].startswith("identity")
    assert "all identities: PASS" in out


def test_closure_commands(capsys):
    code, out = run(capsys, "closure", "--p", "z^2-1", "--set", "full6", "--dtarget", "3")
    assert code == 0 and json.loads(out)["verdict"] == "Generated"
    code, out = run(capsys, "closure", "--p", "z^4-1", "--set", "lnd4", "--member", "y^2*V")
    assert code == 0 and json.loads(out)["found"] is True
    code, _ = run(capsys, "closure", "--p", "z^2-1", "--set", "custom", "--gens", "V")
    assert code == 3
    assert run(capsys, "closure", "--p", "z^2-1", "--set", "custom", "--gens", "x")[0] == 2
    assert run(capsys, "closure", "--p", "z^2-1", "--set", "custom")[0] == 2


def test_poisson_command(capsys):
    code, out = run(capsys, "poisson", "--p", "z^2 - 1", "--f", "x", "--g", "y")
    assert code == 0 and json.loads(out)["bracket"] == "-2*z"
    code, out = run(capsys, "poisson", "--p", "z^2 - 1", "--field", "y^2*V")
    assert json.loads(out)["hamiltonian"] == "1/3*y^3"


def test_flow_command(capsys):
    code, out = run(capsys, "flow", "--p", "z^2 - 1", "--base", "V", "--time", "0", "--point", "2,1.5,2")
    assert code == 0
    assert json.loads(out)["points"] == [[[2.0, 0.0], [1.5, 0.0], [2.0, 0.0]]]
    assert run(capsys, "flow", "--p", "z^2 - 1", "--point", "1,1,1")[0] == 2


def test_transport_demo_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["transport", "--seed", "7", "-o", str(a)]) == 0
    assert main(["transport", "--seed", "7", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    report = json.loads(a.read_text())
    assert report["ok"] and report["replay"]["fixed_bitwise"]


def test_transport_duplicate_points(tmp_path):
    task = {"p": "z^2 - 1", "points": [[[2, 0], [4, 0], [3, 0]], [[2, 0], [4, 0], [3, 0]]],
            "mover": 1, "target": [[3, 0], [1, 0], [2, 0]], "tol": 1e-6, "seed": 1}
    path = tmp_path / "task.json"
    path.write_text(json.dumps(task))
    assert main(["transport", "--task", str(path)]) == 2


def test_transport_planning_failure(tmp_path):
    task = {"p": "z^2 - 1", "points": [[[2, 0], [4, 0], [3, 0]], [[3, 0], [1, 0], [2, 0]]],
            "mover": 1, "target": [[2, 0], [4, 0], [3, 0]], "tol": 1e-6, "seed": 1}
    path = tmp_path / "task.json"
    path.write_text(json.dumps(task))
    assert main(["transport", "--task", str(path)]) == 4


def test_info(capsys):
    code, out = run(capsys, "info", "--p", "z^3 - z")
    assert code == 0 and json.loads(out)["smoothness"] == "VERIFIED_SIMPLE_ZEROS"


@pytest.mark.parametrize("argv", [[], ["bogus"]])
def test_bad_invocation(argv, capsys):
    assert main(argv) == 2
