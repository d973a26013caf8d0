import json
import subprocess
import sys
from pathlib import Path

from clusterqp.cli import main
from clusterqp.laurent import parse
from clusterqp.quiver import IceQuiver, exchange_matrix

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_mutate_roundtrip(capsys):
    code, out, _ = run(capsys, "mutate", "a2", "1")
    assert code == 0
    q = IceQuiver.from_json(json.loads(out)["quiver"])
    assert [(a.source, a.target) for a in q.arrows] == [(2, 1)]
    _, out, _ = run(capsys, "mutate", "a2", "1", "1")
    q = IceQuiver.from_json(json.loads(out)["quiver"])
    assert [(a.source, a.target) for a in q.arrows] == [(1, 2)]


def test_mutate_matches_matrix_rule(capsys):
    from clusterqp.fixture import load_fixture

    def matrix_mutate(b, k):
        n = len(b)
        return [[-b[i][j] if k in (i, j) else
                 b[i][j] + (abs(b[i][k]) * b[k][j] + b[i][k] * abs(b[k][j])) // 2
                 for j in range(n)] for i in range(n)]

    q = load_fixture("labardini").quiver
    b = [list(r) for r in exchange_matrix(q)]
    for k in (0, 1, 2):
        b = matrix_mutate(b, k)
    _, out, _ = run(capsys, "mutate", "labardini", "1", "2", "3")
    assert json.loads(out)["b"] == b


def test_mutate_errors(capsys):
    code, _, err = run(capsys, "mutate", "a2", "3")
    assert code == 2 and "error" in json.loads(err)
    code, _, err = run(capsys, "mutate", "a2-frozen", "2")
    assert code == 2
    code, _, err = run(capsys, "mutate", "no-such-fixture", "1")
    assert code == 1 and "error" in json.loads(err)


def test_seed_command(capsys):
    _, out, _ = run(capsys, "seed", "a2", "1")
    data = json.loads(out)
    assert parse(data["vars"][0], 2) == parse("x1^-1*x2 + x1^-1", 2)
    _, out, _ = run(capsys, "seed", "a2")
    assert json.loads(out)["vars"] == ["x1", "x2"]
    _, out, _ = run(capsys, "seed", "a2", "1", "2", "1", "2", "1")
    assert sorted(json.loads(out)["vars"]) == ["x1", "x2"]


def test_generic_basis_paper_value(capsys):
    code, out, _ = run(capsys, "generic-basis", "labardini", "1,0,-1")
    data = json.loads(out)
    assert code == 0
    assert parse(data["value"], 3) == parse("x1*x3^-1 + x1^-1*x2^2*x3^-1 + x1^-1*x3", 3)
    assert data["kernel_dim"] == [1, 0, 1]
    assert data["submodule_dims"] == [[0, 0, 0], [0, 0, 1], [1, 0, 1]]


def test_generic_basis_monomial_and_negative_parsing(capsys):
    _, out, _ = run(capsys, "generic-basis", "labardini", "2,0,0")
    assert json.loads(out)["value"] == "x1^2"
    _, a, _ = run(capsys, "generic-basis", "a2", "-1,-1")
    _, b, _ = run(capsys, "generic-basis", "a2", "-1 -1")
    assert json.loads(a)["value"] == json.loads(b)["value"]


def test_generic_basis_golden(capsys):
    golden = json.loads((GOLDEN / "a2_minus1_minus1.json").read_text())
    _, out, _ = run(capsys, "generic-basis", "a2", "-1,-1", "--pretty")
    assert json.loads(out) == golden
    # independent recomputation with another rng seed
    _, out, _ = run(capsys, "generic-basis", "a2", "-1,-1", "--seed", "12345")
    assert json.loads(out)["value"] == golden["value"]


def test_not_stabilized_exit_code(capsys):
    code, out, _ = run(capsys, "generic-basis", "labardini", "1,0,-1", "--trials", "1")
    assert code == 3
    diag = json.loads(out)
    assert diag["stats"]["stable"] is False


def test_bad_delta_and_usage(capsys):
    code, _, _ = run(capsys, "generic-basis", "a2", "1,2,3")
    assert code == 1
    assert main(["frobnicate"]) == 2
    assert main(["generic-basis", "a2", "-1", "-1"]) == 2
    capsys.readouterr()


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "paper-example")
    rep = json.loads(out)
    assert code == 0 and rep["pass"]
    code, out, _ = run(capsys, "verify", "invariants", "--fixtures", "")
    assert code == 0 and json.loads(out)["pass"]
    code, out, _ = run(capsys, "verify", "independence")
    assert code == 0 and json.loads(out)["pass"]
    code, _, _ = run(capsys, "verify", "no-such-suite")
    assert code == 2


def test_relations_backend_agrees(capsys):
    _, a, _ = run(capsys, "generic-basis", "labardini", "1,0,-1", "--backend", "relations")
    _, b, _ = run(capsys, "generic-basis", "labardini", "1,0,-1")
    assert json.loads(a)["value"] == json.loads(b)["value"]


def test_console_script_is_byte_deterministic():
    cmd = [sys.executable, "-m", "clusterqp.cli", "generic-basis", "labardini", "1,0,-1", "--seed", "5"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
