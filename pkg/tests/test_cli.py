import json

import pytest

from bernmark.cli import main

SEG = '{"kind": "segment", "A": [-1, 0], "B": [1, 0]}'
T3 = '{"p0": [[0, 0], [-3, 0], [0, 0], [4, 0]]}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if code in (0, 4) else None)


def test_factor(capsys):
    code, rep = run(capsys, "factor", "--domain", SEG, "--poles", '{"inf": 5}', "--at", "0.6")
    assert code == 0
    assert rep["rows"][0]["factor"] == pytest.approx(5 / 0.8, rel=1e-12)
    code, rep = run(capsys, "factor", "--domain", SEG, "--poles", '{"inf": 5}', "--at", "A", "--k", "2")
    assert code == 0 and rep["rows"][0]["factor"] == pytest.approx(625 / 3, rel=1e-12)


def test_factor_circle_with_point(capsys):
    code, rep = run(capsys, "factor", "--domain", '{"kind": "circle"}',
                    "--poles", '[[[0.5, 0], 1], [[2, 0], 1]]', "--at", "[1, 0]")
    assert code == 0 and rep["rows"][0]["factor"] == pytest.approx(3)


def test_omega(capsys):
    code, rep = run(capsys, "omega", "--arc", '{"kind": "segment", "A": [0, 0], "B": [1, 0]}',
                    "--endpoint", "A", "--pole", "inf")
    assert code == 0 and rep["rows"][0]["density"] == pytest.approx(1.0, rel=1e-12)
    code, _ = run(capsys, "omega", "--arc", SEG, "--endpoint", "B", "--pole", "[0,2]")
    assert code == 0


def test_verify_and_violation(capsys):
    code, rep = run(capsys, "verify", "--domain", SEG, "--rational", T3, "--at", "0")
    assert code == 0 and rep["rows"][0]["ratio"] == pytest.approx(1.0, rel=1e-12)
    code, rep = run(capsys, "verify", "--domain", SEG, "--rational", T3, "--at", "0", "--tol", "-0.5")
    assert code == 4 and rep["summary"]["violations"] == 1


def test_extremal(capsys):
    code, rep = run(capsys, "extremal", "--family", "blaschke", "--params", '{"poles": [[0.5, 0]]}',
                    "--n", "3")
    assert code == 0 and rep["rows"][0]["n"] == 3
    code, _ = run(capsys, "extremal", "--family", "markov", "--n", "12")
    assert code == 0
    code, _ = run(capsys, "extremal", "--family", "lemniscate", "--params", '{"degree": 3}', "--n", "3")
    assert code == 2


def test_sweep_preset(capsys):
    code, rep = run(capsys, "sweep", "--config", "classical_markov")
    assert code == 0 and rep["summary"]["violations"] == 0


@pytest.mark.parametrize("argv", [
    ["factor", "--domain", '{"kind": "hexagon"}', "--poles", '{"inf": 1}', "--at", "0"],
    ["factor", "--domain", SEG, "--at", "0"],
    ["factor", "--domain", SEG, "--poles", '{"inf": 1}', "--at", "C"],
    ["sweep", "--config", "no_such_preset"],
    ["verify", "--domain", SEG, "--rational", "{not json", "--at", "0"],
    [],
])
def test_config_errors(capsys, argv):
    assert main(argv) == 2


def test_numerical_failure(capsys):
    thin = '{"kind": "ellipse", "center": [0, 0], "semi_axes": [1, 0.2]}'
    code = main(["factor", "--domain", thin, "--poles", '{"inf": 1, "[0, 0.1]": 1}', "--at", "0.3",
                 "--nq", "64"])
    assert code == 3


def test_out_writes_json_and_csv(tmp_path, capsys):
    paths = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.json"
        assert main(["sweep", "--config", "reference_values", "--out", str(out)]) == 0
        capsys.readouterr()
        assert json.loads(out.read_text())["summary"]["violations"] == 0
        paths.append(out.with_suffix(".csv"))
    a, b = (p.read_text().splitlines() for p in paths)
    assert a[0].startswith("# generated") and a[1:] == b[1:]
