import csv
import io
import json
import math
from pathlib import Path

import numpy as np
import pytest

from probtransform.cli import main
from probtransform.scenario import povm_from_json

SCENARIOS = Path(__file__).parent.parent / "scenarios"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, data):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(data))
    return p


@pytest.mark.parametrize("name", [p.name for p in sorted(SCENARIOS.glob("*.json"))])
def test_validate_fixtures(capsys, name):
    code, out, _ = run(capsys, "validate", SCENARIOS / name)
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_validate_subnormalized_povm(capsys, tmp_path):
    half = [[0.45, 0], [0, 0.45]]
    p = write(tmp_path, {"dim": 2, "povms": {"M": {"outcomes": ["x", "y"], "elements": [half, half]}}})
    code, out, err = run(capsys, "validate", p)
    assert code == 1
    bad = [c for c in json.loads(out)["checks"] if not c["passed"]]
    assert len(bad) == 1 and bad[0]["component"] == "M"
    assert bad[0]["gap"] == pytest.approx(0.1)
    assert "normalization" in err


def test_invalid_kraus_names_channel(capsys, tmp_path):
    p = write(tmp_path, {"channels": {"leaky": {"outcomes": ["x"], "kraus": [[[1, 0], [0, 0.5]]]}}})
    code, _, err = run(capsys, "lambda", p)
    assert code == 1
    assert "leaky" in err


def test_lambda_bound_case(capsys):
    code, out, _ = run(capsys, "lambda", SCENARIOS / "bound_case.json")
    assert code == 0
    b1 = json.loads(out)["outcomes"][0]
    assert b1["label"] == "b1"
    assert abs(b1["bounds"][0] + 1.45) <= 1e-12
    assert abs(b1["bounds"][1] - 3.55) <= 1e-12
    assert b1["classification"] == "classical"


def test_lambda_projective_interference(capsys):
    _, out, _ = run(capsys, "lambda", SCENARIOS / "projective_interference.json")
    lams = [e["lambda"] for e in json.loads(out)["outcomes"]]
    np.testing.assert_allclose(lams, [0.5, -0.5], atol=1e-12)


def test_sequential_identity_first(capsys, tmp_path):
    ident = [[1, 0], [0, 1]]
    b = [[[0.8, 0], [0, 0.6]], [[0.6, 0], [0, 0.8]]]
    p = write(
        tmp_path,
        {
            "state": {"kind": "pure", "vec": [0.6, 0.8]},
            "channels": {"I": {"outcomes": ["id"], "kraus": [ident]}, "B": {"outcomes": ["b1", "b2"], "kraus": b}},
            "analysis": {"first": "I", "second": "B"},
        },
    )
    code, out, _ = run(capsys, "sequential", p)
    assert code == 0
    res = json.loads(out)
    direct = [0.36 * 0.64 + 0.64 * 0.36, 0.36 * 0.36 + 0.64 * 0.64]
    np.testing.assert_allclose(res["marginal_second"], direct, atol=1e-12)
    np.testing.assert_allclose(res["bayes_lhs"], direct, atol=1e-12)
    composed = povm_from_json(res["composed_povm"])
    assert composed.outcomes == ("id×b1", "id×b2")


def test_probs_and_superpose(capsys):
    code, out, _ = run(capsys, "probs", SCENARIOS / "projective_bayes.json")
    assert code == 0
    probs = json.loads(out)["probabilities"]
    assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)
    code, out, _ = run(capsys, "superpose", SCENARIOS / "projective_interference.json")
    assert code == 0
    d = json.loads(out)
    assert abs(d["residual"]) <= 1e-12
    assert abs(d["total"] - (d["term1"] + d["term2"] + d["cross"])) <= 1e-12


def test_freq_sim_converges_to_lambda(capsys):
    _, out, _ = run(capsys, "lambda", SCENARIOS / "projective_interference.json")
    exact = [e["lambda"] for e in json.loads(out)["outcomes"]]
    code, out, err = run(
        capsys, "freq-sim", SCENARIOS / "projective_interference.json", "--schedule", "1e3,1e4,1e5", "--seeds", "3"
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9
    last = [r for r in rows if r["N"] == "100000"]
    for r in last:
        for j in (0, 1):
            assert abs(float(r[f"lambda{j + 1}"]) - exact[j]) <= 5 / math.sqrt(1e5)
    assert "synthesized" in err


def test_freq_sim_reproducible(capsys):
    args = ("freq-sim", SCENARIOS / "hyperbolic.json", "--trials", "5000", "--seed", "11")
    assert run(capsys, *args)[1] == run(capsys, *args, "--workers", "2")[1]


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "0", "0.5", "--", "-1.45")
    assert code == 0
    res = json.loads(out)
    assert [r["classification"] for r in res] == ["classical", "trigonometric", "hyperbolic"]
    assert res[1]["phase"] == pytest.approx(math.pi / 3)
    assert res[2]["sign"] == -1


def test_unreadable_input(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "validate", bad)[0] == 2
    assert run(capsys, "lambda", tmp_path / "missing.json")[0] == 2
    p = write(tmp_path, {"dim": 2, "state": {"kind": "pure", "vec": [1, 0]}})
    assert run(capsys, "lambda", p)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["freq-sim", str(p), "--schedule", "1e3,abc"])
    assert exc.value.code == 2
