import json
import os

import numpy as np
import pytest

from ncslemma import cli, serialize

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fx(name):
    return os.path.join(FIXTURES, name)


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    return code, doc, captured.err


def test_check_positivity_h1_psd(capsys):
    code, doc, _ = run(capsys, "check-positivity", fx("h1.json"))
    assert code == 0
    assert doc["verdict"] == "psd"


def test_check_positivity_h2_not_psd(capsys):
    code, doc, _ = run(capsys, "check-positivity", fx("h2.json"))
    assert code == 10
    assert doc["verdict"] == "not-psd"
    assert min(doc["eigenvalues"]) == pytest.approx(-1.0)
    assert "witness" in doc


def test_check_positivity_zero(capsys):
    code, doc, _ = run(capsys, "check-positivity", fx("zero_poly.json"))
    assert code == 0


def test_check_positivity_example62_f(capsys):
    code, doc, _ = run(capsys, "check-positivity", fx("example62.json"))
    assert code == 10
    assert min(doc["eigenvalues"]) == pytest.approx(-1.0)
    assert "witness" in doc


def test_check_positivity_sos(capsys, tmp_path):
    out = tmp_path / "h1_result.json"
    code, doc, _ = run(capsys, "check-positivity", "--sos", "-o", str(out), fx("h1.json"))
    assert code == 0
    assert doc["sos"]["rank"] == 1
    on_disk = json.loads(out.read_text())
    assert on_disk == doc


def test_slemma_example62_certificate(capsys, tmp_path):
    out = tmp_path / "cert.json"
    code, doc, err = run(capsys, "slemma", "-o", str(out), fx("example62.json"))
    assert code == 0
    assert doc["type"] == "cp-certificate"
    assert doc["residual_lambda_min"] >= -1e-6
    assert doc["options"]["seed"] == 42
    assert "certificate found" in err

    # round trip through the verifier
    code2, doc2, _ = run(capsys, "verify", str(out), fx("example62.json"))
    assert code2 == 0
    assert doc2["verified"] is True


def test_slemma_counterexample(capsys, tmp_path):
    out = tmp_path / "ce.json"
    code, doc, _ = run(capsys, "slemma", "-o", str(out), fx("slemma_counterexample.json"))
    assert code == 11
    assert doc["type"] == "counterexample"
    assert doc["refutes"] == "projected-domination"
    assert doc["violation"] <= -1e-6

    code2, doc2, _ = run(capsys, "verify", str(out), fx("slemma_counterexample.json"))
    assert code2 == 0
    assert doc2["verified"] is True


def test_slemma_hereditary(capsys, tmp_path):
    out = tmp_path / "hce.json"
    code, doc, _ = run(capsys, "slemma-hereditary", "-o", str(out),
                       fx("hereditary_counterexample.json"))
    assert code == 11
    assert doc["type"] == "counterexample-hereditary"

    code2, doc2, _ = run(capsys, "verify", str(out), fx("hereditary_counterexample.json"))
    assert code2 == 0
    assert doc2["verified"] is True


def test_slemma_missing_slater(capsys):
    code, doc, _ = run(capsys, "slemma", fx("missing_slater.json"))
    assert code == 2
    assert doc["error"] == "parse"


def test_slemma_bad_dimensions(capsys):
    code, doc, _ = run(capsys, "slemma", fx("bad_dimensions.json"))
    assert code == 3
    assert doc["error"] == "dimension"


def test_slemma_slater_violated(capsys, tmp_path):
    doc = json.loads(open(fx("example62.json")).read())
    doc["slater"] = {"n": 1, "kind": "symmetric", "mats": [[[0.0]], [[1.0]]]}
    path = tmp_path / "bad_slater.json"
    path.write_text(serialize.dumps(doc))
    code, out, _ = run(capsys, "slemma", str(path))
    assert code == 4
    assert out["error"] == "slater-violated"


def test_scalar_slemma_certificate(capsys):
    code, doc, _ = run(capsys, "scalar-slemma", fx("scalar_certificate.json"))
    assert code == 0
    assert doc["outcome"] == "certificate"
    assert 0.0 <= doc["lambda"] <= 1.0


def test_scalar_slemma_counterexample(capsys):
    code, doc, _ = run(capsys, "scalar-slemma", fx("scalar_counterexample.json"))
    assert code == 11
    assert doc["outcome"] == "counterexample"
    x = np.array(doc["x"])
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    B = np.diag([1.0, 0.0])
    assert x @ A @ x <= -1e-6
    assert x @ B @ x >= -1e-8


def test_homogenize_command(capsys, tmp_path):
    out = tmp_path / "h.json"
    code, doc, _ = run(capsys, "homogenize", "-o", str(out), fx("homogenize_affine.json"))
    assert code == 0
    assert doc["feasible"] is True
    assert doc["lambda_min"] >= -1e-8
    C = np.array(doc["coefficient_matrix"])
    assert float(np.linalg.eigvalsh(C)[0]) >= -1e-8


def test_evaluate_example61_projected(capsys):
    code, doc, _ = run(capsys, "evaluate", "--project",
                       fx("example61_f.json"), fx("example61_tuple.json"))
    assert code == 0
    value = np.array(doc["value"])
    expected = np.zeros((24, 24))
    expected[2, 2] = -1.0
    assert np.abs(value - expected).max() <= 1e-12

    code, doc, _ = run(capsys, "evaluate", "--project",
                       fx("example61_g.json"), fx("example61_tuple.json"))
    assert code == 0
    value = np.array(doc["value"])
    expected = np.zeros((24, 24))
    expected[2, 2] = 1.0
    assert np.abs(value - expected).max() <= 1e-12


def test_evaluate_unprojected(capsys):
    code, doc, _ = run(capsys, "evaluate",
                       fx("example61_f.json"), fx("example61_tuple.json"))
    assert code == 0
    assert np.array(doc["value"]).shape == (24, 24)


def test_evaluate_project_requires_projection(capsys, tmp_path):
    tup = {"n": 1, "kind": "symmetric", "mats": [[[1.0]], [[2.0]]]}
    path = tmp_path / "tuple.json"
    path.write_text(serialize.dumps(tup))
    code, doc, _ = run(capsys, "evaluate", "--project", fx("example62.json"), str(path))
    assert code == 2


def test_evaluate_g_of_slemma_instance(capsys, tmp_path):
    tup = {"n": 1, "kind": "symmetric", "mats": [[[1.0]], [[2.0]]]}
    path = tmp_path / "tuple.json"
    path.write_text(serialize.dumps(tup))
    code, doc, _ = run(capsys, "evaluate", "--poly", "g", fx("example62.json"), str(path))
    assert code == 0
    assert np.allclose(np.array(doc["value"]), np.diag([-3.0, 1.0]), atol=1e-12)


def test_missing_file(capsys):
    code, doc, _ = run(capsys, "check-positivity", "/nonexistent/file.json")
    assert code == 2


def test_malformed_json(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{]")
    code, doc, _ = run(capsys, "check-positivity", str(path))
    assert code == 2


def test_reproducible_output(capsys):
    code1, doc1, _ = run(capsys, "slemma", "--seed", "7", fx("example62.json"))
    code2, doc2, _ = run(capsys, "slemma", "--seed", "7", fx("example62.json"))
    assert code1 == code2 == 0
    assert doc1 == doc2
    assert doc1["options"]["seed"] == 7


def test_threads_env_validation(capsys, monkeypatch):
    monkeypatch.setenv("NCSLEMMA_THREADS", "not-a-number")
    code, doc, _ = run(capsys, "check-positivity", fx("zero_poly.json"))
    assert code == 2
    monkeypatch.setenv("NCSLEMMA_THREADS", "4")
    code, doc, _ = run(capsys, "check-positivity", fx("zero_poly.json"))
    assert code == 0


def test_stdout_is_machine_readable_even_on_error(capsys):
    # every path must print JSON on stdout; the human report goes to stderr
    code = cli.main(["slemma", fx("missing_slater.json")])
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    assert doc["error"] == "parse"
    assert captured.err.startswith("error:")
