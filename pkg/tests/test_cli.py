import json
import subprocess
import sys

import pytest

from dquot.cli import main

from conftest import CORPUS

DOCS = sorted(CORPUS.glob("*.json"))


def run_cli(tmp_path, doc_path, *extra):
    out = tmp_path / "report.json"
    code = main(["--input", str(doc_path), "--output", str(out), *extra])
    return code, out.read_text(encoding="utf-8")


@pytest.mark.parametrize("doc", DOCS, ids=lambda p: p.stem)
def test_corpus_documents_succeed(tmp_path, doc):
    code, text = run_cli(tmp_path, doc)
    report = json.loads(text)
    assert code == 0, report.get("error")
    assert report["status"] == "ok"
    assert report["schema"] == "dquot-report/1"
    assert report["input"]["document"] == json.loads(doc.read_text())


def test_ext_over_dual_numbers_report(tmp_path):
    code, text = run_cli(tmp_path, CORPUS / "dual_numbers_ext.json")
    result = json.loads(text)["result"]
    assert result["ext"] == [[i, 1] for i in range(7)]
    assert result["oracle"] == result["ext"]


def test_tangent_report(tmp_path):
    code, text = run_cli(tmp_path, CORPUS / "p2_point_tangent.json")
    result = json.loads(text)["result"]
    assert result["cohomology"] == [[0, 2], [1, 1], [2, 0]]
    assert result["hom_classical"] == 2 and result["window_stable"]


def test_malformed_polynomial_is_an_input_error(tmp_path):
    doc = json.loads((CORPUS / "hilbert_plane_conic.json").read_text())
    doc["algebra"]["ideal"] = ["x*z - y^"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, text = run_cli(tmp_path, path)
    assert code == 1
    assert json.loads(text)["error"]["kind"] == "ParseError"


def test_invalid_json_and_unknown_task(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    assert run_cli(tmp_path, path)[0] == 1
    doc = json.loads((CORPUS / "dual_numbers_ext.json").read_text())
    doc["task"]["name"] = "nonsense"
    path.write_text(json.dumps(doc))
    code, text = run_cli(tmp_path, path)
    assert code == 1 and json.loads(text)["error"]["kind"] == "ValidationError"


def test_output_is_byte_identical_across_threads(tmp_path):
    doc = CORPUS / "p2_point_chart.json"
    texts = {run_cli(tmp_path, doc, "--threads", str(n))[1] for n in (1, 4) for _ in range(2)}
    assert len(texts) == 1


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "dquot.cli", "--input", str(CORPUS / "point_tor.json")],
        capture_output=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "ok"
