import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from intdeform.cli import _dump, main, run
from intdeform.cohomology import FactoredFiber
from intdeform.deformation import DeformationSeries
from intdeform.forms import PForm
from intdeform.periods import Cycle

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
MANIFEST = json.loads((CORPUS / "manifest.json").read_text())


def _run(command, doc, *flags):
    text = doc if isinstance(doc, str) else json.dumps(doc)
    return run([command, *flags], stdin=io.StringIO(text))


EX52 = {
    "vars": ["x", "y"],
    "family": {"coeffs": [{"d": "x*y"}, {"p": 1, "components": {"dx": "-2*y", "dy": "x"}}]},
}


def test_check_integrable_example_exit_zero():
    code, report, _ = _run("check-integrable", EX52)
    assert code == 0 and report["status"] == "holds"
    assert report["result"]["exhaustive"]


def test_first_integral_obstructed_exit_one():
    doc = dict(EX52, fiber={"factors": ["x", "y"]})
    code, report, summary = _run("first-integral", doc)
    assert code == 1
    assert report["result"]["order"] == 1
    assert report["result"]["lambda"] == [["-3", "0"]]
    assert "order 1" in summary


def test_malformed_json_exit_two():
    code, report, _ = _run("classify-degree-one", "{not json")
    assert code == 2 and report["error"]["type"] == "InputError"


def test_unknown_keys_rejected():
    code, report, _ = _run("check-integrable", dict(EX52, extra=1))
    assert code == 2
    assert "unknown input keys" in report["error"]["message"]


def test_missing_key_rejected():
    code, _, _ = _run("decompose", {"vars": ["x"], "form": {"d": "x"}})
    assert code == 2


def test_order_flag_truncates():
    doc = {"vars": ["x", "y", "z"], "family": {"coeffs": [{"d": "z"}, {"d": "x"}, {"p": 1, "components": {"dx": "y"}}]}}
    code, report, _ = _run("check-integrable", doc, "--order", "1")
    assert code == 0
    assert report["input"]["family"]["truncated"]
    code, _, _ = _run("check-integrable", doc)
    assert code == 1


def test_embedded_inputs_reparse():
    doc = {
        "vars": ["x", "y"],
        "family": EX52["family"],
        "fiber": {"factors": ["x", "y"]},
        "cycles": [{"torus": {"c": [2, -1], "plane": ["x", "y"]}}],
    }
    code, report, _ = _run("periods", doc)
    inp = report["input"]
    vars = inp["vars"]
    w = DeformationSeries.from_json(inp["family"], vars)
    assert w.coeffs[1] == PForm.from_json({"p": 1, "components": {"dx": "-2*y", "dy": "x"}}, vars)
    assert FactoredFiber.from_json(inp["fiber"], vars).factors[0].vars == tuple(vars)
    gamma = Cycle.from_json(inp["cycles"][0])
    assert gamma.c == 2 - 1j
    # feeding the normalized input back gives the same report
    code2, report2, _ = _run("periods", inp)
    assert code2 == code and report2 == report


def test_main_writes_output_file(tmp_path):
    src = tmp_path / "in.json"
    src.write_text(json.dumps(EX52))
    out = tmp_path / "out.json"
    assert main(["check-integrable", "--input", str(src), "--output", str(out)]) == 0
    assert json.loads(out.read_text())["schema"] == "intdeform.report/1"


def test_module_entry_point(tmp_path):
    src = tmp_path / "in.json"
    src.write_text(json.dumps(EX52))
    proc = subprocess.run(
        [sys.executable, "-m", "intdeform", "check-integrable", "-i", str(src)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "holds"


@pytest.mark.parametrize("entry", MANIFEST, ids=[e["name"] for e in MANIFEST])
def test_corpus_reports_are_byte_identical(entry):
    code, report, _ = run([entry["command"], "--input", str(CORPUS / "inputs" / entry["input"])])
    assert code == entry["exit"]
    expected = (CORPUS / "expected" / f"{entry['name']}.json").read_text(encoding="utf-8")
    assert _dump(report) == expected


def test_repeat_runs_identical():
    entry = next(e for e in MANIFEST if e["command"] == "periods")
    args = [entry["command"], "--input", str(CORPUS / "inputs" / entry["input"])]
    assert _dump(run(args)[1]) == _dump(run(args)[1])
