import json
from fractions import Fraction

import numpy as np
import pytest

from penner_closed.report import SCHEMA, CheckRecord, RunReport


def record(name, passed, **extra):
    return CheckRecord({"name": name, "input": {"x": 1}, "expected": 1, "computed": 1,
                        "residual": 0.0, "pass": passed, **extra})


def test_record_plain_values():
    data = CheckRecord({"name": "lemma1", "input": {"x": Fraction(1, 2)},
                        "expected": 1, "computed": np.int64(1),
                        "residual": np.float64(1e-12), "pass": True}).to_dict()
    assert data["input"] == {"x": "1/2"}
    assert data["computed"] == 1
    assert isinstance(data["residual"], float)
    assert "error" not in data
    json.dumps(data)


def test_failure_record():
    r = CheckRecord.failure("euler", {"n_minus": 2}, -1, ValueError("boom"))
    assert not r.passed
    assert r.to_dict()["error"] == "ValueError: boom"


def test_report_lines():
    report = RunReport(["verify", "--scope", "lemmas"], 7)
    report.extend([record("a", True), record("b", False)])
    lines = [json.loads(line) for line in report.lines()]
    assert lines[0] == {"schema": SCHEMA, "version": "1.0", "command": ["verify", "--scope", "lemmas"], "seed": 7}
    assert [row["name"] for row in lines[1:-1]] == ["a", "b"]
    assert lines[-1] == {"summary": True, "checks": 2, "failed": 1, "pass": False}
    assert not report.passed
    assert [r.name for r in report.failures] == ["b"]


def test_empty_report_passes():
    assert RunReport(["gen"]).passed


def test_save_load(tmp_path):
    report = RunReport(["flip", "--edge", "5"], 3)
    report.add(record("double_flip", True))
    path = tmp_path / "out" / "report.jsonl"
    report.save(str(path))
    assert not (tmp_path / "out" / "report.jsonl.tmp").exists()
    back = RunReport.load(str(path))
    assert back.command == ["flip", "--edge", "5"]
    assert back.seed == 3
    assert [r.name for r in back.records] == ["double_flip"]
    assert back.passed


def test_load_rejects_other_files(tmp_path):
    path = tmp_path / "x.jsonl"
    path.write_text(json.dumps({"schema": "other"}) + "\n")
    with pytest.raises(ValueError):
        RunReport.load(str(path))
