"""
Run reports: per-check records serialized as JSON lines.
"""

import json
import os
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, TextIO

from .logger import get_logger


logger = get_logger("report")

SCHEMA = "penner-closed/report"
SCHEMA_VERSION = "1.0"


def _plain(value: Any) -> Any:
    """JSON-friendly copy of a computed value."""
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return value


class CheckRecord:
    """Result of one check."""

    def __init__(self, data: Dict):
        self.name = data.get("name", "")
        self.input = data.get("input")
        self.expected = data.get("expected")
        self.computed = data.get("computed")
        self.residual = data.get("residual")
        self.passed = bool(data.get("pass", False))
        self.error = data.get("error", "")

    @staticmethod
    def failure(name: str, input: Any, expected: Any, error: Exception) -> 'CheckRecord':
        return CheckRecord({
            "name": name,
            "input": input,
            "expected": expected,
            "pass": False,
            "error": f"{type(error).__name__}: {error}",
        })

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        data = {
            "name": self.name,
            "input": _plain(self.input),
            "expected": _plain(self.expected),
            "computed": _plain(self.computed),
            "residual": _plain(self.residual),
            "pass": self.passed,
        }
        if self.error:
            data["error"] = self.error
        return data

    def __repr__(self):
        return f"CheckRecord(name={self.name}, pass={self.passed})"


class RunReport:
    """Records of one command run; passes iff every record passes."""

    def __init__(self, command: List[str], seed: Optional[int] = None):
        self.command = list(command)
        self.seed = seed
        self.records: List[CheckRecord] = []

    def add(self, record: CheckRecord):
        self.records.append(record)

    def extend(self, records: Iterable[CheckRecord]):
        self.records.extend(records)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def header(self) -> Dict:
        return {
            "schema": SCHEMA,
            "version": SCHEMA_VERSION,
            "command": self.command,
            "seed": self.seed,
        }

    def footer(self) -> Dict:
        return {
            "summary": True,
            "checks": len(self.records),
            "failed": len(self.failures),
            "pass": self.passed,
        }

    def lines(self) -> List[str]:
        rows = [self.header()] + [r.to_dict() for r in self.records] + [self.footer()]
        return [json.dumps(row, sort_keys=True) for row in rows]

    def write_stream(self, stream: TextIO):
        for line in self.lines():
            stream.write(line + "\n")

    def save(self, path: str):
        """Write the report to a file (atomic write)."""
        path = os.path.expanduser(path)
        directory = os.path.dirname(path)
        if directory and not os.path.exists(directory):
            os.makedirs(directory, mode=0o755, exist_ok=True)

        temp_file = f"{path}.tmp"
        with open(temp_file, 'w') as f:
            self.write_stream(f)

        os.chmod(temp_file, 0o644)
        os.replace(temp_file, path)
        logger.debug(f"Saved report to {path}")

    @staticmethod
    def load(path: str) -> 'RunReport':
        """Read a report written by ``save``."""
        with open(os.path.expanduser(path), 'r') as f:
            rows = [json.loads(line) for line in f if line.strip()]
        if not rows or rows[0].get("schema") != SCHEMA:
            raise ValueError(f"Not a report file: {path}")
        report = RunReport(rows[0].get("command", []), rows[0].get("seed"))
        report.extend(CheckRecord(row) for row in rows[1:] if not row.get("summary"))
        return report
