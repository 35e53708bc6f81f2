"""Serialization of suite results: JSON with a fixed schema, or one text line per check."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .cyclotomic import CycScalar

SCHEMA = "paratwist.report/1"


@dataclass
class SuiteReport:
    config: dict
    seed: int
    suites: list
    checks: list = field(default_factory=list)  # (suite, Check) pairs

    @property
    def failed(self) -> list:
        return [c for _, c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failed


def _value(x):
    if isinstance(x, float):
        raise TypeError(f"float {x!r} in a report; use exact values")
    if isinstance(x, CycScalar):
        return x.to_json()
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (dict, list, str, int)) or x is None:
        return x
    return str(x)


def _assert_no_floats(obj, path="$"):
    if isinstance(obj, float):
        raise TypeError(f"float value at {path}")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _assert_no_floats(v, f"{path}.{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _assert_no_floats(v, f"{path}[{i}]")


def to_document(report: SuiteReport, timings: bool = False) -> dict:
    checks = []
    for suite, c in sorted(report.checks, key=lambda sc: sc[1].name):
        entry = {
            "name": c.name,
            "suite": suite,
            "status": "PASS" if c.passed else "FAIL",
            "expected": _value(c.expected),
            "computed": _value(c.computed),
            "detail": c.detail,
        }
        if timings:
            entry["elapsed_ms"] = int(round(c.elapsed * 1000))
        checks.append(entry)
    failed = sum(e["status"] == "FAIL" for e in checks)
    doc = {
        "schema": SCHEMA,
        "seed": report.seed,
        "suites": sorted(report.suites),
        "config": report.config,
        "checks": checks,
        "summary": {"total": len(checks), "passed": len(checks) - failed, "failed": failed,
                    "status": "PASS" if not failed else "FAIL"},
    }
    _assert_no_floats(doc)
    return doc


def emit_json(report: SuiteReport, timings: bool = False) -> str:
    return json.dumps(to_document(report, timings), sort_keys=True, indent=2) + "\n"


def emit_text(report: SuiteReport, timings: bool = False) -> str:
    doc = to_document(report, timings)
    lines = []
    for e in doc["checks"]:
        line = f"{e['status']} {e['name']}"
        if timings:
            line += f" ({e['elapsed_ms']} ms)"
        if e["status"] == "FAIL":
            line += f"  expected={json.dumps(e['expected'], sort_keys=True)}"
            line += f" computed={json.dumps(e['computed'], sort_keys=True)}"
        if e["detail"]:
            line += f"  [{e['detail']}]"
        lines.append(line)
    s = doc["summary"]
    lines.append(f"{s['status']}: {s['passed']}/{s['total']} checks passed (seed {doc['seed']})")
    return "\n".join(lines) + "\n"


def emit(report: SuiteReport, fmt: str = "json", timings: bool = False) -> str:
    if fmt == "json":
        return emit_json(report, timings)
    if fmt == "text":
        return emit_text(report, timings)
    raise ValueError(f"unknown format {fmt!r}")
