"""Report records and their deterministic JSON form."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .catalog import CHECKS

SCHEMA_VERSION = "1.0"


def _jsonable(v: Any) -> Any:
    if isinstance(v, complex):
        return f"{v.real:.12g}{v.imag:+.12g}j"
    if isinstance(v, (tuple, list)):
        return [_jsonable(t) for t in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(t) for k, t in v.items()}
    if isinstance(v, float) and v != v:
        return "nan"
    if isinstance(v, float) and v in (float("inf"), float("-inf")):
        return str(v)
    return v


@dataclass(frozen=True)
class Record:
    suite: str
    check_id: str
    case: str
    key: str
    params: dict[str, Any]
    residual: float | None
    tol: float
    passed: bool
    truncation_bound: float
    wall_time: float
    skipped: str = ""

    @property
    def anchor(self) -> str:
        return CHECKS[self.check_id].anchor

    def body(self) -> dict[str, Any]:
        out = {
            "suite": self.suite, "check": self.check_id, "anchor": self.anchor,
            "case": self.case, "key": self.key, "params": _jsonable(self.params),
            "residual": _jsonable(self.residual), "tol": self.tol, "pass": self.passed,
            "truncation_bound": self.truncation_bound,
        }
        if self.skipped:
            out["skipped"] = self.skipped
        return out


@dataclass
class Report:
    config: dict[str, Any]
    records: list[Record] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.errors and all(r.passed for r in self.records)

    def summary(self) -> dict[str, Any]:
        by_suite: dict[str, list[int]] = {}
        for r in self.records:
            s = by_suite.setdefault(r.suite, [0, 0])
            s[0 if r.passed else 1] += 1
        return {k: {"pass": v[0], "fail": v[1]} for k, v in sorted(by_suite.items())}

    def body(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": _jsonable(self.config),
            "summary": self.summary(),
            "passed": self.passed,
            "notes": list(self.notes),
            "errors": list(self.errors),
            "records": [r.body() for r in self.records],
        }

    def to_json(self, timing: bool = True) -> str:
        doc: dict[str, Any] = {"body": self.body()}
        if timing:
            doc["timing"] = {"wall_time_total": sum(r.wall_time for r in self.records),
                             "wall_time": [r.wall_time for r in self.records]}
        return json.dumps(doc, indent=2, sort_keys=True)

    def body_json(self) -> str:
        return json.dumps(self.body(), indent=2, sort_keys=True)


def _record_key(rec: dict[str, Any]) -> tuple:
    return rec["suite"], rec["check"], rec["case"], rec["key"]


def compare_bodies(golden: dict[str, Any], new: dict[str, Any], atol: float = 1e-13
                   ) -> list[str]:
    """Differences between two report bodies; residuals may differ by ``atol``."""
    if "body" in golden:
        golden = golden["body"]
    if "body" in new:
        new = new["body"]
    diffs = []
    if golden.get("schema_version") != new.get("schema_version"):
        diffs.append(f"schema {golden.get('schema_version')} != {new.get('schema_version')}")
    if golden.get("config") != new.get("config"):
        diffs.append("config differs")
    old = {_record_key(r): r for r in golden.get("records", [])}
    cur = {_record_key(r): r for r in new.get("records", [])}
    for k in sorted(set(old) - set(cur)):
        diffs.append(f"missing record {k}")
    for k in sorted(set(cur) - set(old)):
        diffs.append(f"extra record {k}")
    for k in sorted(set(old) & set(cur)):
        a, b = old[k], cur[k]
        ra, rb = a["residual"], b["residual"]
        if isinstance(ra, float) and isinstance(rb, float):
            if abs(ra - rb) > atol:
                diffs.append(f"{k}: residual {ra:.3e} -> {rb:.3e}")
        elif ra != rb:
            diffs.append(f"{k}: residual {ra} -> {rb}")
        for f in ("pass", "params", "tol"):
            if a.get(f) != b.get(f):
                diffs.append(f"{k}: {f} changed")
    return diffs
