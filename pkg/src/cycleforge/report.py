"""Check records and verification reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

STATUSES = ("pass", "fail", "inconclusive", "skipped")


@dataclass
class CheckRecord:
    suite: str
    name: str
    status: str
    witness: Any = None
    elapsed_ms: float | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    def to_jsonable(self, timings: bool = False) -> dict:
        out = {"suite": self.suite, "name": self.name, "status": self.status, "witness": self.witness}
        if timings and self.elapsed_ms is not None:
            out["elapsed_ms"] = round(self.elapsed_ms, 1)
        return out


@dataclass
class VerificationReport:
    suite: str
    fingerprint: str
    version: str
    parameters: dict
    records: list[CheckRecord] = field(default_factory=list)

    def counts(self) -> dict:
        c = {s: 0 for s in STATUSES}
        for r in self.records:
            c[r.status] += 1
        return c

    @property
    def status(self) -> str:
        c = self.counts()
        if c["fail"]:
            return "fail"
        if c["inconclusive"]:
            return "inconclusive"
        return "pass"

    def exit_code(self, allow_inconclusive: bool = False) -> int:
        s = self.status
        if s == "fail":
            return 1
        if s == "inconclusive" and not allow_inconclusive:
            return 2
        return 0

    def to_jsonable(self, timings: bool = False) -> dict:
        return {
            "toolkit": "cycleforge",
            "version": self.version,
            "suite": self.suite,
            "scene_fingerprint": self.fingerprint,
            "parameters": self.parameters,
            "status": self.status,
            "counts": self.counts(),
            "records": [r.to_jsonable(timings) for r in self.records],
        }

    def dumps(self, timings: bool = False) -> str:
        return json.dumps(self.to_jsonable(timings), indent=2, ensure_ascii=False, sort_keys=False) + "\n"

    def summary(self) -> str:
        lines = [f"{r.status:>12}  {r.suite}/{r.name}" for r in self.records]
        c = self.counts()
        lines.append(
            f"{self.suite}: {self.status} ({c['pass']} pass, {c['fail']} fail, "
            f"{c['inconclusive']} inconclusive, {c['skipped']} skipped)"
        )
        return "\n".join(lines)
