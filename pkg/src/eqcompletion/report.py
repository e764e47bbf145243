"""Structured pass/fail evidence shared by every checker."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

PASS = "pass"
FAIL = "fail"
UNSTATEABLE = "unstateable"
VACUOUS = "vacuous"
INFO = "info"
ERROR = "error"  # structural problem, distinct from a law violation

_FAILING = {FAIL, ERROR}


@dataclass
class Line:
    check: str
    status: str
    detail: str = ""
    witness: Any = None
    checked: int = 0

    def as_dict(self) -> dict:
        d = {"check": self.check, "status": self.status}
        if self.detail:
            d["detail"] = self.detail
        if self.witness is not None:
            d["witness"] = self.witness
        if self.checked:
            d["checked"] = self.checked
        return d


@dataclass
class Report:
    title: str = ""
    lines: list[Line] = field(default_factory=list)

    def add(self, check, status, detail="", witness=None, checked=0) -> Line:
        line = Line(check, status, detail, _plain(witness), checked)
        self.lines.append(line)
        return line

    def ok_if(self, check, cond, detail="", witness=None, checked=0) -> Line:
        return self.add(check, PASS if cond else FAIL, detail,
                        None if cond else witness, checked)

    def extend(self, other: "Report", prefix: str = "") -> "Report":
        for ln in other.lines:
            name = f"{prefix}{ln.check}" if prefix else ln.check
            self.lines.append(Line(name, ln.status, ln.detail, ln.witness, ln.checked))
        return self

    @property
    def ok(self) -> bool:
        return not any(ln.status in _FAILING for ln in self.lines)

    def __bool__(self) -> bool:
        return self.ok

    def failures(self) -> list[Line]:
        return [ln for ln in self.lines if ln.status in _FAILING]

    def find(self, check: str) -> list[Line]:
        return [ln for ln in self.lines if ln.check == check or ln.check.endswith("." + check)]

    def status_of(self, check: str) -> str | None:
        found = self.find(check)
        if not found:
            return None
        statuses = {ln.status for ln in found}
        for s in (ERROR, FAIL, PASS, VACUOUS, UNSTATEABLE, INFO):
            if s in statuses:
                return s
        return None

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for ln in self.lines:
            out[ln.status] = out.get(ln.status, 0) + 1
        return dict(sorted(out.items()))

    def to_json(self) -> str:
        return json.dumps({"title": self.title, "ok": self.ok, "counts": self.counts(),
                           "lines": [ln.as_dict() for ln in self.lines]},
                          indent=2, sort_keys=True)

    def to_text(self) -> str:
        out = [f"== {self.title} ==" if self.title else ""]
        for ln in self.lines:
            s = f"[{ln.status.upper():11}] {ln.check}"
            if ln.detail:
                s += f" -- {ln.detail}"
            if ln.witness is not None:
                s += f" | witness: {json.dumps(ln.witness, sort_keys=True)}"
            out.append(s)
        out.append("counts: " + ", ".join(f"{k}={v}" for k, v in self.counts().items()))
        return "\n".join(x for x in out if x != "")


def _plain(x: Any) -> Any:
    """Coerce numpy scalars/tuples into JSON-friendly values."""
    if x is None:
        return None
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        seq: Iterable = sorted(x, key=str) if isinstance(x, (set, frozenset)) else x
        return [_plain(v) for v in seq]
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        try:
            return x.item()
        except (ValueError, AttributeError):
            return x.tolist()
    return x
