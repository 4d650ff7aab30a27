"""Verdict records shared by the verification operations."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Certificate:
    """A machine-checkable verdict.

    verdict is one of "witness" (explicit object found), "obstruction"
    (proof of non-existence), "violation" (a check failed) or "skipped"
    (hypotheses not met, nothing claimed).
    """

    claim: str
    verdict: str
    ok: bool
    data: dict = field(default_factory=dict)

    def to_json(self):
        return {"claim": self.claim, "verdict": self.verdict, "ok": self.ok, "data": self.data}
