"""Structured verification records and the claim registry."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped-hypothesis"
STATUSES = (PASS, FAIL, SKIPPED)

RELATIONS = (">=", "<=", "==")


@lru_cache(maxsize=1)
def claim_registry() -> dict[str, dict[str, str]]:
    """Frozen map ``claim_id -> {"statement", "anchor"}`` shipped as ``claims.json``."""
    text = resources.files("kahlerlab").joinpath("claims.json").read_text(encoding="utf-8")
    return json.loads(text)


def _plain(value: Any) -> Any:
    # numpy scalars/arrays and complex numbers -> JSON-friendly values
    if hasattr(value, "tolist"):
        value = value.tolist()
    if isinstance(value, complex):
        return [_plain(value.real), _plain(value.imag)]
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return repr(value)
        return value
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


@dataclass
class VerificationReport:
    """Outcome of one numerical check.

    ``slack`` is always ``lhs - rhs``; ``relation`` says which sign is good:
    ``">="`` passes when ``slack >= -tolerance``, ``"<="`` when
    ``slack <= tolerance`` and ``"=="`` when ``|slack| <= tolerance``.
    """

    claim_id: str
    status: str
    lhs: float | None = None
    rhs: float | None = None
    slack: float | None = None
    tolerance: float | None = None
    relation: str = "=="
    witness: dict[str, Any] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        if self.status == FAIL and not self.witness:
            raise ValueError(f"failed report {self.claim_id!r} carries no witness")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def to_record(self) -> dict[str, Any]:
        return {
            "claim_id": self.claim_id,
            "status": self.status,
            "relation": self.relation,
            "lhs": _plain(self.lhs),
            "rhs": _plain(self.rhs),
            "slack": _plain(self.slack),
            "tolerance": _plain(self.tolerance),
            "witness": _plain(self.witness),
            "details": _plain(self.details),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)

    def __str__(self) -> str:
        return (f"[{self.status}] {self.claim_id}: lhs={self.lhs!r} {self.relation} "
                f"rhs={self.rhs!r} (slack={self.slack!r}, tol={self.tolerance!r})")


def holds(slack: float, relation: str, tol: float) -> bool:
    if relation == ">=":
        return slack >= -tol
    if relation == "<=":
        return slack <= tol
    return abs(slack) <= tol


def compare(claim_id: str, lhs, rhs, relation: str, tol: float,
            witness: dict | None = None, **details) -> VerificationReport:
    """Build a report for ``lhs relation rhs`` at tolerance ``tol``."""
    lhs = float(lhs)
    rhs = float(rhs)
    slack = lhs - rhs
    ok = holds(slack, relation, tol) and math.isfinite(slack)
    return VerificationReport(
        claim_id=claim_id,
        status=PASS if ok else FAIL,
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        tolerance=float(tol),
        relation=relation,
        witness=dict(witness or {}) or {"note": "deterministic input"},
        details=details,
    )


def skipped(claim_id: str, reason: str, witness: dict | None = None, **details) -> VerificationReport:
    details = dict(details, reason=reason)
    return VerificationReport(claim_id=claim_id, status=SKIPPED, witness=dict(witness or {}),
                              details=details)


def combine(claim_id: str, reports, witness: dict | None = None, **details) -> VerificationReport:
    """Aggregate sub-reports: fails if any fails, worst slack wins."""
    reports = list(reports)
    failed = [r for r in reports if r.failed]
    counted = [r for r in reports if r.status != SKIPPED]
    status = FAIL if failed else (PASS if counted else SKIPPED)
    w = dict(witness or {})
    if failed:
        w.setdefault("first_failure", failed[0].witness)
    if status == FAIL and not w:
        w = {"note": "see sub-reports"}
    out = VerificationReport(
        claim_id=claim_id,
        status=status,
        witness=w,
        details=dict(details, total=len(reports), failed=len(failed),
                     skipped=len(reports) - len(counted)),
    )
    worst = max((r for r in counted if r.slack is not None and r.tolerance is not None),
                key=_excess, default=None)
    if worst is not None:
        out.lhs, out.rhs, out.slack = worst.lhs, worst.rhs, worst.slack
        out.tolerance, out.relation = worst.tolerance, worst.relation
    return out


def _excess(r: VerificationReport) -> float:
    """How far past its tolerance a report sits; positive means failing."""
    if r.relation == ">=":
        return -r.slack - r.tolerance
    if r.relation == "<=":
        return r.slack - r.tolerance
    return abs(r.slack) - r.tolerance


def expect(report: VerificationReport, expected: str, claim_id: str | None = None,
           **details) -> VerificationReport:
    """Negative controls and verdict checks: pass iff ``report.status == expected``."""
    ok = report.status == expected
    return VerificationReport(
        claim_id=claim_id or report.claim_id,
        status=PASS if ok else FAIL,
        lhs=report.lhs, rhs=report.rhs, slack=report.slack, tolerance=report.tolerance,
        relation=report.relation,
        witness=report.witness or {"note": "expectation check"},
        details=dict(details, expected_status=expected, observed_status=report.status,
                     inner=report.details),
    )
