"""Structured verification reports with lossless JSON round trips."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

from .errors import LatticeError


@dataclass(frozen=True)
class CheckEntry:
    check_id: str
    paper_anchor: str
    max_residual: float
    tolerance: float
    notes: str = ""

    @property
    def passed(self) -> bool:
        # NaN residuals never pass
        return bool(self.max_residual <= self.tolerance)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["max_residual"] = _encode_float(self.max_residual)
        d["pass"] = self.passed
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CheckEntry":
        return cls(
            check_id=d["check_id"],
            paper_anchor=d["paper_anchor"],
            max_residual=_decode_float(d["max_residual"]),
            tolerance=float(d["tolerance"]),
            notes=d.get("notes", ""),
        )


def _encode_float(v: float):
    if math.isfinite(v):
        return v
    return repr(float(v))


def _decode_float(v) -> float:
    return float(v)


@dataclass
class VerificationReport:
    entries: list[CheckEntry] = field(default_factory=list)

    def add(self, check_id: str, anchor: str, residual: float, tol: float, notes: str = "") -> CheckEntry:
        entry = CheckEntry(check_id, anchor, float(residual), float(tol), notes)
        self.entries.append(entry)
        return entry

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.entries.extend(other.entries)
        return self

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list[CheckEntry]:
        return [e for e in self.entries if not e.passed]

    def __getitem__(self, check_id: str) -> CheckEntry:
        for e in self.entries:
            if e.check_id == check_id:
                return e
        raise KeyError(check_id)

    def to_dict(self) -> dict:
        return {"pass": self.passed, "entries": [e.to_dict() for e in self.entries]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls([CheckEntry.from_dict(e) for e in d["entries"]])

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls.from_dict(json.loads(text))

    def with_tolerances(self, overrides: dict[str, float] | None = None, default: float | None = None) -> "VerificationReport":
        """Copy with tolerances replaced per check id (``overrides``) or globally (``default``)."""
        overrides = overrides or {}
        out = []
        for e in self.entries:
            tol = overrides.get(e.check_id, default if default is not None else e.tolerance)
            out.append(CheckEntry(e.check_id, e.paper_anchor, e.max_residual, float(tol), e.notes))
        return VerificationReport(out)

    def summary(self) -> str:
        lines = []
        for e in self.entries:
            flag = "PASS" if e.passed else "FAIL"
            lines.append(f"{flag} {e.check_id}: {e.max_residual:.3e} (tol {e.tolerance:.1e})")
        return "\n".join(lines)


def guarded(check_id: str, anchor: str, make: Callable[[], VerificationReport]) -> VerificationReport:
    """Run ``make``; a numerical breakdown becomes one failing entry instead of an exception."""
    try:
        return make()
    except LatticeError as exc:
        rep = VerificationReport()
        rep.add(check_id, anchor, math.inf, 0.0, f"{type(exc).__name__}: {exc}")
        return rep
