"""Shared pass/fail report structure used by the verification harnesses."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ReportEntry:
    name: str
    passed: bool
    advisory: bool = False
    details: dict[str, str] = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "advisory": self.advisory,
            "details": dict(sorted(self.details.items())),
        }


@dataclass(frozen=True)
class Report:
    entries: tuple[ReportEntry, ...]

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.entries if not e.advisory)

    def first_failure(self) -> ReportEntry | None:
        for e in self.entries:
            if not e.advisory and not e.passed:
                return e
        return None

    def to_json_obj(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "entries": [e.to_json_obj() for e in self.entries],
        }
