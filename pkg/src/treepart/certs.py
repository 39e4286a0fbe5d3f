"""Structured pass/fail certificates produced by the audit routines."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

__all__ = ["Certificate", "Clause"]


@dataclass(frozen=True)
class Clause:
    """A single named check with optional witness data."""

    name: str
    passed: bool
    detail: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Certificate:
    """A bundle of clauses plus context about what was audited."""

    name: str
    clauses: tuple[Clause, ...]
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "clauses", tuple(self.clauses))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def clause(self, name: str) -> Clause:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)

    def summary(self) -> str:
        head = f"{self.name}: {'PASS' if self.passed else 'FAIL'}"
        lines = [head]
        for c in self.clauses:
            lines.append(f"  [{'ok' if c.passed else 'XX'}] {c.name}")
        return "\n".join(lines)
