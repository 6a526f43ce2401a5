"""Monotonicity-check reports with a stable JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    """One flagged grid cell: where (coords), what (kind), how bad (value)."""

    kind: str
    coords: dict
    value: float = 0.0
    low_confidence: bool = False

    def to_dict(self) -> dict:
        d = dict(self.coords)
        d["kind"] = self.kind
        d["value"] = self.value
        if self.low_confidence:
            d["low_confidence"] = True
        return d


@dataclass
class MonotonicityReport:
    """Result of a grid monotonicity / sign check.

    Serializes as {"grid": ..., "violations": [...], "pass": bool} plus any
    checker-specific extras merged at the top level.
    """

    grid: dict
    violations: list
    passed: bool
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "grid": self.grid,
            "violations": [v.to_dict() for v in self.violations],
            "pass": self.passed,
        }
        d.update(self.extras)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
