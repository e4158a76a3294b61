"""Per-task, per-size tallies of scored answers."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from ..graph import NP_HARD_TASKS, SizeClass, TaskKind
from .scoring import EvalOutcome


@dataclass
class Cell:
    count: int = 0
    optimal: int = 0
    valid: int = 0
    ratio_sum: float = 0.0

    def add(self, outcome: EvalOutcome) -> None:
        self.count += 1
        self.optimal += outcome.optimal
        self.valid += outcome.valid
        self.ratio_sum += outcome.ratio

    def merge(self, other: "Cell") -> "Cell":
        return Cell(
            self.count + other.count,
            self.optimal + other.optimal,
            self.valid + other.valid,
            self.ratio_sum + other.ratio_sum,
        )

    @property
    def rate(self) -> float:
        return self.optimal / self.count if self.count else 0.0

    @property
    def validity(self) -> float:
        return self.valid / self.count if self.count else 0.0

    @property
    def mean_ratio(self) -> float:
        return self.ratio_sum / self.count if self.count else 0.0


@dataclass
class Report:
    cells: dict[tuple[TaskKind, SizeClass], Cell] = field(default_factory=dict)
    manifest: str | None = None

    @property
    def total(self) -> Cell:
        out = Cell()
        for cell in self.cells.values():
            out = out.merge(cell)
        return out

    def cell(self, kind: TaskKind, size: SizeClass) -> Cell:
        return self.cells.get((kind, size), Cell())

    def to_dict(self) -> dict[str, Any]:
        rows = []
        for (kind, size), cell in sorted(self.cells.items(), key=lambda kv: (list(TaskKind).index(kv[0][0]), kv[0][1].value)):
            row = {
                "task": kind.value,
                "size": size.value,
                "count": cell.count,
                "optimal": cell.optimal,
                "valid": cell.valid,
                "optimality_rate": cell.rate,
                "validity_rate": cell.validity,
            }
            if kind in NP_HARD_TASKS:
                row["mean_ratio"] = cell.mean_ratio
            rows.append(row)
        total = self.total
        return {
            "cells": rows,
            "total": {"count": total.count, "optimal": total.optimal, "valid": total.valid, "optimality_rate": total.rate},
            "manifest": self.manifest,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Report":
        cells = {}
        for row in data["cells"]:
            kind = TaskKind.parse(row["task"])
            ratio = row.get("mean_ratio", row["optimality_rate"]) * row["count"]
            cells[(kind, SizeClass.parse(row["size"]))] = Cell(row["count"], row["optimal"], row["valid"], ratio)
        return cls(cells, data.get("manifest"))

    def render_text(self) -> str:
        """Tasks as columns and size classes as rows, rates in percent."""
        kinds = [k for k in TaskKind if any(key[0] is k for key in self.cells)]
        sizes = [s for s in SizeClass if any(key[1] is s for key in self.cells)]
        width = max([9] + [len(k.value) for k in kinds])
        head = "metric".ljust(16) + "".join(k.value.rjust(width + 1) for k in kinds)
        lines = [head, "-" * len(head)]
        metrics = [("rate", lambda c: c.rate), ("valid", lambda c: c.validity), ("ratio", lambda c: c.mean_ratio)]
        for size in sizes:
            for name, fn in metrics:
                cols = []
                for k in kinds:
                    cell = self.cells.get((k, size))
                    if cell is None or (name == "ratio" and k not in NP_HARD_TASKS):
                        cols.append("-".rjust(width + 1))
                    else:
                        cols.append(f"{100 * fn(cell):.1f}".rjust(width + 1))
                lines.append(f"{size.value} {name}".ljust(16) + "".join(cols))
        total = self.total
        lines.append("")
        lines.append(f"instances {total.count}, optimal {total.optimal} ({100 * total.rate:.1f}%), valid {total.valid}")
        return "\n".join(lines)


def aggregate_report(tagged: Iterable[tuple[TaskKind, SizeClass, EvalOutcome]], manifest: str | None = None) -> Report:
    report = Report(manifest=manifest)
    for kind, size, outcome in tagged:
        report.cells.setdefault((kind, size), Cell()).add(outcome)
    return report
