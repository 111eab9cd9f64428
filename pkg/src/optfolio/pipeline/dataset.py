"""Problem dataset loading.

One JSON object per line with fields `id`, `description`, and optional
`ground_truth_objective` / `ground_truth_text`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class DatasetError(ValueError):
    """Dataset file violates the documented schema."""


@dataclass(frozen=True)
class ProblemInstance:
    id: str
    description: str
    ground_truth_objective: float | None = None
    ground_truth_text: str | None = None

    @property
    def ground_truth(self) -> str | None:
        """Ground-truth solution text for judging, or None if absent."""
        parts = []
        if self.ground_truth_objective is not None:
            parts.append(f"Optimal objective value: {self.ground_truth_objective}")
        if self.ground_truth_text:
            parts.append(self.ground_truth_text)
        return "\n".join(parts) if parts else None


def load_dataset(path) -> list[ProblemInstance]:
    """Load problems from a JSONL file, validating the schema per record."""
    path = Path(path)
    problems: list[ProblemInstance] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(rec, dict):
                raise DatasetError(f"{path}:{lineno}: record is not an object")
            pid = rec.get("id")
            if not isinstance(pid, str) or not pid:
                raise DatasetError(f"{path}:{lineno}: missing or empty 'id'")
            if pid in seen_ids:
                raise DatasetError(f"{path}:{lineno}: duplicate id {pid!r}")
            desc = rec.get("description")
            if not isinstance(desc, str) or not desc.strip():
                raise DatasetError(
                    f"{path}:{lineno}: record {pid!r} has missing or empty 'description'"
                )
            gto = rec.get("ground_truth_objective")
            if gto is not None and not isinstance(gto, (int, float)):
                raise DatasetError(
                    f"{path}:{lineno}: record {pid!r}: ground_truth_objective must be numeric"
                )
            seen_ids.add(pid)
            problems.append(
                ProblemInstance(
                    id=pid,
                    description=desc,
                    ground_truth_objective=None if gto is None else float(gto),
                    ground_truth_text=rec.get("ground_truth_text"),
                )
            )
    if not problems:
        raise DatasetError(f"{path}: no problem records found")
    return problems
