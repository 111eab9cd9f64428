"""Append-only run cache.

One JSON object per line with fields {problem_id, stage, candidate_id,
payload, content_hash}.  A stage's content hash fingerprints its inputs;
re-running a stage whose hash is already present is a no-op, which gives
idempotent resume.  Writes are serialized through this single writer;
readers may load the file at any time.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path


def content_hash(*parts) -> str:
    """Stable hash of arbitrary JSON-serializable stage inputs."""
    blob = json.dumps(parts, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class RunCache:
    def __init__(self, path):
        self.path = Path(path)
        self._records: dict[tuple[str, str], dict[int, dict]] = {}
        self._hashes: dict[tuple[str, str], str] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                key = (rec["problem_id"], rec["stage"])
                self._records.setdefault(key, {})[int(rec["candidate_id"])] = rec["payload"]
                self._hashes[key] = rec["content_hash"]

    def has_stage(self, problem_id: str, stage: str, stage_hash: str) -> bool:
        return self._hashes.get((problem_id, stage)) == stage_hash

    def stage_records(self, problem_id: str, stage: str) -> dict[int, dict]:
        """Cached payloads for a stage, keyed by candidate id (sorted)."""
        recs = self._records.get((problem_id, stage), {})
        return {cid: recs[cid] for cid in sorted(recs)}

    def put_stage(self, problem_id: str, stage: str, stage_hash: str,
                  payloads: dict[int, dict]) -> None:
        """Append one record per candidate; replaces the in-memory view of
        the stage (the file keeps history, latest hash wins on reload)."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            for cid in sorted(payloads):
                rec = {
                    "problem_id": problem_id,
                    "stage": stage,
                    "candidate_id": cid,
                    "payload": payloads[cid],
                    "content_hash": stage_hash,
                }
                fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")
        self._records[(problem_id, stage)] = dict(payloads)
        self._hashes[(problem_id, stage)] = stage_hash
