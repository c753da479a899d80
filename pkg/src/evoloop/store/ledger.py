"""Cross-iteration exclusion ledger.

Records every trajectory hash ever used for training. Monotone: hashes are
only added, never removed, and the backing JSONL file is append-only so the
ledger survives process restarts.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import FormatError


class ExclusionLedger:
    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._used: set[str] = set()
        self._records: list[dict] = []
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self):
        with self.path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                    self._used.add(record["traj_hash"])
                    self._records.append(record)
                except (json.JSONDecodeError, KeyError) as exc:
                    raise FormatError(f"{self.path}:{lineno}: bad ledger record: {exc}") from exc

    def __contains__(self, traj_hash: str) -> bool:
        return traj_hash in self._used

    def __len__(self) -> int:
        return len(self._used)

    @property
    def used_hashes(self) -> frozenset:
        return frozenset(self._used)

    def record(self, hashes, iteration: int):
        """Add hashes for one iteration, appending to the backing file if any."""
        new_records = [
            {"traj_hash": h, "iteration_used": iteration}
            for h in hashes if h not in self._used
        ]
        for record in new_records:
            self._used.add(record["traj_hash"])
            self._records.append(record)
        if self.path is not None and new_records:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                for record in new_records:
                    fh.write(json.dumps(record) + "\n")
