"""
Machine-readable reports of CLI runs (schema version 1).
"""
import hashlib
import json
import logging
import time
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class Report(BaseModel):
    """One command run: echo of the invocation, hash of the input, results and timing."""
    schema_version: int = SCHEMA_VERSION
    command: str
    arguments: List[str] = Field(default_factory=list)
    input_path: Optional[str] = None
    input_sha256: Optional[str] = None
    results: Dict[str, Any] = Field(default_factory=dict)
    passed: bool = True
    timing: Dict[str, float] = Field(default_factory=dict)
    created_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    # human-readable lines for standard output, not serialized
    summary: List[str] = Field(default_factory=list, exclude=True)

    def to_json(self, deterministic: bool = False) -> str:
        """JSON text; ``deterministic`` leaves out timing and creation time."""
        exclude = {"timing", "created_at"} if deterministic else None
        return json.dumps(self.model_dump(exclude=exclude), indent=2, sort_keys=True)

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")
        logger.info(f"Report written to {path}")


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class Timer:
    """Collects named wall-clock intervals for a report."""

    def __init__(self):
        self.timing: Dict[str, float] = {}
        self._start = time.perf_counter()

    def total(self) -> Dict[str, float]:
        self.timing["total"] = time.perf_counter() - self._start
        return self.timing
