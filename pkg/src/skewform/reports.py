"""Check reports and their JSON-friendly serialization."""

from __future__ import annotations

import hashlib
import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

from .exact_linalg import RatMatrix, rat_str

HOLDS = "holds"
FAILS = "fails"
SKIPPED = "skipped-budget"
VERDICTS = (HOLDS, FAILS, SKIPPED)


def to_jsonable(x):
    """Exact values become strings; matrices become nested lists of strings."""
    if isinstance(x, RatMatrix):
        return [[rat_str(v) for v in row] for row in x.tolist()]
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    return rat_str(x)


def config_hash(config: dict) -> str:
    blob = json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class CheckReport:
    name: str
    family: str
    n: int
    verdict: str
    witness: dict | None = None
    timing_ms: float = 0.0
    config_hash: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == FAILS and self.witness is None:
            raise ValueError("a failing report needs a witness")

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def as_dict(self, timings: bool = True) -> dict:
        out = {"name": self.name, "family": self.family, "n": self.n, "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = to_jsonable(self.witness)
        if self.details:
            out["details"] = to_jsonable(self.details)
        if timings:
            out["timing_ms"] = round(self.timing_ms, 3)
        return out


@contextmanager
def stopwatch():
    """Yields a one-element list that receives the elapsed milliseconds."""
    box = [0.0]
    start = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = (time.perf_counter() - start) * 1000.0
