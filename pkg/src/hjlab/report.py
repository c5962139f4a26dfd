"""Machine-readable run reports.

Reports are JSON with a fixed field order.  Rationals are written as
``"num/den"`` strings and certified intervals as ``[lo, hi]`` decimal
strings rounded outward, so every value survives a round trip exactly.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .density import frac_str
from .interval import IntervalValue

SCHEMA = "hjlab-report/1"


def jsonable(value: Any) -> Any:
    """Convert exact and numpy values to plain JSON types."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, Fraction):
        return frac_str(value)
    if isinstance(value, IntervalValue):
        return value.to_strings()
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return jsonable(value.to_dict())
    raise TypeError(f"cannot serialize {type(value).__name__}")


@dataclass
class CheckRecord:
    name: str
    passed: bool
    values: dict
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "values": jsonable(self.values),
            "elapsed": round(self.elapsed, 6),
        }


@dataclass
class SuiteReport:
    suite: str
    version: str
    config: dict
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def run(self, name: str, fn: Callable[[], tuple[bool, dict]]) -> CheckRecord:
        """Time ``fn`` and append its result; ``elapsed`` keys move out of the values."""
        t0 = time.perf_counter()
        ok, values = fn()
        values = dict(values)
        values.pop("elapsed", None)
        rec = CheckRecord(name, bool(ok), values, time.perf_counter() - t0)
        self.records.append(rec)
        return rec

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "suite": self.suite,
            "version": self.version,
            "config": jsonable(self.config),
            "overall": "pass" if self.passed else "fail",
            "records": [r.to_dict() for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteReport":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unknown report schema {data.get('schema')!r}")
        rep = cls(data["suite"], data["version"], data["config"])
        for r in data["records"]:
            if r["status"] not in ("pass", "fail"):
                raise ValueError(f"bad status {r['status']!r} in record {r['name']!r}")
            rep.records.append(CheckRecord(r["name"], r["status"] == "pass", r["values"], r["elapsed"]))
        if data["overall"] != ("pass" if rep.passed else "fail"):
            raise ValueError("overall status disagrees with the records")
        return rep


def emit_report(report: SuiteReport, path: str | Path | None) -> None:
    """Write the report to ``path``, or to stdout when ``path`` is ``None`` or ``"-"``."""
    text = report.to_json()
    if path is None or str(path) == "-":
        print(text, end="")
        return
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise OSError(f"cannot write report to {path}: {e.strerror or e}") from e


def without_elapsed(data: Any) -> Any:
    """Drop every ``elapsed`` field, for comparing two runs."""
    if isinstance(data, dict):
        return {k: without_elapsed(v) for k, v in data.items() if k != "elapsed"}
    if isinstance(data, list):
        return [without_elapsed(v) for v in data]
    return data
