"""Result rows and their CSV / JSON renderings.

A row is exact (``num``/``den`` set), an estimate (``estimate`` and
``stderr`` set), a pass/fail check, or plain data carried in ``detail``.
The CSV columns are fixed and the JSON form holds the same fields per row.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

__all__ = ["COLUMNS", "ResultRow", "exact_row", "estimate_row", "check_row", "data_row",
           "render", "write_atomic"]

COLUMNS = ("experiment", "seed", "params", "kind", "num", "den", "float", "estimate", "stderr",
           "passed", "detail", "runtime_ms")


def _float_text(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def _jsonify(o: Any) -> Any:
    if isinstance(o, Fraction):
        return f"{o.numerator}/{o.denominator}"
    if isinstance(o, dict):
        return {str(k): _jsonify(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonify(v) for v in o]
    if hasattr(o, "item"):  # numpy scalars
        return o.item()
    return o


@dataclass
class ResultRow:
    experiment: str
    kind: str                       # exact | estimate | check | data
    params: dict = field(default_factory=dict)
    value: Fraction | None = None
    estimate: float | None = None
    stderr: float | None = None
    passed: bool | None = None
    detail: Any = None
    seed: int | None = None
    runtime_ms: float | None = None

    def __post_init__(self):
        if self.kind == "exact" and self.value is None:
            raise ValueError("exact rows need a rational value")
        if self.kind == "estimate" and (self.value is not None or self.estimate is None):
            raise ValueError("estimate rows carry estimate and stderr, never an exact value")

    def as_dict(self) -> dict:
        v = self.value
        return {
            "experiment": self.experiment,
            "seed": "" if self.seed is None else str(self.seed),
            "params": json.dumps(_jsonify(self.params), sort_keys=True, separators=(",", ":")),
            "kind": self.kind,
            "num": "" if v is None else str(v.numerator),
            "den": "" if v is None else str(v.denominator),
            "float": "" if v is None else _float_text(float(v)),
            "estimate": _float_text(self.estimate),
            "stderr": _float_text(self.stderr),
            "passed": "" if self.passed is None else str(bool(self.passed)).lower(),
            "detail": "" if self.detail is None else json.dumps(_jsonify(self.detail), sort_keys=True,
                                                                separators=(",", ":")),
            "runtime_ms": "" if self.runtime_ms is None else f"{self.runtime_ms:.3f}",
        }


def exact_row(experiment: str, value, params=None, passed=None, detail=None) -> ResultRow:
    return ResultRow(experiment, "exact", params or {}, value=Fraction(value), passed=passed, detail=detail)


def estimate_row(experiment: str, estimate: float, stderr: float, params=None, passed=None,
                 detail=None) -> ResultRow:
    return ResultRow(experiment, "estimate", params or {}, estimate=float(estimate),
                     stderr=float(stderr), passed=passed, detail=detail)


def check_row(experiment: str, passed: bool, params=None, detail=None) -> ResultRow:
    return ResultRow(experiment, "check", params or {}, passed=bool(passed), detail=detail)


def data_row(experiment: str, detail, params=None) -> ResultRow:
    return ResultRow(experiment, "data", params or {}, detail=detail)


def render(rows: Iterable[ResultRow], fmt: str) -> str:
    dicts = [r.as_dict() for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(dicts)
        return buf.getvalue()
    if fmt == "json":
        return json.dumps(dicts, indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_atomic(path: str, text: str) -> None:
    """Write through a temporary file in the same directory, then rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
