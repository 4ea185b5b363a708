"""Check records, suite reports, and deterministic artifact writers.

Reports must be byte-identical across runs with the same scenario and seed,
so report.json holds no timestamps or timings; those live in meta.json.
JSON uses sorted keys and two-space indentation; CSV follows RFC 4180 with
CRLF line endings and floats printed with 17 significant digits, which is
enough to round-trip any double exactly.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Iterable, Sequence


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return fmt_float(value)
    return str(value)


@dataclass(frozen=True)
class CheckRecord:
    """One measured quantity compared against one bound."""

    name: str
    measured: float
    bound: float
    tolerance: float
    direction: str  # "le": measured <= bound + tol; "ge": measured >= bound - tol
    passed: bool
    worst_atom: int | None = None

    @classmethod
    def le(cls, name, measured, bound, tolerance, worst_atom=None) -> "CheckRecord":
        ok = float(measured) <= float(bound) + float(tolerance)
        return cls(name, float(measured), float(bound), float(tolerance), "le", ok, worst_atom)

    @classmethod
    def ge(cls, name, measured, bound, tolerance, worst_atom=None) -> "CheckRecord":
        ok = float(measured) >= float(bound) - float(tolerance)
        return cls(name, float(measured), float(bound), float(tolerance), "ge", ok, worst_atom)

    def to_json_dict(self) -> dict:
        out = {
            "name": self.name,
            "measured": self.measured,
            "bound": self.bound,
            "tolerance": self.tolerance,
            "direction": self.direction,
            "passed": self.passed,
        }
        if self.worst_atom is not None:
            out["worst_atom"] = int(self.worst_atom)
        return out


@dataclass
class SuiteReport:
    """Outcome of one suite: its records plus raw arrays for plots."""

    suite: str
    records: list[CheckRecord]
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_json_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "records": [r.to_json_dict() for r in self.records],
            "data": self.data,
        }


def report_payload(digest: str, seed: int, suites: Sequence[SuiteReport]) -> dict:
    return {
        "scenario_digest": digest,
        "seed": int(seed),
        "passed": all(s.passed for s in suites),
        "suites": [s.to_json_dict() for s in suites],
    }


def _atomic_write_bytes(path: str, blob: bytes) -> None:
    # Write-and-rename so a crashed run never leaves a truncated artifact.
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    _atomic_write_bytes(path, text.encode("utf-8"))


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    _atomic_write_bytes(path, buf.getvalue().encode("utf-8"))


def records_csv_rows(records: Sequence[CheckRecord]):
    for r in records:
        yield (
            r.name,
            r.measured,
            r.bound,
            r.tolerance,
            r.direction,
            "" if r.worst_atom is None else r.worst_atom,
            r.passed,
        )


RECORDS_CSV_HEADER = (
    "name", "measured", "bound", "tolerance", "direction", "worst_atom", "passed",
)
