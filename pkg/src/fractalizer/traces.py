"""Parsing, validation and preprocessing of API-call trace files.

Two on-disk formats are supported (see docs/formats.md): JSONL with one
object per sample (keys: id, label, family, calls) and a 4-column CSV
whose call sequence is joined by ';'. Call tokens are anonymized API
identifiers of the form ``L<digits>``.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

API_ID_RE = re.compile(r"^L[0-9]+$")

_FORMATS = ("jsonl", "csv")


class Label(str, Enum):
    MALWARE = "malware"
    GOODWARE = "goodware"
    UNKNOWN = "unknown"


class IngestError(Exception):
    """Base class for trace ingestion failures."""


class FormatError(IngestError):
    """A malformed record; carries the 1-based line number and a reason."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class EmptyInputError(IngestError):
    """A trace file yielded zero valid records."""


@dataclass(frozen=True)
class ApiTrace:
    """One sample: an ordered API-call sequence plus label metadata."""

    sample_id: str
    label: Label
    family: str | None
    calls: tuple[str, ...]


@dataclass(frozen=True)
class PreprocessReport:
    input: int
    duplicates_removed: int
    too_short_removed: int
    kept: int


def detect_format(path: Path) -> str:
    suffix = path.suffix.lower().lstrip(".")
    if suffix in _FORMATS:
        return suffix
    raise ValueError(f"cannot infer trace format from {path.name!r}; pass format explicitly")


def _parse_label(raw: object, line_no: int) -> Label:
    if raw is None or raw == "":
        return Label.UNKNOWN
    try:
        return Label(str(raw))
    except ValueError:
        raise FormatError(line_no, f"unknown label {raw!r}") from None


def _parse_calls(raw: Iterable[object], line_no: int) -> tuple[str, ...]:
    calls = tuple(str(c) for c in raw)
    if not calls:
        raise FormatError(line_no, "empty call sequence")
    for token in calls:
        if not API_ID_RE.match(token):
            raise FormatError(line_no, f"invalid API token {token!r}")
    return calls


def _record_from_json(line_no: int, line: str) -> ApiTrace:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise FormatError(line_no, f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise FormatError(line_no, "record is not a JSON object")
    if "id" not in obj:
        raise FormatError(line_no, "missing 'id'")
    if "calls" not in obj:
        raise FormatError(line_no, "missing 'calls'")
    if not isinstance(obj["calls"], list):
        raise FormatError(line_no, "'calls' is not a list")
    family = obj.get("family")
    return ApiTrace(
        sample_id=str(obj["id"]),
        label=_parse_label(obj.get("label"), line_no),
        family=str(family) if family not in (None, "") else None,
        calls=_parse_calls(obj["calls"], line_no),
    )


def _record_from_csv(line_no: int, line: str) -> ApiTrace:
    row = next(csv.reader(io.StringIO(line)))
    if len(row) != 4:
        raise FormatError(line_no, f"expected 4 CSV columns, got {len(row)}")
    sample_id, label, family, joined = row
    if not joined:
        raise FormatError(line_no, "empty call sequence")
    return ApiTrace(
        sample_id=sample_id,
        label=_parse_label(label, line_no),
        family=family or None,
        calls=_parse_calls(joined.split(";"), line_no),
    )


def _iter_records(path: Path, fmt: str) -> Iterator[tuple[int, ApiTrace | FormatError]]:
    """Yield (line_no, trace-or-error) for every non-blank line of *path*."""
    parse = _record_from_json if fmt == "jsonl" else _record_from_csv
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield line_no, parse(line_no, line)
            except FormatError as err:
                yield line_no, err


def parse_trace_file(path: str | Path, fmt: str | None = None) -> list[ApiTrace]:
    """Parse one trace file, raising on the first malformed record.

    Raises FormatError for a malformed record (including a duplicated
    sample id within the file) and EmptyInputError when the file holds
    zero valid records. I/O problems surface as OSError.
    """
    path = Path(path)
    fmt = fmt or detect_format(path)
    if fmt not in _FORMATS:
        raise ValueError(f"unsupported format {fmt!r}")
    traces: list[ApiTrace] = []
    seen_ids: set[str] = set()
    for line_no, record in _iter_records(path, fmt):
        if isinstance(record, FormatError):
            raise record
        if record.sample_id in seen_ids:
            raise FormatError(line_no, f"duplicate sample id {record.sample_id!r}")
        seen_ids.add(record.sample_id)
        traces.append(record)
    if not traces:
        raise EmptyInputError(f"{path}: no valid records")
    return traces


def validate_trace_file(
    path: str | Path, fmt: str | None = None
) -> tuple[list[ApiTrace], list[FormatError]]:
    """Lenient scan for the `ingest` report: collect both traces and problems."""
    path = Path(path)
    fmt = fmt or detect_format(path)
    traces: list[ApiTrace] = []
    problems: list[FormatError] = []
    seen_ids: set[str] = set()
    for line_no, record in _iter_records(path, fmt):
        if isinstance(record, FormatError):
            problems.append(record)
        elif record.sample_id in seen_ids:
            problems.append(FormatError(line_no, f"duplicate sample id {record.sample_id!r}"))
        else:
            seen_ids.add(record.sample_id)
            traces.append(record)
    return traces, problems


def trace_to_json_line(trace: ApiTrace) -> str:
    obj = {
        "id": trace.sample_id,
        "label": trace.label.value,
        "family": trace.family,
        "calls": list(trace.calls),
    }
    return json.dumps(obj, separators=(",", ":"))


def trace_to_csv_line(trace: ApiTrace) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="").writerow(
        [trace.sample_id, trace.label.value, trace.family or "", ";".join(trace.calls)]
    )
    return buf.getvalue()


def write_trace_file(traces: Iterable[ApiTrace], path: str | Path, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = fmt or detect_format(path)
    to_line = trace_to_json_line if fmt == "jsonl" else trace_to_csv_line
    with open(path, "w", encoding="utf-8") as handle:
        for trace in traces:
            handle.write(to_line(trace) + "\n")


def preprocess(
    traces: list[ApiTrace], min_len: int = 2
) -> tuple[list[ApiTrace], PreprocessReport]:
    """Drop exact-duplicate call sequences (first occurrence wins), then
    traces shorter than *min_len* calls.

    Only byte-identical sequences count as duplicates; same-family traces
    of different lengths are all kept. Counts always satisfy
    input = kept + duplicates_removed + too_short_removed.
    """
    if min_len < 1:
        raise ValueError("min_len must be >= 1")
    seen: set[tuple[str, ...]] = set()
    deduped: list[ApiTrace] = []
    duplicates = 0
    for trace in traces:
        if trace.calls in seen:
            duplicates += 1
        else:
            seen.add(trace.calls)
            deduped.append(trace)
    kept = [t for t in deduped if len(t.calls) >= min_len]
    too_short = len(deduped) - len(kept)
    report = PreprocessReport(
        input=len(traces),
        duplicates_removed=duplicates,
        too_short_removed=too_short,
        kept=len(kept),
    )
    return kept, report
