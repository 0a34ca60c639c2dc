"""Commit record types and their JSON Lines persistence.

One record per mined, non-merge commit. The on-disk format is JSON
Lines with one object per line::

    {"commit": "<hash>", "author_email": "<id>",
     "timestamp": "2014-03-01T12:00:00Z",
     "files": [{"path": "a.py", "binary": false, "lev": 17}, ...]}

Lines are sorted ascending by timestamp, ties broken by commit hash, so
repeated mining runs over the same repository state produce identical
bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable

from scalemine.errors import RecordFormatError

UNKNOWN_AUTHOR = "unknown@invalid"


@dataclass(frozen=True)
class FileEdit:
    """One modified file within a commit.

    `levenshtein_distance` is 0 for binary files; those are excluded
    from the distance measure but still count as modified files.
    """

    path: str
    is_binary: bool
    levenshtein_distance: int

    def __post_init__(self):
        if self.levenshtein_distance < 0:
            raise ValueError("levenshtein_distance must be non-negative")


@dataclass(frozen=True)
class CommitRecord:
    """One mined commit with per-file edit distances."""

    commit_id: str
    author_email: str
    timestamp: datetime
    file_edits: tuple[FileEdit, ...] = ()
    is_merge: bool = False

    def __post_init__(self):
        if self.timestamp.tzinfo is None:
            raise ValueError("timestamp must be timezone-aware (UTC)")

    @property
    def file_edit_count(self) -> int:
        """Number of modified files, binary files included."""
        return len(self.file_edits)

    @property
    def total_edit_distance(self) -> int:
        """Summed Levenshtein distance over non-binary file edits."""
        return sum(e.levenshtein_distance for e in self.file_edits if not e.is_binary)


@dataclass
class MiningReport:
    """Counters from one mining run.

    `commits_total` covers the parseable commits at or before the
    cutoff and always equals emitted records plus `merges_excluded`.
    Commits past the cutoff and commits with unparsable metadata are
    counted separately.
    """

    project: str
    cutoff: str
    commits_total: int = 0
    merges_excluded: int = 0
    binary_edits_skipped: int = 0
    out_of_order_commits_reordered: int = 0
    cutoff_excluded: int = 0
    unparsable_commits: int = 0
    empty_identity_commits: int = 0

    def to_dict(self) -> dict:
        return {
            "project": self.project,
            "cutoff": self.cutoff,
            "commits_total": self.commits_total,
            "merges_excluded": self.merges_excluded,
            "binary_edits_skipped": self.binary_edits_skipped,
            "out_of_order_commits_reordered": self.out_of_order_commits_reordered,
            "cutoff_excluded": self.cutoff_excluded,
            "unparsable_commits": self.unparsable_commits,
            "empty_identity_commits": self.empty_identity_commits,
        }


def normalize_email(email: str) -> str:
    """Lower-case and trim an author email; empty results stay empty."""
    return email.strip().lower()


def format_timestamp(ts: datetime) -> str:
    """ISO-8601 UTC with a Z suffix, e.g. 2014-03-01T12:00:00Z."""
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 instant; must carry timezone information."""
    ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        raise ValueError(f"naive timestamp not allowed: {text!r}")
    return ts.astimezone(timezone.utc)


def day_end_instant(day: date) -> datetime:
    """Exclusive UTC instant just after the given calendar day.

    A cutoff date includes the whole cutoff day: commits stamped any
    time on that day survive the filter.
    """
    return datetime(day.year, day.month, day.day, tzinfo=timezone.utc) + timedelta(days=1)


def day_start_instant(day: date) -> datetime:
    """Inclusive UTC instant at the start of the given calendar day."""
    return datetime(day.year, day.month, day.day, tzinfo=timezone.utc)


def record_sort_key(record: CommitRecord) -> tuple[datetime, str]:
    return (record.timestamp, record.commit_id)


def record_to_json(record: CommitRecord) -> str:
    payload = {
        "commit": record.commit_id,
        "author_email": record.author_email,
        "timestamp": format_timestamp(record.timestamp),
        "files": [
            {"path": e.path, "binary": e.is_binary, "lev": e.levenshtein_distance}
            for e in record.file_edits
        ],
    }
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=True, sort_keys=False)


def persist_records(records: Iterable[CommitRecord], destination: str | Path) -> None:
    """Write records as sorted JSON Lines; byte-deterministic."""
    ordered = sorted(records, key=record_sort_key)
    path = Path(destination)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for record in ordered:
            fh.write(record_to_json(record))
            fh.write("\n")


def _parse_record_line(line: str, lineno: int) -> CommitRecord:
    def fail(msg: str):
        raise RecordFormatError(f"line {lineno}: {msg}")

    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        fail(f"invalid JSON ({exc.msg})")
    if not isinstance(obj, dict):
        fail("record must be a JSON object")
    for key in ("commit", "author_email", "timestamp", "files"):
        if key not in obj:
            fail(f"missing field {key!r}")
    if not isinstance(obj["commit"], str) or not obj["commit"]:
        fail("commit must be a non-empty string")
    if not isinstance(obj["author_email"], str) or not obj["author_email"]:
        fail("author_email must be a non-empty string")
    try:
        ts = parse_timestamp(obj["timestamp"])
    except (ValueError, TypeError):
        fail(f"bad timestamp {obj['timestamp']!r}")
    if not isinstance(obj["files"], list):
        fail("files must be an array")
    edits = []
    for entry in obj["files"]:
        if not isinstance(entry, dict):
            fail("file entry must be an object")
        for key in ("path", "binary", "lev"):
            if key not in entry:
                fail(f"file entry missing {key!r}")
        if not isinstance(entry["path"], str):
            fail("file path must be a string")
        if not isinstance(entry["binary"], bool):
            fail("file binary flag must be a boolean")
        lev = entry["lev"]
        if not isinstance(lev, int) or isinstance(lev, bool):
            fail("file lev must be an integer")
        if lev < 0:
            fail(f"negative edit distance {lev}")
        edits.append(FileEdit(entry["path"], entry["binary"], lev))
    return CommitRecord(
        commit_id=obj["commit"],
        author_email=obj["author_email"],
        timestamp=ts,
        file_edits=tuple(edits),
    )


def load_records(source: str | Path) -> list[CommitRecord]:
    """Load and validate a JSON Lines record file.

    Raises RecordFormatError naming the offending line on any schema or
    invariant violation, including out-of-order lines. An empty file
    yields an empty list.
    """
    path = Path(source)
    records: list[CommitRecord] = []
    prev_key: tuple[datetime, str] | None = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record = _parse_record_line(line, lineno)
            key = record_sort_key(record)
            if prev_key is not None and key < prev_key:
                raise RecordFormatError(
                    f"line {lineno}: records out of order "
                    f"({record.commit_id} before its predecessor)"
                )
            prev_key = key
            records.append(record)
    return records


def measure_value(record: CommitRecord, measure: str) -> float:
    """Output contribution of one commit under a named measure."""
    if measure == "file_edits":
        return float(record.file_edit_count)
    if measure == "levenshtein":
        return float(record.total_edit_distance)
    raise ValueError(f"unknown measure {measure!r}")
