"""Commit extraction from git repositories.

Walks the full ancestry of HEAD (all parents, not first-parent only),
excludes merge commits, applies a cutoff date, and computes both output
measures per commit: the number of modified files and the line-level
edit distance over non-binary files.

Uses the git CLI directly: one `rev-list` walk for metadata, one
`diff-tree` per commit for the changed files (with rename detection, so
a pure rename costs 0), and a persistent `cat-file --batch` process for
blob contents.

Attribution uses the author identity, so timestamps are author
timestamps as well.
"""

from __future__ import annotations

import logging
import subprocess
import tempfile
from datetime import date, datetime, timezone
from pathlib import Path

from scalemine.distance import commit_edit_distance
from scalemine.errors import MiningError
from scalemine.records import (
    UNKNOWN_AUTHOR,
    CommitRecord,
    FileEdit,
    MiningReport,
    day_end_instant,
    normalize_email,
    record_sort_key,
)

logger = logging.getLogger(__name__)

_FIELD_SEP = "\x1f"
_NULL_SHA_PREFIX = "0000000"
_BINARY_SNIFF_BYTES = 8000
_GITLINK_MODE = "160000"


def _run_git(repo: Path, *args: str) -> bytes:
    proc = subprocess.run(
        ["git", "-C", str(repo), *args],
        capture_output=True,
        timeout=600,
    )
    if proc.returncode != 0:
        stderr = proc.stderr.decode("utf-8", errors="replace").strip()
        raise MiningError(f"git {args[0]} failed in {repo}: {stderr}")
    return proc.stdout


class _BlobReader:
    """Persistent `git cat-file --batch` process for blob lookups."""

    def __init__(self, repo: Path):
        self._proc = subprocess.Popen(
            ["git", "-C", str(repo), "cat-file", "--batch"],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
        )

    def read(self, sha: str) -> bytes | None:
        """Blob content, or None when the object is missing."""
        assert self._proc.stdin is not None and self._proc.stdout is not None
        self._proc.stdin.write(sha.encode("ascii") + b"\n")
        self._proc.stdin.flush()
        header = self._proc.stdout.readline()
        if not header:
            raise MiningError("git cat-file terminated unexpectedly")
        parts = header.split()
        if len(parts) < 3 or parts[1] != b"blob":
            # "<sha> missing" or a non-blob object
            return None
        size = int(parts[2])
        body = self._proc.stdout.read(size + 1)  # content + trailing newline
        return body[:size]

    def close(self) -> None:
        if self._proc.stdin:
            self._proc.stdin.close()
        self._proc.wait(timeout=30)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def _is_binary(data: bytes) -> bool:
    # Standard git heuristic: NUL byte within the first 8000 bytes.
    return b"\x00" in data[:_BINARY_SNIFF_BYTES]


def _decode(data: bytes) -> str:
    return data.decode("utf-8", errors="replace")


def _parse_diff_tree(output: bytes) -> list[tuple[str, str, str]]:
    """Parse `diff-tree -r -M -z` output into (src_sha, dst_sha, path).

    Rename entries report the post-commit path. Submodule pointer
    changes (gitlink mode) are skipped.
    """
    tokens = output.split(b"\x00")
    edits: list[tuple[str, str, str]] = []
    i = 0
    while i < len(tokens):
        meta = tokens[i]
        if not meta.startswith(b":"):
            i += 1
            continue
        fields = meta[1:].decode("utf-8", errors="replace").split(" ")
        if len(fields) < 5:
            i += 1
            continue
        src_mode, dst_mode, src_sha, dst_sha, status = fields[:5]
        two_paths = status[:1] in ("R", "C")
        path_count = 2 if two_paths else 1
        paths = [
            _decode(tokens[i + 1 + k]) for k in range(path_count) if i + 1 + k < len(tokens)
        ]
        i += 1 + path_count
        if _GITLINK_MODE in (src_mode, dst_mode):
            continue
        if not paths:
            continue
        path = paths[-1]  # post-commit path for renames/copies
        edits.append((src_sha, dst_sha, path))
    return edits


def _build_file_edits(
    repo: Path, commit_id: str, blobs: _BlobReader, report: MiningReport
) -> tuple[FileEdit, ...]:
    output = _run_git(
        repo, "diff-tree", "-r", "-M", "--root", "--no-commit-id", "-z", commit_id
    )
    edits: list[FileEdit] = []
    for src_sha, dst_sha, path in _parse_diff_tree(output):
        before = b"" if src_sha.startswith(_NULL_SHA_PREFIX) else blobs.read(src_sha)
        after = b"" if dst_sha.startswith(_NULL_SHA_PREFIX) else blobs.read(dst_sha)
        if before is None or after is None or _is_binary(before) or _is_binary(after):
            report.binary_edits_skipped += 1
            edits.append(FileEdit(path=path, is_binary=True, levenshtein_distance=0))
            continue
        dist = commit_edit_distance(_decode(before), _decode(after))
        edits.append(FileEdit(path=path, is_binary=False, levenshtein_distance=dist))
    edits.sort(key=lambda e: e.path)
    return tuple(edits)


def _commit_metadata(repo: Path) -> list[tuple[str, bool, int, str]]:
    """(commit_id, is_merge, author_unix_time, author_email) in history order.

    History order is `rev-list --reverse` (parents before children);
    out-of-order author dates are detected against this order.
    Unparsable entries are returned with a negative timestamp marker.
    """
    fmt = f"%H{_FIELD_SEP}%P{_FIELD_SEP}%at{_FIELD_SEP}%ae"
    out = _run_git(repo, "rev-list", "--reverse", f"--format={fmt}", "HEAD")
    rows: list[tuple[str, bool, int, str]] = []
    for raw in out.decode("utf-8", errors="replace").splitlines():
        if raw.startswith("commit ") or not raw:
            continue
        parts = raw.split(_FIELD_SEP)
        if len(parts) != 4:
            rows.append(("", False, -1, ""))
            continue
        commit_id, parents, at, email = parts
        try:
            unix = int(at)
        except ValueError:
            rows.append((commit_id, False, -1, ""))
            continue
        rows.append((commit_id, len(parents.split()) > 1, unix, email))
    return rows


def _head_exists(repo: Path) -> bool:
    proc = subprocess.run(
        ["git", "-C", str(repo), "rev-parse", "--verify", "--quiet", "HEAD"],
        capture_output=True,
        timeout=60,
    )
    return proc.returncode == 0


def extract_commits(
    repo: str | Path,
    cutoff: date | datetime,
    project: str | None = None,
) -> tuple[list[CommitRecord], MiningReport]:
    """Mine a local repository into a cleaned, ordered record stream.

    Records are sorted ascending by author timestamp (ties by commit
    hash); merge commits and commits after the cutoff are excluded and
    counted. The cutoff date is inclusive of its whole day.
    """
    repo_path = Path(repo)
    probe = subprocess.run(
        ["git", "-C", str(repo_path), "rev-parse", "--git-dir"],
        capture_output=True,
        timeout=60,
    )
    if probe.returncode != 0:
        raise MiningError(f"not a readable git repository: {repo}")

    if isinstance(cutoff, datetime):
        if cutoff.tzinfo is None:
            raise ValueError("cutoff datetime must be timezone-aware")
        cutoff_instant = cutoff.astimezone(timezone.utc)
        cutoff_label = cutoff_instant.date().isoformat()
    else:
        cutoff_instant = day_end_instant(cutoff)
        cutoff_label = cutoff.isoformat()

    name = project or repo_path.resolve().name
    report = MiningReport(project=name, cutoff=cutoff_label)
    if not _head_exists(repo_path):
        logger.warning("repository %s has no commits", repo_path)
        return [], report

    records: list[CommitRecord] = []
    max_emitted_unix: int | None = None
    with _BlobReader(repo_path) as blobs:
        for commit_id, is_merge, unix, email in _commit_metadata(repo_path):
            if unix < 0:
                report.unparsable_commits += 1
                continue
            ts = datetime.fromtimestamp(unix, tz=timezone.utc)
            if ts >= cutoff_instant:
                report.cutoff_excluded += 1
                continue
            report.commits_total += 1
            if is_merge:
                # Merge commits contribute nothing: no file edits, no
                # team membership.
                report.merges_excluded += 1
                continue
            # A commit dated before an already-emitted commit gets
            # re-sorted below; count it.
            if max_emitted_unix is not None and unix < max_emitted_unix:
                report.out_of_order_commits_reordered += 1
            max_emitted_unix = max(max_emitted_unix or unix, unix)
            author = normalize_email(email)
            if not author:
                report.empty_identity_commits += 1
                author = UNKNOWN_AUTHOR
            records.append(
                CommitRecord(
                    commit_id=commit_id,
                    author_email=author,
                    timestamp=ts,
                    file_edits=_build_file_edits(repo_path, commit_id, blobs, report),
                    is_merge=False,
                )
            )
    records.sort(key=record_sort_key)
    return records, report


def mine_locator(
    locator: str,
    cutoff: date | datetime,
    project: str | None = None,
) -> tuple[list[CommitRecord], MiningReport]:
    """Mine a local path directly, or clone a remote URL into a
    temporary bare repository first."""
    path = Path(locator)
    if path.exists():
        return extract_commits(path, cutoff, project=project)
    with tempfile.TemporaryDirectory(prefix="scalemine-") as tmp:
        clone_dir = Path(tmp) / "repo.git"
        proc = subprocess.run(
            ["git", "clone", "--bare", "--quiet", locator, str(clone_dir)],
            capture_output=True,
            timeout=3600,
        )
        if proc.returncode != 0:
            stderr = proc.stderr.decode("utf-8", errors="replace").strip()
            raise MiningError(f"cannot clone {locator}: {stderr}")
        default_project = locator.rstrip("/").rsplit("/", 1)[-1].removesuffix(".git")
        return extract_commits(clone_dir, cutoff, project=project or default_project)
