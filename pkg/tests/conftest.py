"""Shared test helpers: a deterministic git repository builder and
synthetic commit-record factories.

Repository fixtures pin author and committer dates, names, and emails
through the environment so commit hashes are reproducible run to run.
"""

import itertools
import math
import os
import subprocess
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from scalemine.records import CommitRecord, FileEdit

T0 = datetime(2010, 1, 1, tzinfo=timezone.utc)

_ids = itertools.count(1)


def day(n, hours=0.0):
    """UTC instant n days (and fractional hours) after the fixture epoch."""
    return T0 + timedelta(days=n, hours=hours)


def make_record(ts, email="a@example.com", files=1, lev=1, commit_id=None,
                is_merge=False):
    """Synthetic CommitRecord.

    `files` is either a count (that many text files, each with edit
    distance `lev`) or an explicit list of FileEdit objects.
    """
    if isinstance(files, int):
        edits = tuple(
            FileEdit(path=f"f{i}.txt", is_binary=False, levenshtein_distance=lev)
            for i in range(files)
        )
    else:
        edits = tuple(files)
    cid = commit_id or f"{next(_ids):040x}"
    return CommitRecord(
        commit_id=cid,
        author_email=email,
        timestamp=ts,
        file_edits=edits,
        is_merge=is_merge,
    )


def sorted_records(records):
    return sorted(records, key=lambda r: (r.timestamp, r.commit_id))


class RepoBuilder:
    """Thin git wrapper producing byte-reproducible fixture histories."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._git("init", "-q", "-b", "main")
        self._git("config", "user.email", "builder@example.com")
        self._git("config", "user.name", "Builder")

    def _git(self, *args, env=None):
        full_env = dict(os.environ)
        full_env.setdefault("GIT_CONFIG_GLOBAL", os.devnull)
        full_env.setdefault("GIT_CONFIG_SYSTEM", os.devnull)
        if env:
            full_env.update(env)
        proc = subprocess.run(
            ["git", "-C", str(self.root), *args],
            env=full_env,
            capture_output=True,
        )
        if proc.returncode != 0:
            raise AssertionError(
                f"git {' '.join(args)} failed: {proc.stderr.decode(errors='replace')}"
            )
        return proc.stdout

    def write(self, path, content):
        p = self.root / path
        p.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(content, bytes):
            p.write_bytes(content)
        else:
            p.write_text(content, encoding="utf-8")

    def _date_env(self, ts, email, name):
        unix = int(ts.timestamp())
        stamp = f"@{unix} +0000"
        return {
            "GIT_AUTHOR_DATE": stamp,
            "GIT_COMMITTER_DATE": stamp,
            "GIT_AUTHOR_EMAIL": email,
            "GIT_AUTHOR_NAME": name,
            "GIT_COMMITTER_EMAIL": email,
            "GIT_COMMITTER_NAME": name,
        }

    def commit(self, ts, email="dev@example.com", name="Dev", files=None,
               delete=(), message="change"):
        for path, content in (files or {}).items():
            self.write(path, content)
        for path in delete:
            (self.root / path).unlink()
        self._git("add", "-A")
        self._git(
            "commit", "-q", "--allow-empty", "-m", message,
            env=self._date_env(ts, email, name),
        )
        return self.head()

    def move(self, ts, src, dst, email="dev@example.com", name="Dev",
             message="rename"):
        self._git("mv", src, dst)
        self._git("commit", "-q", "-m", message, env=self._date_env(ts, email, name))
        return self.head()

    def branch(self, name):
        self._git("checkout", "-q", "-b", name)

    def checkout(self, name):
        self._git("checkout", "-q", name)

    def merge(self, ts, other, email="dev@example.com", name="Dev",
              message="merge"):
        self._git(
            "merge", "-q", "--no-ff", "-m", message, other,
            env=self._date_env(ts, email, name),
        )
        return self.head()

    def raw_commit(self, ts, email="", name="Dev", message="raw"):
        """Hand-built commit object reusing the current tree.

        Bypasses git's ident validation, which is the only way to get
        an empty author email into a history.
        """
        parent = self.head()
        tree = self._git("rev-parse", f"{parent}^{{tree}}").decode().strip()
        ident = f"{name} <{email}> {int(ts.timestamp())} +0000"
        obj = (
            f"tree {tree}\nparent {parent}\nauthor {ident}\n"
            f"committer {ident}\n\n{message}\n"
        )
        proc = subprocess.run(
            ["git", "-C", str(self.root), "hash-object", "-t", "commit", "-w", "--stdin"],
            input=obj.encode(),
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr
        sha = proc.stdout.decode().strip()
        self._git("update-ref", "HEAD", sha)
        return sha

    def head(self):
        return self._git("rev-parse", "HEAD").decode().strip()


@pytest.fixture
def repo(tmp_path):
    return RepoBuilder(tmp_path / "repo")


def stepped_period_stream(n_flat_periods, scale=2, ratios=(3,)):
    """Commit stream with one collinear power-law period per entry of
    `ratios` (slope log2(ratio), tiny p) followed by n_flat_periods
    symmetric flat periods (slope exactly 0, p exactly 1).

    Each period holds three 5-day windows. Window teams are 1, 2 and 4
    authors; a collinear period with ratio r emits scale * r**j file
    edits in window j, the flat periods emit 6, 5, 6.
    """

    def window(day_idx, k_authors, total_files):
        first = total_files - (k_authors - 1)
        recs = [make_record(day(day_idx, hours=1), email="a0@x", files=first)]
        for i in range(1, k_authors):
            recs.append(make_record(day(day_idx, hours=1 + i), email=f"a{i}@x", files=1))
        return recs

    records = []
    for p, ratio in enumerate(ratios):
        for j, k in enumerate((1, 2, 4)):
            records.extend(window(250 * p + 5 * j, k, scale * ratio**j))
    for q in range(n_flat_periods):
        base_day = 250 * (len(ratios) + q)
        for j, (k, out) in enumerate([(1, 6), (2, 5), (4, 6)]):
            records.extend(window(base_day + 5 * j, k, out))
    return sorted_records(records)


def bulk_import_stream():
    """Commit stream with a huge single-author import on day 0 followed
    by ~55 weeks of steady growth where weekly output rises roughly as
    team_size**1.5. The import drags the whole-history slope negative;
    cutting the first 30 days leaves a positive slope.
    """
    records = [make_record(day(0), email="imp@x", files=1, lev=200000)]
    for week in range(1, 56):
        k = min(2 + week // 6, 8)
        per_author = max(1, round(40 * math.sqrt(k)))
        for i in range(k):
            records.append(
                make_record(
                    day(7 * week, hours=2 + i), email=f"dev{i}@x", files=1, lev=per_author
                )
            )
    return sorted_records(records)
