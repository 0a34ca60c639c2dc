"""Edit-distance measures for commit content.

Two layers:

* `levenshtein` - character-level unit-cost edit distance. This is the
  hot kernel of repository mining; a compiled extension is used when
  available and a pure-Python fallback otherwise.
* `commit_edit_distance` - line-level distance between the before/after
  text of one file edit. Lines are aligned at minimal total cost, where
  substituting a line costs the character Levenshtein distance between
  the two lines and inserting or deleting a line costs its length in
  characters. Unchanged lines cost 0.

Line endings: lines are compared with their trailing newline characters
stripped ("\\r\\n" and "\\n" are equivalent), so distances do not depend
on the platform that produced the file.
"""

from __future__ import annotations

try:  # compiled kernel, optional
    from scalemine._kernels import BACKEND as _BACKEND
    from scalemine._kernels import levenshtein as _levenshtein
except ImportError:  # pragma: no cover - exercised via the fallback build
    from scalemine._pykernels import BACKEND as _BACKEND
    from scalemine._pykernels import levenshtein as _levenshtein


def backend_name() -> str:
    """Name of the active Levenshtein kernel: "c" or "python"."""
    return _BACKEND


def levenshtein(a: str, b: str) -> int:
    """Unit-cost insert/delete/substitute edit distance between strings."""
    return _levenshtein(a, b)


def split_lines(text: str) -> list[str]:
    """Split text into lines with trailing newline characters stripped.

    A trailing newline does not create an empty final line:
    "abc\\n" -> ["abc"], "" -> [].
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line[:-1] if line.endswith("\r") else line for line in lines]


def commit_edit_distance(before: str, after: str, _lev=None) -> int:
    """Line-level pairing distance between two versions of a text file.

    Aligns the two line sequences at minimal total cost (dynamic
    programming over lines): paired lines contribute their character
    Levenshtein distance, purely added or deleted lines contribute
    their character length. Symmetric and total on text inputs.
    """
    if before == after:
        return 0
    lev = _lev or _levenshtein
    la = split_lines(before)
    lb = split_lines(after)

    # Common leading/trailing lines pair at cost 0 in some optimal
    # alignment, so they can be stripped up front.
    lo = 0
    hi_a, hi_b = len(la), len(lb)
    while lo < hi_a and lo < hi_b and la[lo] == lb[lo]:
        lo += 1
    while hi_a > lo and hi_b > lo and la[hi_a - 1] == lb[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    la = la[lo:hi_a]
    lb = lb[lo:hi_b]
    if not la:
        return sum(len(line) for line in lb)
    if not lb:
        return sum(len(line) for line in la)

    # Repeated lines (blank lines, braces) make memoization worthwhile.
    memo: dict[tuple[str, str], int] = {}

    def line_cost(x: str, y: str) -> int:
        if x == y:
            return 0
        key = (x, y)
        cost = memo.get(key)
        if cost is None:
            cost = lev(x, y)
            memo[key] = cost
        return cost

    n = len(lb)
    prev = [0] * (n + 1)
    for j in range(1, n + 1):
        prev[j] = prev[j - 1] + len(lb[j - 1])
    cur = [0] * (n + 1)
    for line_a in la:
        del_a = len(line_a)
        cur[0] = prev[0] + del_a
        for j in range(1, n + 1):
            best = prev[j - 1] + line_cost(line_a, lb[j - 1])
            dele = prev[j] + del_a
            if dele < best:
                best = dele
            ins = cur[j - 1] + len(lb[j - 1])
            if ins < best:
                best = ins
            cur[j] = best
        prev, cur = cur, prev
    return prev[n]
