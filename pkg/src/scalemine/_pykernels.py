"""Pure-Python fallback for the hot distance kernel.

Used when the compiled `scalemine._kernels` extension is unavailable.
Must stay behaviour-identical to the Cython version; the test suite
asserts parity whenever both backends are importable.
"""

BACKEND = "python"


def levenshtein(a: str, b: str) -> int:
    """Classic unit-cost Levenshtein distance between two strings.

    Two-row dynamic programming with common prefix/suffix stripping.
    """
    if a == b:
        return 0
    # Strip common prefix and suffix; never changes the distance.
    lo = 0
    hi_a, hi_b = len(a), len(b)
    while lo < hi_a and lo < hi_b and a[lo] == b[lo]:
        lo += 1
    while hi_a > lo and hi_b > lo and a[hi_a - 1] == b[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    a = a[lo:hi_a]
    b = b[lo:hi_b]
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    n = len(b)
    prev = list(range(n + 1))
    cur = [0] * (n + 1)
    for i, ca in enumerate(a, start=1):
        cur[0] = i
        for j in range(1, n + 1):
            cost = prev[j - 1] if ca == b[j - 1] else prev[j - 1] + 1
            dele = prev[j] + 1
            if dele < cost:
                cost = dele
            ins = cur[j - 1] + 1
            if ins < cost:
                cost = ins
            cur[j] = cost
        prev, cur = cur, prev
    return prev[n]
