"""Compare the compiled and pure-Python distance kernels.

Runs seeded workloads through both backends and prints a timing table.
Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import random
import string
import time

from scalemine import _pykernels

try:
    from scalemine import _kernels
except ImportError:
    _kernels = None

from scalemine.distance import commit_edit_distance


def string_pairs(rng, count, length):
    alphabet = string.ascii_lowercase + string.digits + " "
    pairs = []
    for _ in range(count):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randint(length // 2, length)))
        # Mutate a copy so pairs resemble real diffs rather than noise.
        chars = list(a)
        for _ in range(rng.randint(0, max(1, length // 4))):
            op = rng.randint(0, 2)
            pos = rng.randrange(max(1, len(chars)))
            if op == 0 and chars:
                chars[pos % len(chars)] = rng.choice(alphabet)
            elif op == 1:
                chars.insert(pos, rng.choice(alphabet))
            elif chars:
                del chars[pos % len(chars)]
        pairs.append((a, "".join(chars)))
    return pairs


def file_pairs(rng, count, lines):
    pairs = []
    for _ in range(count):
        before = [
            f"line {i} " + "".join(rng.choice("abcdef") for _ in range(rng.randint(5, 40)))
            for i in range(lines)
        ]
        after = list(before)
        for _ in range(lines // 4):
            pos = rng.randrange(len(after))
            roll = rng.random()
            if roll < 0.4:
                after[pos] = after[pos] + " changed"
            elif roll < 0.7:
                after.insert(pos, "inserted " + str(pos))
            elif len(after) > 1:
                del after[pos]
        pairs.append(("\n".join(before) + "\n", "\n".join(after) + "\n"))
    return pairs


def bench(label, func, payload, repeats):
    best = min(
        timed(func, payload) for _ in range(repeats)
    )
    print(f"  {label:<28} {best:8.4f} s")
    return best


def timed(func, payload):
    t0 = time.perf_counter()
    func(payload)
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rng = random.Random(4242)
    short = string_pairs(rng, 2000, 24)
    long = string_pairs(rng, 100, 300)
    files = file_pairs(rng, 10, 80)

    backends = [("python", _pykernels.levenshtein)]
    if _kernels is not None:
        backends.append(("c", _kernels.levenshtein))
    else:
        print("compiled kernel unavailable; benchmarking pure Python only")

    for name, lev in backends:
        sample = lev("kitten", "sitting")
        assert sample == 3, f"{name} backend broken: {sample}"

    print("levenshtein, 2000 short pairs (len<=24):")
    for name, lev in backends:
        bench(name, lambda p, f=lev: [f(a, b) for a, b in p], short, args.repeats)
    print("levenshtein, 100 long pairs (len<=300):")
    for name, lev in backends:
        bench(name, lambda p, f=lev: [f(a, b) for a, b in p], long, args.repeats)
    print("commit_edit_distance, 10 file pairs (80 lines):")
    for name, lev in backends:
        bench(
            name,
            lambda p, f=lev: [commit_edit_distance(a, b, _lev=f) for a, b in p],
            files,
            args.repeats,
        )


if __name__ == "__main__":
    main()
