"""Compare the compiled and pure-Python kernel backends.

Run with ``python3 benchmarks/bench_kernels.py``. Each kernel is timed on
both backends with identical inputs and the results are checked for
equality before any timing is reported.
"""

from __future__ import annotations

import argparse
import random
import time
from fractions import Fraction

import numpy as np

from plausibility import _kernels_py as pure
from plausibility import kernels
from plausibility.exactlp import LPProblem, lp_solve


def _best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _random_relation(rng, n, density):
    weak = np.array([[rng.random() < density for _ in range(n)] for _ in range(n)])
    strict = weak & np.array([[rng.random() < 0.2 for _ in range(n)] for _ in range(n)])
    return weak, strict


def _lp(rng, m, n):
    rows = [([Fraction(rng.randint(-5, 9)) for _ in range(n)], "<=", Fraction(rng.randint(1, 20))) for _ in range(m)]
    return LPProblem([Fraction(rng.randint(0, 6)) for _ in range(n)], rows, "max")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=400, help="scope size for relation kernels")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    compiled = kernels.compiled
    if compiled is None:
        print("compiled backend not available; nothing to compare")
        return
    rng = random.Random(args.seed)
    n = args.size
    masks = [rng.getrandbits(20) for _ in range(n)]
    weak, strict = _random_relation(rng, n, 4.0 / n)
    values = [Fraction(rng.randint(0, 60), 60) for _ in range(n)]
    ints = [int(v * 60) for v in values]

    cases = [
        ("subset_matrix", lambda: compiled.subset_matrix(masks), lambda: pure.subset_matrix(masks)),
        ("closure", lambda: compiled.closure(weak, strict), lambda: pure.closure(weak, strict)),
        ("measure_relation", lambda: compiled.measure_relation(ints), lambda: pure.measure_relation(values)),
    ]
    print(f"{'kernel':<18}{'cython s':>12}{'python s':>12}{'speedup':>10}")
    for name, fast, slow in cases:
        tf, a = _best_of(fast, args.repeat)
        ts, b = _best_of(slow, args.repeat)
        same = all(np.array_equal(x, y) for x, y in zip(a, b)) if isinstance(a, tuple) else np.array_equal(a, b)
        if not same:
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<18}{tf:>12.4f}{ts:>12.4f}{ts / tf:>10.1f}")

    problems = [_lp(rng, 30, 30) for _ in range(5)]
    timings = {}
    results = {}
    for label, impl in (("cython", compiled.pivot), ("python", pure.pivot)):
        kernels.pivot = impl
        t, res = _best_of(lambda: [lp_solve(p) for p in problems], args.repeat)
        timings[label], results[label] = t, [(r.status, r.objective) for r in res]
    if results["cython"] != results["python"]:
        raise SystemExit("lp_solve: backends disagree")
    print(f"{'lp_solve (pivot)':<18}{timings['cython']:>12.4f}{timings['python']:>12.4f}"
          f"{timings['python'] / timings['cython']:>10.1f}")


if __name__ == "__main__":
    main()
