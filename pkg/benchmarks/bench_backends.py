"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_backends.py [--repeat 5] [--bb-m 8]

QUICK is timed on the bundled 15-object fixture from many random starts.
Branch-and-bound is timed on the first --bb-m objects of the same fixture,
since the numpy search is too slow for all fifteen. Both backends are
checked to return the same answers before any timing is printed.
"""

from __future__ import annotations

import argparse
import statistics
import time

from kemedian.bb import bb_solve
from kemedian.heuristics import quick, random_starts
from kemedian.io import load_emond_mason
from kemedian.ranking import RankingDataset, combined_input

BACKENDS = ("numba", "numpy")


def timed(fn, repeat):
    fn()  # warm-up, includes JIT compilation for numba
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def leading_objects(d, m):
    ranks = d.ranks[:, :m]
    keep = (ranks > 0).any(axis=1)
    return RankingDataset(d.labels[:m], ranks[keep], d.weights[keep])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--starts", type=int, default=50)
    ap.add_argument("--bb-m", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    data = load_emond_mason()
    em = combined_input(data)
    starts = random_starts(em, args.starts + 1, args.seed)
    bb_ci = combined_input(leading_objects(data, args.bb_m))

    for s in starts[:5]:
        a, b = (quick(em, s, backend=k).candidate for k in BACKENDS)
        assert a == b, "QUICK backends disagree"
    ref = {k: bb_solve(bb_ci, backend=k) for k in BACKENDS}
    assert ref["numba"].keys() == ref["numpy"].keys(), "BB backends disagree"

    rows = []
    for k in BACKENDS:
        tq = timed(lambda: [quick(em, s, backend=k) for s in starts], args.repeat)
        tb = timed(lambda: bb_solve(bb_ci, backend=k), args.repeat)
        rows.append((k, tq, tb))

    nodes = ref["numba"].extra["nodes"]
    print(f"quick: {len(starts)} starts on m={em.m};  bb: m={bb_ci.m}, {nodes} nodes")
    print(f"{'backend':8s} {'quick (s)':>10s} {'bb (s)':>10s}")
    for k, tq, tb in rows:
        print(f"{k:8s} {tq:10.4f} {tb:10.4f}")
    (_, q0, b0), (_, q1, b1) = rows
    print(f"{'speedup':8s} {q1 / q0:9.1f}x {b1 / b0:9.1f}x")


if __name__ == "__main__":
    main()
