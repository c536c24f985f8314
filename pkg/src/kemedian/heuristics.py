"""QUICK and FAST heuristics for the median ranking problem.

QUICK walks the objects of a start ranking in order and moves each one to
the placement, relative to the objects already processed, with the lowest
total penalty. The other objects keep their current positions while an
object is being placed. Passes repeat from the result until nothing moves.
FAST runs QUICK from the initial Q ranking, its reverse and many random
permutations, and keeps every distinct candidate of the best objective.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .bb import pair_penalties
from .ranking import (
    CombinedInput,
    Number,
    Ranking,
    SolutionSet,
    average_tau_x,
    make_solution_set,
    objective_dot,
    reverse,
)

MAX_PASSES = 25
THREADS_ENV = "KEMEDIAN_THREADS"


@dataclass(frozen=True)
class HeuristicResult:
    candidate: Ranking
    penalty: Number
    avg_tau_x: float
    passes: int
    start: Ranking


def initial_q(ci: CombinedInput) -> Ranking:
    """Rank objects by how many pairwise CI comparisons they win.

    Every count starts at one. For each unordered pair the signs of the two
    CI cells decide who is credited: (+, -) credits i, (-, +) credits j and
    (+, +) credits both. Higher counts rank first and equal counts tie.
    """
    s = np.sign(ci.c)
    st = s.T
    wins = ((s == 1) & (st == -1)) | ((s == 1) & (st == 1))
    np.fill_diagonal(wins, False)
    counts = 1 + wins.sum(axis=1)
    ranks = counts.max() + 1 - counts
    return Ranking.from_array(ci.labels, ranks).canonical()


def _pens(ci: CombinedInput):
    return pair_penalties(ci.c)


def quick(
    ci: CombinedInput,
    start: Ranking,
    *,
    max_passes: int = MAX_PASSES,
    backend: Optional[str] = None,
    _pens_cache=None,
) -> HeuristicResult:
    if start.labels != ci.labels:
        start = start.reindex(ci.labels)
    if not start.is_complete:
        raise ValueError("QUICK needs a complete start ranking")
    if max_passes < 1:
        raise ValueError("max_passes must be at least 1")
    pa, pt, pb = _pens_cache if _pens_cache is not None else _pens(ci)
    impl = kernels.backend_module(backend) if backend else kernels
    ranks, passes = impl.quick_run(pa, pt, pb, start.as_array().astype(np.float64), max_passes)
    cand = Ranking.from_array(ci.labels, ranks)
    dot = objective_dot(cand, ci)
    return HeuristicResult(cand, ci.bound - dot, average_tau_x(dot, ci), int(passes), start.canonical())


def quick_median(ci: CombinedInput, *, backend: Optional[str] = None) -> HeuristicResult:
    """QUICK from the initial Q ranking and from its reverse; the better result wins.

    On equal penalty the run from Q is kept.
    """
    q = initial_q(ci)
    pens = _pens(ci)
    a = quick(ci, q, backend=backend, _pens_cache=pens)
    b = quick(ci, reverse(q), backend=backend, _pens_cache=pens)
    return b if b.penalty < a.penalty else a


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def random_starts(ci: CombinedInput, maxiter: int, seed: int) -> list[Ranking]:
    """Tie-free random starts for iterations 2..maxiter.

    Each iteration draws from its own stream spawned from ``seed``, so the
    start of iteration k does not depend on ``maxiter``.
    """
    children = np.random.SeedSequence(seed).spawn(max(0, maxiter - 1))
    starts = []
    for child in children:
        perm = np.random.default_rng(child).permutation(ci.m)
        ranks = np.empty(ci.m, dtype=np.int64)
        ranks[perm] = np.arange(1, ci.m + 1)
        starts.append(Ranking.from_array(ci.labels, ranks))
    return starts


def fast(
    ci: CombinedInput,
    maxiter: int = 100,
    seed: int = 0,
    *,
    threads: Optional[int] = None,
    backend: Optional[str] = None,
) -> SolutionSet:
    """Multi-start QUICK; returns every distinct best candidate found."""
    if maxiter < 1:
        raise ValueError("maxiter must be at least 1")
    threads = default_threads() if threads is None else max(1, int(threads))
    t0 = time.perf_counter()
    q = initial_q(ci)
    starts: list[Ranking] = [q, reverse(q)] + random_starts(ci, maxiter, seed)
    pens = _pens(ci)

    def run(start: Ranking) -> HeuristicResult:
        return quick(ci, start, backend=backend, _pens_cache=pens)

    if threads == 1:
        results = [run(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, starts))
    elapsed = (time.perf_counter() - t0) * 1000.0
    return make_solution_set(
        [r.candidate for r in results],
        ci,
        "fast",
        elapsed_ms=elapsed,
        iterations=maxiter,
        seed=seed,
        keep_best=True,
    )


def quick_solution_set(ci: CombinedInput, *, backend: Optional[str] = None) -> SolutionSet:
    t0 = time.perf_counter()
    res = quick_median(ci, backend=backend)
    elapsed = (time.perf_counter() - t0) * 1000.0
    return make_solution_set([res.candidate], ci, "quick", elapsed_ms=elapsed, extra={"passes": res.passes})
