"""Exact median rankings by branch and bound over weak orders."""

from __future__ import annotations

import enum
import time
from typing import Optional

import numpy as np

from . import kernels
from .ranking import (
    REAL_TOL,
    CombinedInput,
    Ranking,
    SizeLimitError,
    SolutionSet,
    canonicalize,
    make_solution_set,
)

DEFAULT_MAX_OBJECTS = 20


class Branch(enum.Enum):
    AHEAD = "ahead"
    TIED = "tied"
    BEHIND = "behind"


def branch_penalty(c_ij: float, c_ji: float, branch: Branch) -> float:
    """Incremental penalty of putting object i ahead of, tied with or behind j.

    Half of (|c_ij| + |c_ji|) minus the score the branch earns on the pair.
    Agrees with the nine strict-sign cases of the Emond-Mason table and
    extends them to zero entries.
    """
    if branch is Branch.AHEAD:
        earned = c_ij - c_ji
    elif branch is Branch.TIED:
        earned = c_ij + c_ji
    else:
        earned = c_ji - c_ij
    return ((abs(c_ij) + abs(c_ji)) - earned) / 2


def pair_penalties(c: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised ``branch_penalty`` for every ordered pair, as float64."""
    c = np.asarray(c, dtype=np.float64)
    ct = c.T
    total = np.abs(c) + np.abs(ct)
    pa = (total - (c - ct)) / 2
    pt = (total - (c + ct)) / 2
    pb = (total - (ct - c)) / 2
    for p in (pa, pt, pb):
        np.fill_diagonal(p, 0.0)
    return pa, pt, pb


def candidate_pair_penalty(r: Ranking, ci: CombinedInput) -> float:
    """Sum of branch penalties over all unordered pairs of a complete candidate."""
    arr = (r.reindex(ci.labels) if r.labels != ci.labels else r).as_array()
    if np.any(arr == 0):
        raise ValueError("candidate must be complete")
    pa, pt, pb = pair_penalties(ci.c)
    iu, ju = np.triu_indices(ci.m, 1)
    a, b = arr[iu], arr[ju]
    vals = np.where(a < b, pa[iu, ju], np.where(a == b, pt[iu, ju], pb[iu, ju]))
    return float(vals.sum())


def insertion_order(initial: Ranking) -> np.ndarray:
    """Objects sorted by the initial ranking; ties go by label position."""
    arr = initial.as_array()
    return np.lexsort((np.arange(arr.size), arr))


def bb_solve(
    ci: CombinedInput,
    initial: Optional[Ranking] = None,
    *,
    fidelity_init: bool = False,
    max_objects: int = DEFAULT_MAX_OBJECTS,
    backend: Optional[str] = None,
) -> SolutionSet:
    """All weak orders of minimum penalty for ``ci``.

    ``initial`` fixes the insertion order and the starting bound. When it is
    omitted the best QUICK result is used, or the raw initial Q ranking when
    ``fidelity_init`` is set. The result does not depend on the start; only
    the running time does.
    """
    from .heuristics import initial_q, quick_median

    m = ci.m
    if m < 2:
        raise ValueError("need at least two objects")
    if m > max_objects:
        raise SizeLimitError(f"{m} objects exceeds the branch-and-bound cap of {max_objects}")
    t0 = time.perf_counter()
    if initial is None:
        initial = initial_q(ci) if fidelity_init else quick_median(ci).candidate
    if initial.labels != ci.labels:
        initial = initial.reindex(ci.labels)
    if not initial.is_complete:
        raise ValueError("initial ranking must be complete")
    order = insertion_order(initial)
    c = ci.c[np.ix_(order, order)]
    pa, pt, pb = pair_penalties(c)
    incumbent = candidate_pair_penalty(initial, ci)
    tol = 0.0 if ci.exact else REAL_TOL * max(1.0, ci.bound)
    impl = kernels.backend_module(backend) if backend else kernels
    pool, _, nodes = impl.bb_search(pa, pt, pb, float(incumbent), float(tol))
    elapsed = (time.perf_counter() - t0) * 1000.0
    if pool.shape[0] == 0:
        raise RuntimeError("search returned no leaf; the incumbent bound is inconsistent")
    sols = []
    for row in pool:
        ranks = np.empty(m, dtype=np.int64)
        ranks[order] = row + 1
        sols.append(canonicalize(Ranking.from_array(ci.labels, ranks)))
    return make_solution_set(sols, ci, "bb", elapsed_ms=elapsed, extra={"nodes": int(nodes)})

