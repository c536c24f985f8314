"""Rankings, score matrices, distances and the combined input matrix.

A ranking is stored as a vector of positive integer ranks, one per object,
where ``MISSING`` marks an unranked object. Lower rank means preferred;
equal ranks mean a tie. Only the relative order of rank values is read.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

import numpy as np

MISSING = None

# internal array encoding of an unranked object
_MISSING_CODE = 0

REAL_TOL = 1e-9

Number = Union[int, float]


class SizeLimitError(ValueError):
    """Raised when a problem has more objects than an operation accepts."""


class Convention(enum.Enum):
    """Which score matrix definition to use for tied pairs."""

    EMOND_MASON = "emond_mason"
    KENDALL = "kendall"


def _dense(values: np.ndarray) -> np.ndarray:
    """Dense ranks 1..g of a positive vector, keeping zeros (missing) as zero."""
    out = np.zeros(values.shape, dtype=np.int64)
    present = values > 0
    if present.any():
        _, inv = np.unique(values[present], return_inverse=True)
        out[present] = inv + 1
    return out


@dataclass(frozen=True)
class Ranking:
    """One judge's preference over ``labels``, possibly tied or partial."""

    labels: tuple[str, ...]
    ranks: tuple[Optional[int], ...]

    def __post_init__(self) -> None:
        labels = tuple(str(x) for x in self.labels)
        ranks = tuple(None if r is None else r for r in self.ranks)
        if len(labels) != len(ranks):
            raise ValueError(f"{len(labels)} labels but {len(ranks)} ranks")
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate labels")
        clean = []
        for lab, r in zip(labels, ranks):
            if r is None:
                clean.append(None)
                continue
            if isinstance(r, (bool, np.bool_)) or not float(r).is_integer() or r < 1:
                raise ValueError(f"rank of {lab!r} must be a positive integer, got {r!r}")
            clean.append(int(r))
        if all(r is None for r in clean):
            raise ValueError("a ranking must rank at least one object")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ranks", tuple(clean))

    @classmethod
    def from_array(cls, labels: Sequence[str], arr: np.ndarray) -> "Ranking":
        """Build from an integer array where 0 encodes MISSING."""
        return cls(tuple(labels), tuple(None if v == _MISSING_CODE else int(v) for v in arr))

    @classmethod
    def from_ordering(cls, text: str, labels: Optional[Sequence[str]] = None) -> "Ranking":
        """Parse an ordering such as ``"D L (E-M) A"``.

        Parenthesised, dash-separated groups are ties. Objects in ``labels``
        that do not appear in the ordering are MISSING.
        """
        groups = []
        for grp, single in re.findall(r"\(([^)]*)\)|([^\s()]+)", text):
            members = [g.strip() for g in grp.split("-")] if grp else [single]
            groups.append([g for g in members if g])
        seen = [lab for g in groups for lab in g]
        if len(set(seen)) != len(seen):
            raise ValueError(f"object repeated in ordering {text!r}")
        if labels is None:
            labels = seen
        pos = {lab: i + 1 for i, g in enumerate(groups) for lab in g}
        unknown = set(pos) - set(labels)
        if unknown:
            raise ValueError(f"unknown objects in ordering: {sorted(unknown)}")
        return cls(tuple(labels), tuple(pos.get(lab) for lab in labels))

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def is_complete(self) -> bool:
        return all(r is not None for r in self.ranks)

    @property
    def has_ties(self) -> bool:
        present = [r for r in self.ranks if r is not None]
        return len(set(present)) < len(present)

    def as_array(self) -> np.ndarray:
        return np.array([_MISSING_CODE if r is None else r for r in self.ranks], dtype=np.int64)

    def canonical(self) -> "Ranking":
        return canonicalize(self)

    def key(self) -> tuple[int, ...]:
        """Sort key: the dense rank sequence with MISSING as 0."""
        return tuple(int(v) for v in _dense(self.as_array()))

    def to_ordering(self) -> str:
        """Render as ``"B (A-C) D"``; MISSING objects are omitted."""
        arr = _dense(self.as_array())
        parts = []
        for g in range(1, int(arr.max()) + 1):
            members = [lab for lab, v in zip(self.labels, arr) if v == g]
            parts.append(members[0] if len(members) == 1 else "(" + "-".join(members) + ")")
        return " ".join(parts)

    def reindex(self, labels: Sequence[str]) -> "Ranking":
        """Same ranking with objects listed in the order of ``labels``."""
        if set(labels) != set(self.labels) or len(labels) != len(self.labels):
            raise ValueError("label sets differ")
        lookup = dict(zip(self.labels, self.ranks))
        return Ranking(tuple(labels), tuple(lookup[lab] for lab in labels))

    def __str__(self) -> str:
        return " ".join("-" if r is None else str(r) for r in self.ranks)


def canonicalize(r: Ranking) -> Ranking:
    """Relabel ranks to consecutive integers 1..g, keeping order and MISSING."""
    return Ranking.from_array(r.labels, _dense(r.as_array()))


def reverse(r: Ranking) -> Ranking:
    if not r.is_complete:
        raise ValueError("cannot reverse a ranking with MISSING objects")
    arr = _dense(r.as_array())
    return Ranking.from_array(r.labels, arr.max() + 1 - arr)


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    entries: np.ndarray
    convention: Convention

    @property
    def m(self) -> int:
        return self.entries.shape[0]


def _em_entries(ranks: np.ndarray) -> np.ndarray:
    """Emond-Mason scores for one (m,) or many (n, m) rank vectors."""
    a = ranks[..., :, None]
    b = ranks[..., None, :]
    s = np.where(a <= b, 1, -1).astype(np.int64)
    s[(a == _MISSING_CODE) | (b == _MISSING_CODE)] = 0
    idx = np.arange(ranks.shape[-1])
    s[..., idx, idx] = 0
    return s


def _kendall_entries(ranks: np.ndarray) -> np.ndarray:
    a = ranks[:, None]
    b = ranks[None, :]
    s = np.sign(b - a).astype(np.int64)
    s[(a == _MISSING_CODE) | (b == _MISSING_CODE)] = 0
    return s


def score_matrix(r: Ranking, convention: Convention = Convention.EMOND_MASON) -> ScoreMatrix:
    """Pairwise score matrix of a ranking.

    Under ``EMOND_MASON`` a tie scores +1 in both cells; under ``KENDALL`` it
    scores 0. Pairs involving a MISSING object score 0 in both conventions.
    """
    arr = r.as_array()
    entries = _em_entries(arr) if convention is Convention.EMOND_MASON else _kendall_entries(arr)
    entries.setflags(write=False)
    return ScoreMatrix(entries, convention)


def _aligned(r1: Ranking, r2: Ranking) -> tuple[np.ndarray, np.ndarray]:
    if r1.labels != r2.labels:
        r2 = r2.reindex(r1.labels)
    return r1.as_array(), r2.as_array()


def kemeny_distance(r1: Ranking, r2: Ranking) -> Number:
    """Half the summed absolute difference of the two score matrices.

    Pairs where either ranking has a MISSING object contribute nothing.
    """
    a, b = _aligned(r1, r2)
    sa, sb = _kendall_entries(a), _kendall_entries(b)
    both = (a > 0) & (b > 0)
    mask = both[:, None] & both[None, :]
    return int(np.abs(sa - sb)[mask].sum()) // 2


def _require_complete(*rs: Ranking) -> None:
    for r in rs:
        if not r.is_complete:
            raise ValueError("ranking has MISSING objects; a complete ranking is required")


def tau_x(r1: Ranking, r2: Ranking) -> float:
    """Emond-Mason rank correlation of two complete rankings."""
    a, b = _aligned(r1, r2)
    _require_complete(r1, r2)
    m = a.size
    if m < 2:
        raise ValueError("tau_x needs at least two objects")
    num = int((_em_entries(a) * _em_entries(b)).sum())
    return num / (m * (m - 1))


def kendall_tau(r1: Ranking, r2: Ranking) -> float:
    a, b = _aligned(r1, r2)
    _require_complete(r1, r2)
    sa, sb = _kendall_entries(a), _kendall_entries(b)
    den = int((sa * sa).sum()) * int((sb * sb).sum())
    if den == 0:
        raise ValueError("Kendall tau is undefined when a ranking ties every object")
    return int((sa * sb).sum()) / math.sqrt(den)


def spearman_rho(r1: Ranking, r2: Ranking) -> float:
    a, b = _aligned(r1, r2)
    _require_complete(r1, r2)
    if r1.has_ties or r2.has_ties:
        raise ValueError("Spearman rho is only defined here for untied rankings")
    n = a.size
    if n < 2:
        raise ValueError("Spearman rho needs at least two objects")
    d2 = int(((_dense(a) - _dense(b)) ** 2).sum())
    return 1.0 - 6.0 * d2 / (n**3 - n)


def _as_weight_array(weights: Sequence[Number]) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.size and np.all(np.mod(w, 1.0) == 0) and np.all(np.abs(w) < 2**53):
        return w.astype(np.int64)
    return w


@dataclass(frozen=True, eq=False)
class RankingDataset:
    """Weighted rankings over a shared object set.

    ``ranks`` is an (n, m) integer array with 0 for MISSING; ``weights`` is
    int64 when every weight is integral, float64 otherwise.
    """

    labels: tuple[str, ...]
    ranks: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        labels = tuple(str(x) for x in self.labels)
        ranks = np.array(self.ranks, dtype=np.int64, copy=True)
        weights = _as_weight_array(self.weights)
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate labels")
        if ranks.ndim != 2 or ranks.shape[1] != len(labels):
            raise ValueError(f"rank array must be (n, {len(labels)}), got {ranks.shape}")
        if ranks.shape[0] == 0:
            raise ValueError("dataset has no rankings")
        if weights.shape != (ranks.shape[0],):
            raise ValueError("one weight per ranking required")
        if np.any(ranks < 0):
            raise ValueError("ranks must be positive integers")
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be positive and finite")
        empty_rows = np.flatnonzero((ranks > 0).sum(axis=1) == 0)
        if empty_rows.size:
            raise ValueError(f"row {empty_rows[0] + 1} ranks no object")
        empty_cols = np.flatnonzero((ranks > 0).sum(axis=0) == 0)
        if empty_cols.size:
            raise ValueError(f"object {labels[empty_cols[0]]!r} is MISSING in every row")
        ranks.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ranks", ranks)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_rankings(cls, rankings: Sequence[Ranking], weights: Optional[Sequence[Number]] = None) -> "RankingDataset":
        if not rankings:
            raise ValueError("dataset has no rankings")
        labels = rankings[0].labels
        rows = [r.reindex(labels).as_array() for r in rankings]
        if weights is None:
            weights = [1] * len(rankings)
        return cls(labels, np.vstack(rows), weights)

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return self.ranks.shape[0]

    @property
    def total_weight(self) -> Number:
        return self.weights.sum().item()

    @property
    def integer_weights(self) -> bool:
        return self.weights.dtype.kind == "i"

    @property
    def is_complete(self) -> bool:
        return bool(np.all(self.ranks > 0))

    @property
    def rows(self) -> Iterator[tuple[Ranking, Number]]:
        for arr, w in zip(self.ranks, self.weights):
            yield Ranking.from_array(self.labels, arr), w.item()

    def canonical(self) -> "RankingDataset":
        return RankingDataset(self.labels, np.vstack([_dense(r) for r in self.ranks]), self.weights)

    def same_as(self, other: "RankingDataset", rel: float = 1e-11) -> bool:
        """Equality up to rank relabeling and weight rounding.

        The default tolerance covers weights written with 12 significant digits.
        """
        if self.labels != other.labels or self.ranks.shape != other.ranks.shape:
            return False
        if not np.array_equal(self.canonical().ranks, other.canonical().ranks):
            return False
        return bool(np.allclose(self.weights, other.weights, rtol=rel, atol=0))


@dataclass(frozen=True, eq=False)
class CombinedInput:
    """Weighted sum of the Emond-Mason score matrices of a dataset."""

    c: np.ndarray
    total_weight: Number
    labels: tuple[str, ...]

    @property
    def m(self) -> int:
        return self.c.shape[0]

    @property
    def exact(self) -> bool:
        return self.c.dtype.kind == "i"

    @property
    def bound(self) -> Number:
        """Sum of absolute CI entries, the ceiling of any objective value."""
        return np.abs(self.c).sum().item()


def combined_input(d: RankingDataset, chunk: int = 4096) -> CombinedInput:
    m = d.m
    c = np.zeros((m, m), dtype=d.weights.dtype)
    for lo in range(0, d.n, chunk):
        s = _em_entries(d.ranks[lo : lo + chunk])
        c += np.tensordot(d.weights[lo : lo + chunk], s, axes=1).astype(c.dtype)
    c.setflags(write=False)
    return CombinedInput(c, d.total_weight, d.labels)


def combined_input_from_matrix(c: np.ndarray, total_weight: Number, labels: Sequence[str]) -> CombinedInput:
    c = np.array(c)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] != len(labels):
        raise ValueError("CI must be square and match the labels")
    if np.any(np.diag(c) != 0):
        raise ValueError("CI diagonal must be zero")
    if c.dtype.kind == "f" and np.all(np.mod(c, 1.0) == 0) and float(total_weight).is_integer():
        c = c.astype(np.int64)
        total_weight = int(total_weight)
    c.setflags(write=False)
    return CombinedInput(c, total_weight, tuple(labels))


def _entries_for(s: Union[ScoreMatrix, Ranking], ci: CombinedInput) -> np.ndarray:
    if isinstance(s, Ranking):
        if s.labels != ci.labels:
            s = s.reindex(ci.labels)
        s = score_matrix(s)
    if s.entries.shape != ci.c.shape:
        raise ValueError(f"score matrix is {s.entries.shape}, CI is {ci.c.shape}")
    return s.entries


def objective_dot(s: Union[ScoreMatrix, Ranking], ci: CombinedInput) -> Number:
    """Elementwise product sum of a candidate's score matrix with the CI."""
    return (_entries_for(s, ci) * ci.c).sum().item()


def average_tau_x(dot: Number, ci: CombinedInput) -> float:
    m = ci.m
    return float(Fraction(dot) / (Fraction(ci.total_weight) * m * (m - 1))) if ci.exact else dot / (ci.total_weight * m * (m - 1))


def total_penalty(s: Union[ScoreMatrix, Ranking], ci: CombinedInput) -> Number:
    """Distance of the objective from its ceiling; zero means every CI sign agrees."""
    return ci.bound - objective_dot(s, ci)


def values_equal(a: Number, b: Number, exact: bool) -> bool:
    return a == b if exact else abs(a - b) <= REAL_TOL * max(1.0, abs(a), abs(b))


MAX_ENUMERATE = 7


def _ordered_partitions(items: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    if not items:
        yield []
        return
    n = len(items)
    for mask in range(1, 1 << n):
        head = tuple(items[i] for i in range(n) if mask >> i & 1)
        rest = tuple(items[i] for i in range(n) if not mask >> i & 1)
        for tail in _ordered_partitions(rest):
            yield [head] + tail


def enumerate_weak_order_arrays(m: int) -> np.ndarray:
    """All weak orders of m objects as dense rank rows, lexicographically sorted."""
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    if m > MAX_ENUMERATE:
        raise SizeLimitError(f"enumeration is limited to m <= {MAX_ENUMERATE}, got {m}")
    rows = []
    for parts in _ordered_partitions(tuple(range(m))):
        row = [0] * m
        for g, block in enumerate(parts, start=1):
            for i in block:
                row[i] = g
        rows.append(row)
    rows.sort()
    return np.array(rows, dtype=np.int64)


def enumerate_weak_orders(m: int, labels: Optional[Sequence[str]] = None) -> list[Ranking]:
    if labels is None:
        labels = default_labels(m)
    return [Ranking.from_array(labels, row) for row in enumerate_weak_order_arrays(m)]


def approx_weak_order_count(m: int) -> float:
    if m < 1:
        raise ValueError("m must be positive")
    return 0.5 * (1.0 / math.log(2.0)) ** (m + 1) * math.factorial(m)


def default_labels(m: int) -> tuple[str, ...]:
    if m <= 26:
        return tuple(chr(ord("A") + i) for i in range(m))
    return tuple(f"o{i + 1}" for i in range(m))


@dataclass(frozen=True)
class SolutionSet:
    """Distinct median rankings sharing one objective value."""

    solutions: tuple[Ranking, ...]
    objective_dot: Number
    avg_tau_x: float
    algorithm: str
    elapsed_ms: float = 0.0
    iterations: Optional[int] = None
    seed: Optional[int] = None
    extra: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.solutions)

    def keys(self) -> set[tuple[int, ...]]:
        return {s.key() for s in self.solutions}


def make_solution_set(
    candidates: Sequence[Ranking],
    ci: CombinedInput,
    algorithm: str,
    *,
    elapsed_ms: float = 0.0,
    iterations: Optional[int] = None,
    seed: Optional[int] = None,
    keep_best: bool = False,
    extra: Optional[dict] = None,
) -> SolutionSet:
    """Canonicalize, deduplicate and sort candidates.

    With ``keep_best`` only the candidates of maximal objective survive;
    otherwise all candidates must already share one objective value.
    """
    if not candidates:
        raise ValueError("no candidate rankings")
    uniq: dict[tuple[int, ...], Ranking] = {}
    for cand in candidates:
        cand = canonicalize(cand.reindex(ci.labels) if cand.labels != ci.labels else cand)
        uniq.setdefault(cand.key(), cand)
    scored = [(objective_dot(r, ci), r) for r in uniq.values()]
    best = max(v for v, _ in scored)
    if keep_best:
        scored = [(v, r) for v, r in scored if values_equal(v, best, ci.exact)]
    elif not all(values_equal(v, best, ci.exact) for v, _ in scored):
        raise ValueError("solutions do not share one objective value")
    sols = tuple(sorted((r for _, r in scored), key=Ranking.key))
    return SolutionSet(
        sols,
        best,
        average_tau_x(best, ci),
        algorithm,
        elapsed_ms=elapsed_ms,
        iterations=iterations,
        seed=seed,
        extra=dict(extra or {}),
    )
