"""Synthetic ranking data and the algorithm comparison runner.

Complete data come from the distance-based model, where a ranking ``a``
has probability proportional to ``exp(-theta * d(S, a))`` around a consensus
``S`` with the Kemeny distance ``d``. The space is enumerated exactly, so
only small ``m`` is supported. Incomplete data follow a pick-k-of-m scheme
with random normal weights.
"""

from __future__ import annotations

import configparser
import enum
import itertools
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import __version__
from .bb import bb_solve
from .io import EXPERIMENT_SCHEMA
from .heuristics import fast, quick_solution_set
from .ranking import (
    MAX_ENUMERATE,
    Ranking,
    RankingDataset,
    SizeLimitError,
    SolutionSet,
    _kendall_entries,
    combined_input,
    default_labels,
    enumerate_weak_order_arrays,
)

SeedLike = Union[int, np.random.SeedSequence, None]

ALGORITHMS = ("bb", "quick", "fast")


class Space(enum.Enum):
    FULL = "full"
    WEAK = "weak"


def space_arrays(m: int, space: Space) -> np.ndarray:
    """Every ranking of the space as dense rank rows, lexicographically sorted."""
    if m > MAX_ENUMERATE:
        raise SizeLimitError(f"cannot enumerate rankings of {m} objects (limit {MAX_ENUMERATE})")
    if space is Space.WEAK:
        return enumerate_weak_order_arrays(m)
    return np.array(sorted(itertools.permutations(range(1, m + 1))), dtype=np.int64)


def distances_to(s: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Kemeny distance from one complete ranking to each row of ``points``."""
    ks = _kendall_entries(s)
    kp = np.sign(points[:, None, :] - points[:, :, None])
    return np.abs(kp - ks).sum(axis=(1, 2)) // 2


@dataclass(frozen=True)
class ModelSpec:
    consensus: Ranking
    theta: float
    space: Space = Space.FULL

    def __post_init__(self) -> None:
        if not self.theta >= 0:
            raise ValueError("theta must be non-negative")
        if not self.consensus.is_complete:
            raise ValueError("consensus must be complete")
        if self.space is Space.FULL and self.consensus.has_ties:
            raise ValueError("consensus of the full space cannot have ties")
        if self.consensus.m > MAX_ENUMERATE:
            raise SizeLimitError(f"model spaces are enumerated; m must be at most {MAX_ENUMERATE}")


@dataclass(frozen=True, eq=False)
class ModelTable:
    points: np.ndarray
    distances: np.ndarray
    probs: np.ndarray
    labels: tuple[str, ...]

    def probability(self, r: Ranking) -> float:
        key = np.asarray(r.reindex(self.labels).key())
        hit = np.flatnonzero((self.points == key).all(axis=1))
        return float(self.probs[hit[0]]) if hit.size else 0.0


def model_pmf(spec: ModelSpec) -> ModelTable:
    m = spec.consensus.m
    points = space_arrays(m, spec.space)
    dist = distances_to(spec.consensus.canonical().as_array(), points)
    # shift by the minimum distance so the largest term is exp(0)
    logw = -spec.theta * (dist - dist.min())
    w = np.exp(logw)
    probs = w / w.sum()
    return ModelTable(points, dist, probs, spec.consensus.labels)


def _rng(seed: SeedLike) -> np.random.Generator:
    return np.random.default_rng(seed)


def sample(spec: ModelSpec, n: int, seed: SeedLike = None) -> RankingDataset:
    """``n`` independent unit-weight draws by inverse CDF over the enumerated space."""
    if n < 1:
        raise ValueError("n must be positive")
    table = model_pmf(spec)
    cdf = np.cumsum(table.probs)
    cdf[-1] = 1.0
    u = _rng(seed).random(n)
    idx = np.searchsorted(cdf, u, side="right")
    return RankingDataset(table.labels, table.points[idx], np.ones(n, dtype=np.int64))


def sample_incomplete(
    m: int,
    k: int,
    seed: SeedLike = None,
    *,
    rows: tuple[int, int] = (15, 30),
    total: float = 200.0,
    mean_range: tuple[float, float] = (10.0, 30.0),
    sd_range: tuple[float, float] = (2.5, 9.0),
) -> RankingDataset:
    """Distinct pick-k-of-m rankings with normal weights rescaled to ``total``.

    The number of rows is uniform on ``rows`` and capped at the number of
    distinct pick-k rankings. Each row's weight is drawn from a normal with
    mean uniform on ``mean_range`` and standard deviation uniform on
    ``sd_range``; non-positive draws are redrawn.
    """
    if not 2 <= k <= m:
        raise ValueError(f"need 2 <= k <= m, got k={k}, m={m}")
    rng = _rng(seed)
    space = math.perm(m, k)
    n = min(int(rng.integers(rows[0], rows[1] + 1)), space)
    seen: set[tuple[int, ...]] = set()
    out = []
    while len(out) < n:
        picked = rng.choice(m, size=k, replace=False)
        row = np.zeros(m, dtype=np.int64)
        row[picked] = np.arange(1, k + 1)
        key = tuple(row)
        if key not in seen:
            seen.add(key)
            out.append(row)
    weights = np.empty(n)
    for i in range(n):
        mu = rng.uniform(*mean_range)
        sd = rng.uniform(*sd_range)
        w = rng.normal(mu, sd)
        while w <= 0:
            w = rng.normal(mu, sd)
        weights[i] = w
    weights = weights / weights.sum() * total
    labels = default_labels(m)
    # each object must appear somewhere; resample deterministically if not
    ranks = np.vstack(out)
    if np.any((ranks > 0).sum(axis=0) == 0):
        return sample_incomplete(m, k, rng, rows=rows, total=total, mean_range=mean_range, sd_range=sd_range)
    return RankingDataset(labels, ranks, weights)


@dataclass
class ExperimentConfig:
    m: int
    space: str = "full"
    k: Optional[int] = None
    thetas: tuple[float, ...] = (0.7, 0.4, 0.1)
    n: int = 200
    replications: int = 10
    algorithms: tuple[str, ...] = ALGORITHMS
    seed: int = 0
    maxiter: int = 50
    threads: int = 1
    consensus: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        self.thetas = tuple(float(t) for t in self.thetas)
        self.algorithms = tuple(a.strip().lower() for a in self.algorithms)
        if self.space not in ("full", "weak", "pick"):
            raise ValueError(f"space must be full, weak or pick, got {self.space!r}")
        if self.space == "pick":
            if self.k is None or not 2 <= self.k <= self.m:
                raise ValueError("pick space needs 2 <= k <= m")
        elif self.m > MAX_ENUMERATE:
            raise SizeLimitError(f"model sampling is limited to m <= {MAX_ENUMERATE}")
        elif self.m < 2:
            raise ValueError("m must be at least 2")
        bad = set(self.algorithms) - set(ALGORITHMS)
        if bad or not self.algorithms:
            raise ValueError(f"unknown algorithms {sorted(bad)}")
        if any(t < 0 for t in self.thetas) or not self.thetas:
            raise ValueError("thetas must be non-negative")
        if self.n < 1 or self.replications < 1 or self.maxiter < 1 or self.threads < 1:
            raise ValueError("n, replications, maxiter and threads must be positive")

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        """Read an INI-style ``[experiment]`` section of ``key = value`` lines."""
        parser = configparser.ConfigParser()
        with open(path, encoding="utf-8") as fh:
            try:
                parser.read_file(fh)
            except configparser.Error as exc:
                raise ValueError(f"{path}: {exc}") from None
        if not parser.has_section("experiment"):
            raise ValueError(f"{path}: missing [experiment] section")
        sec = parser["experiment"]
        known = {"m", "space", "k", "thetas", "n", "replications", "algorithms", "seed", "maxiter", "threads", "consensus"}
        unknown = set(sec) - known
        if unknown:
            raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
        kw: dict = {}
        for key in ("m", "k", "n", "replications", "seed", "maxiter", "threads"):
            if key in sec:
                kw[key] = sec.getint(key)
        if "space" in sec:
            kw["space"] = sec["space"].strip().lower()
        if "thetas" in sec:
            kw["thetas"] = tuple(float(x) for x in _split(sec["thetas"]))
        if "algorithms" in sec:
            kw["algorithms"] = tuple(_split(sec["algorithms"]))
        if "consensus" in sec:
            kw["consensus"] = tuple(int(x) for x in sec["consensus"].split())
        if "m" not in kw:
            raise ValueError(f"{path}: m is required")
        return cls(**kw)

    def levels(self) -> list[Optional[float]]:
        return [None] if self.space == "pick" else list(self.thetas)


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.replace(",", " ").split() if t.strip()]


def replication_seed(base: int, level: int, rep: int) -> int:
    return int(np.random.SeedSequence([base, level, rep]).generate_state(1, dtype=np.uint32)[0])


def _solution_record(sol: SolutionSet, bb_keys: Optional[set], timing: bool) -> dict:
    keys = sorted(sol.keys())
    return {
        "solutions": [list(k) for k in keys],
        "count": len(keys),
        "objective_dot": sol.objective_dot,
        "avg_tau_x": sol.avg_tau_x,
        "elapsed_ms": round(sol.elapsed_ms, 3) if timing else None,
        "overlap_with_bb": None if bb_keys is None else len(bb_keys & set(map(tuple, keys))),
    }


def _summary(values: Sequence[float]) -> Optional[dict]:
    vals = [v for v in values if v is not None]
    if not vals:
        return None
    return {
        "mean": statistics.fmean(vals),
        "median": float(statistics.median(vals)),
        "min": float(min(vals)),
        "max": float(max(vals)),
    }


def _dataset_for(cfg: ExperimentConfig, theta: Optional[float], seed: int) -> RankingDataset:
    if cfg.space == "pick":
        return sample_incomplete(cfg.m, cfg.k, seed)
    labels = default_labels(cfg.m)
    cons = cfg.consensus or tuple(range(1, cfg.m + 1))
    spec = ModelSpec(Ranking(labels, cons), theta, Space(cfg.space))
    return sample(spec, cfg.n, seed)


def _run_one(cfg: ExperimentConfig, li: int, theta: Optional[float], rep: int, timing: bool) -> dict:
    seed = replication_seed(cfg.seed, li, rep)
    data = _dataset_for(cfg, theta, seed)
    ci = combined_input(data)
    results: dict[str, SolutionSet] = {}
    for alg in cfg.algorithms:
        if alg == "bb":
            results[alg] = bb_solve(ci)
        elif alg == "quick":
            results[alg] = quick_solution_set(ci)
        else:
            results[alg] = fast(ci, cfg.maxiter, seed, threads=1)
    bb_keys = results["bb"].keys() if "bb" in results else None
    return {
        "level": "pick" if theta is None else theta,
        "replication": rep,
        "seed": seed,
        "rows": data.n,
        "total_weight": data.total_weight,
        "algorithms": {alg: _solution_record(sol, bb_keys, timing) for alg, sol in results.items()},
    }


def run_experiment(cfg: ExperimentConfig, *, timing: bool = True) -> dict:
    """Run every algorithm on every replication and summarise counts and times.

    For BB the count summary is the number of optimal solutions; for QUICK
    and FAST the overlap summary counts solutions shared with BB.
    """
    jobs = [(li, theta, rep) for li, theta in enumerate(cfg.levels()) for rep in range(cfg.replications)]
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            runs = list(pool.map(lambda j: _run_one(cfg, *j, timing), jobs))
    else:
        runs = [_run_one(cfg, *j, timing) for j in jobs]
    summary: dict = {}
    for level in cfg.levels():
        name = "pick" if level is None else repr(level)
        block = [r for r in runs if r["level"] == ("pick" if level is None else level)]
        summary[name] = {
            alg: {
                "solutions": _summary([r["algorithms"][alg]["count"] for r in block]),
                "overlap_with_bb": _summary([r["algorithms"][alg]["overlap_with_bb"] for r in block]),
                "elapsed_ms": _summary([r["algorithms"][alg]["elapsed_ms"] for r in block]),
            }
            for alg in cfg.algorithms
        }
    config = asdict(cfg)
    # worker count never changes results, so it stays out of the report
    config["threads"] = None
    return {
        "schema": EXPERIMENT_SCHEMA,
        "tool_version": __version__,
        "config": config,
        "runs": runs,
        "summary": summary,
    }
