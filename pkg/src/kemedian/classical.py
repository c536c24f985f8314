"""Borda count and Condorcet pairwise majority."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ranking import Ranking, RankingDataset


class CondorcetCycleError(ValueError):
    """The strict majority relation contains a cycle (paradox of voting)."""

    def __init__(self, cycle: list[str]):
        super().__init__("majority cycle: " + " > ".join(cycle + cycle[:1]))
        self.cycle = cycle


def borda(d: RankingDataset) -> tuple[dict[str, float], Ranking]:
    """Weighted total rank per object; lower totals rank first, equal totals tie.

    Tied ballots contribute their raw rank values. Partial ballots are
    rejected because an unranked object has no rank to add.
    """
    if not d.is_complete:
        raise ValueError("Borda count needs complete rankings")
    totals = d.weights @ d.ranks
    _, ranks = np.unique(totals, return_inverse=True)
    consensus = Ranking.from_array(d.labels, ranks + 1)
    return {lab: t.item() for lab, t in zip(d.labels, totals)}, consensus


@dataclass(frozen=True, eq=False)
class SupportMatrix:
    """Entry (i, j) is the total weight of judges strictly preferring i to j."""

    entries: np.ndarray
    labels: tuple[str, ...]

    def __getitem__(self, pair: tuple[str, str]):
        i, j = (self.labels.index(p) for p in pair)
        return self.entries[i, j].item()


def condorcet_support(d: RankingDataset) -> SupportMatrix:
    r = d.ranks
    a = r[:, :, None]
    b = r[:, None, :]
    prefers = (a < b) & (a > 0) & (b > 0)
    entries = np.tensordot(d.weights, prefers.astype(d.weights.dtype), axes=1)
    entries.setflags(write=False)
    return SupportMatrix(entries, d.labels)


def condorcet_consensus(support: SupportMatrix) -> Ranking:
    """Layer objects by the strict majority relation.

    Each layer holds the objects no remaining object beats; objects in one
    layer are tied. Raises ``CondorcetCycleError`` if the relation is cyclic.
    """
    s = support.entries
    labels = support.labels
    m = s.shape[0]
    beats = s > s.T
    remaining = list(range(m))
    ranks = np.zeros(m, dtype=np.int64)
    layer = 0
    while remaining:
        layer += 1
        top = [i for i in remaining if not any(beats[j, i] for j in remaining)]
        if not top:
            raise CondorcetCycleError(_find_cycle(beats, remaining, labels))
        for i in top:
            ranks[i] = layer
        remaining = [i for i in remaining if i not in top]
    return Ranking.from_array(labels, ranks)


def _find_cycle(beats: np.ndarray, nodes: list[int], labels) -> list[str]:
    # every node here has a beater among nodes, so walking backwards must repeat
    path = [nodes[0]]
    seen = {nodes[0]: 0}
    while True:
        cur = path[-1]
        nxt = next(j for j in nodes if beats[j, cur])
        if nxt in seen:
            cyc = path[seen[nxt] :]
            return [labels[i] for i in reversed(cyc)]
        seen[nxt] = len(path)
        path.append(nxt)
