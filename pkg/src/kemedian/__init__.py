"""Median (Kemeny) consensus rankings of weighted full, tied and partial rankings."""

__version__ = "0.1.0"

from .ranking import (  # noqa: E402
    MISSING,
    CombinedInput,
    Convention,
    Ranking,
    RankingDataset,
    SolutionSet,
    combined_input,
    kemeny_distance,
    objective_dot,
    tau_x,
)
from .bb import bb_solve  # noqa: E402
from .heuristics import fast, initial_q, quick, quick_median  # noqa: E402

__all__ = [
    "MISSING",
    "CombinedInput",
    "Convention",
    "Ranking",
    "RankingDataset",
    "SolutionSet",
    "bb_solve",
    "combined_input",
    "fast",
    "initial_q",
    "kemeny_distance",
    "objective_dot",
    "quick",
    "quick_median",
    "tau_x",
]
