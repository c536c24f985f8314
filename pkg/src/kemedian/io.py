"""Dataset files and run reports.

A dataset file is CSV: the header names the objects, optionally followed by
a ``weight`` column; each row holds integer ranks with ``-`` (or an empty
cell) for an unranked object. Reports are JSON documents tagged with a
schema version.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from . import __version__
from .ranking import CombinedInput, RankingDataset, SolutionSet

MISSING_TOKEN = "-"
WEIGHT_COLUMN = "weight"
REPORT_SCHEMA = "kemedian.run-report/1"
EXPERIMENT_SCHEMA = "kemedian.experiment-report/1"

PathLike = Union[str, os.PathLike]


class DatasetError(ValueError):
    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.row = row
        self.column = column


def parse_dataset_text(text: str) -> RankingDataset:
    """Parse dataset CSV text. Data rows are numbered from 1 in errors."""
    rows = [r for r in csv.reader(io.StringIO(text)) if any(cell.strip() for cell in r)]
    if not rows:
        raise DatasetError("empty file")
    header = [h.strip() for h in rows[0]]
    has_weight = header[-1].lower() == WEIGHT_COLUMN
    labels = header[:-1] if has_weight else header
    if not labels:
        raise DatasetError("header names no objects", row=0)
    seen = set()
    for lab in labels:
        if not lab:
            raise DatasetError("empty object label", row=0)
        if lab in seen:
            raise DatasetError(f"duplicate label {lab!r}", row=0, column=lab)
        seen.add(lab)
    m = len(labels)
    ranks = np.zeros((len(rows) - 1, m), dtype=np.int64)
    weights: list[float] = []
    for i, raw in enumerate(rows[1:], start=1):
        cells = [c.strip() for c in raw]
        if len(cells) != len(header):
            raise DatasetError(f"expected {len(header)} cells, found {len(cells)}", row=i)
        for j, lab in enumerate(labels):
            tok = cells[j]
            if tok in ("", MISSING_TOKEN):
                continue
            try:
                v = int(tok)
            except ValueError:
                raise DatasetError(f"rank {tok!r} is not an integer", row=i, column=lab) from None
            if v < 1:
                raise DatasetError(f"rank {v} is not positive", row=i, column=lab)
            ranks[i - 1, j] = v
        if not np.any(ranks[i - 1] > 0):
            raise DatasetError("no object is ranked", row=i)
        if has_weight:
            tok = cells[-1]
            try:
                w = float(tok)
            except ValueError:
                raise DatasetError(f"weight {tok!r} is not a number", row=i, column=WEIGHT_COLUMN) from None
            if not np.isfinite(w) or w <= 0:
                raise DatasetError(f"weight {tok!r} must be positive", row=i, column=WEIGHT_COLUMN)
            weights.append(w)
        else:
            weights.append(1.0)
    if ranks.shape[0] == 0:
        raise DatasetError("no data rows")
    for j, lab in enumerate(labels):
        if not np.any(ranks[:, j] > 0):
            raise DatasetError("object is unranked in every row", column=lab)
    return RankingDataset(tuple(labels), ranks, weights)


def parse_dataset(path: PathLike) -> RankingDataset:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DatasetError(f"{path}: not UTF-8 text") from exc
    return parse_dataset_text(text)


def _format_weight(w) -> str:
    if isinstance(w, (int, np.integer)):
        return str(int(w))
    return f"{float(w):.12g}"


def format_dataset(d: RankingDataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(d.labels) + [WEIGHT_COLUMN])
    for ranks, w in zip(d.ranks, d.weights):
        writer.writerow([MISSING_TOKEN if v == 0 else str(int(v)) for v in ranks] + [_format_weight(w.item())])
    return buf.getvalue()


def atomic_write_text(path: PathLike, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_dataset(d: RankingDataset, path: PathLike) -> None:
    atomic_write_text(path, format_dataset(d))


def emond_mason_path() -> Path:
    return Path(str(resources.files("kemedian") / "data" / "emond_mason.csv"))


def load_emond_mason() -> RankingDataset:
    """The 21 weighted rankings of 15 objects from Emond and Mason (2000)."""
    return parse_dataset(emond_mason_path())


def digest_bytes(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def dataset_digest(d: RankingDataset) -> str:
    return digest_bytes(format_dataset(d).encode("utf-8"))


@dataclass
class RunReport:
    algorithm: str
    input_digest: str
    labels: list[str]
    solutions: list[list[int]]
    orderings: list[str]
    objective_dot: Any
    avg_tau_x: float
    total_weight: Any
    elapsed_ms: Optional[float]
    iterations: Optional[int] = None
    seed: Optional[int] = None
    tool_version: str = __version__
    extra: dict = field(default_factory=dict)
    schema: str = REPORT_SCHEMA

    @classmethod
    def from_solution_set(
        cls, sol: SolutionSet, ci: CombinedInput, input_digest: str, *, timing: bool = True
    ) -> "RunReport":
        return cls(
            algorithm=sol.algorithm,
            input_digest=input_digest,
            labels=list(ci.labels),
            solutions=[list(s.key()) for s in sol.solutions],
            orderings=[s.to_ordering() for s in sol.solutions],
            objective_dot=sol.objective_dot,
            avg_tau_x=sol.avg_tau_x,
            total_weight=ci.total_weight,
            elapsed_ms=round(sol.elapsed_ms, 3) if timing else None,
            iterations=sol.iterations,
            seed=sol.seed,
            extra=dict(sol.extra),
        )

    def check(self) -> None:
        """Raise if avg_tau_x cannot be recomputed from the other fields."""
        m = len(self.labels)
        expect = self.objective_dot / (self.total_weight * m * (m - 1))
        if abs(expect - self.avg_tau_x) > 1e-12:
            raise ValueError(f"avg_tau_x {self.avg_tau_x} != {expect}")
        if self.solutions != sorted(self.solutions):
            raise ValueError("solutions are not in canonical order")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        data = json.loads(text)
        if data.get("schema") != REPORT_SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        return cls(**data)


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
