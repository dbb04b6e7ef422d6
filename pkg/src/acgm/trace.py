"""Per-iteration traces and their CSV representation."""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["IterationRecord", "Trace", "CSV_COLUMNS", "write_trace_csv", "read_trace_csv"]

CSV_COLUMNS = ("k", "L", "backtracks", "overshoot", "F", "A", "isd", "wtu_cum", "upper_bound")


@dataclass
class IterationRecord:
    """One row of a convergence trace, describing the iterate ``x_k``.

    ``isd``, ``wtu_cum`` and ``upper_bound`` are filled in by the benchmark
    harness once a reference optimum and a cost model are known.
    """

    k: int
    L: float
    backtracks: int
    overshoot: bool
    F: float
    A: float
    isd: float | None = None
    wtu_cum: float | None = None
    upper_bound: float | None = None


@dataclass
class Trace:
    """Run history of a solver.

    ``records[i]`` describes iterate ``x_{i+1}``. When points are recorded,
    ``xs[i]``, ``ys[i]`` and ``zs[i]`` hold the main iterate, the accepted
    auxiliary point and the proximal gradient step of the same iteration.
    """

    solver: str
    x0: np.ndarray
    F0: float
    A0: float
    gamma0: float
    records: list = field(default_factory=list)
    xs: list | None = None
    ys: list | None = None
    zs: list | None = None
    status: str = "ok"

    def __len__(self):
        return len(self.records)

    def column(self, name):
        """Values of one record field as a float array (missing values as nan)."""
        vals = [getattr(r, name) for r in self.records]
        return np.array([np.nan if v is None else v for v in vals], dtype=float)

    @property
    def iterates(self):
        return [self.x0] + list(self.xs or [])


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_trace_csv(records, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow([_fmt(getattr(rec, c)) for c in CSV_COLUMNS])
    return path


def read_trace_csv(path):
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected trace columns in {path}: {reader.fieldnames}")
        for row in reader:
            kw = {}
            for name, raw in row.items():
                if raw == "":
                    kw[name] = None
                elif name in ("k", "backtracks"):
                    kw[name] = int(raw)
                elif name == "overshoot":
                    kw[name] = bool(int(raw))
                else:
                    kw[name] = float(raw)
            records.append(IterationRecord(**kw))
    return records
