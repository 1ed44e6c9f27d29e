"""Uniform result rows and their CSV serialisation."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass
from typing import Optional

METHODS = ("fekete", "epsilon_exact", "epsilon_asym", "closed_form", "quadrature",
           "monte_carlo")
HEADER = ("method", "quantity", "lambda", "n_points", "value", "error", "runtime_ms")


@dataclass(frozen=True)
class EnergyRow:
    method: str
    quantity: str
    lam: Optional[float]
    n_points: int
    value: float
    error: Optional[float] = None
    runtime_ms: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    def sort_key(self):
        return (self.n_points, self.method, self.quantity,
                -math.inf if self.lam is None else self.lam)


def fmt(value) -> str:
    """12 significant digits, 'NA' for missing values."""
    if value is None:
        return "NA"
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return f"{float(value):.12g}"


def timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, int(round(1000.0 * (time.perf_counter() - start)))


def rows_to_csv(rows, timing: bool = False) -> str:
    """Serialise rows sorted by (n_points, method); runtime is zeroed unless
    ``timing`` so that deterministic runs are byte-identical."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for r in sorted(rows, key=EnergyRow.sort_key):
        writer.writerow([r.method, r.quantity, fmt(r.lam), r.n_points, fmt(r.value),
                         fmt(r.error), r.runtime_ms if timing else 0])
    return buf.getvalue()


def parse_csv(text: str):
    return list(csv.DictReader(io.StringIO(text)))
