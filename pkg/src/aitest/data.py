"""Observed-variable container, CSV ingestion and centering."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class ColumnRoles:
    x_name: str
    y_name: str
    z_names: tuple[str, ...]
    w_names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "z_names", tuple(self.z_names))
        object.__setattr__(self, "w_names", tuple(self.w_names))
        if not self.x_name or not self.y_name or not self.z_names:
            raise DataError("roles need an x, a y and at least one z column")
        names = self.all_names()
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise DataError(f"column assigned to more than one role: {', '.join(dupes)}")

    def all_names(self) -> list[str]:
        return [self.x_name, self.y_name, *self.z_names, *self.w_names]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Treatment ``x``, outcome ``y``, candidate instruments ``z`` (n x m) and
    covariates ``w`` (n x q, q may be 0). Arrays are read-only copies."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    w: np.ndarray = field(default=None)
    z_names: tuple[str, ...] = ()
    w_names: tuple[str, ...] = ()

    def __post_init__(self):
        x = np.array(self.x, dtype=np.float64).reshape(-1)
        n = x.shape[0]
        y = np.array(self.y, dtype=np.float64).reshape(-1)
        z = np.array(self.z, dtype=np.float64)
        if z.ndim == 1:
            z = z.reshape(-1, 1)
        w = np.zeros((n, 0)) if self.w is None else np.array(self.w, dtype=np.float64)
        if w.ndim == 1:
            w = w.reshape(-1, 1)
        if n < 1:
            raise DataError("dataset needs at least one row")
        if y.shape[0] != n or z.shape[0] != n or w.shape[0] != n:
            raise DataError(
                f"column lengths differ: x={n}, y={y.shape[0]}, z={z.shape[0]}, w={w.shape[0]}")
        if z.shape[1] < 1:
            raise DataError("dataset needs at least one candidate instrument")
        for name, arr in (("x", x), ("y", y), ("z", z), ("w", w)):
            if not np.all(np.isfinite(arr)):
                raise DataError(f"non-finite values in {name}")
            arr.setflags(write=False)
        z_names = tuple(self.z_names) or tuple(f"Z{j + 1}" for j in range(z.shape[1]))
        w_names = tuple(self.w_names) or tuple(f"W{j + 1}" for j in range(w.shape[1]))
        if len(z_names) != z.shape[1] or len(w_names) != w.shape[1]:
            raise DataError("column names do not match array widths")
        for attr, val in (("x", x), ("y", y), ("z", z), ("w", w),
                          ("z_names", z_names), ("w_names", w_names)):
            object.__setattr__(self, attr, val)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def q(self) -> int:
        return self.w.shape[1]

    def z_column(self, z_index: int | str) -> np.ndarray:
        if isinstance(z_index, str):
            try:
                z_index = self.z_names.index(z_index)
            except ValueError:
                raise DataError(f"unknown instrument column {z_index!r}") from None
        if not 0 <= z_index < self.z.shape[1]:
            raise DataError(f"instrument index {z_index} out of range")
        return self.z[:, z_index]


def load_csv(path: str | Path, roles: ColumnRoles) -> Dataset:
    """Read a comma-separated file with one header row into a :class:`Dataset`.

    Rows are 1-based in error messages, counting data rows only.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        missing = [name for name in roles.all_names() if name not in header]
        if missing:
            raise DataError(f"missing column(s) in {path}: {', '.join(missing)}")
        cols = {name: header.index(name) for name in roles.all_names()}
        values: dict[str, list[float]] = {name: [] for name in cols}
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            for name, j in cols.items():
                cell = row[j].strip() if j < len(row) else ""
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(
                        f"non-numeric value {cell!r} at row {row_no}, column {name!r}") from None
                if not math.isfinite(v):
                    raise DataError(f"non-finite value at row {row_no}, column {name!r}")
                values[name].append(v)
    if not values[roles.x_name]:
        raise DataError(f"{path} has no data rows")

    def stack(names: Sequence[str]) -> np.ndarray:
        if not names:
            return np.zeros((len(values[roles.x_name]), 0))
        return np.column_stack([values[name] for name in names])

    return Dataset(x=values[roles.x_name], y=values[roles.y_name],
                   z=stack(roles.z_names), w=stack(roles.w_names),
                   z_names=roles.z_names, w_names=roles.w_names)


def write_csv(path: str | Path, d: Dataset, x_name: str = "X", y_name: str = "Y") -> None:
    """Write ``d`` in the format :func:`load_csv` reads (17 significant digits)."""
    header = [*d.z_names, x_name, y_name, *d.w_names]
    table = np.column_stack([d.z, d.x, d.y, d.w])
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in table:
            writer.writerow([f"{v:.17g}" for v in row])


def center(d: Dataset) -> Dataset:
    def c(a):
        a = a - a.mean(axis=0)
        return a - a.mean(axis=0)  # second pass removes rounding left by the first

    return Dataset(x=c(d.x), y=c(d.y), z=c(d.z), w=c(d.w),
                   z_names=d.z_names, w_names=d.w_names)
