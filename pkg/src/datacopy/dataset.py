"""Point-set container, CSV ingestion/emission, deterministic splits, moons generator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._rng import rng_from

ROLES = ("train", "test", "generated", "validation")


@dataclass(frozen=True)
class PointSet:
    """A role-tagged matrix of points: rows are points in a common d-dim space.

    Invariants enforced on construction: 2-d finite float array, at least
    one row and one column. The underlying array is made read-only, so a
    PointSet is safe to share across threads.
    """

    points: np.ndarray
    role: str = "train"

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-d array (rows = points)")
        if pts.shape[0] < 1:
            raise ValueError("point set must contain at least one point")
        if pts.shape[1] < 1:
            raise ValueError("points must have dimension >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point set contains NaN or infinite entries")
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}; expected one of {ROLES}")
        pts = np.ascontiguousarray(pts)
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def with_role(self, role: str) -> "PointSet":
        return PointSet(self.points, role)


def _parses_as_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_point_set(path: str, role: str = "train") -> PointSet:
    """Read a CSV of comma-separated reals, one point per line.

    A single header row is skipped when the first non-empty line contains
    any non-numeric token. Ragged rows and non-numeric cells elsewhere are
    errors that name the offending line (and column).
    """
    rows: list[list[float]] = []
    width: int | None = None
    first_data_line = True
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            cells = line.split(",")
            if first_data_line:
                first_data_line = False
                if any(not _parses_as_number(c) for c in cells):
                    continue  # header
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ValueError(
                    f"{path}: dimension mismatch at line {lineno}: "
                    f"{len(cells)} fields, expected {width}"
                )
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                col = next(i for i, c in enumerate(cells, start=1) if not _parses_as_number(c))
                raise ValueError(
                    f"{path}: parse error at line {lineno}, column {col}: "
                    f"{cells[col - 1]!r} is not a number"
                ) from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return PointSet(np.array(rows, dtype=np.float64), role)


def save_point_set(points: PointSet, path: str) -> None:
    """Write CSV with no header; values use shortest round-trip decimals."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in points.points:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def split(points: PointSet, fractions: Sequence[float], seed: int) -> list[PointSet]:
    """Partition rows by a seeded uniform shuffle.

    Part sizes are floor(fraction * n) with the remainder added to the
    first part. Parts inherit the input role; re-tag with `with_role`.
    """
    fracs = [float(f) for f in fractions]
    if not fracs:
        raise ValueError("no fractions given")
    if any(f <= 0 for f in fracs):
        raise ValueError("fractions must be positive")
    if abs(sum(fracs) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got {sum(fracs)}")
    n = points.n
    sizes = [math.floor(f * n) for f in fracs]
    sizes[0] += n - sum(sizes)
    if any(s == 0 for s in sizes):
        raise ValueError("split produces an empty part; use larger inputs or fractions")
    perm = rng_from(seed).permutation(n)
    parts = []
    at = 0
    for s in sizes:
        parts.append(PointSet(points.points[perm[at : at + s]], points.role))
        at += s
    return parts


def generate_moons(n: int, noise: float = 0.1, seed: int = 0, role: str = "train") -> PointSet:
    """Two interlocking half-circle arcs with isotropic Gaussian noise.

    The first ceil(n/2) rows lie on arc A: (cos t, sin t); the remaining
    floor(n/2) rows on arc B: (1 - cos t, 0.5 - sin t), t uniform on
    [0, pi]. Noise is added per coordinate with the given standard
    deviation. Deterministic per seed.
    """
    if n < 2:
        raise ValueError("need at least 2 points")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    rng = rng_from(seed)
    n_a = (n + 1) // 2
    n_b = n // 2
    theta_a = rng.uniform(0.0, np.pi, n_a)
    theta_b = rng.uniform(0.0, np.pi, n_b)
    arc_a = np.column_stack([np.cos(theta_a), np.sin(theta_a)])
    arc_b = np.column_stack([1.0 - np.cos(theta_b), 0.5 - np.sin(theta_b)])
    pts = np.vstack([arc_a, arc_b])
    if noise > 0:
        pts = pts + rng.normal(0.0, noise, pts.shape)
    return PointSet(pts, role)
