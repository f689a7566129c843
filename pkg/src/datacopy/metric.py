"""Distance-to-training-set computation and one-dimensional distance samples."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import min_sq_dists
from .dataset import PointSet

METRICS = ("squared-euclidean", "euclidean")


def _check_metric(metric: str) -> None:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


@dataclass(frozen=True)
class DistanceSample:
    """The empirical sample of distances-to-training-set for one point set."""

    values: np.ndarray
    source_role: str
    metric: str

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise ValueError("distance sample must be 1-d")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("distances must be finite and non-negative")
        vals = np.ascontiguousarray(vals)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.shape[0]


def nn_distance(x, train: PointSet, metric: str = "squared-euclidean") -> float:
    """Exact minimum distance from a single point to the training set."""
    _check_metric(metric)
    q = np.asarray(x, dtype=np.float64).reshape(1, -1)
    if q.shape[1] != train.dim:
        raise ValueError(f"dimension mismatch: point is {q.shape[1]}-d, train is {train.dim}-d")
    d = float(min_sq_dists(q, train.points)[0])
    return math.sqrt(d) if metric == "euclidean" else d


def distance_sample(
    points: PointSet, train: PointSet, metric: str = "squared-euclidean"
) -> DistanceSample:
    """Elementwise nearest-training-point distance, in input row order."""
    _check_metric(metric)
    if points.dim != train.dim:
        raise ValueError(f"dimension mismatch: points are {points.dim}-d, train is {train.dim}-d")
    d = min_sq_dists(points.points, train.points)
    if metric == "euclidean":
        d = np.sqrt(d)
    return DistanceSample(d, points.role, metric)
