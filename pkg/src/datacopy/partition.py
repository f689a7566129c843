"""Instance-space partition via seeded k-means on the training set."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._kernels import sq_dists
from ._rng import rng_from
from .dataset import PointSet


@dataclass(frozen=True)
class Partition:
    """Fitted k-means centroids; assignment is argmin squared distance,
    ties broken toward the lowest centroid index."""

    centroids: np.ndarray
    k: int
    seed: int
    inertia: float

    def __post_init__(self) -> None:
        c = np.ascontiguousarray(self.centroids, dtype=np.float64)
        if c.ndim != 2 or c.shape[0] != self.k:
            raise ValueError("centroids must be a k x d matrix")
        if not np.all(np.isfinite(c)):
            raise ValueError("centroids must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "centroids", c)

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]

    def to_json(self) -> str:
        return json.dumps(
            {"centroids": self.centroids.tolist(), "k": self.k, "seed": self.seed},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "Partition":
        obj = json.loads(text)
        centroids = np.asarray(obj["centroids"], dtype=np.float64)
        return cls(centroids=centroids, k=int(obj["k"]), seed=int(obj["seed"]),
                   inertia=float("nan"))


@dataclass(frozen=True)
class CellOccupancy:
    """Per-cell counts and fractions for each role; fractions sum to 1 per role."""

    train_count: np.ndarray
    test_count: np.ndarray
    gen_count: np.ndarray
    train_frac: np.ndarray
    test_frac: np.ndarray
    gen_frac: np.ndarray


def _plus_plus_init(pts: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = pts.shape[0]
    centroids = np.empty((k, pts.shape[1]))
    centroids[0] = pts[int(rng.integers(n))]
    closest = sq_dists(pts, centroids[:1])[:, 0]
    for j in range(1, k):
        total = closest.sum()
        idx = int(rng.choice(n, p=closest / total))
        centroids[j] = pts[idx]
        closest = np.minimum(closest, sq_dists(pts, centroids[j : j + 1])[:, 0])
    return centroids


def fit_kmeans(train: PointSet, k: int, seed: int, max_iters: int = 300) -> Partition:
    """Seeded k-means++ init followed by Lloyd iterations to a fixpoint.

    Empty clusters are repaired by reseeding the centroid to the point
    farthest from its assigned centroid. Inertia is checked to be
    non-increasing across assignment steps. Deterministic per seed.
    """
    pts = train.points
    if k < 1:
        raise ValueError("k must be >= 1")
    distinct = np.unique(pts, axis=0).shape[0]
    if k > distinct:
        raise ValueError(f"k={k} exceeds the {distinct} distinct training points")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    centroids = _plus_plus_init(pts, k, rng_from(seed))
    labels = None
    prev_inertia = np.inf
    for _ in range(max_iters):
        d = sq_dists(pts, centroids)
        new_labels = d.argmin(axis=1)
        counts = np.bincount(new_labels, minlength=k)
        while np.any(counts == 0):
            empty = int(np.flatnonzero(counts == 0)[0])
            nearest = d[np.arange(pts.shape[0]), new_labels]
            centroids[empty] = pts[int(nearest.argmax())]
            d[:, empty] = sq_dists(pts, centroids[empty : empty + 1])[:, 0]
            new_labels = d.argmin(axis=1)
            counts = np.bincount(new_labels, minlength=k)
        inertia = float(d[np.arange(pts.shape[0]), new_labels].sum())
        if inertia > prev_inertia * (1 + 1e-12) + 1e-12:
            raise AssertionError("k-means inertia increased; invariant violated")
        prev_inertia = inertia
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        sums = np.zeros_like(centroids)
        np.add.at(sums, labels, pts)
        centroids = sums / counts[:, None]
    return Partition(centroids=centroids, k=k, seed=int(seed), inertia=prev_inertia)


def assign(part: Partition, points: PointSet) -> np.ndarray:
    """Cell index per point: argmin squared distance, lowest index on ties."""
    if points.dim != part.dim:
        raise ValueError(
            f"dimension mismatch: points are {points.dim}-d, partition is {part.dim}-d"
        )
    return sq_dists(points.points, part.centroids).argmin(axis=1)


def occupancy(part: Partition, train: PointSet, test: PointSet, gen: PointSet) -> CellOccupancy:
    """Counts by cell assignment; fractions normalized by each role's total."""
    counts = {}
    for name, ps in (("train", train), ("test", test), ("gen", gen)):
        counts[name] = np.bincount(assign(part, ps), minlength=part.k)
    return CellOccupancy(
        train_count=counts["train"],
        test_count=counts["test"],
        gen_count=counts["gen"],
        train_frac=counts["train"] / train.n,
        test_frac=counts["test"] / test.n,
        gen_frac=counts["gen"] / gen.n,
    )
