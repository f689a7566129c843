import numpy as np
import pytest

from datacopy import _kernels
from datacopy._rng import rng_from
from datacopy.dataset import PointSet


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # trigger numba compilation up front so timed tests measure the work only
    pts = np.zeros((2, 2))
    _kernels.min_sq_dists(pts, pts)
    _kernels.sq_dists(pts, pts)


def bootstrap(points: PointSet, m: int, seed: int, role: str = "generated") -> PointSet:
    """Seeded with-replacement resample of the rows of a point set."""
    idx = rng_from(seed).integers(0, points.n, size=m)
    return PointSet(points.points[idx], role)
