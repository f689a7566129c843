"""Mann-Whitney U machinery: ranks, U, z-scored statistic, Monte Carlo checks.

The convention throughout: sample A holds test-set distances, sample B
holds generated-set distances, and U counts pairs with B_j > A_i (ties
contribute 1/2 via midranks). Strongly negative z means the generated
sample sits closer to the training set than real data does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._rng import pack_stream, rng_from
from .dataset import PointSet
from .metric import distance_sample

SMALL_SAMPLE = 20  # below this the normal approximation for U is shaky


@dataclass(frozen=True)
class UTestResult:
    """U statistic, rank-sum, U/(mn), and the z-scored statistic.

    `small_sample` is a warning flag set when min(m, n) < 20; it is not
    part of the serialized report.
    """

    u: float
    rank_sum: float
    delta_hat: float
    z_u: float
    m: int
    n: int
    tie_count: int
    small_sample: bool = False


def _midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the mean rank of their run.

    Midranks are integers or halves, so their sums are exact in floats.
    """
    order = np.argsort(values, kind="stable")
    sv = values[order]
    n = len(sv)
    bounds = np.flatnonzero(np.diff(sv)) + 1
    starts = np.concatenate(([0], bounds))
    ends = np.concatenate((bounds, [n]))
    mid = (starts + ends + 1) / 2.0
    out = np.empty(n)
    out[order] = np.repeat(mid, ends - starts)
    return out


def _cross_tie_count(a: np.ndarray, b: np.ndarray) -> int:
    va, ca = np.unique(a, return_counts=True)
    vb, cb = np.unique(b, return_counts=True)
    _, ia, ib = np.intersect1d(va, vb, return_indices=True)
    return int((ca[ia] * cb[ib]).sum())


def _values(sample) -> np.ndarray:
    vals = getattr(sample, "values", sample)
    return np.asarray(vals, dtype=np.float64).ravel()


def mann_whitney(test_dists, gen_dists) -> UTestResult:
    """Mann-Whitney U test of generated distances against test distances.

    u = #{B_j > A_i} + 0.5 * #{B_j == A_i}, computed from midranks of the
    pooled sample; z_u = (u - mn/2) / sqrt(mn(m+n+1)/12) with no
    continuity or tie correction.
    """
    a = _values(test_dists)
    b = _values(gen_dists)
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        raise ValueError("both samples must be non-empty")
    ranks = _midranks(np.concatenate([a, b]))
    rank_sum = float(ranks[n:].sum())
    u = rank_sum - m * (m + 1) / 2.0
    mu = m * n / 2.0
    sigma = math.sqrt(m * n * (m + n + 1) / 12.0)
    return UTestResult(
        u=u,
        rank_sum=rank_sum,
        delta_hat=u / (m * n),
        z_u=(u - mu) / sigma,
        m=m,
        n=n,
        tie_count=_cross_tie_count(a, b),
        small_sample=min(m, n) < SMALL_SAMPLE,
    )


Sampler = Callable[[np.random.Generator, int], np.ndarray]

_NAMED_SAMPLERS: dict[str, Sampler] = {
    "normal": lambda rng, size: rng.normal(0.0, 1.0, (size, 1)),
    "uniform": lambda rng, size: rng.uniform(0.0, 1.0, (size, 1)),
}


def gaussian_sampler(loc: float = 0.0, scale: float = 1.0, dim: int = 1) -> Sampler:
    return lambda rng, size: rng.normal(loc, scale, (size, dim))


def resolve_sampler(spec) -> Sampler:
    if callable(spec):
        return spec
    if isinstance(spec, str):
        try:
            return _NAMED_SAMPLERS[spec]
        except KeyError:
            raise ValueError(
                f"unknown distribution spec {spec!r}; "
                f"expected one of {tuple(_NAMED_SAMPLERS)} or a callable(rng, size)"
            ) from None
    raise ValueError("distribution spec must be a name or a callable(rng, size)")


def null_calibration(
    sampler, train_size: int, n: int, m: int, trials: int, seed: int
) -> dict[str, float]:
    """Distribution of z under the null: fresh T, P_n, Q_m per trial, same source.

    Returns the mean and sample standard deviation of z across trials.
    """
    if trials < 2:
        raise ValueError("need at least 2 trials")
    draw = resolve_sampler(sampler)
    zs = np.empty(trials)
    for t in range(trials):
        rng = rng_from(seed, pack_stream(1, t))
        train = PointSet(draw(rng, train_size), "train")
        test = PointSet(draw(rng, n), "test")
        gen = PointSet(draw(rng, m), "generated")
        res = mann_whitney(distance_sample(test, train), distance_sample(gen, train))
        zs[t] = res.z_u
    return {"mean_z": float(zs.mean()), "std_z": float(zs.std(ddof=1))}


def concentration_check(
    p_spec,
    q_spec,
    train_size: int,
    n: int,
    m: int,
    trials: int,
    t_grid: Sequence[float],
    seed: int,
    delta: float | None = None,
) -> list[tuple[float, float, float]]:
    """Empirical exceedance of |U/mn - delta| >= t against exp(-2 t^2 mn/(m+n)).

    The training set is drawn once and held fixed across trials. When
    `delta` is not supplied it is estimated by a held-out oracle run with
    at least 10^6 pairwise comparisons. Returns rows (t, exceedance, bound).
    """
    ts = [float(t) for t in t_grid]
    if not ts or any(t <= 0 for t in ts):
        raise ValueError("t grid must be non-empty and positive")
    p = resolve_sampler(p_spec)
    q = resolve_sampler(q_spec)
    rng = rng_from(seed, pack_stream(0))
    train = PointSet(p(rng, train_size), "train")
    if delta is None:
        big = 1000  # 10^6 pair comparisons
        dp = distance_sample(PointSet(p(rng, big), "test"), train)
        dq = distance_sample(PointSet(q(rng, big), "generated"), train)
        delta = mann_whitney(dp, dq).delta_hat
    deltas = np.empty(trials)
    for i in range(trials):
        rng_t = rng_from(seed, pack_stream(1, i))
        dp = distance_sample(PointSet(p(rng_t, n), "test"), train)
        dq = distance_sample(PointSet(q(rng_t, m), "generated"), train)
        deltas[i] = mann_whitney(dp, dq).delta_hat
    table = []
    for t in ts:
        exceed = float(np.mean(np.abs(deltas - delta) >= t))
        bound = math.exp(-2.0 * t * t * m * n / (m + n))
        table.append((t, exceed, bound))
    return table
