"""Two-sample comparison baselines and the three-sample kernel MMD."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import sq_dists
from ._rng import rng_from
from .copy_detector import _occupancy_ztest
from .dataset import PointSet
from .metric import _check_metric
from .partition import Partition, assign

_BLOCK = 2_000_000


@dataclass(frozen=True)
class NNAccuracy:
    """Leave-one-out 1-NN label accuracies over pooled train+generated points."""

    train_acc: float
    gen_acc: float
    mean_acc: float
    m: int


@dataclass(frozen=True)
class PRCurve:
    points: tuple[tuple[float, float], ...]
    resolution: int


@dataclass(frozen=True)
class MMDResult:
    mmd2_train_gen: float
    mmd2_train_test: float
    gap: float
    p_value: float
    bandwidth: float


def _loo_and_cross_min(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per row of a: (min sq dist within a excluding self, min sq dist to b)."""
    own = np.empty(a.shape[0])
    cross = np.empty(a.shape[0])
    step = max(1, _BLOCK // max(a.shape[0], b.shape[0]))
    for s in range(0, a.shape[0], step):
        block = a[s : s + step]
        da = sq_dists(block, a)
        da[np.arange(block.shape[0]), np.arange(s, s + block.shape[0])] = np.inf
        own[s : s + block.shape[0]] = da.min(axis=1)
        cross[s : s + block.shape[0]] = sq_dists(block, b).min(axis=1)
    return own, cross


def two_sample_nn(
    train_sub: PointSet, gen: PointSet, metric: str = "squared-euclidean"
) -> NNAccuracy:
    """LOO 1-NN accuracy of predicting train vs generated labels.

    Equal-distance neighbors resolve to the other set, so an exact copy of
    the training sample scores 0 accuracy on both sides.
    """
    _check_metric(metric)
    if train_sub.n != gen.n:
        raise ValueError(
            f"two-sample NN requires equal sizes, got {train_sub.n} vs {gen.n}; "
            "subsample the larger set to match"
        )
    if train_sub.dim != gen.dim:
        raise ValueError("dimension mismatch between train and generated sets")
    t_own, t_cross = _loo_and_cross_min(train_sub.points, gen.points)
    g_own, g_cross = _loo_and_cross_min(gen.points, train_sub.points)
    train_acc = float(np.mean(t_own < t_cross))
    gen_acc = float(np.mean(g_own < g_cross))
    return NNAccuracy(train_acc, gen_acc, (train_acc + gen_acc) / 2.0, gen.n)


def _mle_moments(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mu = pts.mean(axis=0)
    centered = pts - mu
    cov = centered.T @ centered / pts.shape[0]
    return mu, cov


def _ridge_if_deficient(cov: np.ndarray) -> np.ndarray:
    eig = np.linalg.eigvalsh(cov)
    if eig[0] <= 1e-12 * max(eig[-1], 1.0):
        cov = cov + 1e-6 * np.mean(np.diag(cov)) * np.eye(cov.shape[0])
    return cov


def frechet_gaussian(a: PointSet, b: PointSet) -> float:
    """Frechet distance between moment-matched Gaussians fit to the two sets.

    ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a S_b)^{1/2}), with MLE (1/N)
    covariances; the matrix square root goes through the symmetric form
    S_a^{1/2} S_b S_a^{1/2} and roundoff-negative eigenvalues clip to 0.
    """
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    mu_a, cov_a = _mle_moments(a.points)
    mu_b, cov_b = _mle_moments(b.points)
    cov_a = _ridge_if_deficient(cov_a)
    cov_b = _ridge_if_deficient(cov_b)
    ea, ua = np.linalg.eigh(cov_a)
    root_a = (ua * np.sqrt(np.clip(ea, 0.0, None))) @ ua.T
    cross = np.linalg.eigvalsh(root_a @ cov_b @ root_a)
    tr_cross = np.sqrt(np.clip(cross, 0.0, None)).sum()
    dmu = mu_a - mu_b
    return float(dmu @ dmu + np.trace(cov_a) + np.trace(cov_b) - 2.0 * tr_cross)


def binning_ndb(
    train: PointSet, gen: PointSet, part: Partition, significance: float = 0.05
) -> tuple[int, int, np.ndarray]:
    """Occupancy z-test of generated cells against TRAINING-set cells.

    Same machinery as the representation test, but the reference histogram
    comes from T rather than the held-out test set.
    """
    train_count = np.bincount(assign(part, train), minlength=part.k)
    gen_count = np.bincount(assign(part, gen), minlength=part.k)
    return _occupancy_ztest(train_count, gen_count, train.n, gen.n, significance)


def precision_recall(p_frac, q_frac, r: int = 20) -> PRCurve:
    """PRD curve points (alpha(l), beta(l)) over l = tan(i pi / (2(r+1))), i=1..r."""
    p = np.asarray(p_frac, dtype=np.float64).ravel()
    q = np.asarray(q_frac, dtype=np.float64).ravel()
    if r < 1:
        raise ValueError("resolution must be >= 1")
    if p.shape != q.shape:
        raise ValueError("histograms must have the same number of cells")
    for name, h in (("p_frac", p), ("q_frac", q)):
        if np.any(h < 0) or abs(h.sum() - 1.0) > 1e-9:
            raise ValueError(f"{name} must be a normalized histogram (sums to 1)")
    lambdas = np.tan(np.arange(1, r + 1) / (r + 1) * np.pi / 2.0)
    pts = []
    for lam in lambdas:
        # fsum is exactly rounded, so cell order cannot perturb the curve
        alpha = math.fsum(np.minimum(lam * p, q))
        beta = math.fsum(np.minimum(p, q / lam))
        pts.append((alpha, beta))
    return PRCurve(points=tuple(pts), resolution=r)


def _median_pairwise_distance(pooled: np.ndarray) -> float:
    d2 = sq_dists(pooled, pooled)
    iu = np.triu_indices(pooled.shape[0], k=1)
    return float(np.median(np.sqrt(d2[iu])))


class _KmmdGaps:
    """Precomputed Gram pieces for fast gap evaluation under relabelings.

    mmd2 uses the biased V-statistic (all pairs, diagonal included);
    splitting the pooled test+gen rows only needs one matvec per split.
    """

    def __init__(self, train: PointSet, test: PointSet, gen: PointSet, h: float):
        gamma = 1.0 / (2.0 * h * h)
        self.k_tt_mean = float(np.exp(-gamma * sq_dists(train.points, train.points)).mean())
        pooled = np.vstack([test.points, gen.points])
        self.col_mean = np.exp(-gamma * sq_dists(train.points, pooled)).mean(axis=0)
        self.gram = np.exp(-gamma * sq_dists(pooled, pooled))
        self.n = test.n
        self.m = gen.n

    def pair(self, sel_idx: np.ndarray, rest_idx: np.ndarray) -> tuple[float, float]:
        """(mmd2 of T vs rows sel_idx, mmd2 of T vs rows rest_idx).

        Both sides go through identical arithmetic on sliced blocks, so an
        identical test/gen pair yields an exactly zero gap.
        """
        out = []
        for idx in (sel_idx, rest_idx):
            count = len(idx)
            block_sum = float(self.gram[np.ix_(idx, idx)].sum())
            cross = float(self.col_mean[idx].sum()) / count
            out.append(self.k_tt_mean - 2.0 * cross + block_sum / count**2)
        return out[0], out[1]

    def permuted_gaps(self, permutations: int, seed: int) -> np.ndarray:
        rng = rng_from(seed)
        gaps = np.empty(permutations)
        for i in range(permutations):
            perm = rng.permutation(self.n + self.m)
            g, p = self.pair(perm[: self.m], perm[self.m :])
            gaps[i] = g - p
        return gaps


def _resolve_bandwidth(train: PointSet, test: PointSet, gen: PointSet, bandwidth) -> float:
    if bandwidth == "median":
        h = _median_pairwise_distance(np.vstack([train.points, test.points, gen.points]))
        if h <= 0.0:
            raise ValueError("median pairwise distance is zero; supply a bandwidth")
        return h
    h = float(bandwidth)
    if h <= 0.0:
        raise ValueError("bandwidth must be positive")
    return h


def kmmd_three_sample(
    train: PointSet,
    test: PointSet,
    gen: PointSet,
    bandwidth: float | str = "median",
    permutations: int = 500,
    seed: int = 0,
) -> MMDResult:
    """Gaussian-kernel MMD^2 of (T, Q_m) and (T, P_n), with a permutation p-value.

    The "median" bandwidth is the median pairwise distance over the pooled
    three-sample set. The p-value tests H0: MMD(T, Q_m) >= MMD(T, P_n) by
    permuting the test/generated pooling; values near 0 mean the generated
    sample is significantly closer to T than real data is. permutations=0
    skips the p-value (returned as nan).
    """
    if test.dim != train.dim or gen.dim != train.dim:
        raise ValueError("dimension mismatch")
    h = _resolve_bandwidth(train, test, gen, bandwidth)
    work = _KmmdGaps(train, test, gen, h)
    mmd2_tg, mmd2_tp = work.pair(
        np.arange(test.n, test.n + gen.n), np.arange(test.n)
    )
    gap = mmd2_tg - mmd2_tp

    if permutations > 0:
        null_gaps = work.permuted_gaps(permutations, seed)
        p_value = (1 + int(np.sum(null_gaps <= gap))) / (1 + permutations)
    else:
        p_value = float("nan")

    return MMDResult(
        mmd2_train_gen=mmd2_tg,
        mmd2_train_test=mmd2_tp,
        gap=gap,
        p_value=p_value,
        bandwidth=h,
    )


def kmmd_null_gap_std(
    train: PointSet,
    test: PointSet,
    gen: PointSet,
    bandwidth: float | str = "median",
    permutations: int = 500,
    seed: int = 0,
) -> float:
    """Standard deviation of the permutation-null kMMD gap (the test's own scale)."""
    if permutations < 2:
        raise ValueError("need at least 2 permutations")
    h = _resolve_bandwidth(train, test, gen, bandwidth)
    work = _KmmdGaps(train, test, gen, h)
    return float(work.permuted_gaps(permutations, seed).std(ddof=1))
