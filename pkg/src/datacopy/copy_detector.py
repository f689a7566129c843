"""The headline tests: global z, per-cell z with the tau threshold, the
weighted summary statistic, and the occupancy (NDB) z-test."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .dataset import PointSet
from .metric import DistanceSample, distance_sample
from .partition import Partition, assign
from .rank_stats import UTestResult, mann_whitney

EXCLUSION_REASONS = ("below-tau", "insufficient-test", "insufficient-gen")


class NoRepresentedCellsError(ValueError):
    """No cell passed the inclusion rule; tau too high or samples too small."""


@dataclass(frozen=True)
class CellResult:
    cell: int
    train_count: int
    test_count: int
    gen_count: int
    p_frac: float
    q_frac: float
    z_u: float | None
    z_pi: float
    included_in_ct: bool
    exclusion_reason: str | None


@dataclass(frozen=True)
class CopyReport:
    global_: UTestResult
    cells: tuple[CellResult, ...]
    c_t: float
    ndb_over: int
    ndb_under: int
    tau: float
    params: dict


def global_test(
    train: PointSet, test: PointSet, gen: PointSet, metric: str = "squared-euclidean"
) -> UTestResult:
    """Rank test of L(Q_m) against L(P_n), distances to the full training set."""
    return mann_whitney(
        distance_sample(test, train, metric), distance_sample(gen, train, metric)
    )


def _occupancy_ztest(
    ref_count: np.ndarray, gen_count: np.ndarray, n: int, m: int, significance: float
) -> tuple[int, int, np.ndarray]:
    """Pooled-proportion z per cell and the over/under counts at `significance`.

    z = (Q_m(pi) - R(pi)) / sqrt(phat (1 - phat) (1/n + 1/m)) with
    phat = (n R(pi) + m Q_m(pi)) / (n + m). Cells empty on both sides get z = 0.
    """
    if not 0.0 < significance < 0.5:
        raise ValueError("significance must be in (0, 0.5)")
    ref_frac = ref_count / n
    gen_frac = gen_count / m
    phat = (ref_count + gen_count) / (n + m)
    denom = np.sqrt(phat * (1.0 - phat) * (1.0 / n + 1.0 / m))
    # phat of 0 or 1 zeroes the denominator; such cells carry no evidence
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(denom > 0, (gen_frac - ref_frac) / denom, 0.0)
    empty = np.flatnonzero(phat <= 0)
    if empty.size:
        warnings.warn(
            f"cells {empty.tolist()} hold no points on either side; their z is set to 0",
            RuntimeWarning,
            stacklevel=3,
        )
    z_crit = NormalDist().inv_cdf(1.0 - significance)
    return int(np.sum(z > z_crit)), int(np.sum(z < -z_crit)), z


def representation_test(
    test: PointSet, gen: PointSet, part: Partition, significance: float = 0.05
) -> tuple[int, int, np.ndarray]:
    """Over/under-representation z-test of generated vs test cell occupancy."""
    test_count = np.bincount(assign(part, test), minlength=part.k)
    gen_count = np.bincount(assign(part, gen), minlength=part.k)
    return _occupancy_ztest(test_count, gen_count, test.n, gen.n, significance)


def ct_test(
    train: PointSet,
    test: PointSet,
    gen: PointSet,
    part: Partition,
    tau: float | str = "auto",
    min_cell: int = 20,
    metric: str = "squared-euclidean",
    significance: float = 0.05,
    seed: int | None = None,
) -> CopyReport:
    """Per-cell rank tests combined into the weighted summary statistic.

    Membership restricts each sample to a cell, but distances are always
    to the full training set. A cell enters the summary only when the
    generated fraction reaches tau AND both in-cell sample sizes reach
    min_cell; weights are the test-set fractions, renormalized over the
    included cells. tau="auto" resolves to min_cell / m.
    """
    if min_cell < 1:
        raise ValueError("min_cell must be >= 1")
    n, m = test.n, gen.n
    tau_val = min_cell / m if tau == "auto" else float(tau)
    if not 0.0 <= tau_val <= 1.0:
        raise ValueError("tau must lie in [0, 1]")

    d_test = distance_sample(test, train, metric).values
    d_gen = distance_sample(gen, train, metric).values
    test_labels = assign(part, test)
    gen_labels = assign(part, gen)
    train_count = np.bincount(assign(part, train), minlength=part.k)
    test_count = np.bincount(test_labels, minlength=part.k)
    gen_count = np.bincount(gen_labels, minlength=part.k)
    ndb_over, ndb_under, z_pi = _occupancy_ztest(test_count, gen_count, n, m, significance)

    cells = []
    for c in range(part.k):
        p_frac = test_count[c] / n
        q_frac = gen_count[c] / m
        reason = None
        if q_frac < tau_val:
            reason = "below-tau"
        elif test_count[c] < min_cell:
            reason = "insufficient-test"
        elif gen_count[c] < min_cell:
            reason = "insufficient-gen"
        z_u = None
        if reason is None:
            res = mann_whitney(
                DistanceSample(d_test[test_labels == c], "test", metric),
                DistanceSample(d_gen[gen_labels == c], "generated", metric),
            )
            z_u = res.z_u
        cells.append(
            CellResult(
                cell=c,
                train_count=int(train_count[c]),
                test_count=int(test_count[c]),
                gen_count=int(gen_count[c]),
                p_frac=float(p_frac),
                q_frac=float(q_frac),
                z_u=z_u,
                z_pi=float(z_pi[c]),
                included_in_ct=reason is None,
                exclusion_reason=reason,
            )
        )

    included = [c for c in cells if c.included_in_ct]
    if not included:
        raise NoRepresentedCellsError(
            "no represented cells: every cell failed the inclusion rule "
            f"(tau={tau_val}, min_cell={min_cell}); lower tau or use larger samples"
        )
    weights = np.array([c.p_frac for c in included])
    zs = np.array([c.z_u for c in included])
    c_t = float((weights * zs).sum() / weights.sum())

    return CopyReport(
        global_=global_test(train, test, gen, metric),
        cells=tuple(cells),
        c_t=c_t,
        ndb_over=ndb_over,
        ndb_under=ndb_under,
        tau=tau_val,
        params={
            "k": part.k,
            "tau": tau_val,
            "min_cell": min_cell,
            "significance": significance,
            "metric": metric,
            "seed": seed,
        },
    )


def _utest_dict(res: UTestResult) -> dict:
    return {
        "u": res.u,
        "rank_sum": res.rank_sum,
        "delta_hat": res.delta_hat,
        "z_u": res.z_u,
        "m": res.m,
        "n": res.n,
        "tie_count": res.tie_count,
    }


def report_to_dict(report: CopyReport) -> dict:
    """CopyReport as a JSON-ready dict with stable key order."""
    return {
        "global": _utest_dict(report.global_),
        "cells": [
            {
                "cell": c.cell,
                "train_count": c.train_count,
                "test_count": c.test_count,
                "gen_count": c.gen_count,
                "p_frac": c.p_frac,
                "q_frac": c.q_frac,
                "z_u": c.z_u,
                "z_pi": c.z_pi,
                "included_in_ct": c.included_in_ct,
                "exclusion_reason": c.exclusion_reason,
            }
            for c in report.cells
        ],
        "c_t": report.c_t,
        "ndb_over": report.ndb_over,
        "ndb_under": report.ndb_under,
        "params": dict(report.params),
    }


def emit_report(report: CopyReport, path: str) -> None:
    """Write the report JSON; refuses to emit a report with no cells."""
    if not report.cells:
        raise ValueError("refusing to emit a report with an empty cells sequence")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=2)
        fh.write("\n")
