"""Command-line surface: data generation, single-run reports, baselines,
and the bandwidth-sweep harness emitting plot-ready CSV.

Exit codes: 0 success, 2 usage or file/parse errors, 3 statistical
degeneracy (no cell passes the inclusion rule).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import baselines, kde
from ._rng import derive_seed, rng_from
from .copy_detector import (
    NoRepresentedCellsError,
    _utest_dict,
    ct_test,
    emit_report,
    global_test,
)
from .dataset import PointSet, generate_moons, load_point_set, save_point_set
from .partition import assign, fit_kmeans

SWEEP_COLUMNS = (
    "sigma",
    "trial",
    "c_t",
    "global_z_u",
    "nn_train_acc",
    "nn_gen_acc",
    "frechet",
    "ndb_over",
    "ndb_under",
    "kmmd_gap",
    "val_loglik",
)


def _tau_arg(text: str):
    if text == "auto":
        return "auto"
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tau must be 'auto' or a real, got {text!r}")
    return val


def _sigmas_arg(text: str) -> list[float]:
    """Either 'lo:hi:logN' (log-spaced grid) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or not parts[2].startswith("log"):
            raise argparse.ArgumentTypeError(
                f"malformed sigma spec {text!r}; expected lo:hi:logN or a comma list"
            )
        try:
            lo, hi = float(parts[0]), float(parts[1])
            count = int(parts[2][3:])
        except ValueError:
            raise argparse.ArgumentTypeError(f"malformed sigma spec {text!r}")
        if lo <= 0 or hi <= lo or count < 2:
            raise argparse.ArgumentTypeError(f"bad sigma range in {text!r}")
        return [float(s) for s in np.geomspace(lo, hi, count)]
    try:
        sigmas = [float(s) for s in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed sigma spec {text!r}")
    if not sigmas or any(s <= 0 for s in sigmas):
        raise argparse.ArgumentTypeError("sigmas must be positive")
    return sigmas


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_json(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_moons(args) -> int:
    if args.n < 2:
        raise ValueError("--n must be at least 2")
    if args.noise < 0:
        raise ValueError("--noise must be non-negative")
    save_point_set(generate_moons(args.n, args.noise, args.seed), args.out)
    return 0


def cmd_global(args) -> int:
    train = load_point_set(args.train, "train")
    test = load_point_set(args.test, "test")
    gen = load_point_set(args.gen, "generated")
    res = global_test(train, test, gen, args.metric)
    _write_json({"global": _utest_dict(res), "params": {"metric": args.metric}}, args.report)
    return 0


def cmd_test(args) -> int:
    train = load_point_set(args.train, "train")
    test = load_point_set(args.test, "test")
    gen = load_point_set(args.gen, "generated")
    part = fit_kmeans(train, args.cells, args.seed)
    report = ct_test(
        train,
        test,
        gen,
        part,
        tau=args.tau,
        min_cell=args.min_cell,
        metric=args.metric,
        significance=args.significance,
        seed=args.seed,
    )
    emit_report(report, args.report)
    return 0


def cmd_baseline_nn(args) -> int:
    train = load_point_set(args.train, "train")
    gen = load_point_set(args.gen, "generated")
    res = baselines.two_sample_nn(train, gen, args.metric)
    _write_json(
        {
            "train_acc": res.train_acc,
            "gen_acc": res.gen_acc,
            "mean_acc": res.mean_acc,
            "m": res.m,
        },
        args.out,
    )
    return 0


def cmd_baseline_frechet(args) -> int:
    a = load_point_set(args.a, "train")
    b = load_point_set(args.b, "generated")
    _write_json({"frechet": baselines.frechet_gaussian(a, b)}, args.out)
    return 0


def cmd_baseline_ndb(args) -> int:
    train = load_point_set(args.train, "train")
    gen = load_point_set(args.gen, "generated")
    part = fit_kmeans(train, args.cells, args.seed)
    over, under, z = baselines.binning_ndb(train, gen, part, args.significance)
    _write_json({"ndb_over": over, "ndb_under": under, "z": list(z)}, args.out)
    return 0


def cmd_baseline_pr(args) -> int:
    a = load_point_set(args.a, "train")
    b = load_point_set(args.b, "generated")
    pooled = PointSet(np.vstack([a.points, b.points]), "train")
    curves = np.zeros((args.resolution, 2))
    for rep in range(args.repeats):
        part = fit_kmeans(pooled, args.cells, derive_seed(args.seed, rep))
        p_frac = np.bincount(assign(part, a), minlength=args.cells) / a.n
        q_frac = np.bincount(assign(part, b), minlength=args.cells) / b.n
        curve = baselines.precision_recall(p_frac, q_frac, args.resolution)
        curves += np.asarray(curve.points)
    curves /= args.repeats
    _write_json(
        {"resolution": args.resolution, "points": [list(p) for p in curves]}, args.out
    )
    return 0


def cmd_baseline_kmmd(args) -> int:
    train = load_point_set(args.train, "train")
    test = load_point_set(args.test, "test")
    gen = load_point_set(args.gen, "generated")
    bw = args.bandwidth if args.bandwidth == "median" else float(args.bandwidth)
    res = baselines.kmmd_three_sample(train, test, gen, bw, args.permutations, args.seed)
    _write_json(
        {
            "mmd2_train_gen": res.mmd2_train_gen,
            "mmd2_train_test": res.mmd2_train_test,
            "gap": res.gap,
            "p_value": res.p_value,
            "bandwidth": res.bandwidth,
        },
        args.out,
    )
    return 0


def _nn_pair(train, gen, m: int, seed: int):
    """Equal-size train/generated pair for the NN baseline, subsampling the larger."""
    if train.n == gen.n:
        return train, gen
    rng = rng_from(seed)
    if train.n > gen.n:
        idx = rng.choice(train.n, size=gen.n, replace=False)
        return PointSet(train.points[idx], "train"), gen
    idx = rng.choice(gen.n, size=train.n, replace=False)
    return train, PointSet(gen.points[idx], "generated")


def cmd_kde_sweep(args) -> int:
    if args.train == args.validation:
        print(
            "warning: --train and --validation point to the same file; "
            "bandwidth selection on training data is degenerate",
            file=sys.stderr,
        )
    train = load_point_set(args.train, "train")
    test = load_point_set(args.test, "test")
    validation = load_point_set(args.validation, "validation")
    part = fit_kmeans(train, args.cells, args.seed)
    rows = []
    for si, sigma in enumerate(args.sigmas):
        model = kde.KdeModel(train, sigma)
        val_ll = float(kde.log_densities(model, validation).mean())
        for ti in range(args.trials):
            gen = kde.sample(model, args.m, derive_seed(args.seed, si, ti, 0))
            report = ct_test(train, test, gen, part, tau="auto", min_cell=20, seed=args.seed)
            nn_train, nn_gen = _nn_pair(train, gen, args.m, derive_seed(args.seed, si, ti, 1))
            nn = baselines.two_sample_nn(nn_train, nn_gen)
            fd = baselines.frechet_gaussian(train, gen)
            over, under, _ = baselines.binning_ndb(train, gen, part)
            mmd = baselines.kmmd_three_sample(train, test, gen, "median", permutations=0)
            rows.append(
                (
                    sigma,
                    ti,
                    report.c_t,
                    report.global_.z_u,
                    nn.train_acc,
                    nn.gen_acc,
                    fd,
                    over,
                    under,
                    mmd.gap,
                    val_ll,
                )
            )
        print(f"sigma {sigma:g} done ({si + 1}/{len(args.sigmas)})", file=sys.stderr)

    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")

    stem = args.out.rsplit(".", 1)[0] if "." in args.out else args.out
    summary_path = stem + "_summary.csv"
    metric_cols = SWEEP_COLUMNS[2:]
    header = ["sigma"]
    for col in metric_cols:
        header += [f"{col}_mean", f"{col}_std"]
    data = np.array([row[2:] for row in rows], dtype=np.float64)
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for si, sigma in enumerate(args.sigmas):
            block = data[si * args.trials : (si + 1) * args.trials]
            cells = [repr(float(sigma))]
            for ci in range(block.shape[1]):
                cells.append(repr(float(block[:, ci].mean())))
                cells.append(repr(float(block[:, ci].std(ddof=1))) if block.shape[0] > 1 else "nan")
            fh.write(",".join(cells) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="datacopy",
        description="Three-sample tests for data-copying in generative models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moons", help="generate the synthetic moons dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_moons)

    p = sub.add_parser("global", help="global rank test of generated vs test distances")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--gen", required=True)
    p.add_argument("--metric", default="squared-euclidean",
                   choices=("squared-euclidean", "euclidean"))
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_global)

    p = sub.add_parser("test", help="full cell-partitioned copy report")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--gen", required=True)
    p.add_argument("--cells", type=int, required=True)
    p.add_argument("--tau", type=_tau_arg, default="auto")
    p.add_argument("--min-cell", type=int, default=20)
    p.add_argument("--significance", type=float, default=0.05)
    p.add_argument("--metric", default="squared-euclidean",
                   choices=("squared-euclidean", "euclidean"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("baseline", help="comparison baselines")
    bsub = p.add_subparsers(dest="baseline", required=True)

    b = bsub.add_parser("nn", help="two-sample LOO nearest-neighbor accuracy")
    b.add_argument("--train", required=True)
    b.add_argument("--gen", required=True)
    b.add_argument("--metric", default="squared-euclidean",
                   choices=("squared-euclidean", "euclidean"))
    b.add_argument("--out")
    b.set_defaults(func=cmd_baseline_nn)

    b = bsub.add_parser("frechet", help="Frechet distance between fitted Gaussians")
    b.add_argument("--a", required=True)
    b.add_argument("--b", required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_baseline_frechet)

    b = bsub.add_parser("ndb", help="binning z-test against the training histogram")
    b.add_argument("--train", required=True)
    b.add_argument("--gen", required=True)
    b.add_argument("--cells", type=int, default=10)
    b.add_argument("--significance", type=float, default=0.05)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_baseline_ndb)

    b = bsub.add_parser("pr", help="precision-recall curve from pooled k-means histograms")
    b.add_argument("--a", required=True)
    b.add_argument("--b", required=True)
    b.add_argument("--cells", type=int, default=5)
    b.add_argument("--resolution", type=int, default=20)
    b.add_argument("--repeats", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_baseline_pr)

    b = bsub.add_parser("kmmd", help="three-sample kernel MMD comparison")
    b.add_argument("--train", required=True)
    b.add_argument("--test", required=True)
    b.add_argument("--gen", required=True)
    b.add_argument("--bandwidth", default="median")
    b.add_argument("--permutations", type=int, default=500)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_baseline_kmmd)

    p = sub.add_parser("kde-sweep", help="bandwidth sweep emitting plot-ready CSV")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--validation", required=True)
    p.add_argument("--sigmas", type=_sigmas_arg, required=True,
                   help="lo:hi:logN for a log grid, or a comma-separated list")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--cells", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_kde_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NoRepresentedCellsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
