"""Three-sample statistical tests for detecting data-copying in generative models."""

from ._kernels import BACKEND
from ._rng import derive_seed, rng_from
from .baselines import (
    MMDResult,
    NNAccuracy,
    PRCurve,
    binning_ndb,
    frechet_gaussian,
    kmmd_three_sample,
    precision_recall,
    two_sample_nn,
)
from .copy_detector import (
    CellResult,
    CopyReport,
    NoRepresentedCellsError,
    ct_test,
    emit_report,
    global_test,
    report_to_dict,
    representation_test,
)
from .dataset import PointSet, generate_moons, load_point_set, save_point_set, split
from .kde import KdeModel, lemma1_check, log_densities, log_density, mle_bandwidth, posterior
from .kde import sample as kde_sample
from .metric import DistanceSample, distance_sample, nn_distance
from .partition import CellOccupancy, Partition, assign, fit_kmeans, occupancy
from .rank_stats import UTestResult, concentration_check, mann_whitney, null_calibration

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CellOccupancy",
    "CellResult",
    "CopyReport",
    "DistanceSample",
    "KdeModel",
    "MMDResult",
    "NNAccuracy",
    "NoRepresentedCellsError",
    "PRCurve",
    "Partition",
    "PointSet",
    "UTestResult",
    "assign",
    "binning_ndb",
    "concentration_check",
    "ct_test",
    "derive_seed",
    "distance_sample",
    "emit_report",
    "fit_kmeans",
    "frechet_gaussian",
    "generate_moons",
    "global_test",
    "kde_sample",
    "kmmd_three_sample",
    "lemma1_check",
    "load_point_set",
    "log_densities",
    "log_density",
    "mann_whitney",
    "mle_bandwidth",
    "nn_distance",
    "null_calibration",
    "occupancy",
    "posterior",
    "precision_recall",
    "report_to_dict",
    "representation_test",
    "rng_from",
    "save_point_set",
    "split",
    "two_sample_nn",
]
