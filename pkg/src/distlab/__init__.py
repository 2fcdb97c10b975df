"""Distinguishability of composite hypotheses on a discretized unit interval.

Grid measures and families, the convex-hull total variation bound, partition
tests with Monte Carlo error estimates, Gaussian and Poisson detection models,
deconvolution and stopping times of discerning test sequences.
"""

__version__ = "0.1.0"

from .errors import DimensionError, NoSeparation, SingularOperatorError, SolverNotConverged
from .measures import (
    DensityFamily,
    DyadicSet,
    GridMeasure,
    mixture,
    point_mass,
    sine_density,
    sine_family,
    tau_discrepancy,
    total_variation,
    uniform,
    wasserstein1,
)
from .kraft import CertifyConfig, Verdict, VerdictKind, certify, hull_min_tv, kraft_lower_bound
from .partition import (
    PartitionTestSpec,
    TestReport,
    build_test_from_families,
    estimate_errors,
    find_separating_sets,
    fit_exponential_rate,
)

__all__ = [
    "CertifyConfig", "DensityFamily", "DimensionError", "DyadicSet", "GridMeasure",
    "NoSeparation", "PartitionTestSpec", "SingularOperatorError", "SolverNotConverged",
    "TestReport", "Verdict", "VerdictKind", "build_test_from_families", "certify",
    "estimate_errors", "find_separating_sets", "fit_exponential_rate", "hull_min_tv",
    "kraft_lower_bound", "mixture", "point_mass", "sine_density", "sine_family",
    "tau_discrepancy", "total_variation", "uniform", "wasserstein1",
]
