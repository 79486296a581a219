"""Objective functions of load-sharing problems from observed force-force relations."""

__version__ = "0.1.0"

from .errors import (
    ContractionViolated,
    DegenerateRatio,
    DomainError,
    ForceOutOfDomain,
    LoadShareError,
    NoConvergence,
    NonConvexObjective,
    NonMonotoneData,
    ParseError,
    QuadratureFailure,
    RangeError,
    SlopeOutOfRange,
    ValidationError,
)
from .funcmodel import LinearMap, MoebiusMap, MonotoneMap, TabulatedMap, make_tabulated
from .ingest import ExperimentTable, ProblemConfig, read_config, read_samples
from .koenigs import KoenigsFunction, iterate, koenigs_build
from .objective import ObjectiveModel, build_objective, compute_exponent
from .solver import SharingProblem, SolveResult, predict_pair_sharing, sharing_curve, solve
