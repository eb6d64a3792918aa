"""Multiple quantum hypothesis testing at desk scale.

Dense numerical constructions for discriminating r quantum states from n
copies: the optimal binary test, the square-root measurement, the
tensor-split multi-copy detector, pairwise Chernoff exponents with the
attainability condition, and exact error/bound evaluation.
"""

from .chernoff import (
    ChernoffResult,
    ConditionReport,
    attainability_condition,
    chernoff_curve,
    chernoff_distance,
    least_favorable_pair,
    min_distance_excluding,
    pairwise_distances,
)
from .detectors import (
    CompositionTrace,
    Detector,
    SplitReport,
    build_split_detector,
    check_detector,
    compose_with_binary,
    holevo_helstrom,
    pgm,
    recursive_detector,
    validate_detector,
    wedge,
)
from .evaluation import (
    BinaryDecayRow,
    ErrorReport,
    ExperimentTable,
    ExponentSeries,
    LemmaReport,
    OverallReport,
    binary_chernoff_upper_check,
    error_sum,
    exponent_estimate,
    lemma_bound_check,
    overall_bound_check,
    run_experiment,
)
from .states import (
    DEFAULT_DIM_CAP,
    DensityMatrix,
    Ensemble,
    classical_state,
    density_from_matrix,
    mix,
    pure_state,
    random_density,
    tensor_power,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryDecayRow",
    "ChernoffResult",
    "CompositionTrace",
    "ConditionReport",
    "DEFAULT_DIM_CAP",
    "DensityMatrix",
    "Detector",
    "Ensemble",
    "ErrorReport",
    "ExperimentTable",
    "ExponentSeries",
    "LemmaReport",
    "OverallReport",
    "SplitReport",
    "attainability_condition",
    "binary_chernoff_upper_check",
    "build_split_detector",
    "check_detector",
    "chernoff_curve",
    "chernoff_distance",
    "classical_state",
    "compose_with_binary",
    "density_from_matrix",
    "error_sum",
    "exponent_estimate",
    "holevo_helstrom",
    "least_favorable_pair",
    "lemma_bound_check",
    "min_distance_excluding",
    "mix",
    "overall_bound_check",
    "pairwise_distances",
    "pgm",
    "pure_state",
    "random_density",
    "recursive_detector",
    "run_experiment",
    "tensor_power",
    "validate_detector",
    "wedge",
]
