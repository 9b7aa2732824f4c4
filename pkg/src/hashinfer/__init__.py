"""Similarity-preserving binary codes by per-bit binary quadratic optimization."""

from .al import ALConfig, lbfgs_minimize, solve_al, spectral_init, warm_start_multipliers
from .bqp import BQPInstance, ShiftedBQP, assemble_bit_instance, brute_force, shift_instance
from .core import (
    CodeMatrix,
    DenseMatrix,
    DimensionError,
    NotPSDError,
    NumericalError,
    SolverReport,
    SymmetricMatrix,
    quadratic_form,
    symmetrize,
)
from .driver import InferenceConfig, InferenceTrace, global_objective, infer_codes, init_codes
from .linalg import cholesky_psd, eig_sym, largest_eigenvalue, pca_project, smallest_eigenvector
from .metrics import (
    MetricsReport,
    RetrievalGroundTruth,
    evaluate,
    hamming_distances,
    hamming_rank,
    knn_accuracy,
    knn_classify,
    mean_average_precision,
    pack_codes,
    precision_at_radius2,
)
from .sdr import bound_report, randomized_round, solve_sdp, solve_sdr
from .similarity import (
    SimilarityMatrix,
    TargetMatrix,
    build_supervised,
    build_unsupervised,
    derive_target,
    hamming_from_codes,
    normalize_columns,
)

__version__ = "0.1.0"
