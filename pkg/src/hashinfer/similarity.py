"""Similarity construction and least-squares target assembly.

Binary codes are scored by the inner product relation
d_hamming = (L - z_i^T z_j) / 2, so the target for Z^T Z is built from the
pairwise similarity so that matching it reproduces the wanted distances.
"""

from dataclasses import dataclass

import numpy as np

from .core import CodeMatrix, DimensionError, SymmetricMatrix, _as_array

UNSUPERVISED = "unsupervised"
SUPERVISED = "supervised"

_UNIT_NORM_TOL = 1e-8


@dataclass(frozen=True)
class SimilarityMatrix:
    """Pairwise dissimilarity with the scale it lives on.

    Unsupervised entries are squared Euclidean distances of unit-norm
    inputs, in [0, 4]. Supervised entries are label disagreements in {0, 1}.
    """

    s: SymmetricMatrix
    mode: str
    scale: float

    def __post_init__(self):
        if self.mode not in (UNSUPERVISED, SUPERVISED):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def n(self):
        return self.s.n


@dataclass(frozen=True)
class TargetMatrix:
    """Least-squares target for Z^T Z at a given code length."""

    y: SymmetricMatrix
    code_length: int

    @property
    def n(self):
        return self.y.n


def build_unsupervised(x) -> SimilarityMatrix:
    """Squared Euclidean distances between unit-norm columns of x.

    s_ij = 2 - 2 x_i^T x_j, clipped into [0, 4] against rounding, with an
    exactly zero diagonal. Columns must be unit norm within 1e-8.
    """
    data = _as_array(x)
    if data.ndim != 2 or data.shape[1] < 1:
        raise DimensionError("expected a D x n matrix with n >= 1")
    norms = np.linalg.norm(data, axis=0)
    bad = np.where(np.abs(norms - 1.0) > _UNIT_NORM_TOL)[0]
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"column {i} has norm {norms[i]:.12f}, expected 1 within {_UNIT_NORM_TOL}")
    s = 2.0 - 2.0 * (data.T @ data)
    np.fill_diagonal(s, 0.0)
    np.clip(s, 0.0, 4.0, out=s)
    return SimilarityMatrix(SymmetricMatrix(s), UNSUPERVISED, 4.0)


def build_supervised(labels) -> SimilarityMatrix:
    """Label disagreement matrix: s_ij = 0 for same class, 1 otherwise."""
    lab = np.asarray(labels)
    if lab.ndim != 1 or lab.shape[0] < 1:
        raise DimensionError("labels must be a non-empty 1-d vector")
    s = (lab[:, None] != lab[None, :]).astype(np.float64)
    return SimilarityMatrix(SymmetricMatrix(s), SUPERVISED, 1.0)


def normalize_columns(x) -> np.ndarray:
    """Scale each column to unit Euclidean norm. Zero columns are an error."""
    data = np.array(_as_array(x), dtype=np.float64)
    norms = np.linalg.norm(data, axis=0)
    if (norms == 0.0).any():
        raise ValueError("cannot normalize a zero column")
    return data / norms


def derive_target(sim: SimilarityMatrix, code_length: int) -> TargetMatrix:
    """Map similarities onto the inner product scale of Z^T Z.

    Unsupervised: y = L - L s / 2, so s = 0 pairs target +L and s = 4 pairs
    target -L. Supervised: y = L - 2 L s, targeting +L within class and -L
    across. Diagonals are exactly L either way.
    """
    if code_length < 1:
        raise ValueError(f"code_length must be >= 1, got {code_length}")
    ell = float(code_length)
    if sim.mode == UNSUPERVISED:
        y = ell - ell * sim.s.data / 2.0
    else:
        y = ell - 2.0 * ell * sim.s.data
    return TargetMatrix(SymmetricMatrix(y), code_length)


def hamming_from_codes(z: CodeMatrix) -> SymmetricMatrix:
    """Exact pairwise Hamming distances via the inner product identity."""
    zf = z.as_float()
    return SymmetricMatrix((z.bits - zf.T @ zf) / 2.0)
