"""Symmetric eigendecomposition, PSD Cholesky, and PCA on top of the kernels."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import DenseMatrix, DimensionError, NotPSDError, NumericalError, SymmetricMatrix, _as_array

_SWEEP_CAP = 60
_REL_THRESH = 1e-14
_FAIL_TOL = 1e-8
_MAX_JITTER = 1e-3


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order, eigenvector k in column k.

    Each eigenvector is unit norm with its largest magnitude entry positive
    (first occurrence on ties), which pins the sign freedom.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self):
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class CholeskyFactor:
    lower: np.ndarray
    jitter: float

    @property
    def n(self):
        return self.lower.shape[0]


def _fix_signs(v):
    for k in range(v.shape[1]):
        j = int(np.argmax(np.abs(v[:, k])))
        if v[j, k] < 0.0:
            v[:, k] = -v[:, k]
    return v


def eig_sym(m) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    The stopping threshold is fixed here, off the input's Frobenius norm, so
    both kernel lanes run the same rotations and return identical results.
    """
    a = SymmetricMatrix(_as_array(m)).data if not isinstance(m, SymmetricMatrix) else m.data
    scale = float(np.linalg.norm(a))
    thresh = scale * _REL_THRESH
    diag, v, _, off = kernels.jacobi_eigh(a, thresh, _SWEEP_CAP)
    if off > _FAIL_TOL * max(scale, 1.0):
        raise NumericalError(
            f"Jacobi sweeps did not converge: off-diagonal residual {off:.3e} "
            f"after {_SWEEP_CAP} sweeps"
        )
    order = np.argsort(-diag, kind="stable")
    w = diag[order]
    vecs = _fix_signs(np.array(v[:, order]))
    return EigenDecomposition(w, vecs)


def largest_eigenvalue(m):
    """(lambda_max, unit eigenvector) of a symmetric matrix."""
    dec = eig_sym(m)
    return float(dec.eigenvalues[0]), dec.eigenvectors[:, 0].copy()


def smallest_eigenvector(m):
    """(lambda_min, unit eigenvector) of a symmetric matrix."""
    dec = eig_sym(m)
    return float(dec.eigenvalues[-1]), dec.eigenvectors[:, -1].copy()


def cholesky_psd(m, base_jitter=1e-9) -> CholeskyFactor:
    """Lower Cholesky factor of a PSD matrix, adding diagonal jitter if needed.

    Tries jitter 0 first, then base_jitter escalating by 10x up to 1e-3.
    Raises NotPSDError when every level fails.
    """
    a = SymmetricMatrix(_as_array(m)).data if not isinstance(m, SymmetricMatrix) else m.data
    jitters = [0.0]
    j = float(base_jitter)
    while 0.0 < j <= _MAX_JITTER:
        jitters.append(j)
        j *= 10.0
    eye = np.eye(a.shape[0])
    for jit in jitters:
        try:
            lower = np.linalg.cholesky(a + jit * eye)
        except np.linalg.LinAlgError:
            continue
        return CholeskyFactor(lower, jit)
    raise NotPSDError(
        f"matrix is not PSD within jitter {jitters[-1]:.1e} (n={a.shape[0]})"
    )


def pca_project(x, k) -> DenseMatrix:
    """Project columns of a D x n matrix onto the top k principal axes.

    Returns the k x n score matrix. Uses the n x n Gram matrix when D > n,
    which yields the same scores as the D x D scatter route up to signs.
    """
    data = x.data if isinstance(x, DenseMatrix) else np.asarray(x, dtype=np.float64)
    if data.ndim != 2:
        raise DimensionError("expected a 2-d data matrix")
    d, n = data.shape
    if not 1 <= k <= min(d, n):
        raise DimensionError(f"k={k} out of range for shape {data.shape}")
    centered = data - data.mean(axis=1, keepdims=True)
    if d <= n:
        dec = eig_sym(SymmetricMatrix(centered @ centered.T))
        axes = dec.eigenvectors[:, :k]
        return DenseMatrix(axes.T @ centered)
    dec = eig_sym(SymmetricMatrix(centered.T @ centered))
    lam = np.clip(dec.eigenvalues[:k], 0.0, None)
    return DenseMatrix(np.sqrt(lam)[:, None] * dec.eigenvectors[:, :k].T)
