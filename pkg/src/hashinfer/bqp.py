"""Per-bit binary quadratic subproblem: assembly, spectral shift, exact oracle.

Fixing all code rows except row k reduces the squared Frobenius fitting
objective to a quadratic x^T A x over the sign vector x that becomes row k,
up to an additive constant and a factor of 2.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels, linalg
from .core import CodeMatrix, DimensionError, NumericalError, SymmetricMatrix

BRUTE_FORCE_CAP = 20

# relative slack when asserting the shifted matrix has no positive spectrum
_NSD_TOL = 1e-8


@dataclass(frozen=True)
class BQPInstance:
    """min x^T a x over x in {-1, +1}^n."""

    a: SymmetricMatrix

    @property
    def n(self):
        return self.a.n


@dataclass(frozen=True)
class ShiftedBQP:
    """Instance with the spectrum shifted to be <= 0.

    b = a - lambda1 I changes every sign objective by the constant
    -n lambda1, so minimizers are unchanged while b is negative
    semidefinite.
    """

    b: SymmetricMatrix
    lambda1: float

    @property
    def n(self):
        return self.b.n


def assemble_bit_instance(z: CodeMatrix, y, k: int, gram=None) -> BQPInstance:
    """Coupling matrix for code row k given the other rows.

    a = Z^T Z - z_k z_k^T - Y, so x^T a x is twice the change of the global
    fit (plus a constant) when row k is replaced by x. Pass the cached
    Z^T Z as gram to skip the O(L n^2) product.
    """
    if not 0 <= k < z.bits:
        raise IndexError(f"bit index {k} out of range for {z.bits} rows")
    ydata = y.y.data if hasattr(y, "y") else SymmetricMatrix(y).data
    if ydata.shape[0] != z.samples:
        raise DimensionError(
            f"target is {ydata.shape[0]} x {ydata.shape[0]} but codes have {z.samples} samples"
        )
    zf = z.as_float()
    g = np.asarray(gram, dtype=np.float64) if gram is not None else zf.T @ zf
    row = zf[k]
    a = g - np.outer(row, row) - ydata
    return BQPInstance(SymmetricMatrix(a))


def shift_instance(inst: BQPInstance) -> ShiftedBQP:
    """Subtract lambda_max I and verify the result is negative semidefinite."""
    lam1, _ = linalg.largest_eigenvalue(inst.a)
    b = inst.a.data - lam1 * np.eye(inst.n)
    shifted = ShiftedBQP(SymmetricMatrix(b), lam1)
    top, _ = linalg.largest_eigenvalue(shifted.b)
    if top > _NSD_TOL * (1.0 + abs(lam1)):
        raise NumericalError(f"shifted matrix has positive eigenvalue {top:.3e}")
    return shifted


def objective(inst, x) -> float:
    """x^T A x (or x^T B x for a shifted instance)."""
    a = inst.b if isinstance(inst, ShiftedBQP) else inst.a
    xv = np.asarray(x, dtype=np.float64)
    if xv.shape != (a.n,):
        raise DimensionError(f"vector length {xv.shape} does not match n={a.n}")
    return float(xv @ (a.data @ xv))


def brute_force(inst):
    """Exact minimizer by exhaustive scan, for instances with n <= 20.

    Accepts a plain or shifted instance. Returns (x, objective). Ties
    resolve to the lexicographically smallest minimizer with x_1 = +1; the
    sign flip of the result is equally optimal.
    """
    a = inst.b if isinstance(inst, ShiftedBQP) else inst.a
    if a.n > BRUTE_FORCE_CAP:
        raise ValueError(f"brute force is capped at n={BRUTE_FORCE_CAP}, got n={a.n}")
    x, best = kernels.brute_force_scan(a.data)
    return x, float(best)
