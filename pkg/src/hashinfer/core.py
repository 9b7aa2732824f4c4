"""Shared domain types: dense/symmetric matrices, code matrices, solver reports."""

from dataclasses import dataclass, field

import numpy as np


class DimensionError(ValueError):
    """Operand shapes do not match the operation's contract."""


class NumericalError(RuntimeError):
    """An iterative numerical routine failed to reach its tolerance."""


class NotPSDError(NumericalError):
    """Matrix is not positive semidefinite within the allowed jitter."""


def _as_array(m):
    # wrapper classes expose .data as an ndarray; a raw ndarray's .data
    # attribute is a memoryview, so the type check matters here
    data = getattr(m, "data", None)
    if isinstance(data, np.ndarray):
        return data
    return np.asarray(m, dtype=np.float64)


@dataclass(frozen=True)
class DenseMatrix:
    """Immutable rows x cols matrix of finite doubles, row-major."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, order="C")
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-d matrix, got ndim={arr.ndim}")
        if not np.isfinite(arr).all():
            raise ValueError("matrix contains NaN or Inf entries")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]


@dataclass(frozen=True)
class SymmetricMatrix:
    """Square matrix stored in full, made exactly symmetric by averaging."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(_as_array(self.data), dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise DimensionError("matrix must have n >= 1")
        if not np.isfinite(arr).all():
            raise ValueError("matrix contains NaN or Inf entries")
        # (a + a.T) is exactly symmetric in IEEE arithmetic, halving preserves it
        arr = (arr + arr.T) / 2.0
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def n(self):
        return self.data.shape[0]


@dataclass(frozen=True)
class CodeMatrix:
    """L x n matrix of binary codes, one column per sample, entries in {-1, +1}."""

    codes: np.ndarray

    def __post_init__(self):
        arr = np.array(self.codes)
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-d code matrix, got ndim={arr.ndim}")
        if arr.size == 0:
            raise DimensionError("code matrix must be non-empty")
        if not np.isin(arr, (-1, 1)).all():
            raise ValueError("code entries must be exactly -1 or +1")
        arr = arr.astype(np.int8)
        arr.flags.writeable = False
        object.__setattr__(self, "codes", arr)

    @property
    def bits(self):
        return self.codes.shape[0]

    @property
    def samples(self):
        return self.codes.shape[1]

    def as_float(self):
        return self.codes.astype(np.float64)


@dataclass(frozen=True)
class SolverReport:
    """Outcome record shared by all per-bit solvers.

    feasibility_violation is max |x_i^2 - 1| of the pre-projection iterate
    (AL) or max |diag(X) - 1| of the relaxation variable (SDR). detail holds
    backend-specific counters and is not part of the stable surface.
    """

    objective: float
    iterations: int
    feasibility_violation: float
    wall_time: float
    converged: bool
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.feasibility_violation < 0:
            raise ValueError("feasibility_violation must be >= 0")


def symmetrize(m) -> SymmetricMatrix:
    """Average a square matrix with its transpose."""
    arr = _as_array(m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"cannot symmetrize non-square shape {arr.shape}")
    return SymmetricMatrix(arr)


def quadratic_form(a: SymmetricMatrix, x) -> float:
    """Evaluate x^T A x in O(n^2)."""
    xv = np.asarray(x, dtype=np.float64)
    if xv.shape != (a.n,):
        raise DimensionError(f"vector length {xv.shape} does not match n={a.n}")
    return float(xv @ (a.data @ xv))
