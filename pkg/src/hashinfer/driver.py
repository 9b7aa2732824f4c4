"""Block coordinate descent over code rows.

Initializes codes by thresholded PCA, then repeatedly re-solves one row at
a time against the least-squares target, accepting a candidate row only when
the global objective does not increase.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import al as al_mod
from . import bqp, linalg, sdr
from .core import CodeMatrix, DimensionError, NumericalError, SolverReport, SymmetricMatrix, _as_array
from .similarity import TargetMatrix

BACKEND_AL = "al"
BACKEND_SDR = "sdr"

# one-time consistency probe: a row swap must change the global objective by
# exactly twice the subproblem delta, up to rounding
_SELF_CHECK_TOL = 1e-6


@dataclass(frozen=True)
class InferenceConfig:
    """Controls for the full inference run.

    sweeps is the number of passes over all code rows. seed feeds the SDR
    rounding draws; the AL backend is deterministic and ignores it.
    """

    code_length: int
    sweeps: int = 3
    backend: str = BACKEND_AL
    al: al_mod.ALConfig = field(default_factory=al_mod.ALConfig)
    sdr_trials: int = 100
    sdr_tol: float = 1e-6
    sdr_max_iter: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.code_length < 1:
            raise ValueError("code_length must be >= 1")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.backend not in (BACKEND_AL, BACKEND_SDR):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.sdr_trials < 1:
            raise ValueError("sdr_trials must be >= 1")


@dataclass(frozen=True)
class InferenceTrace:
    """Objective after every row update, plus one report per subproblem solve."""

    objectives: np.ndarray
    reports: list
    wall_time: float


def global_objective(z: CodeMatrix, y: TargetMatrix) -> float:
    """|| Z^T Z - Y ||_F^2."""
    if z.samples != y.n:
        raise DimensionError(f"codes have {z.samples} samples, target is {y.n} x {y.n}")
    zf = z.as_float()
    return float(((zf.T @ zf - y.y.data) ** 2).sum())


def init_codes(x, code_length: int) -> CodeMatrix:
    """PCA scores thresholded at their per-direction means.

    Scores strictly above the mean map to +1, the rest to -1, so a constant
    direction yields an all -1 row rather than an undefined one.
    """
    scores = linalg.pca_project(x, code_length).data
    means = scores.mean(axis=1, keepdims=True)
    return CodeMatrix(np.where(scores > means, 1, -1))


def _solve_row_al(inst, cfg):
    return al_mod.solve_al(inst, config=cfg.al)


def _solve_row_sdr(inst, cfg, sweep, k):
    shifted = bqp.shift_instance(inst)
    t0 = time.perf_counter()
    state = sdr.solve_sdp(shifted, tol=cfg.sdr_tol, max_iter=cfg.sdr_max_iter)
    ss = np.random.SeedSequence(entropy=cfg.seed, spawn_key=(sweep, k))
    trial_seed = int(ss.generate_state(1, dtype=np.uint64)[0])
    result = sdr.randomized_round(state, shifted, trials=cfg.sdr_trials, seed=trial_seed)
    x = result.best_x
    report = SolverReport(
        objective=float(x @ (inst.a.data @ x)),
        iterations=state.iterations,
        feasibility_violation=float(np.abs(np.diag(state.x_var.data) - 1.0).max()),
        wall_time=time.perf_counter() - t0,
        converged=state.converged,
        detail={"f_sdr": result.f_sdr, "lambda1": shifted.lambda1},
    )
    return x, report


def infer_codes(x, y: TargetMatrix, config: InferenceConfig):
    """Run the full inference loop.

    x is the D x n input matrix (used only for initialization) and y the
    target for Z^T Z. Returns (CodeMatrix, InferenceTrace); the trace holds
    the global objective after each of sweeps * code_length row updates,
    which is non-increasing by construction.
    """
    ell = config.code_length
    t_start = time.perf_counter()
    data = _as_array(x)
    if data.ndim != 2 or data.shape[1] != y.n:
        raise DimensionError(f"data shape {data.shape} does not match target n={y.n}")
    z = init_codes(data, ell)
    codes = z.as_float()
    ydata = y.y.data
    gram = codes.T @ codes
    obj = float(((gram - ydata) ** 2).sum())
    objectives = []
    reports = []
    checked = False
    for sweep in range(config.sweeps):
        for k in range(ell):
            old_row = codes[k].copy()
            inst = bqp.BQPInstance(SymmetricMatrix(gram - np.outer(old_row, old_row) - ydata))
            try:
                if config.backend == BACKEND_AL:
                    cand, report = _solve_row_al(inst, config)
                else:
                    cand, report = _solve_row_sdr(inst, config, sweep, k)
            except NumericalError as exc:
                raise NumericalError(f"row {k} of sweep {sweep}: {exc}") from exc
            new_gram = gram - np.outer(old_row, old_row) + np.outer(cand, cand)
            new_obj = float(((new_gram - ydata) ** 2).sum())
            if new_obj <= obj:
                if not checked:
                    a = inst.a.data
                    d_bqp = float(cand @ (a @ cand)) - float(old_row @ (a @ old_row))
                    d_glob = new_obj - obj
                    if abs(d_glob - 2.0 * d_bqp) > _SELF_CHECK_TOL * (1.0 + abs(d_glob)):
                        raise NumericalError(
                            f"subproblem delta {d_bqp:.6e} does not track the global "
                            f"objective change {d_glob:.6e}"
                        )
                    checked = True
                codes[k] = cand
                gram = new_gram
                obj = new_obj
            objectives.append(obj)
            reports.append(report)
    trace = InferenceTrace(
        objectives=np.asarray(objectives),
        reports=reports,
        wall_time=time.perf_counter() - t_start,
    )
    return CodeMatrix(codes), trace
