"""Augmented Lagrangian solver for the sign-vector quadratic problem.

Relaxes x in {-1,+1}^n to x in R^n with equality constraints x_i^2 = 1,
minimizes the augmented Lagrangian with LBFGS, and tightens multipliers and
penalty between outer iterations. Iterates stay continuous; the caller gets
the sign of the final iterate.
"""

import time
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .bqp import BQPInstance
from .core import DimensionError, NumericalError, SolverReport

_CURVATURE_SKIP = 1e-10
_ARMIJO_C1 = 1e-4
_MAX_BACKTRACKS = 60
_WARM_START_GRAD_TOL = 1e-10


@dataclass(frozen=True)
class ALConfig:
    """Outer-loop controls.

    max_outer caps the multiplier updates; epsilon stops early when the
    unconstrained objective x^T A x settles between consecutive outer
    iterates. alpha multiplies the penalty each outer round.
    """

    max_outer: int = 10
    mu0: float = 0.1
    alpha: float = 10.0
    epsilon: float = 1e-6
    lbfgs_memory: int = 10
    lbfgs_max_iter: int = 50
    lbfgs_grad_tol: float = 1e-6

    def __post_init__(self):
        if self.max_outer < 1:
            raise ValueError("max_outer must be >= 1")
        if self.mu0 <= 0.0 or self.alpha <= 1.0:
            raise ValueError("need mu0 > 0 and alpha > 1")
        if self.epsilon <= 0.0 or self.lbfgs_grad_tol <= 0.0:
            raise ValueError("tolerances must be > 0")
        if self.lbfgs_memory < 1 or self.lbfgs_max_iter < 1:
            raise ValueError("lbfgs_memory and lbfgs_max_iter must be >= 1")


@dataclass(frozen=True)
class ALState:
    """Snapshot of one outer iteration: iterate, multipliers, penalty."""

    x: np.ndarray
    multipliers: np.ndarray
    penalty: float
    outer_iter: int

    def __post_init__(self):
        if self.x.shape != self.multipliers.shape:
            raise DimensionError("x and multipliers must have equal length")
        if self.penalty <= 0.0:
            raise ValueError("penalty must be > 0")

    @property
    def constraint_values(self):
        return self.x * self.x - 1.0


class LbfgsResult(NamedTuple):
    x: np.ndarray
    fun_value: float
    grad_norm: float
    iterations: int
    converged: bool


def al_objective(x, multipliers, penalty, inst: BQPInstance) -> float:
    """x^T A x - lam^T phi + (mu/2) ||phi||^2 with phi_i = x_i^2 - 1."""
    xv = np.asarray(x, dtype=np.float64)
    lam = np.asarray(multipliers, dtype=np.float64)
    if xv.shape != (inst.n,) or lam.shape != (inst.n,):
        raise DimensionError("x and multipliers must have length n")
    if penalty <= 0.0:
        raise ValueError("penalty must be > 0")
    phi = xv * xv - 1.0
    a = inst.a.data
    return float(xv @ (a @ xv) - lam @ phi + 0.5 * penalty * (phi @ phi))


def al_gradient(x, multipliers, penalty, inst: BQPInstance) -> np.ndarray:
    """2 A x - 2 lam * x + 2 mu phi * x, elementwise in the constraint terms."""
    xv = np.asarray(x, dtype=np.float64)
    lam = np.asarray(multipliers, dtype=np.float64)
    if xv.shape != (inst.n,) or lam.shape != (inst.n,):
        raise DimensionError("x and multipliers must have length n")
    if penalty <= 0.0:
        raise ValueError("penalty must be > 0")
    phi = xv * xv - 1.0
    return 2.0 * (inst.a.data @ xv) - 2.0 * lam * xv + 2.0 * penalty * phi * xv


def _two_loop(g, s_hist, y_hist, rho_hist):
    q = g.copy()
    alphas = []
    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
        alpha = rho * (s @ q)
        q -= alpha * y
        alphas.append(alpha)
    s_last, y_last = s_hist[-1], y_hist[-1]
    q *= (s_last @ y_last) / (y_last @ y_last)
    for (s, y, rho), alpha in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
        beta = rho * (y @ q)
        q += (alpha - beta) * s
    return q


def lbfgs_minimize(fun, grad, x0, memory=10, max_iter=50, grad_tol=1e-6) -> LbfgsResult:
    """Limited-memory BFGS with Armijo backtracking.

    Directions come from the two-loop recursion scaled by the last
    curvature pair; pairs with s^T y <= 1e-10 ||s|| ||y|| are skipped to
    keep the implicit Hessian positive definite. A rejected pair means the
    stored curvature no longer describes the local model, so the memory is
    dropped and the next direction restarts from steepest descent.
    Convergence is ||grad||_inf <= grad_tol. Raises NumericalError if the
    objective is non-finite at the start or the line search cannot find a
    finite value.
    """
    x = np.array(x0, dtype=np.float64)
    f = float(fun(x))
    if not np.isfinite(f):
        raise NumericalError("objective is not finite at the starting point")
    g = np.asarray(grad(x), dtype=np.float64)
    s_hist: deque = deque(maxlen=memory)
    y_hist: deque = deque(maxlen=memory)
    rho_hist: deque = deque(maxlen=memory)
    iterations = 0
    gnorm = float(np.abs(g).max()) if g.size else 0.0
    while gnorm > grad_tol and iterations < max_iter:
        d = -_two_loop(g, s_hist, y_hist, rho_hist) if s_hist else -g
        slope = float(d @ g)
        if slope >= 0.0:
            s_hist.clear()
            y_hist.clear()
            rho_hist.clear()
            d = -g
            slope = -float(g @ g)
        step = 1.0
        f_new = np.inf
        x_new = x
        for _ in range(_MAX_BACKTRACKS):
            x_new = x + step * d
            f_new = float(fun(x_new))
            if np.isfinite(f_new) and f_new <= f + _ARMIJO_C1 * step * slope:
                break
            step *= 0.5
        else:
            if not np.isfinite(f_new):
                raise NumericalError("line search produced a non-finite objective")
            break
        g_new = np.asarray(grad(x_new), dtype=np.float64)
        s = x_new - x
        y = g_new - g
        sy = float(s @ y)
        if sy > _CURVATURE_SKIP * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            s_hist.append(s)
            y_hist.append(y)
            rho_hist.append(1.0 / sy)
        else:
            s_hist.clear()
            y_hist.clear()
            rho_hist.clear()
        x, f, g = x_new, f_new, g_new
        iterations += 1
        gnorm = float(np.abs(g).max())
    return LbfgsResult(x=x, fun_value=f, grad_norm=gnorm, iterations=iterations,
                       converged=gnorm <= grad_tol)


def spectral_init(inst: BQPInstance) -> np.ndarray:
    """Binary starting point from the smallest eigenvector.

    Scales the bottom eigenvector to norm sqrt(n), then binarizes the
    coordinates one at a time, each set to the sign that minimizes the
    objective given the current values of all the others. Ties go to +1.
    """
    a = inst.a.data
    n = inst.n
    _, u = linalg.smallest_eigenvector(inst.a)
    x = np.sqrt(n) * u
    s = a @ x
    for i in range(n):
        # coupling of coordinate i against all others at their current values
        t = s[i] - a[i, i] * x[i]
        xi = -1.0 if t > 0.0 else 1.0
        delta = xi - x[i]
        if delta != 0.0:
            s += a[:, i] * delta
            x[i] = xi
    return x


def warm_start_multipliers(inst: BQPInstance, x0) -> np.ndarray:
    """Multipliers that zero the Lagrangian gradient at a binary point.

    lam = (A x0) * x0 elementwise; with x0_i^2 = 1 exactly, the gradient
    2 A x0 - 2 lam x0 vanishes to the last bit.
    """
    xv = np.asarray(x0, dtype=np.float64)
    if xv.shape != (inst.n,):
        raise DimensionError(f"x0 length {xv.shape} does not match n={inst.n}")
    if not np.isin(xv, (-1.0, 1.0)).all():
        raise ValueError("x0 must be a sign vector")
    lam = (inst.a.data @ xv) * xv
    check = float(np.abs(al_gradient(xv, lam, 1.0, inst)).max())
    if check > _WARM_START_GRAD_TOL:
        raise NumericalError(f"warm start gradient residual {check:.3e}")
    return lam


def solve_al(inst: BQPInstance, config: ALConfig | None = None, x0=None):
    """Outer AL loop: minimize, update multipliers, grow the penalty.

    Starts from the spectral initializer unless a sign vector x0 is given.
    From the third outer iteration on, stops once |x_t^T A x_t -
    x_s^T A x_s| < epsilon, where x_s started the round. The returned code
    is sgn of the last iterate (sgn(0) -> +1), replaced by the starting
    point if it would score worse, so the result never regresses below the
    initialization.

    Returns (sign vector, SolverReport). The report counts outer
    iterations; inner LBFGS counts sit in detail["inner_iterations"].
    """
    cfg = config if config is not None else ALConfig()
    t_start = time.perf_counter()
    a = inst.a.data
    if x0 is None:
        start = spectral_init(inst)
    else:
        start = np.asarray(x0, dtype=np.float64)
        if start.shape != (inst.n,):
            raise DimensionError(f"x0 length {start.shape} does not match n={inst.n}")
        if not np.isin(start, (-1.0, 1.0)).all():
            raise ValueError("x0 must be a sign vector")
    init_obj = float(start @ (a @ start))
    lam = warm_start_multipliers(inst, start)
    mu = cfg.mu0
    x_round_start = start.copy()
    prev_obj = init_obj
    x_t = start.copy()
    inner_counts = []
    inner_converged = []
    outer_violations = []
    outer = 0
    stopped_early = False
    for t in range(cfg.max_outer):
        state = ALState(x=x_round_start, multipliers=lam, penalty=mu, outer_iter=t)
        res = lbfgs_minimize(
            lambda xx: al_objective(xx, state.multipliers, state.penalty, inst),
            lambda xx: al_gradient(xx, state.multipliers, state.penalty, inst),
            state.x,
            memory=cfg.lbfgs_memory,
            max_iter=cfg.lbfgs_max_iter,
            grad_tol=cfg.lbfgs_grad_tol,
        )
        x_t = res.x
        inner_counts.append(res.iterations)
        inner_converged.append(res.converged)
        outer_violations.append(float(np.abs(x_t * x_t - 1.0).max()))
        outer = t + 1
        cur_obj = float(x_t @ (a @ x_t))
        if t >= 2 and abs(cur_obj - prev_obj) < cfg.epsilon:
            stopped_early = True
            break
        phi = x_t * x_t - 1.0
        lam = lam - mu * phi
        mu = cfg.alpha * mu
        x_round_start = x_t
        prev_obj = cur_obj
    violation = float(np.abs(x_t * x_t - 1.0).max())
    x_bin = np.where(x_t >= 0.0, 1.0, -1.0)
    obj_bin = float(x_bin @ (a @ x_bin))
    fell_back = False
    if obj_bin > init_obj:
        # the continuous path wandered; keep the initializer instead
        x_bin = start.copy()
        obj_bin = init_obj
        fell_back = True
    report = SolverReport(
        objective=obj_bin,
        iterations=outer,
        feasibility_violation=violation,
        wall_time=time.perf_counter() - t_start,
        converged=stopped_early,
        detail={
            "inner_iterations": tuple(inner_counts),
            "inner_converged": tuple(inner_converged),
            "outer_violations": tuple(outer_violations),
            "fell_back_to_init": fell_back,
        },
    )
    return x_bin, report
