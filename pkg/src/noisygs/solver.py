"""Gradient sampling loop for nonsmooth objectives with noisy oracles.

Each iteration draws a batch of points in a shrinking ball around the
iterate, collects noisy gradients there, and aggregates them into the
min-norm convex combination. A small aggregate means the iterate is
near-stationary at the current sampling radius, so the radius shrinks.
Otherwise the negated aggregate is the search direction for a backtracking
line search whose acceptance test carries additive slack for the value
noise. With bounded oracle errors the aggregate norm is eventually driven
below a floor determined by the noise levels; it cannot be pushed to zero.
"""

from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .linesearch import FloorCutoff, LineSearchParams, LipschitzCutoff, backtrack
from .minnorm import GradientBundle, MinNormNonConvergence, solve_min_norm
from .oracle import NoiseBounds, OracleHandle
from .sampler import sample_ball


class RunStatus(Enum):
    STATIONARY = "Stationary"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    OBJECTIVE_DIVERGING = "ObjectiveDiverging"
    QP_FAILURE = "QPFailure"


class NoQualifyingStepsError(RuntimeError):
    """No accepted step was long enough to estimate a Lipschitz ratio from."""


@dataclass(frozen=True)
class SolverParams:
    """Knobs of the sampling loop.

    Defaults follow the practical configuration: tiny sufficient-decrease
    coefficient, halving backtracks, radius shrink factor 0.1, bundle size
    max(n + 1, 10), initial radius 10, and a step floor of 1e-20 instead of
    the radius-scaled cutoff (supply `lipschitz` to switch the cutoff over).

    m: gradients drawn per iteration beyond the center; None resolves to
        max(n + 1, 10).
    eps_ls: line search slack; None resolves to max(2.1 * eps_f, 1e-12).
    eps_min: radius level that ends the run as near-stationary.
    f_low: value floor below which the objective counts as diverging.
    strict_requires: refuse to run when the admissibility conditions fail
        instead of recording them as warnings.
    lipschitz_min_step: shortest accepted step the post-run Lipschitz
        estimate may use.
    """

    bounds: NoiseBounds = NoiseBounds()
    m: Optional[int] = None
    theta: float = 0.1
    gamma: float = 0.5
    eta: float = 1e-10
    nu: float = 1.0
    eps1: float = 10.0
    eps_ls: Optional[float] = None
    lipschitz: Optional[float] = None
    alpha_min: float = 1e-20
    qp_tol: float = 1e-10
    eps_min: float = 1e-6
    budget: int = 10_000
    f_low: float = -1e12
    master_seed: int = 0
    strict_requires: bool = False
    lipschitz_min_step: float = 1e-9

    def __post_init__(self):
        # Mechanical sanity only; the theory-side admissibility conditions
        # are validate_params' business and are allowed to fail softly.
        if self.m is not None and self.m < 1:
            raise ValueError("m must be at least 1")
        if not (np.isfinite(self.eps1) and self.eps1 > 0.0):
            raise ValueError("eps1 must be positive and finite")
        if not (0.0 < self.alpha_min < 1.0):
            raise ValueError("alpha_min must lie in (0, 1)")
        if not (self.qp_tol > 0.0):
            raise ValueError("qp_tol must be positive")
        if not (np.isfinite(self.eps_min) and self.eps_min >= 0.0):
            raise ValueError("eps_min must be nonnegative and finite")
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")
        if not (self.lipschitz_min_step > 0.0):
            raise ValueError("lipschitz_min_step must be positive")


def resolve_m(m: Optional[int], dims: int) -> int:
    return int(m) if m is not None else max(dims + 1, 10)


def resolve_eps_ls(eps_ls: Optional[float], eps_f: float) -> float:
    if eps_ls is not None:
        return float(eps_ls)
    return max(2.1 * eps_f, 1e-12)


def validate_params(params: SolverParams, dims: int) -> list[str]:
    """Check the admissibility conditions of the convergence analysis.

    Returns human-readable violations and never raises; the caller decides
    whether they are fatal. An absent Lipschitz constant is itself reported,
    since two of the conditions cannot be checked without it.
    """
    out: list[str] = []
    m = resolve_m(params.m, dims)
    eps_f = params.bounds.eps_f
    eps_g = params.bounds.eps_g
    eps_ls = resolve_eps_ls(params.eps_ls, eps_f)
    if m < dims + 1:
        out.append(f"m = {m} is below dims + 1 = {dims + 1}")
    if not (0.0 < params.theta <= 1.0):
        out.append(f"theta = {params.theta} lies outside (0, 1]")
    if not (0.0 < params.gamma < 1.0):
        out.append(f"gamma = {params.gamma} lies outside (0, 1)")
    if not (0.0 < params.eta < 0.5):
        out.append(f"eta = {params.eta} lies outside (0, 1/2)")
    if not (params.nu > 0.0):
        out.append(f"nu = {params.nu} must be positive")
    if not (eps_ls > 2.0 * eps_f):
        out.append(f"eps_ls = {eps_ls} must exceed twice eps_f = {eps_f}")
    if params.lipschitz is None:
        out.append(
            "no lipschitz constant supplied; the radius-scaled cutoff and the "
            "eps1 admissibility interval cannot be checked"
        )
    else:
        L = params.lipschitz
        if not (L > 2.0 * eps_g):
            out.append(f"lipschitz = {L} must exceed twice eps_g = {eps_g}")
        if params.eta > 0.0 and params.gamma > 0.0 and params.nu > 0.0 and L + eps_g > 0.0:
            lo = max(
                (6.0 * eps_ls * (L + eps_g) / (params.eta * params.gamma * params.nu ** 2)) ** (1.0 / 3.0),
                5.0 * eps_g,
            )
            hi = 3.0 * (L + eps_g)
            if not (lo < params.eps1 < hi):
                out.append(f"eps1 = {params.eps1} lies outside the admissible interval ({lo}, {hi})")
    return out


@dataclass(frozen=True)
class IterateRecord:
    """One row of run history.

    f_tilde is the noisy value at the iterate at the start of iteration k;
    f_true the exact value when truth is available. norm_g_tilde is the norm
    of the aggregated gradient, not of the raw gradient at the iterate.
    radius_reduced marks iterations that shrank the sampling radius instead
    of line searching. x is stored for small problems only (dims <= 3).
    """

    k: int
    eps_k: float
    norm_g_tilde: float
    alpha: float
    backtracks: int
    f_tilde: float
    f_true: Optional[float]
    radius_reduced: bool
    x: Optional[np.ndarray] = None


@dataclass(frozen=True)
class IterationEvent:
    """Read-only per-iteration snapshot handed to an observer callback.

    Observers must not call the run's noisy oracle (stateful oracles would
    advance); truth evaluators are safe. g_center is the raw noisy gradient
    at the iterate, before aggregation.
    """

    k: int
    x: np.ndarray
    eps_k: float
    g_center: np.ndarray
    norm_g_tilde: float
    alpha: float
    f_tilde: float


@dataclass(frozen=True)
class RunResult:
    status: RunStatus
    final_x: np.ndarray
    history: tuple[IterateRecord, ...]
    theorem_bound: float
    theorem_bound_met: bool
    f_evals: int
    g_evals: int
    warnings: tuple[str, ...] = field(default_factory=tuple)


def estimate_lipschitz(history: Sequence[IterateRecord], min_step: float = 1e-9) -> float:
    """Largest |value difference| / step length over the recorded steps.

    Uses consecutive history rows with an accepted step. The step length is
    alpha * norm_g_tilde, which equals the iterate displacement because the
    direction is the negated aggregate. Steps shorter than min_step are
    skipped: with noisy values the ratio diverges as the step shrinks.
    Overestimates (noise inflates differences) rather than underestimates.
    """
    if not (min_step > 0.0):
        raise ValueError("min_step must be positive")
    best: Optional[float] = None
    for prev, nxt in zip(history, history[1:]):
        if prev.alpha <= 0.0:
            continue
        step = prev.alpha * prev.norm_g_tilde
        if step < min_step:
            continue
        ratio = abs(nxt.f_tilde - prev.f_tilde) / step
        if best is None or ratio > best:
            best = ratio
    if best is None:
        raise NoQualifyingStepsError(f"no accepted steps of length >= {min_step}")
    return float(best)


def terminal_bound_eps(params: SolverParams, eps_ls: float, lipschitz: float) -> float:
    """Radius level below which the terminal aggregate-norm bound applies."""
    eps_g = params.bounds.eps_g
    cube = 6.0 * eps_ls * (lipschitz + eps_g) / (params.eta * params.gamma * params.nu ** 2)
    return max(cube ** (1.0 / 3.0), 5.0 * eps_g)


def _theorem_check(history: Sequence[IterateRecord], params: SolverParams,
                   eps_ls: float) -> tuple[float, bool]:
    lipschitz = params.lipschitz
    if lipschitz is None:
        try:
            lipschitz = estimate_lipschitz(history, params.lipschitz_min_step)
        except NoQualifyingStepsError:
            lipschitz = None
    if lipschitz is None or not (params.eta > 0.0 and params.gamma > 0.0 and params.nu > 0.0):
        bound_eps = math.inf
    else:
        bound_eps = terminal_bound_eps(params, eps_ls, lipschitz)
    scale = params.nu / params.theta if params.theta > 0.0 else math.inf
    met = any(
        rec.radius_reduced
        and rec.eps_k <= bound_eps
        and rec.norm_g_tilde <= scale * rec.eps_k
        for rec in history
    )
    return float(scale * bound_eps), met


def run(oracle: OracleHandle, x0, params: SolverParams = SolverParams(),
        observer: Optional[Callable[[IterationEvent], None]] = None) -> RunResult:
    """Minimize through the noisy oracle, starting at x0.

    The run ends when the sampling radius is shrunk to eps_min or below
    (Stationary), the iteration budget runs out (BudgetExhausted), the noisy
    value falls below f_low (ObjectiveDiverging), or the aggregation fails
    its certificate (QPFailure). Identical oracle seeds, parameters, and
    start point reproduce the result bit for bit.
    """
    n = oracle.dims
    x = np.array(x0, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"x0 must have shape ({n},)")
    if not np.all(np.isfinite(x)):
        raise ValueError("x0 must be finite")

    recorded = list(validate_params(params, n))
    if params.strict_requires and recorded:
        raise ValueError("admissibility violations: " + "; ".join(recorded))
    if recorded:
        _warnings.warn("admissibility violations: " + "; ".join(recorded),
                       RuntimeWarning, stacklevel=2)
    if not oracle.deterministic:
        msg = ("oracle is not deterministic per point; the bounded-error "
               "analysis does not cover this run")
        recorded.append(msg)
        _warnings.warn(msg, RuntimeWarning, stacklevel=2)

    m = resolve_m(params.m, n)
    eps_f = params.bounds.eps_f
    eps_g = params.bounds.eps_g
    eps_ls = resolve_eps_ls(params.eps_ls, eps_f)
    if params.lipschitz is not None:
        cutoff = LipschitzCutoff(lipschitz=params.lipschitz, eps_g=eps_g)
    else:
        cutoff = FloorCutoff(alpha_min=params.alpha_min)
    truth_f = oracle.truth_access.f if oracle.truth_access is not None else None
    small = n <= 3

    f_x = float(oracle.eval_f(x))
    f_evals = 1
    g_evals = 0
    ls_params = LineSearchParams(gamma=params.gamma, eta=params.eta, eps_ls=eps_ls,
                                 cutoff_mode=cutoff, f1_cap=f_x)
    eps = float(params.eps1)
    history: list[IterateRecord] = []
    status = RunStatus.BUDGET_EXHAUSTED

    for k in range(1, params.budget + 1):
        if f_x < params.f_low:
            status = RunStatus.OBJECTIVE_DIVERGING
            break
        points = sample_ball(x, eps, m, params.master_seed, k).points
        columns = np.empty((n, m + 1))
        columns[:, 0] = np.asarray(oracle.eval_g(x), dtype=float)
        for i in range(m):
            columns[:, i + 1] = np.asarray(oracle.eval_g(points[i]), dtype=float)
        g_evals += m + 1
        try:
            sol = solve_min_norm(GradientBundle(columns=columns, center=x, radius=eps),
                                 params.qp_tol)
        except MinNormNonConvergence:
            status = RunStatus.QP_FAILURE
            break
        gnorm = float(np.linalg.norm(sol.aggregate))
        reduced = gnorm <= max(params.nu * eps, 5.0 * eps_g)
        if reduced:
            alpha = 0.0
            backtracks = 0
            eps_next = params.theta * eps
            x_next, f_next = x, f_x
        else:
            outcome = backtrack(oracle, x, sol.direction, f_x, ls_params, eps)
            alpha = outcome.alpha
            backtracks = outcome.trial_count
            f_evals += outcome.trial_count
            eps_next = eps
            if alpha > 0.0:
                x_next = x + alpha * sol.direction
                f_next = float(outcome.accepted_f)
            else:
                x_next, f_next = x, f_x
        history.append(IterateRecord(
            k=k, eps_k=eps, norm_g_tilde=gnorm, alpha=alpha, backtracks=backtracks,
            f_tilde=f_x, f_true=float(truth_f(x)) if truth_f is not None else None,
            radius_reduced=reduced, x=x.copy() if small else None,
        ))
        if observer is not None:
            observer(IterationEvent(k=k, x=x.copy(), eps_k=eps,
                                    g_center=columns[:, 0].copy(),
                                    norm_g_tilde=gnorm, alpha=alpha, f_tilde=f_x))
        x, f_x, eps = x_next, f_next, eps_next
        if reduced and eps <= params.eps_min:
            status = RunStatus.STATIONARY
            break

    bound, met = _theorem_check(history, params, eps_ls)
    return RunResult(status=status, final_x=x, history=tuple(history),
                     theorem_bound=bound, theorem_bound_met=met,
                     f_evals=f_evals, g_evals=g_evals, warnings=tuple(recorded))
