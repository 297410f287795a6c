"""Choosing interpolation points that minimize the coefficient l1 norm.

The objective ``mu -> |E(mu)^-1 lambda|_1`` is non-convex, so local searches
are started from several scalings of a symmetric stencil and the most
promising start is refined further.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize

from . import rng as _rng
from .errors import DomainError, OptimizationFailure
from .interpolation import COND_LIMIT, InterpolationProblem, interpolation_matrix, solve_with_condition

PENALTY = 1e18
# stop once l1 is this close (relative) to its lower bound max|lambda|
BOUND_RTOL = 1e-9
LOCAL_METHODS = ("simplex", "sqp", "random")


@dataclass(frozen=True)
class OptimizerConfig:
    methods: tuple[str, ...] = ("simplex", "sqp")
    max_iters: int = 500
    shallow_iters: int = 25
    scale_factors: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0)
    seed: int = 0
    tol: float = 1e-12
    cond_limit: float = COND_LIMIT

    def __post_init__(self):
        methods = tuple(self.methods)
        bad = [m for m in methods if m not in LOCAL_METHODS]
        if not methods or bad:
            raise DomainError(f"unknown optimizer methods {bad or methods}; choose from {LOCAL_METHODS}")
        if self.max_iters < 1 or self.shallow_iters < 1:
            raise DomainError("iteration budgets must be positive")
        if self.shallow_iters > self.max_iters:
            raise DomainError("shallow_iters must not exceed max_iters")
        scales = tuple(float(r) for r in self.scale_factors)
        if not scales or min(scales) <= 0:
            raise DomainError("scale_factors must be non-empty and positive")
        object.__setattr__(self, "methods", methods)
        object.__setattr__(self, "scale_factors", scales)


@dataclass
class OptimizationResult:
    mu_opt: NDArray[np.float64]
    l1: float
    sqr: float
    trace: list[tuple[int, float]] = field(default_factory=list)
    condition: float = math.nan
    method: str = ""
    scale_factor: float = math.nan
    n_evals: int = 0
    iterations: int = 0
    converged: bool = False

    @property
    def classical_cost(self) -> int:
        """Iteration count times ``n**3``, a proxy for the classical overhead."""
        return self.iterations * self.mu_opt.size ** 3


def l1_objective(mus, problem: InterpolationProblem, cond_limit: float = COND_LIMIT) -> float:
    """``|E(mu)^-1 lambda|_1``, or ``PENALTY`` where ``E`` is too ill-conditioned."""
    mu = np.asarray(mus, dtype=np.float64).reshape(-1)
    if mu.size != problem.n:
        raise DomainError(f"need {problem.n} interpolation points, got {mu.size}")
    c, cond = solve_with_condition(interpolation_matrix(problem.lambdas, mu), problem.lambdas)
    if c is None or not np.isfinite(cond) or cond > cond_limit:
        return PENALTY
    return float(np.sum(np.abs(c)))


def l1_objective_grad(mus, problem: InterpolationProblem, cond_limit: float = COND_LIMIT):
    """``(l1, d l1 / d mu)``; zero gradient at penalized points.

    With ``c = E^-1 lambda`` and ``dE/dmu_j = -i diag(lambda) E[:, j] e_j^T``,
    ``dc/dmu_j = c_j E^-1 (i lambda * E[:, j])``.
    """
    mu = np.asarray(mus, dtype=np.float64).reshape(-1)
    lam = problem.lambdas
    e = interpolation_matrix(lam, mu)
    try:
        inv = np.linalg.inv(e)
    except np.linalg.LinAlgError:
        return PENALTY, np.zeros_like(mu)
    cond = e.shape[0] * np.abs(inv).sum(axis=0).max()
    if not np.isfinite(cond) or cond > cond_limit:
        return PENALTY, np.zeros_like(mu)
    c = inv @ lam
    mag = np.abs(c)
    phase = np.divide(c, mag, out=np.zeros_like(c), where=mag > 0)
    g = inv @ (1j * lam[:, None] * e)
    grad = np.real(c * (phase.conj() @ g))
    return float(mag.sum()), grad


def sqr(l1: float, lambdas) -> float:
    """Solution quality ratio ``l1 / max|lambda|`` (1 is optimal)."""
    scale = float(np.max(np.abs(np.asarray(lambdas, dtype=float))))
    if scale == 0:
        raise DomainError("SQR is undefined for an all-zero spectrum")
    return l1 / scale


def base_stencil(problem: InterpolationProblem, scale_factor: float) -> NDArray[np.float64]:
    """Symmetric equispaced start ``R (j - (n-1)/2) pi / max|lambda|``.

    The step ``pi / max|lambda|`` spreads the nodes ``exp(-1j mu lambda)``
    around the unit circle; much smaller steps make ``E`` a badly
    conditioned Vandermonde matrix once ``n`` grows past a handful. For
    ``n = 2`` and ``R = 1`` this is the optimum for ``lambda = (1, 0)``.
    """
    n = problem.n
    j = np.arange(n, dtype=float)
    return scale_factor * (j - (n - 1) / 2) * math.pi / problem.scale


class _TargetReached(Exception):
    pass


class _Tracker:
    """Counts evaluations and remembers the best point seen.

    With ``with_grad`` the wrapped callable returns ``(value, gradient)``.
    Reaching ``target`` aborts the surrounding search.
    """

    def __init__(self, objective, with_grad=False, target=-math.inf):
        self.objective = objective
        self.with_grad = with_grad
        self.target = target
        self.n_evals = 0
        self.best_x = None
        self.best_f = math.inf

    def __call__(self, x):
        out = self.objective(x)
        f = float(out[0] if self.with_grad else out)
        self.n_evals += 1
        if f < self.best_f:
            self.best_f = f
            self.best_x = np.array(x, dtype=float)
            if f <= self.target:
                raise _TargetReached
        return out


def _finish(tracker, trace, method, iterations, converged, problem, cond_limit):
    mu = tracker.best_x
    cond = math.nan
    ratio = math.nan
    if problem is not None:
        cond = solve_with_condition(interpolation_matrix(problem.lambdas, mu), problem.lambdas)[1]
        ratio = sqr(tracker.best_f, problem.lambdas) if tracker.best_f < PENALTY else math.inf
    return OptimizationResult(
        mu_opt=mu,
        l1=tracker.best_f,
        sqr=ratio,
        trace=trace,
        condition=cond,
        method=method,
        n_evals=tracker.n_evals,
        iterations=iterations,
        converged=converged,
    )


def local_minimize(
    objective,
    mu_init,
    config: OptimizerConfig,
    *,
    method: str | None = None,
    iters: int | None = None,
    problem: InterpolationProblem | None = None,
    rng: np.random.Generator | None = None,
    box: float | None = None,
    target: float | None = None,
) -> OptimizationResult:
    """Run one local search from ``mu_init``.

    ``objective`` may be a callable or an :class:`InterpolationProblem` (in
    which case :func:`l1_objective` is used and SQR/condition are filled in).
    The returned point is the best one evaluated, so the recorded trace of
    best-so-far values never increases.

    ``method="random"`` draws ``iters`` points uniformly from ``[-box, box]^n``
    (``box`` defaults to twice the largest ``|mu_init|``).

    The search stops early once the best value reaches ``target``, which
    defaults to the l1 lower bound ``max|lambda|`` when a problem is given.
    """
    gradient = None
    if isinstance(objective, InterpolationProblem):
        problem = objective
        objective = lambda m: l1_objective(m, problem, config.cond_limit)  # noqa: E731
        gradient = lambda m: l1_objective_grad(m, problem, config.cond_limit)  # noqa: E731
    method = method or config.methods[0]
    iters = config.max_iters if iters is None else iters
    if target is None:
        target = problem.scale * (1 + BOUND_RTOL) if problem is not None else -math.inf
    x0 = np.asarray(mu_init, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x0)):
        raise DomainError("initial point must be finite")

    tracker = _Tracker(objective, target=target)
    trace = []
    try:
        trace.append((0, tracker(x0)))
        if method == "random":
            gen = rng if rng is not None else _rng.stream(config.seed, "random-search")
            half = box if box is not None else 2.0 * max(float(np.max(np.abs(x0))), 1e-12)
            for k in range(1, iters + 1):
                tracker(gen.uniform(-half, half, size=x0.size))
                trace.append((k, tracker.best_f))
            return _finish(tracker, trace, method, iters, False, problem, config.cond_limit)

        def callback(*args, **kwargs):
            trace.append((len(trace), tracker.best_f))

        if method == "simplex":
            res = minimize(
                tracker, x0, method="Nelder-Mead", callback=callback,
                options={"maxiter": iters, "xatol": 1e-12, "fatol": config.tol, "adaptive": x0.size > 2},
            )
        elif method == "sqp":
            # analytic gradient when the objective is the interpolation l1 norm,
            # finite differences otherwise
            if gradient is not None:
                tracker.objective, tracker.with_grad = gradient, True
            res = minimize(
                tracker, x0, method="SLSQP", jac=gradient is not None, callback=callback,
                options={"maxiter": iters, "ftol": config.tol},
            )
        else:
            raise DomainError(f"unknown local method {method!r}")
    except _TargetReached:
        trace.append((len(trace), tracker.best_f))
        return _finish(tracker, trace, method, len(trace) - 1, True, problem, config.cond_limit)
    return _finish(tracker, trace, method, int(res.nit), bool(res.success), problem, config.cond_limit)


def random_search(problem: InterpolationProblem, budget: int, rng: np.random.Generator,
                  scale_factor: float = 1.0, config: OptimizerConfig | None = None) -> OptimizationResult:
    """Best of ``budget`` uniform draws from ``[-R pi / max|lambda|, R pi / max|lambda|]^n``."""
    config = config or OptimizerConfig()
    half = scale_factor * math.pi / problem.scale
    x0 = rng.uniform(-half, half, size=problem.n)
    res = local_minimize(problem, x0, config, method="random", iters=max(budget - 1, 0), rng=rng, box=half)
    res.scale_factor = scale_factor
    return res


def multistart_optimize(problem: InterpolationProblem, config: OptimizerConfig | None = None) -> OptimizationResult:
    """Shallow runs over every (scale factor, method), then a deep run from the best.

    Each arm draws randomness from a stream keyed by ``(seed, arm index)``.
    Arms run in config order and the search ends as soon as one reaches the
    lower bound ``max|lambda|``, since no other point can do better.
    """
    config = config or OptimizerConfig()
    if problem.n == 1:
        lam = float(problem.lambdas[0])
        return OptimizationResult(
            mu_opt=np.zeros(1), l1=abs(lam), sqr=1.0, trace=[(0, abs(lam))], condition=1.0,
            method="trivial", scale_factor=1.0, n_evals=0, iterations=0, converged=True,
        )

    arms = [(r, m) for r in config.scale_factors for m in config.methods]
    bound = problem.scale * (1 + BOUND_RTOL)
    shallow = []
    for idx, (r, m) in enumerate(arms):
        res = local_minimize(
            problem, base_stencil(problem, r), config, method=m, iters=config.shallow_iters,
            rng=_rng.stream(config.seed, "arm", idx), box=r * math.pi / problem.scale,
        )
        res.scale_factor = r
        shallow.append((idx, res))
        if res.l1 <= bound:
            break

    finite = [(idx, res) for idx, res in shallow if res.l1 < PENALTY]
    if not finite:
        raise OptimizationFailure(f"every start was singular for lambdas={problem.lambdas.tolist()}")
    best_idx, best = min(finite, key=lambda t: (t[1].l1, t[0]))
    r, m = arms[best_idx]
    if best.l1 <= bound:
        best.n_evals = sum(res.n_evals for _, res in shallow)
        best.iterations = sum(res.iterations for _, res in shallow)
        return best
    deep = local_minimize(
        problem, best.mu_opt, config, method=m, iters=config.max_iters,
        rng=_rng.stream(config.seed, "deep", best_idx), box=r * math.pi / problem.scale,
    )
    deep.scale_factor = r
    final = deep if deep.l1 <= best.l1 else best
    final.n_evals = deep.n_evals + sum(res.n_evals for _, res in shallow)
    final.iterations = deep.iterations + sum(res.iterations for _, res in shallow)
    return final
