"""Variance and shot-budget models, and the experiment sweeps built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import rng as _rng
from .channels import AdcParams, KrausChannel, apply_channel_exact, make_adc
from .decompose import decompose_channel
from .errors import DomainError
from .interpolation import unique_eigenvalues
from .optimize import OptimizerConfig, base_stencil, local_minimize, multistart_optimize, random_search
from .scu import (
    Observable,
    allocate_shots,
    build_term_table,
    estimate_observable,
    exact_expectation,
    pauli_z,
    term_distributions,
)

RESOURCE_METHODS = ("exact-scu", "exact-lcu", "approx-scu", "approx-lcu")


@dataclass(frozen=True)
class ResourceModel:
    """Leading-order variance of an estimator.

    ``exact-*`` models need the total norm ``L``; ``approx-*`` models need
    the Kraus count ``K`` and expansion parameter ``epsilon``, with
    ``L = 4K / eps^2``.
    """

    method: str
    s_tot: float = 1.0
    L: float | None = None
    K: int | None = None
    epsilon: float | None = None

    def __post_init__(self):
        if self.method not in RESOURCE_METHODS:
            raise DomainError(f"unknown resource model {self.method!r}")
        if not self.s_tot > 0:
            raise DomainError("s_tot must be positive")
        if self.method.startswith("exact"):
            if self.L is None or self.L < 0:
                raise DomainError("exact models need a non-negative L")
        else:
            if self.K is None or self.K < 1:
                raise DomainError("approximate models need K >= 1")
            if self.epsilon is None or not self.epsilon > 0:
                raise DomainError("approximate models need epsilon > 0")

    @property
    def variance_constant(self) -> float:
        """``C`` in ``Var = C / s_tot``."""
        if self.method == "exact-scu":
            return self.L**2
        if self.method == "exact-lcu":
            return self.L
        norm = 4 * self.K / self.epsilon**2
        if self.method == "approx-scu":
            return norm**2
        return norm  # approx-lcu: 4K / eps^2

    def shot_budget(self, precision: float) -> int:
        return required_shots(self.method, precision, L=self.L, K=self.K)


def predicted_variance(model: ResourceModel) -> float:
    return model.variance_constant / model.s_tot


def shot_cost(method: str, precision: float, *, L: float | None = None, K: int | None = None) -> float:
    """Shots needed for standard error ``precision`` (unrounded).

    Approximate methods spend the bias budget first: ``epsilon = sqrt(precision)``.
    """
    if not precision > 0:
        raise DomainError("precision must be positive")
    eps = math.sqrt(precision) if method.startswith("approx") else None
    model = ResourceModel(method, 1.0, L=L, K=K, epsilon=eps)
    return model.variance_constant / precision**2


def required_shots(method: str, precision: float, *, L: float | None = None, K: int | None = None) -> int:
    x = shot_cost(method, precision, L=L, K=K)
    # values within float noise of an integer are not bumped up
    nearest = round(x)
    if abs(x - nearest) <= 1e-9 * max(1.0, x):
        return max(1, int(nearest))
    return max(1, math.ceil(x))


# power of epsilon in each model's variance constant
_EPS_POWER = {"exact-scu": 0, "exact-lcu": 0, "approx-scu": -4, "approx-lcu": -2}


def precision_exponent(method: str) -> int:
    """``p`` in ``shots ~ precision^p``.

    Shots scale as ``C(eps) / precision^2``; approximate methods tie
    ``eps = precision^(1/2)``, which adds half the epsilon power of ``C``.
    """
    if method not in RESOURCE_METHODS:
        raise DomainError(f"unknown resource model {method!r}")
    return -2 + _EPS_POWER[method] // 2


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


# -- amplitude damping populations ------------------------------------------

ADC_RHO0 = np.array([[0.25, 0.0], [0.0, 0.75]], dtype=np.complex128)


def adc_time_grid(gamma: float, points: int = 30) -> np.ndarray:
    return np.linspace(0.0, 3.0 / gamma, points)


def simulate_adc(
    gamma: float,
    lambda_th: float,
    times: Sequence[float],
    s_tot: int,
    seed: int,
    rho0=ADC_RHO0,
    config: OptimizerConfig | None = None,
) -> list[dict]:
    """Exact and sampled populations of the amplitude damping channel over ``times``.

    Populations are estimated through ``Z`` so the (L^2 - <O>^2)/s_tot variance law
    applies: ``p1 = (1 - <Z>)/2``.
    """
    z = pauli_z()
    rows = []
    for k, t in enumerate(times):
        ch = make_adc(AdcParams(gamma, float(t), lambda_th))
        decs = decompose_channel(ch, "exact", config)
        table = build_term_table(decs)
        exact = apply_channel_exact(ch, rho0)
        plan = allocate_shots(table, s_tot, _rng.child_seed(seed, k))
        est = estimate_observable(table, rho0, z, plan)
        rows.append({
            "t": float(t),
            "p0_exact": float(exact[0, 0].real),
            "p1_exact": float(exact[1, 1].real),
            "p0_est": (1 + est.mean) / 2,
            "p1_est": (1 - est.mean) / 2,
            "L": table.L,
            "l1_total": float(sum(d.l1 for d in decs)),
            "predicted_sigma": est.predicted_sigma / 2,
        })
    return rows


# -- MSE against total shots --------------------------------------------------

def run_mse_sweep(
    channel: KrausChannel,
    rho0,
    obs: Observable,
    methods: Sequence[str] = ("exact", "approximate"),
    epsilons: Sequence[float] = (0.1, 0.05),
    shot_grid: Sequence[int] = (10**2, 10**3, 10**4, 10**5, 10**6),
    trials: int = 100,
    seed: int = 0,
    config: OptimizerConfig | None = None,
) -> list[dict]:
    """Empirical MSE of the sampled estimator against the matrix-level truth.

    One row per (method, epsilon, s_tot). ``bias`` is the infinite-shot
    offset of the method's own expansion, so approximate rows flatten at
    ``bias**2`` once ``s_tot`` is large enough to beat the variance.
    """
    if trials < 30:
        raise DomainError("use at least 30 trials per cell")
    truth = float(np.real(np.trace(obs.matrix @ apply_channel_exact(channel, rho0))))
    cells = []
    for method in methods:
        if method == "exact":
            cells.append(("exact", math.nan, decompose_channel(channel, "exact", config)))
        elif method == "approximate":
            for eps in epsilons:
                cells.append(("approximate", float(eps), decompose_channel(channel, "approximate", epsilon=eps)))
        else:
            raise DomainError(f"unknown method {method!r}")

    rows = []
    for ci, (method, eps, decs) in enumerate(cells):
        table = build_term_table(decs)
        dists = term_distributions(table, rho0, obs)
        bias = exact_expectation(table, rho0, obs) - truth
        for si, s in enumerate(shot_grid):
            errs = np.empty(trials)
            pred = math.nan
            for trial in range(trials):
                plan = allocate_shots(table, int(s), _rng.child_seed(seed, ci, si, trial))
                est = estimate_observable(table, rho0, obs, plan, dists)
                errs[trial] = est.mean - truth
                pred = est.predicted_variance
            rows.append({
                "method": method,
                "epsilon": eps,
                "L": table.L,
                "l1_total": float(sum(d.l1 for d in decs)),
                "s_tot": int(s),
                "mse": float(np.mean(errs**2)),
                "bias": bias,
                "bias_sq": bias * bias,
                "predicted_variance": pred,
            })
    return rows


# -- solution quality ratio sweep --------------------------------------------

SQR_STRATEGIES = ("simplex", "sqp", "multistart", "random")


def _summary(values) -> dict:
    v = np.asarray(values, float)
    return {"sqr_min": float(v.min()), "sqr_median": float(np.median(v)), "sqr_max": float(v.max())}


def run_sqr_sweep(
    dims: Sequence[int],
    samples_per_dim: int,
    strategies: Sequence[str] = SQR_STRATEGIES,
    seed: int = 0,
    config: OptimizerConfig | None = None,
) -> list[dict]:
    """SQR distribution of random spectra in ``[0, 1]`` per dimension and strategy.

    Rows are keyed by ``(dim, strategy, R)``; ``R = "best"`` keeps the best
    scale factor per sample. The random baseline gets, per sample and scale
    factor, as many objective evaluations as the most expensive local
    optimizer used there (or ``max_iters`` when no local optimizer runs).
    """
    config = config or OptimizerConfig()
    bad = [s for s in strategies if s not in SQR_STRATEGIES]
    if bad:
        raise DomainError(f"unknown strategies {bad}")
    local = [s for s in strategies if s in ("simplex", "sqp")]
    rows = []
    for di, dim in enumerate(dims):
        if dim < 1:
            raise DomainError("dimensions must be positive")
        per_r = {(s, r): [] for s in strategies if s != "multistart" for r in config.scale_factors}
        best = {s: [] for s in strategies}
        for k in range(samples_per_dim):
            gen = _rng.stream(seed, "spectrum", di, k)
            problem = unique_eigenvalues(gen.uniform(0.0, 1.0, size=dim))
            sample_best = {s: math.inf for s in strategies}
            for ri, r in enumerate(config.scale_factors):
                budget = 0
                for s in local:
                    if problem.n == 1:
                        val, evals = 1.0, 1
                    else:
                        res = local_minimize(problem, base_stencil(problem, r), config, method=s)
                        val, evals = res.sqr, res.n_evals
                    per_r[(s, r)].append(val)
                    sample_best[s] = min(sample_best[s], val)
                    budget = max(budget, evals)
                if "random" in strategies:
                    if problem.n == 1:
                        val = 1.0
                    else:
                        res = random_search(problem, budget or config.max_iters,
                                            _rng.stream(seed, "baseline", di, k, ri), r, config)
                        val = res.sqr
                    per_r[("random", r)].append(val)
                    sample_best["random"] = min(sample_best["random"], val)
            if "multistart" in strategies:
                sample_best["multistart"] = multistart_optimize(
                    problem, replace(config, seed=_rng.child_seed(seed, di, k))
                ).sqr
            for s in strategies:
                best[s].append(sample_best[s])
        for s in strategies:
            if s != "multistart":
                for r in config.scale_factors:
                    rows.append({"dim": dim, "strategy": s, "R": r, "samples": samples_per_dim,
                                 **_summary(per_r[(s, r)])})
            rows.append({"dim": dim, "strategy": s, "R": "best", "samples": samples_per_dim,
                         **_summary(best[s])})
    return rows
