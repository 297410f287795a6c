"""Eigenvalue-basis interpolation of a generator by phase exponentials.

For a Hermitian generator with unique eigenvalues ``lambda_i`` and chosen
interpolation points ``mu_j`` the coefficients solve

    lambda_i = sum_j c_j exp(-1j * mu_j * lambda_i)

i.e. ``E(mu) c = lambda`` with ``E[i, j] = exp(-1j * mu_j * lambda_i)``. The
same ``c`` then satisfies ``H = sum_j c_j exp(-1j * mu_j * H)``. Any solution
obeys ``|c|_1 >= max_i |lambda_i|`` by the triangle inequality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DomainError, SingularInterpolationError

COND_LIMIT = 1e12
DEDUPE_TOL = 1e-8


@dataclass(frozen=True)
class InterpolationProblem:
    """Distinct eigenvalues (descending) to interpolate."""

    lambdas: NDArray[np.float64]
    dedupe_tol: float = 0.0

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=np.float64).reshape(-1)
        if lam.size == 0:
            raise DomainError("interpolation problem needs at least one eigenvalue")
        if not np.all(np.isfinite(lam)):
            raise DomainError("eigenvalues must be finite")
        if lam.size > 1:
            gaps = np.abs(lam[:, None] - lam[None, :])[np.triu_indices(lam.size, 1)]
            if gaps.min() <= self.dedupe_tol:
                raise DomainError("eigenvalues are not pairwise separated by dedupe_tol")
        object.__setattr__(self, "lambdas", lam)

    @property
    def n(self) -> int:
        return self.lambdas.size

    @property
    def scale(self) -> float:
        """Largest unsigned eigenvalue, the lower bound on any l1 norm."""
        return float(np.max(np.abs(self.lambdas)))


def unique_eigenvalues(values, tol: float = DEDUPE_TOL, relative: bool = True) -> InterpolationProblem:
    """Cluster ``values`` whose neighbours lie within ``tol`` and keep cluster means.

    With ``relative=True`` the tolerance is multiplied by ``max|values|``.
    """
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise DomainError("empty spectrum")
    if not np.all(np.isfinite(v)):
        raise DomainError("spectrum has non-finite values")
    eff = tol * float(np.max(np.abs(v))) if relative else tol
    v = np.sort(v)[::-1]
    reps, cluster = [], [v[0]]
    for x in v[1:]:
        if cluster[-1] - x <= eff:
            cluster.append(x)
        else:
            reps.append(np.mean(cluster))
            cluster = [x]
    reps.append(np.mean(cluster))
    return InterpolationProblem(np.array(reps), dedupe_tol=eff)


def interpolation_matrix(lambdas, mus) -> NDArray[np.complex128]:
    lam = np.asarray(lambdas, dtype=np.float64)
    mu = np.asarray(mus, dtype=np.float64)
    return np.exp(-1j * np.outer(lam, mu))


def solve_with_condition(e, lambdas) -> tuple[NDArray[np.complex128] | None, float]:
    """Return ``(E^-1 lambda, cond_1(E))``; ``(None, inf)`` if ``E`` is exactly singular."""
    try:
        inv = np.linalg.inv(e)
    except np.linalg.LinAlgError:
        return None, np.inf
    # entries of E are unimodular, so ||E||_1 = n
    cond = float(e.shape[0] * np.abs(inv).sum(axis=0).max())
    return inv @ lambdas, cond


@dataclass(frozen=True)
class InterpolationSolution:
    coefficients: NDArray[np.complex128]
    mus: NDArray[np.float64]
    condition: float
    residual: float

    @property
    def l1(self) -> float:
        return float(np.sum(np.abs(self.coefficients)))


def solve_exact(problem: InterpolationProblem, mus, cond_limit: float = COND_LIMIT) -> InterpolationSolution:
    """Solve ``E(mu) c = lambda``.

    ``condition`` is the 1-norm condition number of ``E``.

    Raises
    ------
    SingularInterpolationError
        If ``cond(E)`` exceeds ``cond_limit``.
    """
    mu = np.asarray(mus, dtype=np.float64).reshape(-1)
    if mu.size != problem.n:
        raise DomainError(f"need {problem.n} interpolation points, got {mu.size}")
    e = interpolation_matrix(problem.lambdas, mu)
    c, cond = solve_with_condition(e, problem.lambdas.astype(np.complex128))
    if c is None or not np.isfinite(cond) or cond > cond_limit:
        raise SingularInterpolationError(
            f"interpolation matrix condition {cond:.3g} exceeds {cond_limit:.3g} at mu={mu.tolist()}",
            mus=mu,
            condition=cond,
        )
    residual = float(np.max(np.abs(e @ c - problem.lambdas)))
    return InterpolationSolution(coefficients=c, mus=mu, condition=cond, residual=residual)


# -- two distinct eigenvalues -------------------------------------------------

def frobenius_covariants(lambda0: float, lambda1: float, mu: float) -> tuple[complex, complex]:
    """Scalars ``(L0, L1)`` with ``exp(-1j mu H) = L0 I + L1 H`` for a two-level ``H``."""
    if lambda0 == lambda1:
        raise DomainError("covariants need two distinct eigenvalues")
    e0 = np.exp(-1j * mu * lambda0)
    e1 = np.exp(-1j * mu * lambda1)
    d = lambda0 - lambda1
    return (lambda0 * e1 - lambda1 * e0) / d, (e0 - e1) / d


def covariant_coefficients(lambda0: float, lambda1: float, mus) -> NDArray[np.complex128]:
    """Coefficients from the covariant system ``sum_i c_i L0^i = 0, sum_i c_i L1^i = 1``.

    Cramer's rule: ``c = (-L0^1, L0^0) / det``.
    """
    (a0, b0), (a1, b1) = (frobenius_covariants(lambda0, lambda1, m) for m in mus)
    det = a0 * b1 - a1 * b0
    if abs(det) == 0:
        raise SingularInterpolationError("covariant system is singular", mus=np.asarray(mus))
    return np.array([-a1, a0]) / det


@dataclass(frozen=True)
class TwoPointSolution:
    mu_star: float
    mus: NDArray[np.float64]
    coefficients: NDArray[np.complex128]
    l1: float


def analytic_two_point(lambda0: float, lambda1: float) -> TwoPointSolution:
    """Closed-form l1-optimal interpolation for two distinct eigenvalues.

    Points are the antisymmetric pair ``(mu*, -mu*)`` with
    ``mu* = 2/(l0 - l1) * arctan(sqrt(|(l0 - l1)/(l0 + l1)|))``, and the
    optimal norm equals ``max(|l0|, |l1|)``. When ``l0 = -l1`` the arctan
    argument diverges; the limit ``arctan -> pi/2`` is used and the
    coefficients are the continuous limit of the general formula.
    """
    l0, l1 = float(lambda0), float(lambda1)
    if l0 == l1:
        raise DomainError("degenerate eigenvalues; deduplicate before interpolating")
    sigma = 0.5 * (l0 - l1)
    omega = 0.5 * (l0 + l1)
    ratio = np.inf if omega == 0 else abs(sigma / omega)
    theta = float(np.arctan(np.sqrt(ratio)))
    mu = theta / sigma
    phi = omega * mu
    # (p, q) = rot(phi) @ (omega / cos(theta), sigma / sin(theta)), written so that
    # omega -> 0 (cos(theta) -> 0) stays finite
    span = abs(omega) + abs(sigma)
    a = np.sign(omega) * np.sqrt(abs(omega) * span)
    b = np.sign(sigma) * np.sqrt(abs(sigma) * span)
    p = a * np.cos(phi) - b * np.sin(phi)
    q = a * np.sin(phi) + b * np.cos(phi)
    c = np.array([(p + 1j * q) / 2, (p - 1j * q) / 2])
    return TwoPointSolution(mu_star=mu, mus=np.array([mu, -mu]), coefficients=c, l1=float(np.sum(np.abs(c))))


def two_point_l1(lambda0: float, lambda1: float, mu: float) -> float:
    """l1 norm along the antisymmetric slice ``(mu, -mu)``.

    ``sqrt(omega^2 sec^2(sigma mu) + sigma^2 csc^2(sigma mu))``.
    """
    sigma = 0.5 * (lambda0 - lambda1)
    omega = 0.5 * (lambda0 + lambda1)
    x = sigma * mu
    return float(np.sqrt((omega / np.cos(x)) ** 2 + (sigma / np.sin(x)) ** 2))
