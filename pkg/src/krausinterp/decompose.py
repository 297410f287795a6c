"""Unitary expansions of Kraus operators.

A Kraus operator ``M`` is split into ``S`` and ``A``; each half is written as
a weighted sum of unitaries it generates. The anti-Hermitian half is handled
through its Hermitian proxy ``H = iA``: an interpolation ``H = sum c'_j
exp(-i mu_j H)`` becomes ``A = sum (-i c'_j) exp(mu_j A)``, so every
expansion stores a Hermitian generator and ``U_j = exp(-i mu_j generator)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from . import rng as _rng
from .channels import NEGLIGIBLE_NORM
from .errors import DomainError, SingularInterpolationError
from .interpolation import (
    DEDUPE_TOL,
    InterpolationProblem,
    analytic_two_point,
    solve_exact,
    unique_eigenvalues,
)
from .linalg import (
    ComplexMatrix,
    GeneratorPair,
    Spectrum,
    as_matrix,
    expm_from_spectrum,
    hermitian_eig,
    max_norm,
    sa_split,
)
from .optimize import OptimizationResult, OptimizerConfig, multistart_optimize

HERMITIAN = "hermitian"
ANTI_HERMITIAN = "anti-hermitian"
# maps proxy coefficients back onto the original generator
_BACK = {HERMITIAN: 1.0, ANTI_HERMITIAN: -1j}


@dataclass(frozen=True)
class UnitaryExpansion:
    kind: str
    generator: ComplexMatrix
    coefficients: NDArray[np.complex128]
    mus: NDArray[np.float64]
    method: str = "exact"
    epsilon: float | None = None
    optimization: OptimizationResult | None = field(default=None, compare=False, repr=False)
    _spectrum: Spectrum | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in _BACK:
            raise DomainError(f"unknown expansion kind {self.kind!r}")
        object.__setattr__(self, "coefficients", np.asarray(self.coefficients, dtype=np.complex128).reshape(-1))
        object.__setattr__(self, "mus", np.asarray(self.mus, dtype=np.float64).reshape(-1))
        if self.coefficients.size != self.mus.size:
            raise DomainError("coefficients and mus differ in length")

    @property
    def spectrum(self) -> Spectrum:
        if self._spectrum is None:
            object.__setattr__(self, "_spectrum", hermitian_eig(self.generator))
        return self._spectrum

    def __len__(self) -> int:
        return self.coefficients.size

    @property
    def l1(self) -> float:
        return float(np.sum(np.abs(self.coefficients)))

    @property
    def max_abs_eigenvalue(self) -> float:
        return float(np.max(np.abs(self.spectrum.eigenvalues)))

    @property
    def sqr(self) -> float:
        scale = self.max_abs_eigenvalue
        return self.l1 / scale if scale > 0 else float("nan")

    def unitaries(self) -> list[ComplexMatrix]:
        return [expm_from_spectrum(self.spectrum, -1j * mu) for mu in self.mus]

    def target(self) -> ComplexMatrix:
        """``S`` for a Hermitian expansion, ``A = -i H`` for an anti-Hermitian one."""
        return _BACK[self.kind] * self.generator

    def reconstruct(self) -> ComplexMatrix:
        out = np.zeros_like(self.generator)
        for c, u in zip(self.coefficients, self.unitaries()):
            out += c * u
        return out

    def residual(self) -> float:
        return max_norm(self.reconstruct() - self.target())


def _proxy(pair: GeneratorPair, kind: str) -> ComplexMatrix:
    h = pair.S if kind == HERMITIAN else 1j * pair.A
    return (h + h.conj().T) / 2


def approximate_expansion(pair: GeneratorPair, epsilon: float) -> tuple[UnitaryExpansion, UnitaryExpansion]:
    """First-order finite-difference expansions of ``S`` and ``A``.

    ``S ~ i/(2 eps) (exp(-i eps S) - exp(i eps S))`` and
    ``A ~ 1/(2 eps) (exp(eps A) - exp(-eps A))``; the error is ``O(eps^2)``
    and each part has l1 norm ``1/eps``.
    """
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    mus = np.array([epsilon, -epsilon])
    proxy_c = np.array([0.5j / epsilon, -0.5j / epsilon])
    parts = []
    for kind in (HERMITIAN, ANTI_HERMITIAN):
        parts.append(UnitaryExpansion(
            kind=kind, generator=_proxy(pair, kind), coefficients=_BACK[kind] * proxy_c,
            mus=mus, method="approximate", epsilon=float(epsilon),
        ))
    return parts[0], parts[1]


def _solve_retrying(problem: InterpolationProblem, mus, seed: int, cond_limit: float):
    try:
        return solve_exact(problem, mus, cond_limit)
    except SingularInterpolationError:
        gen = _rng.stream(seed, "reperturb", problem.n)
        jitter = gen.uniform(-1e-3, 1e-3, size=problem.n) / problem.scale
        return solve_exact(problem, np.asarray(mus) + jitter, cond_limit)


def interpolate_generator(
    h,
    kind: str = HERMITIAN,
    config: OptimizerConfig | None = None,
    *,
    dedupe_tol: float = DEDUPE_TOL,
    use_closed_form: bool = True,
) -> UnitaryExpansion:
    """Exact expansion of a Hermitian generator ``h`` (or proxy ``iA``).

    One unique eigenvalue needs a single identity term; two use the closed
    form unless ``use_closed_form`` is off; more go through the multistart
    optimizer. A zero generator yields an empty expansion.
    """
    h = as_matrix(h)
    config = config or OptimizerConfig()
    spec = hermitian_eig(h)
    back = _BACK[kind]
    if np.max(np.abs(spec.eigenvalues)) < NEGLIGIBLE_NORM:
        return UnitaryExpansion(kind, h, np.zeros(0), np.zeros(0), _spectrum=spec)

    problem = unique_eigenvalues(spec.eigenvalues, dedupe_tol)
    opt = None
    if problem.n == 1:
        mus, coeffs = np.zeros(1), problem.lambdas.astype(np.complex128)
    elif problem.n == 2 and use_closed_form:
        sol = analytic_two_point(*problem.lambdas)
        mus, coeffs = sol.mus, sol.coefficients
    else:
        opt = multistart_optimize(problem, config)
        sol = _solve_retrying(problem, opt.mu_opt, config.seed, config.cond_limit)
        mus, coeffs = sol.mus, sol.coefficients
    return UnitaryExpansion(kind, h, back * coeffs, mus, optimization=opt, _spectrum=spec)


@dataclass(frozen=True)
class KrausDecomposition:
    """Both halves of one Kraus operator; either may be empty."""

    source: ComplexMatrix
    s_part: UnitaryExpansion
    a_part: UnitaryExpansion

    @property
    def parts(self) -> tuple[UnitaryExpansion, UnitaryExpansion]:
        return self.s_part, self.a_part

    def terms(self) -> list[tuple[complex, ComplexMatrix, str]]:
        """``(coefficient, unitary, origin)`` with origin ``"S"`` or ``"A"``."""
        out = []
        for origin, part in (("S", self.s_part), ("A", self.a_part)):
            for c, u in zip(part.coefficients, part.unitaries()):
                out.append((complex(c), u, origin))
        return out

    def __len__(self) -> int:
        return len(self.s_part) + len(self.a_part)

    @property
    def l1(self) -> float:
        return self.s_part.l1 + self.a_part.l1

    def reconstruct(self) -> ComplexMatrix:
        out = np.zeros_like(self.source)
        for c, u, _ in self.terms():
            out += c * u
        return out

    def residual(self) -> float:
        return max_norm(self.reconstruct() - self.source)


def decompose_kraus(
    m,
    method: str = "exact",
    optimizer_config: OptimizerConfig | None = None,
    *,
    epsilon: float | None = None,
    dedupe_tol: float = DEDUPE_TOL,
    use_closed_form: bool = True,
) -> KrausDecomposition:
    """Write ``M`` as a linear combination of unitaries generated by its halves.

    Parameters
    ----------
    m : array_like
        Square operator.
    method : {"exact", "approximate"}
        ``"approximate"`` needs ``epsilon`` and carries an ``O(eps^2)`` bias.
    optimizer_config : OptimizerConfig, optional
        Used for generators with three or more unique eigenvalues.

    Halves whose max-norm is below ``1e-14`` contribute no terms.
    """
    pair = sa_split(m)
    if method == "exact":
        parts = [
            interpolate_generator(_proxy(pair, kind), kind, optimizer_config,
                                  dedupe_tol=dedupe_tol, use_closed_form=use_closed_form)
            for kind in (HERMITIAN, ANTI_HERMITIAN)
        ]
    elif method == "approximate":
        if epsilon is None:
            raise DomainError("the approximate method needs epsilon")
        parts = list(approximate_expansion(pair, epsilon))
    else:
        raise DomainError(f"unknown decomposition method {method!r}")
    for k, (part, half) in enumerate(zip(parts, (pair.S, pair.A))):
        if len(part) and max_norm(half) < NEGLIGIBLE_NORM:
            parts[k] = UnitaryExpansion(part.kind, part.generator, np.zeros(0), np.zeros(0),
                                        method=part.method, epsilon=part.epsilon)
    return KrausDecomposition(pair.source, parts[0], parts[1])


def decompose_channel(channel, method: str = "exact", optimizer_config: OptimizerConfig | None = None,
                      **kwargs) -> list[KrausDecomposition]:
    return [decompose_kraus(m, method, optimizer_config, **kwargs) for m in channel.operators]
