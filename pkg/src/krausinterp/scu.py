"""Single-ancilla stochastic combination of unitaries.

The output state of a channel whose Kraus operators are expanded as
``M_k = sum_i c_i^k U_i^k`` is

    rho' = sum_k sum_{i,j} c_i^k conj(c_j^k) U_i^k rho U_j^k^dag .

Each unordered pair ``(i, j)`` becomes one sampling entry with weight
``|c_i|^2`` (self) or ``2 |c_i c_j|`` (cross) and phase ``arg(c_i conj(c_j))``.
Shots are spread over entries by a multinomial draw with probabilities
``w / L``; a cross entry is measured with a Hadamard-test style circuit
(ancilla ``X`` times system observable) and every outcome is rescaled by
``L``, which makes the estimator unbiased.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import NDArray

from . import rng as _rng
from .errors import DimensionError, DomainError, NumericalSanityError
from .linalg import ComplexMatrix, as_matrix, dagger, hermitian_eig, is_hermitian, max_norm

PROB_TOL = 1e-10


@dataclass(frozen=True)
class Observable:
    matrix: ComplexMatrix
    eigenvalues: NDArray[np.float64] = field(repr=False)
    eigenvectors: ComplexMatrix = field(repr=False)
    involutory: bool = False

    @classmethod
    def from_matrix(cls, m, tol: float = 1e-10) -> "Observable":
        m = as_matrix(m)
        if not is_hermitian(m, tol):
            raise DomainError("observable must be Hermitian")
        spec = hermitian_eig(m, tol)
        invol = max_norm(m @ m - np.eye(m.shape[0])) <= tol
        return cls(m, spec.eigenvalues, spec.eigenvectors, invol)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    def outcome_probabilities(self, sigma) -> NDArray[np.float64]:
        """Born probabilities of each eigenvector for a (possibly non-Hermitian) ``sigma``."""
        v = self.eigenvectors
        return np.einsum("ij,jk,ki->i", dagger(v), sigma, v)


def pauli_z() -> Observable:
    return Observable.from_matrix(np.diag([1.0, -1.0]))


def projector(index: int, dim: int) -> Observable:
    m = np.zeros((dim, dim))
    m[index, index] = 1.0
    return Observable.from_matrix(m)


@dataclass(frozen=True)
class TermEntry:
    kraus_index: int
    i: int
    j: int
    weight: float
    phase: float
    left: ComplexMatrix = field(repr=False)
    right: ComplexMatrix = field(repr=False)

    @property
    def is_self(self) -> bool:
        return self.i == self.j

    @property
    def alpha(self) -> complex:
        """``c_i conj(c_j)`` for a self entry; half of it is carried by each ordering of a cross entry."""
        scale = self.weight if self.is_self else self.weight / 2
        return scale * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class TermTable:
    entries: tuple[TermEntry, ...]
    L: float
    dim: int

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def weights(self) -> NDArray[np.float64]:
        return np.array([e.weight for e in self.entries])

    @property
    def probabilities(self) -> NDArray[np.float64]:
        w = self.weights
        return w / w.sum()


def _terms_of(expansion) -> list[tuple[complex, ComplexMatrix]]:
    if hasattr(expansion, "terms"):
        return [(c, u) for c, u, *_ in expansion.terms()]
    return [(complex(c), as_matrix(u)) for c, u in expansion]


def build_term_table(expansions: Iterable) -> TermTable:
    """Flatten per-Kraus expansions into self and cross sampling entries.

    ``expansions`` holds one item per Kraus operator: a
    :class:`~krausinterp.decompose.KrausDecomposition` or a sequence of
    ``(coefficient, unitary)`` pairs. Zero coefficients are dropped.
    """
    entries = []
    dim = None
    for k, expansion in enumerate(expansions):
        terms = [(c, u) for c, u in _terms_of(expansion) if c != 0]
        for c, u in terms:
            if dim is None:
                dim = u.shape[0]
            elif u.shape[0] != dim:
                raise DimensionError("unitaries of different dimensions in one table")
        for i, (ci, ui) in enumerate(terms):
            entries.append(TermEntry(k, i, i, abs(ci) ** 2, 0.0, ui, ui))
            for j in range(i + 1, len(terms)):
                cj, uj = terms[j]
                alpha = ci * np.conj(cj)
                entries.append(TermEntry(k, i, j, 2 * abs(alpha), float(np.angle(alpha)), ui, uj))
    if not entries:
        raise DomainError("no nonzero expansion terms to tabulate")
    return TermTable(tuple(entries), float(sum(e.weight for e in entries)), dim)


@dataclass(frozen=True)
class ShotPlan:
    s_tot: int
    counts: NDArray[np.int64]
    seed: int


def allocate_shots(table: TermTable, s_tot: int, seed: int) -> ShotPlan:
    """One multinomial draw of ``s_tot`` shots over entries with probabilities ``w / L``."""
    if len(table) == 0:
        raise DomainError("cannot allocate shots over an empty table")
    if int(s_tot) < 1:
        raise DomainError(f"s_tot must be >= 1, got {s_tot}")
    counts = _rng.stream(seed, "allocate").multinomial(int(s_tot), table.probabilities)
    return ShotPlan(int(s_tot), counts, int(seed))


@dataclass(frozen=True)
class OutcomeDistribution:
    values: NDArray[np.float64]
    probabilities: NDArray[np.float64]

    @property
    def mean(self) -> float:
        return float(self.values @ self.probabilities)

    @property
    def second_moment(self) -> float:
        return float(self.values**2 @ self.probabilities)


def _check_probs(p: NDArray[np.float64]) -> NDArray[np.float64]:
    if p.min() < -PROB_TOL:
        raise NumericalSanityError(f"negative outcome probability {p.min():.3g}")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def term_outcome_distribution(entry: TermEntry, rho0, obs: Observable) -> OutcomeDistribution:
    """Outcome law of one entry's measurement.

    A self entry measures ``O`` on ``U rho0 U^dag``. A cross entry prepares
    the ancilla in ``(|0> + e^{i phi}|1>)/sqrt(2)``, applies ``U_j`` on
    ancilla ``0`` and ``U_i`` on ancilla ``1``, then records (ancilla ``X``
    outcome) times (``O`` eigenvalue); its mean is
    ``Re[e^{i phi} Tr(O U_i rho0 U_j^dag)]``.
    """
    rho0 = as_matrix(rho0)
    if rho0.shape[0] != obs.dim or entry.left.shape[0] != obs.dim:
        raise DimensionError("state, unitaries and observable dimensions disagree")
    ui, uj = entry.left, entry.right
    if entry.is_self:
        p = np.real(obs.outcome_probabilities(ui @ rho0 @ dagger(ui)))
        return OutcomeDistribution(obs.eigenvalues.copy(), _check_probs(p))
    a_i = np.real(obs.outcome_probabilities(ui @ rho0 @ dagger(ui)))
    a_j = np.real(obs.outcome_probabilities(uj @ rho0 @ dagger(uj)))
    b = obs.outcome_probabilities(ui @ rho0 @ dagger(uj))
    interference = 2 * np.real(np.exp(1j * entry.phase) * b)
    p_plus = 0.25 * (a_i + a_j + interference)
    p_minus = 0.25 * (a_i + a_j - interference)
    values = np.concatenate([obs.eigenvalues, -obs.eigenvalues])
    return OutcomeDistribution(values, _check_probs(np.concatenate([p_plus, p_minus])))


def term_distributions(table: TermTable, rho0, obs: Observable) -> list[OutcomeDistribution]:
    return [term_outcome_distribution(e, rho0, obs) for e in table.entries]


@dataclass(frozen=True)
class EstimateResult:
    mean: float
    predicted_variance: float
    involutory_variance: float
    empirical_stderr: float
    s_tot: int
    circuits_sampled: int
    model_extended: bool

    @property
    def predicted_sigma(self) -> float:
        return math.sqrt(self.predicted_variance)


def estimate_observable(
    table: TermTable,
    rho0,
    obs: Observable,
    plan: ShotPlan,
    distributions: Sequence[OutcomeDistribution] | None = None,
) -> EstimateResult:
    """Sample every entry's outcomes and return the rescaled mean ``L/s_tot * sum(outcomes)``.

    ``predicted_variance`` is ``(L^2 E[v^2] - <O>^2) / s_tot`` with the
    exact per-shot second moment; for involutory observables ``E[v^2] = 1``
    and it equals ``involutory_variance = (L^2 - <O>^2) / s_tot``.
    Outcomes of entry ``e`` come from the stream ``(plan.seed, e)``.
    """
    if len(plan.counts) != len(table):
        raise DimensionError("shot plan was built for a different table")
    if distributions is None:
        distributions = term_distributions(table, rho0, obs)
    L, s = table.L, plan.s_tot
    total = total_sq = 0.0
    for idx, (count, dist) in enumerate(zip(plan.counts, distributions)):
        if count == 0:
            continue
        k = _rng.stream(plan.seed, "outcomes", idx).multinomial(int(count), dist.probabilities)
        total += float(k @ dist.values)
        total_sq += float(k @ dist.values**2)
    mean = L * total / s

    w = table.weights
    exact = float(sum(wi * d.mean for wi, d in zip(w, distributions)))
    m2 = float(sum(wi * d.second_moment for wi, d in zip(w, distributions))) / L
    predicted = max(L * L * m2 - exact * exact, 0.0) / s
    involutory = max(L * L - exact * exact, 0.0) / s
    if s > 1:
        shot_var = max(L * L * total_sq / s - mean * mean, 0.0) * s / (s - 1)
        stderr = math.sqrt(shot_var / s)
    else:
        stderr = math.nan
    return EstimateResult(
        mean=mean,
        predicted_variance=predicted,
        involutory_variance=involutory,
        empirical_stderr=stderr,
        s_tot=s,
        circuits_sampled=int(np.count_nonzero(plan.counts)),
        model_extended=not obs.involutory,
    )


def entry_expectation(entry: TermEntry, rho0, obs: Observable) -> float:
    """``Re[e^{i phi} Tr(O U_i rho0 U_j^dag)]`` evaluated directly."""
    val = np.trace(obs.matrix @ entry.left @ rho0 @ dagger(entry.right))
    return float(np.real(np.exp(1j * entry.phase) * val))


def exact_expectation(table: TermTable, rho0, obs: Observable) -> float:
    """Infinite-shot value ``sum_e w_e <v>_e = Tr(O rho')``."""
    rho0 = as_matrix(rho0)
    return float(sum(e.weight * entry_expectation(e, rho0, obs) for e in table.entries))


def reconstruct_density_matrix(table: TermTable, rho0) -> ComplexMatrix:
    """Assemble ``sum_k sum_{i,j} c_i conj(c_j) U_i rho0 U_j^dag`` from the table."""
    rho0 = as_matrix(rho0)
    out = np.zeros_like(rho0)
    for e in table.entries:
        block = e.left @ rho0 @ dagger(e.right)
        if e.is_self:
            out += e.weight * block
        else:
            term = e.alpha * block
            out += term + dagger(term)
    return out
