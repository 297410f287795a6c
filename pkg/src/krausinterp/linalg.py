"""Dense complex linear algebra primitives.

Operators, density matrices and unitaries are plain ``numpy`` complex arrays.
Matrix exponentials are only ever taken of normal generators, so they are
formed from an eigendecomposition rather than a Pade approximant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionError, PreconditionError

HERMITIAN_TOL = 1e-10

ComplexMatrix = NDArray[np.complex128]


def as_matrix(m) -> ComplexMatrix:
    """Coerce ``m`` to a finite square complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise PreconditionError("matrix has non-finite entries")
    return a


def dagger(m: ComplexMatrix) -> ComplexMatrix:
    return m.conj().T


def max_norm(m) -> float:
    """Largest absolute entry."""
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(m)
    return max_norm(m - dagger(m)) <= tol


def is_antihermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(m)
    return max_norm(m + dagger(m)) <= tol


def is_unitary(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(m)
    return max_norm(dagger(m) @ m - np.eye(m.shape[0])) <= tol


@dataclass(frozen=True)
class GeneratorPair:
    """Hermitian and anti-Hermitian halves of ``source``."""

    S: ComplexMatrix
    A: ComplexMatrix
    source: ComplexMatrix


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (descending) and the unitary whose columns are eigenvectors."""

    eigenvalues: NDArray[np.float64]
    eigenvectors: ComplexMatrix

    def reconstruct(self) -> ComplexMatrix:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def sa_split(m) -> GeneratorPair:
    """Split ``m`` into ``S = (M + M^dag)/2`` and ``A = (M - M^dag)/2``."""
    m = as_matrix(m)
    md = dagger(m)
    return GeneratorPair(S=(m + md) / 2, A=(m - md) / 2, source=m)


def hermitian_eig(h, tol: float = HERMITIAN_TOL) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues are returned in descending order; ties keep the order in which
    the underlying solver produced them, so results are deterministic.
    """
    h = as_matrix(h)
    if not is_hermitian(h, tol):
        raise PreconditionError(
            f"matrix is not Hermitian within {tol:g} "
            f"(residual {max_norm(h - dagger(h)):.3g})"
        )
    # symmetrize so eigh sees exactly Hermitian data
    w, v = np.linalg.eigh((h + dagger(h)) / 2)
    order = np.argsort(-w, kind="stable")
    return Spectrum(eigenvalues=w[order], eigenvectors=v[:, order])


def expm_normal(h, scale: complex, tol: float = HERMITIAN_TOL) -> ComplexMatrix:
    """Return ``exp(scale * H)`` for Hermitian or anti-Hermitian ``H``.

    Computed as ``V diag(exp(scale * lambda)) V^dag``.
    """
    h = as_matrix(h)
    if is_hermitian(h, tol):
        spec = hermitian_eig(h, tol)
        lam = spec.eigenvalues.astype(np.complex128)
    elif is_antihermitian(h, tol):
        # iH is Hermitian with eigenvalues w, so H has eigenvalues -i w
        spec = hermitian_eig(1j * h, tol)
        lam = -1j * spec.eigenvalues
    else:
        raise PreconditionError("expm_normal needs a Hermitian or anti-Hermitian matrix")
    return expm_from_spectrum(spec, scale, lam)


def expm_from_spectrum(spec: Spectrum, scale: complex, eigenvalues=None) -> ComplexMatrix:
    """``V diag(exp(scale * lambda)) V^dag`` for a precomputed spectrum."""
    lam = spec.eigenvalues if eigenvalues is None else eigenvalues
    v = spec.eigenvectors
    return (v * np.exp(scale * lam)) @ dagger(v)
