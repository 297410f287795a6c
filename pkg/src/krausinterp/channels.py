"""Kraus channels, CPTP certification and exact channel application."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError, PreconditionError
from .linalg import ComplexMatrix, as_matrix, dagger, is_hermitian, max_norm

CPTP_TOL = 1e-9
# operators below this max-norm are kept in the channel but contribute nothing
NEGLIGIBLE_NORM = 1e-14


@dataclass(frozen=True)
class KrausChannel:
    operators: tuple[ComplexMatrix, ...]
    label: str = ""

    def __post_init__(self):
        ops = tuple(as_matrix(m) for m in self.operators)
        if not ops:
            raise DimensionError("a channel needs at least one Kraus operator")
        dims = {m.shape[0] for m in ops}
        if len(dims) != 1:
            raise DimensionError(f"Kraus operators have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)


@dataclass(frozen=True)
class AdcParams:
    """Generalized amplitude damping parameters.

    ``gamma`` in 1/s, ``t`` in s; ``lambda_th`` is the thermal weight of the
    decay direction (1 is zero temperature).
    """

    gamma: float
    t: float
    lambda_th: float = 1.0

    def __post_init__(self):
        for name in ("gamma", "t", "lambda_th"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v}")
        if self.gamma < 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")
        if self.t < 0:
            raise DomainError(f"t must be >= 0, got {self.t}")
        if not 0.0 <= self.lambda_th <= 1.0:
            raise DomainError(f"lambda_th must lie in [0, 1], got {self.lambda_th}")


def thermal_weight(kT: float) -> float:
    """Thermal weight ``1 / (1 + exp(-1/kT))`` for a temperature in units of the gap."""
    if kT < 0:
        raise DomainError("temperature must be non-negative")
    if kT == 0:
        return 1.0
    return 1.0 / (1.0 + math.exp(-1.0 / kT))


def make_adc(params: AdcParams) -> KrausChannel:
    """Four-operator generalized amplitude damping channel."""
    decay = math.exp(-params.gamma * params.t)
    lam = params.lambda_th
    a, b = math.sqrt(lam), math.sqrt(1.0 - lam)
    keep, lose = math.sqrt(decay), math.sqrt(1.0 - decay)
    m0 = a * np.array([[1, 0], [0, keep]], dtype=np.complex128)
    m1 = a * lose * np.array([[0, 1], [0, 0]], dtype=np.complex128)
    m2 = b * np.array([[keep, 0], [0, 1]], dtype=np.complex128)
    m3 = b * lose * np.array([[0, 0], [1, 0]], dtype=np.complex128)
    label = f"adc(gamma={params.gamma:g}, t={params.t:g}, lambda_th={params.lambda_th:g})"
    return KrausChannel((m0, m1, m2, m3), label=label)


@dataclass(frozen=True)
class CPTPReport:
    passed: bool
    residual: float
    tol: float

    def __bool__(self) -> bool:
        return self.passed


def completeness_residual(ch: KrausChannel) -> float:
    """Max-norm of ``sum_k M_k^dag M_k - I``."""
    total = sum(dagger(m) @ m for m in ch.operators)
    return max_norm(total - np.eye(ch.dim))


def validate_cptp(ch: KrausChannel, tol: float = CPTP_TOL) -> CPTPReport:
    r = completeness_residual(ch)
    return CPTPReport(passed=r <= tol, residual=r, tol=tol)


def apply_channel_exact(ch: KrausChannel, rho, tol: float = 1e-10) -> ComplexMatrix:
    """``sum_k M_k rho M_k^dag``; the matrix-level ground truth."""
    rho = as_matrix(rho)
    if rho.shape[0] != ch.dim:
        raise DimensionError(f"state has dim {rho.shape[0]}, channel has dim {ch.dim}")
    if not is_hermitian(rho, tol):
        raise PreconditionError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > 1e-8:
        raise PreconditionError(f"density matrix trace is {np.trace(rho).real:.12g}, not 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise PreconditionError("density matrix is not positive semidefinite")
    return sum(m @ rho @ dagger(m) for m in ch.operators)


def populations(rho) -> np.ndarray:
    return np.real(np.diag(rho)).copy()


# -- structured-text channel definitions ------------------------------------

def _operator_from_pairs(rows, where: str) -> ComplexMatrix:
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"{where}: entries must be [re, im] number pairs") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{where}: expected an N x N array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def operator_to_pairs(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def channel_from_dict(spec: dict) -> KrausChannel:
    """Build a channel from ``{"operators": [...]}`` or ``{"adc": {gamma, t, lambda_th}}``.

    Operators are row-major lists of ``[re, im]`` pairs. Flat ``gamma`` /
    ``t`` / ``lambda_th`` keys are accepted as an ADC shorthand.
    """
    if "operators" in spec or "kraus" in spec:
        raw = spec.get("operators", spec.get("kraus"))
        ops = [_operator_from_pairs(op, f"operators[{k}]") for k, op in enumerate(raw)]
        return KrausChannel(tuple(ops), label=str(spec.get("label", "kraus")))
    adc = spec.get("adc", spec)
    missing = [k for k in ("gamma", "t") if k not in adc]
    if missing:
        raise KeyError(f"channel definition lacks operators and ADC keys {missing}")
    return make_adc(AdcParams(float(adc["gamma"]), float(adc["t"]), float(adc.get("lambda_th", 1.0))))


def channel_to_dict(ch: KrausChannel) -> dict:
    return {"label": ch.label, "operators": [operator_to_pairs(m) for m in ch.operators]}


def load_channel(path) -> KrausChannel:
    """Read a JSON channel definition file."""
    with open(Path(path), encoding="utf-8") as fh:
        return channel_from_dict(json.load(fh))


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel((np.eye(dim, dtype=np.complex128),), label="identity")
