"""Linear irreversible thermodynamics in N variables.

An :class:`OnsagerSystem` holds the conductance matrix ``L`` (fluxes are
``L @ Y``), its inverse ``R``, the entropy Hessian ``s`` and the Boltzmann
constant.  Near equilibrium the entropy is ``S0 - y.s.y / 2``, the forces are
``Y = -s y`` and the deterministic relaxation is ``R dy/dtau + s y = 0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import NotPositiveDefinite, ReciprocityViolation, ValidationError

SYMMETRY_TOL = 1e-12
INVERSE_TOL = 1e-10


def _as_matrix(name: str, value, n: int | None = None) -> np.ndarray:
    mat = np.atleast_2d(np.asarray(value, dtype=float))
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {mat.shape}")
    if n is not None and mat.shape[0] != n:
        raise ValidationError(f"{name} must be {n}x{n}, got {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValidationError(f"{name} has non-finite entries")
    return mat


def _is_symmetric(mat: np.ndarray) -> bool:
    scale = max(1.0, float(np.max(np.abs(mat))))
    return float(np.max(np.abs(mat - mat.T))) <= SYMMETRY_TOL * scale


def _check_spd(name: str, mat: np.ndarray) -> None:
    try:
        np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"{name} is not positive definite") from None


@dataclass(frozen=True, eq=False)
class OnsagerSystem:
    """Linear-response data of a thermodynamical system near equilibrium.

    A nonsymmetric ``L`` raises :class:`ReciprocityViolation` instead of being
    symmetrised.
    """

    L: np.ndarray
    s: np.ndarray
    kB: float = 1.0
    S0: float = 0.0
    R: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        L = _as_matrix("L", self.L)
        s = _as_matrix("s", self.s, L.shape[0])
        if not _is_symmetric(L):
            raise ReciprocityViolation("L must be symmetric (Onsager reciprocity)")
        if not _is_symmetric(s):
            raise ValidationError("s must be symmetric")
        _check_spd("L", L)
        _check_spd("s", s)
        if not (math.isfinite(self.kB) and self.kB > 0):
            raise ValidationError(f"kB must be > 0, got {self.kB!r}")
        R = np.linalg.inv(L)
        R = 0.5 * (R + R.T)
        if np.max(np.abs(R @ L - np.eye(L.shape[0]))) > INVERSE_TOL:
            raise ValidationError("L is too ill-conditioned to invert accurately")
        for arr in (L, s, R):
            arr.flags.writeable = False
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "kB", float(self.kB))
        object.__setattr__(self, "S0", float(self.S0))

    @property
    def N(self) -> int:
        return self.L.shape[0]

    @classmethod
    def from_dict(cls, data: dict) -> "OnsagerSystem":
        """Build from the JSON layout ``{"N", "L", "s", "kB", "S0"}``."""
        try:
            n = int(data["N"])
            sys = cls(L=data["L"], s=data["s"], kB=data.get("kB", 1.0), S0=data.get("S0", 0.0))
        except KeyError as exc:
            raise ValidationError(f"missing key {exc}") from None
        if sys.N != n:
            raise ValidationError(f"N = {n} does not match matrix size {sys.N}")
        return sys

    @classmethod
    def load(cls, path: str | Path) -> "OnsagerSystem":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "L": self.L.tolist(),
            "s": self.s.tolist(),
            "kB": self.kB,
            "S0": self.S0,
        }

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n")


def _state(sys: OnsagerSystem, y) -> np.ndarray:
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.shape != (sys.N,):
        raise ValidationError(f"state must have shape ({sys.N},), got {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValidationError("state has non-finite entries")
    return y


def entropy(sys: OnsagerSystem, y) -> float:
    """Gaussian entropy S0 - y.s.y / 2."""
    y = _state(sys, y)
    return sys.S0 - 0.5 * float(y @ sys.s @ y)


def forces(sys: OnsagerSystem, y) -> np.ndarray:
    """Thermodynamic forces Y = dS/dy = -s y."""
    return -(sys.s @ _state(sys, y))


def fluxes(sys: OnsagerSystem, Y) -> np.ndarray:
    """Linear phenomenological fluxes dy/dtau = L Y."""
    return sys.L @ _state(sys, Y)


def forces_from_fluxes(sys: OnsagerSystem, ydot) -> np.ndarray:
    """Inverse relation Y = R dy/dtau."""
    return sys.R @ _state(sys, ydot)


class ProductionReport(NamedTuple):
    Sdot: float
    Phi: float
    Psi: float


def production_report(sys: OnsagerSystem, y) -> ProductionReport:
    """Entropy production and both dissipation functions along the flow.

    Sdot = Y.ydot, Phi = ydot.R.ydot / 2 (fluxes), Psi = Y.L.Y / 2 (forces).
    On the phenomenological flow Phi == Psi == Sdot / 2.
    """
    Y = forces(sys, y)
    ydot = sys.L @ Y
    return ProductionReport(
        Sdot=float(Y @ ydot),
        Phi=0.5 * float(ydot @ sys.R @ ydot),
        Psi=0.5 * float(Y @ sys.L @ Y),
    )


def _relaxation_modes(sys: OnsagerSystem) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # L s = s^-1/2 (s^1/2 L s^1/2) s^1/2; the middle factor is SPD, so rates are real > 0
    w, V = np.linalg.eigh(sys.s)
    sqrt_s = (V * np.sqrt(w)) @ V.T
    inv_sqrt_s = (V / np.sqrt(w)) @ V.T
    rates, Q = np.linalg.eigh(sqrt_s @ sys.L @ sqrt_s)
    return rates, inv_sqrt_s @ Q, Q.T @ sqrt_s


def relaxation_rates(sys: OnsagerSystem) -> np.ndarray:
    """Eigenvalues of L s, ascending."""
    return _relaxation_modes(sys)[0]


def relax(sys: OnsagerSystem, y, tau) -> np.ndarray:
    """Deterministic relaxation y(tau) = exp(-L s tau) y(0).

    ``tau`` may be an array; the result then has shape ``tau.shape + (N,)``.
    """
    y = _state(sys, y)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValidationError("tau must be >= 0")
    rates, left, right = _relaxation_modes(sys)
    amps = right @ y
    decay = np.exp(-np.multiply.outer(tau, rates))
    return (decay * amps) @ left.T


def stationary_density(sys: OnsagerSystem, y) -> float:
    """Normalised Boltzmann density exp((S - S0) / kB) / Z.

    Z = (2 pi kB)^(N/2) det(s)^(-1/2).  The reference entropy S0 cancels in the
    normalisation.
    """
    y = _state(sys, y)
    _, logdet = np.linalg.slogdet(sys.s)
    logZ = 0.5 * sys.N * math.log(2.0 * math.pi * sys.kB) - 0.5 * logdet
    return math.exp(-0.5 * float(y @ sys.s @ y) / sys.kB - logZ)


def stationary_covariance(sys: OnsagerSystem) -> np.ndarray:
    return sys.kB * np.linalg.inv(sys.s)
