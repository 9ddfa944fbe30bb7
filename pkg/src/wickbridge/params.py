"""Parameter bundles shared by the mechanical and thermodynamical sides."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError


def _require_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class PhysParams:
    """Mass, reduced Planck constant and oscillator frequency.

    ``omega == 0`` selects the free particle.
    """

    m: float = 1.0
    hbar: float = 1.0
    omega: float = 0.0

    def __post_init__(self) -> None:
        _require_positive("m", self.m)
        _require_positive("hbar", self.hbar)
        if not (math.isfinite(self.omega) and self.omega >= 0):
            raise ValidationError(f"omega must be finite and >= 0, got {self.omega!r}")


@dataclass(frozen=True)
class OUParams:
    """Single-variable linear fluctuation model ``R dy/dtau + s y = xi``.

    Attributes:
        R: resistance, entropy * time / y**2.
        s: entropy curvature, entropy / y**2.
        kB: Boltzmann constant.
    """

    R: float = 1.0
    s: float = 1.0
    kB: float = 1.0

    def __post_init__(self) -> None:
        _require_positive("R", self.R)
        _require_positive("s", self.s)
        _require_positive("kB", self.kB)

    @property
    def gamma(self) -> float:
        """Relaxation rate s/R."""
        return self.s / self.R

    @property
    def variance(self) -> float:
        """Stationary variance kB/s."""
        return self.kB / self.s

    @classmethod
    def from_rate(cls, gamma: float, s: float = 1.0, kB: float = 1.0) -> "OUParams":
        _require_positive("gamma", gamma)
        return cls(R=s / gamma, s=s, kB=kB)
