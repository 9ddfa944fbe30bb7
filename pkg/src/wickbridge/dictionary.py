"""The mechanics <-> thermodynamics dictionary.

Entries implemented here:

* Wick rotation tau = i t between thermodynamical and mechanical time.
* Parameter map omega <-> gamma, m omega / hbar <-> s / 2 kB, x <-> y (the
  last up to a length scale).
* Identities tying the OU transition density, continued to imaginary time,
  to the free and harmonic propagators.
* Born map psi -> |psi|**2 and its Madelung inverse, which rebuilds a phase
  from the continuity equation.
* Observable averages and the complexified action S / 2 kB + i I / hbar.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_simpson, cumulative_trapezoid

from .errors import (
    Caustic,
    DensityFloor,
    InsufficientTimeSamples,
    UnnormalizedDensity,
    ValidationError,
    ZeroFrequency,
    ZeroInterval,
    ZeroNorm,
)
from .gaussian_kernel import CAUSTIC_TOL, kernel_free, kernel_harmonic
from .params import OUParams, PhysParams
from .quantum import WavefunctionGrid

# dimensionless factor left free in the entropy <-> action correspondence
ENTROPY_ACTION_FACTOR = 1.0
DENSITY_FLOOR = 1e-12
NORMALIZATION_TOL = 1e-8


def wick(t):
    """Thermodynamical time tau = i t for mechanical time t."""
    return 1j * np.asarray(t) if np.ndim(t) else 1j * t


def wick_inverse(tau):
    """Mechanical time t = -i tau; ``wick_inverse(wick(t)) == t`` exactly."""
    return -1j * np.asarray(tau) if np.ndim(tau) else -1j * tau


@dataclass(frozen=True)
class DictionaryMap:
    """Parameter map between an oscillator and an OU process.

    ``length_scale`` is the factor in x = length_scale * y; with the default 1
    the mechanical and thermodynamical coordinates share units.
    """

    length_scale: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.length_scale) and self.length_scale > 0):
            raise ValidationError("length_scale must be > 0")

    def to_thermo(self, q: PhysParams, kB: float = 1.0) -> OUParams:
        """gamma = omega, s = 2 kB m omega lambda**2 / hbar, R = s / gamma."""
        if q.omega == 0:
            raise ZeroFrequency("omega = 0 has no OU partner (use the small-rate branch)")
        s = 2.0 * kB * q.m * q.omega * self.length_scale**2 / q.hbar
        return OUParams(R=s / q.omega, s=s, kB=kB)

    def to_quantum(self, p: OUParams, hbar: float = 1.0) -> PhysParams:
        """Inverse of :meth:`to_thermo` at fixed ``hbar``."""
        g = p.gamma
        if g == 0:
            raise ZeroFrequency("gamma = 0 cannot be inverted")
        m = p.R * hbar / (2.0 * p.kB * self.length_scale**2)
        return PhysParams(m=m, hbar=hbar, omega=g)


def map_params(q: PhysParams, kB: float = 1.0, length_scale: float = 1.0) -> OUParams:
    return DictionaryMap(length_scale).to_thermo(q, kB)


def unmap_params(p: OUParams, hbar: float = 1.0, length_scale: float = 1.0) -> PhysParams:
    return DictionaryMap(length_scale).to_quantum(p, hbar)


# --- conditional density at complex time ------------------------------------------


def ou_density_literal(s: float, kB: float, gamma: float, y2, tau, y1):
    """Transition density with the literal prefactor, at complex ``tau``.

    (s / 2 kB) e^{gamma tau / 2} / sqrt(pi sinh(gamma tau))
        * exp(-(s / 2 kB) (e^{gamma tau / 2} y2 - e^{-gamma tau / 2} y1)**2 / (2 sinh(gamma tau)))
    """
    gt = gamma * complex(tau)
    half = cmath.exp(0.5 * gt)
    sh = cmath.sinh(gt)
    beta = s / (2.0 * kB)
    y2 = np.asarray(y2)
    y1 = np.asarray(y1)
    expo = -beta * (half * y2 - y1 / half) ** 2 / (2.0 * sh)
    out = beta * half / np.sqrt(math.pi * sh) * np.exp(expo)
    return complex(out) if np.ndim(out) == 0 else out


def ou_density_literal_small_rate(s: float, kB: float, gamma: float, y2, tau, y1):
    """gamma -> 0 form: (s / 2 kB) / sqrt(pi gamma tau) exp(-(s / 2 kB)(y2 - y1)**2 / (2 gamma tau))."""
    gt = gamma * complex(tau)
    beta = s / (2.0 * kB)
    dy = np.asarray(y2) - np.asarray(y1)
    out = beta / np.sqrt(math.pi * gt) * np.exp(-beta * dy * dy / (2.0 * gt))
    return complex(out) if np.ndim(out) == 0 else out


def _relative_residual(lhs, rhs) -> float:
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))


def check_free_identity(
    q: PhysParams, kB: float, x1, x2, t: float, gamma: float | None = None
) -> float:
    """Relative residual of K_free(x2, t | x1, 0) = sqrt(kB / s) f1(x2, i t | x1, 0).

    With ``gamma=None`` the right-hand side uses the small-rate form of f1 (a
    nominal rate, ``q.omega`` or 1, cancels exactly); with a finite ``gamma``
    it uses the full form at that rate, and the residual is O(gamma).
    """
    if t == 0:
        raise ZeroInterval("t must be nonzero")
    K = kernel_free(q.m, q.hbar, 0.0, t)
    lhs = K(np.asarray(x2, dtype=float), np.asarray(x1, dtype=float))
    rate = gamma if gamma is not None else (q.omega or 1.0)
    # s / 2 kB = m gamma / hbar
    s = 2.0 * kB * q.m * rate / q.hbar
    if gamma is None:
        f1 = ou_density_literal_small_rate(s, kB, rate, x2, wick(t), x1)
    else:
        f1 = ou_density_literal(s, kB, rate, x2, wick(t), x1)
    return _relative_residual(lhs, math.sqrt(kB / s) * np.asarray(f1))


def check_harmonic_identity(q: PhysParams, kB: float, x1, x2, t: float) -> float:
    """Relative residual of

        f1(x2, i t | x1, 0) = exp(i omega t / 2 - dV / hbar omega) sqrt(2 m omega / hbar) K_harm(x2, t | x1, 0)

    with V(x) = m omega**2 x**2 / 2 and dV = V(x2) - V(x1).
    """
    if abs(math.sin(q.omega * t)) < CAUSTIC_TOL:
        raise Caustic(f"sin(omega t) = {math.sin(q.omega * t):.3e}")
    p = map_params(q, kB)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    lhs = ou_density_literal(p.s, p.kB, p.gamma, x2, wick(t), x1)
    K = kernel_harmonic(q.m, q.hbar, q.omega, 0.0, t)
    dV = 0.5 * q.m * q.omega**2 * (x2 * x2 - x1 * x1)
    rhs = (
        np.exp(0.5j * q.omega * t - dV / (q.hbar * q.omega))
        * math.sqrt(2.0 * q.m * q.omega / q.hbar)
        * K(x2, x1)
    )
    return _relative_residual(lhs, rhs)


def check_ground_state(
    q: PhysParams, kB: float = 1.0, x=None, length_scale: float = 1.0
) -> float:
    """Sup-norm gap between the mapped stationary density and |psi_0|**2.

    Both are unit-normalised in x.  The stationary density lives in y = x /
    length_scale and is carried to x by the change of variables.
    """
    if q.omega <= 0:
        raise ZeroFrequency("ground state needs omega > 0")
    if x is None:
        x = np.linspace(-12.0, 12.0, 2048)
    x = np.asarray(x, dtype=float)
    p = map_params(q, kB, length_scale)
    y = x / length_scale
    rho_thermo = np.sqrt(p.s / (2.0 * math.pi * p.kB)) * np.exp(-0.5 * p.s * y * y / p.kB) / length_scale
    alpha = q.m * q.omega / q.hbar
    psi0 = np.exp(-0.5 * alpha * x * x)
    rho_quantum = np.abs(psi0) ** 2 * math.sqrt(alpha / math.pi)
    return float(np.max(np.abs(rho_thermo - rho_quantum)))


# --- Born map and its Madelung inverse -------------------------------------------------


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Nonnegative density samples on a uniform grid."""

    y: np.ndarray
    rho: np.ndarray

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=float)
        rho = np.asarray(self.rho, dtype=float)
        if y.ndim != 1 or y.shape != rho.shape or y.size < 2:
            raise ValidationError("y and rho must be 1-D arrays of equal length >= 2")
        if np.any(np.diff(y) <= 0):
            raise ValidationError("grid must be strictly increasing")
        if np.any(rho < 0) or not np.all(np.isfinite(rho)):
            raise ValidationError("density must be finite and nonnegative")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "rho", rho)

    @property
    def dy(self) -> float:
        return float(self.y[1] - self.y[0])

    def total(self) -> float:
        return float(np.trapezoid(self.rho, dx=self.dy))

    def normalized(self) -> "DensityGrid":
        z = self.total()
        if z <= 0:
            raise ZeroNorm("density integrates to zero")
        return DensityGrid(self.y, self.rho / z)


def born(psi: WavefunctionGrid) -> DensityGrid:
    """rho = |psi|**2, renormalised to unit trapezoid integral.  The phase is lost."""
    rho = np.abs(psi.psi) ** 2
    z = float(np.trapezoid(rho, dx=psi.dx))
    if not z > 0:
        raise ZeroNorm("wavefunction has zero norm")
    return DensityGrid(psi.x, rho / z)


def _support(rho: np.ndarray, floor: float) -> tuple[int, int]:
    above = np.flatnonzero(rho > floor)
    if above.size == 0:
        raise DensityFloor("density is below the floor everywhere")
    lo, hi = int(above[0]), int(above[-1])
    if np.any(rho[lo : hi + 1] <= floor):
        raise DensityFloor("density drops below the floor inside its support")
    return lo, hi


def madelung_phase_gradient(
    x: np.ndarray, rho: np.ndarray, rho_dot: np.ndarray, mass: float, floor: float = DENSITY_FLOOR
) -> np.ndarray:
    """d(phi)/dx = -m (integral of rho_dot from the left edge) / rho.

    Outside the support (rho <= floor at the edges) the gradient is set to 0.
    """
    lo, hi = _support(rho, floor)
    flux = np.zeros_like(rho)
    flux[lo : hi + 1] = -cumulative_simpson(rho_dot[lo : hi + 1], x=x[lo : hi + 1], initial=0.0)
    grad = np.zeros_like(rho)
    grad[lo : hi + 1] = mass * flux[lo : hi + 1] / rho[lo : hi + 1]
    return grad


def time_derivative(series: Sequence[np.ndarray], times: Sequence[float], index: int) -> np.ndarray:
    """Second-order finite-difference d/dt of ``series`` at ``times[index]``."""
    stack = np.asarray(series, dtype=float)
    times = np.asarray(times, dtype=float)
    if stack.shape[0] < 2:
        raise InsufficientTimeSamples("need at least two time samples")
    if np.any(np.diff(times) <= 0):
        raise ValidationError("times must be strictly increasing")
    if stack.shape[0] == 2:
        return (stack[1] - stack[0]) / (times[1] - times[0])
    return np.gradient(stack, times, axis=0, edge_order=2)[index]


def born_inverse(
    rho_series: Sequence[DensityGrid],
    times: Sequence[float],
    mass: float,
    hbar: float,
    index: int | None = None,
    floor: float = DENSITY_FLOOR,
) -> WavefunctionGrid:
    """sqrt(rho) exp(i phi / hbar) with phi from the 1-D continuity equation.

    ``rho_series`` samples rho(x, t) at ``times`` on one shared grid; the
    result is built at ``times[index]`` (default: the middle sample).  The
    velocity is d(phi)/dx / m and the gauge is phi = 0 at the left edge.

    Raises:
        InsufficientTimeSamples: fewer than two samples.
        DensityFloor: rho vanishes inside its support (a node).
    """
    if len(rho_series) < 2 or len(times) != len(rho_series):
        raise InsufficientTimeSamples("need at least two time samples, one per density")
    grids = list(rho_series)
    x = grids[0].y
    for g in grids[1:]:
        if g.y.shape != x.shape or np.max(np.abs(g.y - x)) > 1e-12 * max(1.0, np.max(np.abs(x))):
            raise ValidationError("all densities must share one grid")
    if index is None:
        index = len(grids) // 2
    rho = grids[index].rho
    rho_dot = time_derivative([g.rho for g in grids], times, index)
    grad = madelung_phase_gradient(x, rho, rho_dot, mass, floor)
    phi = cumulative_trapezoid(grad, x, initial=0.0)
    return WavefunctionGrid(x, np.sqrt(rho) * np.exp(1j * phi / hbar))


def continuity_residual(x, rho, rho_dot, phi, mass: float) -> np.ndarray:
    """rho_dot + d/dx(rho dphi/dx / m) with second-order central differences."""
    x = np.asarray(x, dtype=float)
    h = x[1] - x[0]
    grad = np.gradient(np.asarray(phi, dtype=float), h, edge_order=2)
    current = np.asarray(rho, dtype=float) * grad / mass
    return np.asarray(rho_dot, dtype=float) + np.gradient(current, h, edge_order=2)


# --- averages and the complexified action ----------------------------------------------


def observable_average(f_values, rho: DensityGrid, tol: float = NORMALIZATION_TOL) -> float:
    """Trapezoid value of the pairing of a bounded observable with a density.

    A constant observable returns its constant exactly.
    """
    total = rho.total()
    if abs(total - 1.0) > tol:
        raise UnnormalizedDensity(f"density integrates to {total!r}")
    f = np.broadcast_to(np.asarray(f_values, dtype=float), rho.rho.shape)
    if not np.all(np.isfinite(f)):
        raise ValidationError("observable must be bounded")
    if np.all(f == f.flat[0]):
        return float(f.flat[0])
    return float(np.trapezoid(f * rho.rho, dx=rho.dy))


@dataclass(frozen=True, eq=False)
class ComplexAction:
    """Pair (S / 2 kB, I / hbar), the real and imaginary parts of the complex action."""

    entropy_part: np.ndarray
    phase_part: np.ndarray

    @classmethod
    def from_physical(cls, S, I, kB: float, hbar: float, factor: float = ENTROPY_ACTION_FACTOR):
        return cls(
            np.asarray(S, dtype=float) / (2.0 * kB),
            factor * np.asarray(I, dtype=float) / hbar,
        )

    @property
    def value(self) -> np.ndarray:
        return self.entropy_part + 1j * self.phase_part

    def euclidean(self) -> np.ndarray:
        """I_E / hbar = -i * (I / hbar) after the Wick rotation."""
        return -1j * self.phase_part

    def exp(self) -> np.ndarray:
        return np.exp(self.entropy_part) * np.exp(1j * self.phase_part)


def log_partition(x, entropy_part) -> float:
    """log of integral |exp(complex action)|**2 dx, computed in log space."""
    x = np.asarray(x, dtype=float)
    two = 2.0 * np.asarray(entropy_part, dtype=float)
    top = float(np.max(two))
    return top + math.log(float(np.trapezoid(np.exp(two - top), x)))


def assemble_wavefunction(
    x, S, I, kB: float, hbar: float, factor: float = ENTROPY_ACTION_FACTOR
) -> WavefunctionGrid:
    """psi = Z**-1/2 exp(S / 2 kB) exp(i I / hbar), with Z = integral |exp(S/2kB + i I/hbar)|**2.

    ``born`` of the result is exp(S / kB) / Z.
    """
    x = np.asarray(x, dtype=float)
    act = ComplexAction.from_physical(S, I, kB, hbar, factor)
    if not (np.all(np.isfinite(act.entropy_part)) and np.all(np.isfinite(act.phase_part))):
        raise ValidationError("S and I must be finite on the grid")
    logZ = log_partition(x, act.entropy_part)
    psi = np.exp(act.entropy_part - 0.5 * logZ) * np.exp(1j * act.phase_part)
    return WavefunctionGrid(x, psi)
