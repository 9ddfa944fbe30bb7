"""Mechanical side: classical actions, semiclassical propagators, wavefunction evolution."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np

from .errors import Caustic, GridTooNarrow, ValidationError, ZeroInterval
from .gaussian_kernel import (
    CAUSTIC_TOL,
    ComplexGaussianKernel,
    kernel_free,
    kernel_harmonic,
)
from .params import PhysParams

Kind = Literal["free", "harmonic"]

DEFAULT_EXTENT = 12.0
DEFAULT_POINTS = 2048
TRUNCATION_TOL = 1e-10
# minimum samples per local fringe of the oscillatory kernel
POINTS_PER_FRINGE = 8

__all__ = [
    "PhysParams",
    "WavefunctionGrid",
    "classical_action",
    "semiclassical_propagator",
    "exact_propagator",
    "evolve_wavefunction",
    "uniform_grid",
    "free_packet",
    "harmonic_ground_state",
]


def uniform_grid(n: int = DEFAULT_POINTS, extent: float = DEFAULT_EXTENT) -> np.ndarray:
    return np.linspace(-extent, extent, n)


def trapezoid_weights(n: int, dx: float) -> np.ndarray:
    w = np.full(n, dx)
    w[0] = w[-1] = 0.5 * dx
    return w


@dataclass(frozen=True, eq=False)
class WavefunctionGrid:
    """Complex samples of psi on a uniform grid."""

    x: np.ndarray
    psi: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        psi = np.asarray(self.psi, dtype=complex)
        if x.ndim != 1 or x.shape != psi.shape or x.size < 2:
            raise ValidationError("x and psi must be 1-D arrays of equal length >= 2")
        steps = np.diff(x)
        if np.any(steps <= 0):
            raise ValidationError("grid must be strictly increasing")
        if np.max(np.abs(steps - steps[0])) > 1e-12 * max(abs(steps[0]), np.max(np.abs(x))):
            raise ValidationError("grid must be uniform")
        if not np.all(np.isfinite(psi)):
            raise ValidationError("psi has non-finite samples")
        x.flags.writeable = False
        psi.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "psi", psi)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def norm2(self) -> float:
        """Trapezoid estimate of the integral of |psi|**2."""
        return float(np.trapezoid(np.abs(self.psi) ** 2, dx=self.dx))

    def normalized(self) -> "WavefunctionGrid":
        return WavefunctionGrid(self.x, self.psi / math.sqrt(self.norm2()))

    def to_csv(self, path: str | Path | None = None, precision: int = 17) -> str:
        """Serialize as ``x,re_psi,im_psi`` rows; returns the text."""
        buf = io.StringIO()
        buf.write("x,re_psi,im_psi\n")
        for xi, p in zip(self.x, self.psi):
            buf.write(f"{xi:.{precision}g},{p.real:.{precision}g},{p.imag:.{precision}g}\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, newline="\n")
        return text

    @classmethod
    def from_csv(cls, source: str | Path) -> "WavefunctionGrid":
        """Read a grid written by :meth:`to_csv` (path or CSV text)."""
        text = source if isinstance(source, str) and "\n" in source else Path(source).read_text()
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if [h.strip() for h in header] != ["x", "re_psi", "im_psi"]:
            raise ValidationError(f"unexpected header {header!r}")
        rows = np.array([[float(v) for v in row] for row in reader if row])
        return cls(rows[:, 0], rows[:, 1] + 1j * rows[:, 2])


def _interval(t1: float, t2: float) -> float:
    dt = t2 - t1
    if dt == 0:
        raise ZeroInterval("t2 == t1")
    if dt < 0:
        raise ValidationError("classical action requires t2 > t1")
    return dt


def classical_action(kind: Kind, p: PhysParams, x1, t1: float, x2, t2: float):
    """Action along the classical trajectory from (x1, t1) to (x2, t2)."""
    dt = _interval(t1, t2)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if kind == "free":
        out = p.m * (x2 - x1) ** 2 / (2.0 * dt)
    elif kind == "harmonic":
        sn = math.sin(p.omega * dt)
        if abs(sn) < CAUSTIC_TOL:
            raise Caustic(f"sin(omega*dt) = {sn:.3e}")
        cs = math.cos(p.omega * dt)
        out = p.m * p.omega / (2.0 * sn) * ((x1 * x1 + x2 * x2) * cs - 2.0 * x1 * x2)
    else:
        raise ValidationError(f"unknown kind {kind!r}")
    return float(out) if out.ndim == 0 else out


def semiclassical_propagator(
    kind: Kind, p: PhysParams, t1: float, t2: float
) -> ComplexGaussianKernel:
    """Van Vleck kernel Z**-1 exp(i S_cl / hbar) for a quadratic Lagrangian.

    The quadratic form of the classical action is read off from action values
    at three endpoint pairs; the prefactor is the Van Vleck determinant
    sqrt(-(d2 S / dx1 dx2) / (2 pi i hbar)), which makes the kernel reduce to a
    delta function as t2 -> t1.
    """
    S_a = classical_action(kind, p, 0.0, t1, 1.0, t2)
    S_b = classical_action(kind, p, 1.0, t1, 0.0, t2)
    S_c = classical_action(kind, p, 1.0, t1, 1.0, t2) - S_a - S_b
    k = 1j / p.hbar
    logN = 0.5 * np.log(complex(-S_c / (2.0 * math.pi * 1j * p.hbar)))
    return ComplexGaussianKernel(a=k * S_a, b=k * S_b, c=k * S_c, logN=logN)


def exact_propagator(kind: Kind, p: PhysParams, t1: float, t2: float) -> ComplexGaussianKernel:
    if kind == "free":
        return kernel_free(p.m, p.hbar, t1, t2)
    if kind == "harmonic":
        return kernel_harmonic(p.m, p.hbar, p.omega, t1, t2)
    raise ValidationError(f"unknown kind {kind!r}")


def _max_phase_gradient(K: ComplexGaussianKernel, xmax: float) -> float:
    # |d/dx1 Im(exponent)| bounded over the square [-xmax, xmax]^2
    return (2.0 * abs(K.b.imag) + abs(K.c.imag)) * xmax + abs(K.e.imag)


def evolve_wavefunction(
    psi: WavefunctionGrid,
    K: ComplexGaussianKernel,
    truncation_tol: float = TRUNCATION_TOL,
    check_resolution: bool = True,
) -> WavefunctionGrid:
    """psi(x2) = integral dx1 K(x2, x1) psi(x1) by the trapezoid rule on psi's grid.

    Raises:
        GridTooNarrow: psi is not negligible at the grid edges, or the grid
            resolves fewer than eight points per local fringe of K.
    """
    amp = np.abs(psi.psi)
    peak = amp.max()
    if peak == 0:
        raise ValidationError("psi vanishes identically")
    if max(amp[0], amp[-1]) > truncation_tol * peak:
        raise GridTooNarrow(
            f"boundary amplitude {max(amp[0], amp[-1]) / peak:.2e} exceeds {truncation_tol:.0e}"
        )
    x = psi.x
    dx = psi.dx
    if check_resolution:
        k = _max_phase_gradient(K, float(np.max(np.abs(x))))
        if k * dx > 2.0 * math.pi / POINTS_PER_FRINGE:
            raise GridTooNarrow(
                f"dx = {dx:.3g} under-resolves kernel fringes (need dx < {2 * math.pi / POINTS_PER_FRINGE / k:.3g})"
            )
    w = trapezoid_weights(x.size, dx)
    # row i: K(x_i, x_j) for all j; exponent formed before exp to keep it finite
    kernel = np.exp(K.exponent(x[:, None], x[None, :]))
    return WavefunctionGrid(x, kernel @ (w * psi.psi))


def free_packet(
    x, t: float, p: PhysParams, sigma0: float = 1.0, x0: float = 0.0, k0: float = 0.0
) -> np.ndarray:
    """Closed-form free Gaussian packet; |psi(x, 0)|**2 has standard deviation sigma0."""
    x = np.asarray(x, dtype=float)
    alpha = 1.0 + 1j * p.hbar * t / (2.0 * p.m * sigma0**2)
    v = p.hbar * k0 / p.m
    xi = x - x0 - v * t
    return (
        (2.0 * math.pi * sigma0**2) ** -0.25
        / np.sqrt(alpha)
        * np.exp(-(xi**2) / (4.0 * sigma0**2 * alpha) + 1j * k0 * (x - x0) - 0.5j * k0 * v * t)
    )


def harmonic_ground_state(x, p: PhysParams, normalized: bool = True) -> np.ndarray:
    """exp(-m omega x**2 / 2 hbar), optionally with its L2 normalisation."""
    x = np.asarray(x, dtype=float)
    alpha = p.m * p.omega / p.hbar
    psi = np.exp(-0.5 * alpha * x * x)
    if normalized:
        psi = psi * (alpha / math.pi) ** 0.25
    return psi.astype(complex)
