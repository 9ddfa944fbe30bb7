"""Closed algebra of exponential-of-quadratic two-point kernels.

A kernel is

    K(x2, x1) = exp(a x2**2 + b x1**2 + c x2 x1 + d x2 + e x1 + logN)

with complex coefficients.  Free and harmonic propagators, Ornstein-Uhlenbeck
transition densities and Euler short-time kernels all have this form, and the
family is closed under the Chapman-Kolmogorov integral over the shared point,
which :func:`compose` evaluates in closed form.

Oscillatory (Fresnel) integrals are regularised with the i-epsilon rule: the
integral of exp(A x**2 + B x) is sqrt(pi / -A) exp(-B**2 / 4A) on the principal
branch, which is continuous on the closed right half plane Re(-A) >= 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .errors import (
    BranchAmbiguity,
    Caustic,
    DivergentComposition,
    NonpositiveInterval,
    ValidationError,
    ZeroInterval,
)
from .params import OUParams

CAUSTIC_TOL = 1e-12
COMPOSE_TOL = 1e-12

Convention = Literal["paper", "normalized"]
BranchHint = Literal["principal", "continued"]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ComplexGaussianKernel:
    """Immutable exponential-of-quadratic kernel.

    ``branch_hint`` controls how compositions of oscillatory kernels treat the
    square-root branch.  With ``"principal"`` a composition whose prefactor
    phase leaves the principal branch of the closed form (the kernel crossed a
    caustic) raises :class:`BranchAmbiguity`; with ``"continued"`` the phase is
    carried through by analytic continuation.
    """

    a: complex
    b: complex
    c: complex
    d: complex = 0j
    e: complex = 0j
    logN: complex = 0j
    branch_hint: BranchHint = "principal"
    det: complex | None = None

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d", "e", "logN"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        # a*b - c**2/4, carried explicitly: it is exactly 0 for transition kernels
        # and composing through it avoids cancelling O(1/dt) coefficients
        det = self.a * self.b - 0.25 * self.c * self.c if self.det is None else complex(self.det)
        object.__setattr__(self, "det", det)
        if self.branch_hint not in ("principal", "continued"):
            raise ValidationError(f"unknown branch_hint {self.branch_hint!r}")

    def exponent(self, x2, x1):
        """Quadratic form plus log-prefactor at (x2, x1); broadcasts."""
        x2 = np.asarray(x2)
        x1 = np.asarray(x1)
        linear = self.d * x2 + self.e * x1 + self.logN
        if abs(self.det) < 0.5 * abs(self.a * self.b):
            # nearly a perfect square (short-time kernels): expanding it would cancel
            # terms of size |a| x**2, so complete the square in x2 instead
            u = x2 + (0.5 * self.c / self.a) * x1
            return self.a * u * u + (self.det / self.a) * x1 * x1 + linear
        return self.a * x2 * x2 + self.b * x1 * x1 + self.c * x2 * x1 + linear

    def __call__(self, x2, x1):
        return evaluate(self, x2, x1)

    def coefficients(self) -> np.ndarray:
        """Quadratic and linear coefficients ``(a, b, c, d, e)``."""
        return np.array([self.a, self.b, self.c, self.d, self.e], dtype=complex)

    @property
    def prefactor(self) -> complex:
        return cmath.exp(self.logN)

    @property
    def is_oscillatory(self) -> bool:
        """True when the quadratic part is purely imaginary (a unitary propagator)."""
        quad = (self.a, self.b, self.c)
        scale = max(abs(q) for q in quad)
        return scale > 0 and all(abs(q.real) <= 1e-14 * scale for q in quad)

    def scaled(self, factor: complex) -> "ComplexGaussianKernel":
        """The same kernel multiplied by a constant."""
        return replace(self, logN=self.logN + cmath.log(factor))


def evaluate(K: ComplexGaussianKernel, x2, x1):
    """Value of ``K`` at (x2, x1).

    The exponent is formed before exponentiating, so a large prefactor and a
    large negative quadratic form cancel without overflow.
    """
    out = np.exp(K.exponent(x2, x1))
    return complex(out) if out.ndim == 0 else out


def coefficient_residual(K1: ComplexGaussianKernel, K2: ComplexGaussianKernel) -> float:
    """Largest coefficient difference relative to the largest coefficient.

    Compares ``(a, b, c, d, e)`` and the prefactor ``exp(logN)``.
    """
    c1 = np.append(K1.coefficients(), cmath.exp(K1.logN))
    c2 = np.append(K2.coefficients(), cmath.exp(K2.logN))
    scale = max(np.max(np.abs(c1)), np.max(np.abs(c2)), np.finfo(float).tiny)
    return float(np.max(np.abs(c1 - c2)) / scale)


def kernel_free(m: float, hbar: float, t1: float, t2: float) -> ComplexGaussianKernel:
    """Free-particle propagator K(x2, t2 | x1, t1).

    The prefactor is sqrt(m / (2 pi i hbar dt)) on the principal branch, so a
    backward interval (t2 < t1) yields the complex conjugate kernel.
    """
    dt = t2 - t1
    if dt == 0:
        raise ZeroInterval("free propagator at zero interval is a delta function")
    mu = m / (2.0 * hbar * dt)
    logN = 0.5 * cmath.log(m / (_TWO_PI * 1j * hbar * dt))
    return ComplexGaussianKernel(a=1j * mu, b=1j * mu, c=-2j * mu, logN=logN, det=0j)


def kernel_harmonic(
    m: float,
    hbar: float,
    omega: float,
    t1: float,
    t2: float,
    caustic_tol: float = CAUSTIC_TOL,
) -> ComplexGaussianKernel:
    """Harmonic-oscillator propagator, principal branch (caustics ignored)."""
    dt = t2 - t1
    if dt == 0:
        raise ZeroInterval("harmonic propagator at zero interval is a delta function")
    phase = omega * dt
    sn = math.sin(phase)
    if abs(sn) < caustic_tol:
        raise Caustic(f"sin(omega*dt) = {sn:.3e} at omega*dt = {phase!r}")
    cs = math.cos(phase)
    k = m * omega / (2.0 * hbar * sn)
    logN = 0.5 * cmath.log(m * omega / (_TWO_PI * 1j * hbar * sn))
    return ComplexGaussianKernel(
        a=1j * k * cs, b=1j * k * cs, c=-2j * k, logN=logN, det=complex((k * sn) ** 2)
    )


def ou_moments(params: OUParams, dtau: float) -> tuple[float, float]:
    """Conditional mean factor exp(-gamma dtau) and variance of the OU transition."""
    if not dtau > 0:
        raise NonpositiveInterval(f"dtau must be > 0, got {dtau!r}")
    g = params.gamma
    if math.isinf(dtau):
        return 0.0, params.kB / params.s
    x = g * dtau
    if x < 1e-6:
        # series of (1 - exp(-2x)) / (2x) to second order
        var = 2.0 * params.kB * dtau / params.R * (1.0 - x + (2.0 / 3.0) * x * x)
    else:
        var = -params.kB / params.s * math.expm1(-2.0 * x)
    return math.exp(-x), var


def gaussian_transition(
    mean_factor: float, variance: float, log_scale: float = 0.0
) -> ComplexGaussianKernel:
    """Kernel of N(y2; mean_factor * y1, variance), times exp(log_scale)."""
    inv = 1.0 / variance
    return ComplexGaussianKernel(
        a=-0.5 * inv,
        b=-0.5 * mean_factor * mean_factor * inv,
        c=mean_factor * inv,
        logN=-0.5 * math.log(_TWO_PI * variance) + log_scale,
        det=0j,
    )


def kernel_ou(
    params: OUParams, dtau: float, convention: Convention = "normalized"
) -> ComplexGaussianKernel:
    """OU transition density f1(y2, tau + dtau | y1, tau) as a kernel.

    ``normalized`` integrates to one over y2.  ``paper`` carries the literal
    prefactor (s / 2kB) exp(gamma dtau / 2) / sqrt(pi sinh(gamma dtau)), which
    is sqrt(s / kB) times the normalized one.
    """
    mean_factor, var = ou_moments(params, dtau)
    if convention == "normalized":
        scale = 0.0
    elif convention == "paper":
        scale = 0.5 * math.log(params.s / params.kB)
    else:
        raise ValidationError(f"unknown convention {convention!r}")
    return gaussian_transition(mean_factor, var, scale)


def _principal_phase(K: ComplexGaussianKernel) -> float:
    # phase of sqrt(c / 2pi), the prefactor an oscillatory kernel of this shape has
    # on the principal branch of its closed form
    return cmath.phase(cmath.sqrt(K.c / _TWO_PI))


def compose(
    later: ComplexGaussianKernel,
    earlier: ComplexGaussianKernel,
    tol: float = COMPOSE_TOL,
) -> ComplexGaussianKernel:
    """Chapman-Kolmogorov composition: integral over x2 of later(x3, x2) earlier(x2, x1).

    Raises:
        DivergentComposition: Re(b_later + a_earlier) > 0.
        Caustic: the intermediate quadratic coefficient vanishes (the composite
            interval sits on a caustic and the result is a delta function).
        BranchAmbiguity: both kernels are oscillatory with principal branch
            hints and the composite crossed a caustic, so its phase is not
            that of the principal closed form.
    """
    A = later.b + earlier.a
    scale = max(abs(later.b), abs(earlier.a), abs(later.c), abs(earlier.c))
    if abs(A) <= tol * scale:
        raise Caustic("intermediate quadratic coefficient vanishes")
    if A.real > tol * abs(A):
        raise DivergentComposition(f"Re(b_later + a_earlier) = {A.real:.3e} > 0")

    beta = later.e + earlier.d
    inv4A = 1.0 / (4.0 * A)
    cl, ce = later.c, earlier.c
    root = 0.5 * cmath.log(math.pi / -A)
    hint: BranchHint = (
        "continued"
        if "continued" in (later.branch_hint, earlier.branch_hint)
        else "principal"
    )
    # Schur complement in the form a' = (det_L + a_L a_E) / A, free of cancellation
    invA = 1.0 / A
    out = ComplexGaussianKernel(
        a=(later.det + later.a * earlier.a) * invA,
        b=(earlier.det + earlier.b * later.b) * invA,
        c=-cl * ce * 2.0 * inv4A,
        d=later.d - 2.0 * cl * beta * inv4A,
        e=earlier.e - 2.0 * ce * beta * inv4A,
        logN=later.logN + earlier.logN + root - beta * beta * inv4A,
        branch_hint=hint,
        det=(later.det * earlier.b + later.a * earlier.det) * invA,
    )

    if hint == "principal" and later.is_oscillatory and earlier.is_oscillatory:
        if out.c == 0:
            raise Caustic("composite kernel lost its cross term")
        offset_l = later.logN.imag - _principal_phase(later)
        offset_e = earlier.logN.imag - _principal_phase(earlier)
        got = (later.logN + earlier.logN + root).imag
        want = offset_l + offset_e + _principal_phase(out)
        jump = math.remainder(got - want, 2.0 * math.pi)
        if abs(jump) > 1e-6:
            raise BranchAmbiguity(
                f"composite phase leaves the principal branch by {jump:+.4f} rad; "
                "use branch_hint='continued' to track it"
            )
    return out


def compose_power(K: ComplexGaussianKernel, n: int) -> ComplexGaussianKernel:
    """``K`` composed with itself ``n`` times, by repeated squaring."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    result = None
    base = K
    while n:
        if n & 1:
            result = base if result is None else compose(result, base)
        n >>= 1
        if n:
            base = compose(base, base)
    return result
