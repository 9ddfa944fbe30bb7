"""Randomised verification scans for the dictionary identities.

Each scan returns a :class:`CheckReport`; its JSON form is the regression
artifact written by ``wickbridge check``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from . import dictionary as dic
from .gaussian_kernel import coefficient_residual, compose, kernel_free, kernel_harmonic, kernel_ou
from .ou_process import (
    conditional_density,
    minimized_action_density,
    minimized_action_exponent,
    sliced_kernel,
    sliced_path_density,
)
from .params import OUParams, PhysParams
from .quantum import free_packet, uniform_grid, WavefunctionGrid


@dataclass(frozen=True)
class CheckReport:
    identity: str
    points: int
    max_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.tolerance)

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "points": self.points,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True) + "\n"


def _bounded_away_from_caustics(omega: float, t: float, margin: float) -> bool:
    phase = omega * t
    return abs(phase - math.pi * round(phase / math.pi)) > margin


def scan_harmonic(n_points: int = 1000, seed: int = 0, tol: float = 1e-10, margin: float = 0.05) -> CheckReport:
    """Harmonic identity at random (m, hbar, omega, t, x1, x2) away from caustics."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    while done < n_points:
        m, hbar, omega = rng.uniform(0.5, 2.0, 3)
        t = rng.uniform(0.05, 6.0)
        if not _bounded_away_from_caustics(omega, t, margin):
            continue
        x1, x2 = rng.uniform(-2.0, 2.0, 2)
        worst = max(worst, dic.check_harmonic_identity(PhysParams(m, hbar, omega), 1.0, x1, x2, t))
        done += 1
    return CheckReport("harmonic", done, worst, tol)


def scan_free(n_points: int = 1000, seed: int = 0, tol: float = 1e-10) -> CheckReport:
    """Free identity in the small-rate branch at random (m, hbar, t, x1, x2)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        m, hbar = rng.uniform(0.5, 2.0, 2)
        t = rng.uniform(0.05, 5.0)
        x1, x2 = rng.uniform(-2.0, 2.0, 2)
        kB = rng.uniform(0.5, 2.0)
        worst = max(worst, dic.check_free_identity(PhysParams(m, hbar), kB, x1, x2, t))
    return CheckReport("free", n_points, worst, tol)


def free_rate_slope(gammas=None, q: PhysParams | None = None, x1=0.3, x2=1.0, t=1.0) -> tuple[float, np.ndarray]:
    """Log-log slope of the finite-rate free-identity residual against gamma."""
    gammas = np.logspace(-6, -2, 9) if gammas is None else np.asarray(gammas, dtype=float)
    q = q or PhysParams(1.0, 1.0)
    res = np.array([dic.check_free_identity(q, 1.0, x1, x2, t, gamma=g) for g in gammas])
    slope = np.polyfit(np.log(gammas), np.log(res), 1)[0]
    return float(slope), res


def scan_ground(tol: float = 1e-10) -> CheckReport:
    worst = 0.0
    cases = [(1.0, 1.0, 1.0, 1.0), (2.0, 0.5, 1.5, 1.0), (0.7, 1.3, 0.4, 2.0)]
    for m, hbar, omega, scale in cases:
        worst = max(worst, dic.check_ground_state(PhysParams(m, hbar, omega), 1.0, length_scale=scale))
    return CheckReport("ground", len(cases), worst, tol)


def chapman_quadrature_residual(p: OUParams, d1: float, d2: float, y1: float, y3: float) -> float:
    """|integral f1(y3|y2) f1(y2|y1) dy2 - f1(y3|y1)| by adaptive quadrature, relative."""

    def integrand(y2):
        return conditional_density(p, y3, d2, y2) * conditional_density(p, y2, d1, y1)

    val, _ = integrate.quad(integrand, -np.inf, np.inf, epsabs=0, epsrel=1e-13, limit=200)
    exact = conditional_density(p, y3, d1 + d2, y1)
    return abs(val - exact) / exact


def scan_chapman(n_points: int = 50, seed: int = 0, tol: float = 1e-8) -> CheckReport:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        p = OUParams.from_rate(rng.uniform(0.2, 3.0), s=rng.uniform(0.5, 2.0), kB=rng.uniform(0.5, 2.0))
        d1, d2 = rng.uniform(0.05, 2.0, 2)
        sd = math.sqrt(p.variance)
        y1, y3 = rng.uniform(-2.0, 2.0, 2) * sd
        worst = max(worst, chapman_quadrature_residual(p, d1, d2, y1, y3))
    return CheckReport("chapman", n_points, worst, tol)


def closure_residuals(n_points: int = 100, seed: int = 0) -> dict[str, float]:
    """Worst coefficient residual of exact kernel composition vs the closed form."""
    rng = np.random.default_rng(seed)
    out = {"free": 0.0, "ou": 0.0, "harmonic": 0.0}
    p = OUParams(1.0, 1.0, 1.0)
    for _ in range(n_points):
        d1, d2 = rng.uniform(0.01, 5.0, 2)
        out["free"] = max(
            out["free"],
            coefficient_residual(compose(kernel_free(1, 1, 0, d2), kernel_free(1, 1, 0, d1)), kernel_free(1, 1, 0, d1 + d2)),
        )
        out["ou"] = max(
            out["ou"],
            coefficient_residual(compose(kernel_ou(p, d2), kernel_ou(p, d1)), kernel_ou(p, d1 + d2)),
        )
        h1, h2 = rng.uniform(0.05, 1.5, 2)
        out["harmonic"] = max(
            out["harmonic"],
            coefficient_residual(
                compose(kernel_harmonic(1, 1, 1, 0, h2), kernel_harmonic(1, 1, 1, 0, h1)),
                kernel_harmonic(1, 1, 1, 0, h1 + h2),
            ),
        )
    return out


def variational_spread(p: OUParams, dtau: float, y_values=None) -> float:
    """Spread of log(minimised-action density) - log(transition density) over an endpoint grid."""
    y_values = np.linspace(-2.0, 2.0, 20) if y_values is None else np.asarray(y_values)
    sd = math.sqrt(p.variance)
    ys = y_values * sd
    diffs = []
    for y1 in ys:
        log_min = np.log(minimized_action_density(p, float(y1), 0.0, ys, dtau))
        log_exact = np.log(conditional_density(p, ys, dtau, float(y1)))
        diffs.append(log_min - log_exact)
    diffs = np.concatenate(diffs)
    return float(diffs.max() - diffs.min())


def scan_variational(tol: float = 1e-10, rates=(0.05, 0.3, 1.0, 2.0, 5.0)) -> CheckReport:
    p = OUParams(1.0, 1.0, 1.0)
    worst = max(variational_spread(p, r / p.gamma) for r in rates)
    return CheckReport("variational", 400 * len(rates), worst, tol)


def numeric_action_gap(p: OUParams, y1: float, y2: float, dtau: float, n: int = 2000) -> float:
    """|numeric - closed-form| minimised-action exponent."""
    closed = -p.s / (2.0 * p.kB) * (y2 - math.exp(-p.gamma * dtau) * y1) ** 2 / -math.expm1(-2.0 * p.gamma * dtau)
    numeric = minimized_action_exponent(p, y1, 0.0, y2, dtau, method="numeric", n=n)
    return abs(numeric - closed)


def slicing_tier(n: int, rate: float) -> float:
    """L1 tolerance for Euler slicing: the error is about 0.35 * rate / n for rate <= 1."""
    return 0.5 * rate / n


def euler_slicing_l1(p: OUParams, y1: float, dtau: float, n: int) -> float:
    sd = math.sqrt(p.variance)
    y = np.linspace(-8.0 * sd, 8.0 * sd, 4001)
    exact = conditional_density(p, y, dtau, y1)
    sliced = sliced_path_density(p, y1, 0.0, y, dtau, n)
    return float(np.trapezoid(np.abs(sliced - exact), y))


def scan_slicing(n: int = 1024, p: OUParams | None = None, dtau: float = 1.0, y1: float = 1.0) -> CheckReport:
    """Euler slicing at ``n`` against its tier; exact slicing must also close to 1e-12."""
    p = p or OUParams(1.0, 1.0, 1.0)
    err = euler_slicing_l1(p, y1, dtau, n)
    tol = slicing_tier(n, p.gamma * dtau)
    exact_gap = coefficient_residual(sliced_kernel(p, dtau, n, "exact"), kernel_ou(p, dtau))
    if exact_gap >= 1e-12:
        err = max(err, math.inf)
    return CheckReport("slicing", n, err, tol)


def free_packet_series(x, times, q: PhysParams, sigma0: float = 1.0):
    return [dic.born(WavefunctionGrid(x, free_packet(x, t, q, sigma0))) for t in times]


def packet_velocity_gradient(x, t: float, q: PhysParams, sigma0: float = 1.0) -> np.ndarray:
    """Exact d(phi)/dx of the free packet, m x (d sigma_t^2/dt) / (2 sigma_t^2)."""
    c = q.hbar / (2.0 * q.m * sigma0**2)
    s2 = 1.0 + (c * t) ** 2
    return q.m * np.asarray(x) * c * c * t / s2


def phase_gradient_error(n_grid: int = 2048, t: float = 1.0, dt: float = 1e-3, peak_fraction: float = 1e-6) -> float:
    """Madelung phase-gradient recovery error for the free packet, where rho > fraction * peak."""
    q = PhysParams(1.0, 1.0)
    x = uniform_grid(n_grid)
    series = free_packet_series(x, (t - dt, t, t + dt), q)
    rho = series[1].rho
    rho_dot = (series[2].rho - series[0].rho) / (2.0 * dt)
    grad = dic.madelung_phase_gradient(x, rho, rho_dot, q.m)
    mask = rho > peak_fraction * rho.max()
    return float(np.max(np.abs(grad - packet_velocity_gradient(x, t, q))[mask]))


def continuity_errors(sizes=(256, 512, 1024, 2048), t: float = 1.0, extent: float = 6.0) -> np.ndarray:
    """Max continuity residual of the exact free packet for each grid size."""
    q = PhysParams(1.0, 1.0)
    c = q.hbar / (2.0 * q.m)
    out = []
    for n in sizes:
        x = np.linspace(-extent, extent, n)
        s2 = 1.0 + (c * t) ** 2
        rho = np.exp(-x * x / (2.0 * s2)) / np.sqrt(2.0 * math.pi * s2)
        ds2 = 2.0 * c * c * t
        rho_dot = rho * ds2 * (x * x / (2.0 * s2 * s2) - 0.5 / s2)
        phi = 0.5 * q.m * x * x * ds2 / (2.0 * s2)
        res = dic.continuity_residual(x, rho, rho_dot, phi, q.m)
        out.append(np.max(np.abs(res[2:-2])))
    return np.array(out)


def scan_continuity(tol: float = 1e-4) -> CheckReport:
    return CheckReport("continuity", 2048, phase_gradient_error(), tol)


CHECKS: dict[str, Callable[..., CheckReport]] = {
    "free": scan_free,
    "harmonic": scan_harmonic,
    "ground": scan_ground,
    "chapman": scan_chapman,
    "variational": scan_variational,
    "slicing": scan_slicing,
    "continuity": scan_continuity,
}
