"""Gaussian Markov path theory of a single fluctuating variable.

The variable obeys ``R dy/dtau + s y = xi`` with white noise of intensity
``<xi(tau) xi(tau')> = 2 kB R delta(tau - tau')``, the unique choice whose
stationary variance is the Boltzmann value ``kB / s``.  Everything here is
phrased through the relaxation rate ``gamma = s / R``.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .errors import (
    DegenerateInterval,
    NonpositiveInterval,
    UnorderedGates,
    UnstableStep,
    ValidationError,
)
from .gaussian_kernel import (
    ComplexGaussianKernel,
    Convention,
    compose,
    compose_power,
    gaussian_transition,
    kernel_ou,
    ou_moments,
)
from .params import OUParams

__all__ = [
    "OUParams",
    "GateSequence",
    "PathGrid",
    "TrajectoryEnsemble",
    "conditional_density",
    "one_gate_density",
    "om_lagrangian",
    "om_action",
    "extremal_path",
    "minimized_action",
    "minimized_action_exponent",
    "minimized_action_density",
    "euler_kernel",
    "sliced_kernel",
    "sliced_path_density",
    "multi_gate_density",
    "sample_paths",
]

STABILITY_LIMIT = 0.1
BLOCK_PATHS = 1024
THREADS_ENV = "WICKBRIDGE_THREADS"


def conditional_density(
    p: OUParams, y2, dtau: float, y1, convention: Convention = "normalized"
):
    """Transition density f1(y2, tau + dtau | y1, tau).

    Gaussian in y2 with mean exp(-gamma dtau) y1 and variance
    (kB / s)(1 - exp(-2 gamma dtau)).  For gamma dtau < 1e-6 the variance comes
    from its series, 2 kB dtau / R to leading order.
    """
    K = kernel_ou(p, dtau, convention)
    return np.real(K(y2, y1))


def one_gate_density(p: OUParams, y):
    """Stationary density sqrt(s / 2 pi kB) exp(-s y**2 / 2 kB)."""
    y = np.asarray(y, dtype=float)
    out = np.sqrt(p.s / (2.0 * math.pi * p.kB)) * np.exp(-0.5 * p.s * y * y / p.kB)
    return float(out) if out.ndim == 0 else out


def om_lagrangian(p: OUParams, y, ydot, form: Literal["full", "reduced"] = "full"):
    """Onsager-Machlup Lagrangian, entropy per unit time.

    ``full`` is (R/2)(ydot + gamma y)**2; ``reduced`` drops the cross term,
    (R/2)(ydot**2 + gamma**2 y**2).  They differ by the total derivative
    R gamma d(y**2 / 2)/dtau.
    """
    y = np.asarray(y, dtype=float)
    ydot = np.asarray(ydot, dtype=float)
    g = p.gamma
    if form == "full":
        out = 0.5 * p.R * (ydot + g * y) ** 2
    elif form == "reduced":
        out = 0.5 * p.R * (ydot * ydot + g * g * y * y)
    else:
        raise ValidationError(f"unknown form {form!r}")
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class PathGrid:
    """A path y(tau) sampled on a uniform grid."""

    tau: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        tau = np.asarray(self.tau, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if tau.ndim != 1 or tau.shape != y.shape or tau.size < 2:
            raise ValidationError("tau and y must be 1-D arrays of equal length >= 2")
        if not (np.all(np.isfinite(tau)) and np.all(np.isfinite(y))):
            raise ValidationError("path has non-finite values")
        steps = np.diff(tau)
        if np.any(steps <= 0) or np.max(np.abs(steps - steps[0])) > 1e-9 * steps[0]:
            raise ValidationError("tau grid must be uniform and increasing")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "y", y)

    @property
    def dtau(self) -> float:
        return float(self.tau[1] - self.tau[0])

    def velocity(self) -> np.ndarray:
        """Second-order finite-difference dy/dtau."""
        return np.gradient(self.y, self.dtau, edge_order=2)


def om_action(p: OUParams, path: PathGrid, form: Literal["full", "reduced"] = "full") -> float:
    """Trapezoid integral of the Onsager-Machlup Lagrangian along ``path``."""
    lag = om_lagrangian(p, path.y, path.velocity(), form)
    return float(np.trapezoid(lag, dx=path.dtau))


def _check_interval(tau1: float, tau2: float) -> float:
    T = tau2 - tau1
    if not (math.isfinite(T) and T > 0):
        raise DegenerateInterval(f"need tau2 > tau1, got tau1={tau1!r}, tau2={tau2!r}")
    return T


def _analytic_extremal(g: float, tau, tau1, y1, tau2, y2):
    # y = A e^{g tau} + B e^{-g tau}, written with decaying exponentials only
    T = tau2 - tau1
    left = tau - tau1
    right = tau2 - tau
    if g * T < 1e-8:
        w = left / T
        return (1.0 - w) * y1 + w * y2
    denom = -math.expm1(-2.0 * g * T)
    return (
        y1 * np.exp(-g * left) * (-np.expm1(-2.0 * g * right))
        + y2 * np.exp(-g * right) * (-np.expm1(-2.0 * g * left))
    ) / denom


def _analytic_extremal_slope(g: float, tau, tau1, y1, tau2, y2):
    T = tau2 - tau1
    left = tau - tau1
    right = tau2 - tau
    if g * T < 1e-8:
        return np.full_like(np.asarray(tau, dtype=float), (y2 - y1) / T)
    denom = -math.expm1(-2.0 * g * T)
    return g * (
        -y1 * np.exp(-g * left) * (1.0 + np.exp(-2.0 * g * right))
        + y2 * np.exp(-g * right) * (1.0 + np.exp(-2.0 * g * left))
    ) / denom


def _numeric_extremal(g: float, tau: np.ndarray, y1, y2, semi_infinite: bool) -> np.ndarray:
    # central differences for y'' = g^2 y; row k: y[k-1] - (2 + g^2 h^2) y[k] + y[k+1] = 0
    n = tau.size
    h = tau[1] - tau[0]
    diag = -(2.0 + (g * h) ** 2)
    ab = np.zeros((3, n))
    ab[0, 1:] = 1.0
    ab[1, :] = diag
    ab[2, :-1] = 1.0
    rhs = np.zeros(n)
    # Dirichlet rows
    ab[1, -1] = 1.0
    ab[2, -2] = 0.0
    rhs[-1] = y2
    if semi_infinite:
        # decaying branch y' = g y at the left edge, ghost point y[-1] = y[1] - 2 h g y[0]
        ab[1, 0] = diag - 2.0 * h * g
        ab[0, 1] = 2.0
    else:
        ab[1, 0] = 1.0
        ab[0, 1] = 0.0
        rhs[0] = y1
    return solve_banded((1, 1), ab, rhs)


def extremal_path(
    p: OUParams,
    tau1: float,
    y1: float,
    tau2: float,
    y2: float,
    n: int = 1001,
    method: Literal["analytic", "numeric"] = "analytic",
    semi_infinite: bool = False,
) -> PathGrid:
    """Minimiser of the Onsager-Machlup action with pinned endpoints.

    Solves y'' = gamma**2 y on ``n`` uniform points between tau1 and tau2.
    With ``semi_infinite=True`` the left condition is y(-inf) = 0 instead of
    y(tau1) = y1 (``y1`` is ignored and ``tau1`` only sets where the grid
    starts); the solution is then y2 exp(gamma (tau - tau2)).
    """
    _check_interval(tau1, tau2)
    if n < 2:
        raise ValidationError(f"n must be >= 2, got {n}")
    tau = np.linspace(tau1, tau2, n)
    g = p.gamma
    if method == "analytic":
        if semi_infinite:
            y = y2 * np.exp(g * (tau - tau2))
        else:
            y = _analytic_extremal(g, tau, tau1, y1, tau2, y2)
    elif method == "numeric":
        y = _numeric_extremal(g, tau, y1, y2, semi_infinite)
    else:
        raise ValidationError(f"unknown method {method!r}")
    return PathGrid(tau, y)


def minimized_action(
    p: OUParams,
    y1: float,
    tau1: float,
    y2: float,
    tau2: float,
    method: Literal["analytic", "numeric"] = "analytic",
    n: int = 2001,
) -> float:
    """Onsager-Machlup action (full Lagrangian) along the extremal path.

    ``analytic`` integrates by parts along the exact extremal, which leaves
    only boundary terms (R/2)[y ydot + gamma y**2] between the endpoints.
    ``numeric`` solves the discretised Euler-Lagrange equation on ``n`` points
    and integrates the Lagrangian with the trapezoid rule.
    """
    _check_interval(tau1, tau2)
    g = p.gamma
    if method == "analytic":
        ends = np.array([tau1, tau2])
        yd = _analytic_extremal_slope(g, ends, tau1, y1, tau2, y2)
        return 0.5 * p.R * (y2 * yd[1] - y1 * yd[0] + g * (y2 * y2 - y1 * y1))
    path = extremal_path(p, tau1, y1, tau2, y2, n=n, method=method)
    return om_action(p, path, "full")


def minimized_action_exponent(
    p: OUParams, y1: float, tau1: float, y2: float, tau2: float, **kw
) -> float:
    """-A_min / (2 kB): the exponent of the minimised-action density."""
    return -minimized_action(p, y1, tau1, y2, tau2, **kw) / (2.0 * p.kB)


def minimized_action_density(
    p: OUParams,
    y1: float,
    tau1: float,
    y2,
    tau2: float,
    method: Literal["analytic", "numeric"] = "analytic",
    n: int = 2001,
):
    """Z**-1 exp(-A_min / 2 kB), normalised over y2.

    The exponent is an exact quadratic in y2, so Z follows from three action
    evaluations and a Gaussian integral.
    """
    q = [minimized_action_exponent(p, y1, tau1, v, tau2, method=method, n=n) for v in (-1.0, 0.0, 1.0)]
    c0 = q[1]
    c1 = 0.5 * (q[2] - q[0])
    c2 = 0.5 * (q[2] + q[0]) - q[1]
    if not c2 < 0:
        raise ValidationError("minimised action is not confining in y2")
    # log of integral exp(c2 v^2 + c1 v + c0) dv
    logZ = 0.5 * math.log(math.pi / -c2) + c0 - c1 * c1 / (4.0 * c2)
    y2 = np.asarray(y2, dtype=float)
    if y2.ndim == 0:
        expo = minimized_action_exponent(p, y1, tau1, float(y2), tau2, method=method, n=n)
        return math.exp(expo - logZ)
    return np.exp(c2 * y2 * y2 + c1 * y2 + c0 - logZ)


def euler_kernel(p: OUParams, h: float) -> ComplexGaussianKernel:
    """Short-time Euler (Ito, left-point) transition: N(y (1 - gamma h), 2 kB h / R)."""
    if not h > 0:
        raise NonpositiveInterval(f"slice width must be > 0, got {h!r}")
    return gaussian_transition(1.0 - p.gamma * h, 2.0 * p.kB * h / p.R)


def sliced_kernel(
    p: OUParams,
    dtau: float,
    n_slices: int,
    kernel: Literal["euler", "exact"] = "euler",
) -> ComplexGaussianKernel:
    """Composition of ``n_slices`` short-time kernels spanning ``dtau``."""
    if not (math.isfinite(dtau) and dtau > 0):
        raise DegenerateInterval(f"dtau must be > 0, got {dtau!r}")
    if n_slices < 1:
        raise ValidationError(f"n_slices must be >= 1, got {n_slices}")
    h = dtau / n_slices
    if kernel == "euler":
        step = euler_kernel(p, h)
    elif kernel == "exact":
        step = kernel_ou(p, h)
    else:
        raise ValidationError(f"unknown kernel {kernel!r}")
    return compose_power(step, n_slices)


def sliced_path_density(
    p: OUParams,
    y1: float,
    tau1: float,
    y2,
    tau2: float,
    n_slices: int,
    kernel: Literal["euler", "exact"] = "euler",
):
    """Time-sliced path integral for f1(y2, tau2 | y1, tau1).

    With Euler slices the error is O(1/n); with exact OU slices every
    ``n_slices`` reproduces the closed form.
    """
    K = sliced_kernel(p, tau2 - tau1, n_slices, kernel)
    return np.real(K(y2, y1))


@dataclass(frozen=True)
class GateSequence:
    """Strictly time-ordered gates (tau_k, y_k)."""

    taus: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self) -> None:
        taus = tuple(float(t) for t in self.taus)
        ys = tuple(float(v) for v in self.ys)
        if len(taus) != len(ys) or not taus:
            raise ValidationError("need at least one gate and equal-length taus/ys")
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise UnorderedGates("gate times must be strictly increasing")
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "GateSequence":
        pairs = list(pairs)
        return cls(tuple(t for t, _ in pairs), tuple(v for _, v in pairs))

    def shifted(self, delta: float) -> "GateSequence":
        return GateSequence(tuple(t + delta for t in self.taus), self.ys)

    def __len__(self) -> int:
        return len(self.taus)


def multi_gate_density(p: OUParams, gates: GateSequence | Sequence[tuple[float, float]]) -> float:
    """Joint density of passing all gates: f1(y1) * prod f1(y_{k+1} | y_k)."""
    if not isinstance(gates, GateSequence):
        gates = GateSequence.from_pairs(gates)
    out = one_gate_density(p, gates.ys[0])
    for k in range(1, len(gates)):
        out *= conditional_density(p, gates.ys[k], gates.taus[k] - gates.taus[k - 1], gates.ys[k - 1])
    return float(out)


# --- Langevin sampling ---------------------------------------------------------


def thread_count(workers: int | None = None) -> int:
    """Worker count from the argument or WICKBRIDGE_THREADS (0 = auto)."""
    if workers is None:
        try:
            workers = int(os.environ.get(THREADS_ENV, "1"))
        except ValueError:
            workers = 1
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


@dataclass(frozen=True, eq=False)
class TrajectoryEnsemble:
    """Per-time statistics of a sampled ensemble.

    ``values[k]`` holds every path at ``tau[k]``; ``paths`` is the same array
    when full paths were requested, else None.
    """

    seed: int
    n_paths: int
    tau: np.ndarray
    values: np.ndarray
    keep_paths: bool = False

    @property
    def paths(self) -> np.ndarray | None:
        return self.values.T if self.keep_paths else None

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]

    @property
    def mean(self) -> np.ndarray:
        return self.values.mean(axis=1)

    @property
    def var(self) -> np.ndarray:
        return self.values.var(axis=1, ddof=1) if self.n_paths > 1 else np.zeros(self.tau.size)

    def quantiles(self, q: Sequence[float] = (0.05, 0.5, 0.95)) -> np.ndarray:
        return np.quantile(self.values, q, axis=1)

    def stats_table(self) -> np.ndarray:
        """Columns tau, mean, var, p05, p50, p95."""
        q = self.quantiles()
        return np.column_stack([self.tau, self.mean, self.var, q[0], q[1], q[2]])

    def histogram(self, bins: int = 40, range: tuple[float, float] | None = None, index: int = -1):
        """(edges, counts, density) of the ensemble at record ``index``."""
        counts, edges = np.histogram(self.values[index], bins=bins, range=range)
        width = np.diff(edges)
        density = counts / (counts.sum() * width)
        return edges, counts, density

    def stats_csv(self, precision: int = 12) -> str:
        return _csv(["tau", "mean", "var", "p05", "p50", "p95"], self.stats_table(), precision)

    def histogram_csv(self, bins: int = 40, range=None, precision: int = 12) -> str:
        edges, counts, density = self.histogram(bins, range)
        table = np.column_stack([edges[:-1], edges[1:], counts, density])
        return _csv(["bin_lo", "bin_hi", "count", "density"], table, precision, int_cols={2})


def _csv(header: Sequence[str], table: np.ndarray, precision: int, int_cols=frozenset()) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in table:
        buf.write(
            ",".join(
                str(int(v)) if j in int_cols else f"{v:.{precision}g}" for j, v in enumerate(row)
            )
            + "\n"
        )
    return buf.getvalue()


def _block_rng(seed: int, block: int) -> np.random.Generator:
    # Philox is counter based; one key per block of BLOCK_PATHS paths
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def sample_paths(
    p: OUParams,
    y0: float,
    tau_max: float,
    dt: float,
    n_paths: int,
    seed: int,
    *,
    noise: bool = True,
    scheme: Literal["euler", "exact"] = "euler",
    record_every: int | None = None,
    keep_paths: bool = False,
    workers: int | None = None,
) -> TrajectoryEnsemble:
    """Sample ``n_paths`` Langevin trajectories from y(0) = y0.

    The Euler-Maruyama update is y <- y (1 - gamma dt) + sqrt(2 kB dt / R) z;
    ``scheme="exact"`` uses the exact OU transition instead.  ``noise=False``
    drops the random force (the kB -> 0 limit).  The normal draw for path j at
    step k depends only on (seed, j, k), so results are bit-identical for any
    ``workers``.  The step count is round(tau_max / dt) and the step is
    adjusted to land on tau_max exactly.
    """
    if not (dt > 0 and tau_max > 0):
        raise ValidationError("dt and tau_max must be > 0")
    if n_paths < 1:
        raise ValidationError("n_paths must be >= 1")
    if dt * p.gamma >= STABILITY_LIMIT:
        raise UnstableStep(f"gamma*dt = {dt * p.gamma:.3g} >= {STABILITY_LIMIT}")
    n_steps = max(1, round(tau_max / dt))
    h = tau_max / n_steps
    if scheme == "euler":
        decay = 1.0 - p.gamma * h
        sigma = math.sqrt(2.0 * p.kB * h / p.R)
    elif scheme == "exact":
        decay, var = ou_moments(p, h)
        sigma = math.sqrt(var)
    else:
        raise ValidationError(f"unknown scheme {scheme!r}")
    if not noise:
        sigma = 0.0
    if keep_paths:
        record_every = 1
    elif record_every is None:
        record_every = max(1, n_steps // 100)
    rec_steps = list(range(0, n_steps + 1, record_every))
    if rec_steps[-1] != n_steps:
        rec_steps.append(n_steps)
    rec_index = {k: i for i, k in enumerate(rec_steps)}
    values = np.empty((len(rec_steps), n_paths))

    def run_block(block: int) -> None:
        lo = block * BLOCK_PATHS
        hi = min(lo + BLOCK_PATHS, n_paths)
        y = np.full(BLOCK_PATHS, float(y0))
        rng = _block_rng(seed, block) if sigma > 0 else None
        values[0, lo:hi] = y[: hi - lo]
        for k in range(1, n_steps + 1):
            if rng is None:
                y = decay * y
            else:
                y = decay * y + sigma * rng.standard_normal(BLOCK_PATHS)
            i = rec_index.get(k)
            if i is not None:
                values[i, lo:hi] = y[: hi - lo]

    n_blocks = -(-n_paths // BLOCK_PATHS)
    nw = min(thread_count(workers), n_blocks)
    if nw <= 1:
        for b in range(n_blocks):
            run_block(b)
    else:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            list(pool.map(run_block, range(n_blocks)))
    return TrajectoryEnsemble(
        seed=seed,
        n_paths=n_paths,
        tau=np.array(rec_steps, dtype=float) * h,
        values=values,
        keep_paths=keep_paths,
    )
