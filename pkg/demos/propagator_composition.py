"""Quantum propagators as exponential-of-quadratic kernels.

Builds free and harmonic propagators, composes them in closed form, and
evolves a wavepacket on a grid to see the same semigroup law numerically.
"""

from __future__ import annotations

import math

import numpy as np

from wickbridge.errors import BranchAmbiguity, Caustic
from wickbridge.gaussian_kernel import coefficient_residual, compose, kernel_free, kernel_harmonic
from wickbridge.params import PhysParams
from wickbridge.quantum import WavefunctionGrid, evolve_wavefunction, free_packet, uniform_grid

q = PhysParams(m=1.0, hbar=1.0)

# %% The free kernel at the origin is pure prefactor: modulus 1/sqrt(2 pi), phase -pi/4.
K = kernel_free(q.m, q.hbar, 0.0, 1.0)
v = K(0.0, 0.0)
print(f"free K(0,0; t=1) = {v:.6f}  |K| = {abs(v):.6f}  arg = {np.angle(v):.6f}")

# %% Composing 0.3 then 0.7 gives the 1.0 kernel, coefficient by coefficient.
K13 = compose(kernel_free(1, 1, 0.3, 1.0), kernel_free(1, 1, 0.0, 0.3))
print(f"free 0.3 + 0.7 vs 1.0: residual {coefficient_residual(K13, K):.2e}")

# %% Harmonic kernels compose until the sum reaches a caustic (omega t = pi).
h1 = kernel_harmonic(1, 1, 1, 0, 1.0)
h2 = kernel_harmonic(1, 1, 1, 0, 1.5)
print(f"harmonic 1.0 + 1.5 vs 2.5: residual {coefficient_residual(compose(h2, h1), kernel_harmonic(1, 1, 1, 0, 2.5)):.2e}")
try:
    compose(kernel_harmonic(1, 1, 1, 0, 0.6 * math.pi), kernel_harmonic(1, 1, 1, 0, 0.6 * math.pi))
except (BranchAmbiguity, Caustic) as exc:
    print(f"crossing the caustic: {type(exc).__name__}")

# %% On a grid: evolve a unit-width packet for one time unit and compare with the closed form.
x = uniform_grid()
psi0 = WavefunctionGrid(x, free_packet(x, 0.0, q))
psi1 = evolve_wavefunction(psi0, K)
err = np.max(np.abs(psi1.psi - free_packet(x, 1.0, q)))
print(f"grid evolution vs exact packet: max error {err:.2e}, norm {psi1.norm2():.12f}")

rho = np.abs(psi1.psi) ** 2
width2 = np.trapezoid(x * x * rho, x)
print(f"packet variance after t=1: {width2:.6f} (spreading law gives {1 + 0.25:.6f})")
