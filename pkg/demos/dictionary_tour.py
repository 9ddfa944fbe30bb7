"""From thermodynamics to mechanics by rotating time.

Maps oscillator parameters to a fluctuation model, checks the propagator
identities at imaginary time, and runs the Born map both ways.
"""

from __future__ import annotations

import numpy as np

from wickbridge import checks
from wickbridge.dictionary import (
    assemble_wavefunction,
    born,
    born_inverse,
    check_free_identity,
    check_ground_state,
    check_harmonic_identity,
    map_params,
    wick,
)
from wickbridge.params import PhysParams
from wickbridge.quantum import harmonic_ground_state, uniform_grid

q = PhysParams(m=1.0, hbar=1.0, omega=1.0)
p = map_params(q, kB=1.0)
print(f"oscillator m=hbar=omega=1 -> gamma={p.gamma}, s={p.s}, R={p.R}")
print(f"wick(0.7) = {wick(0.7)}")

# %% Identities at tau = i t.
print(f"harmonic identity residual: {check_harmonic_identity(q, 1.0, 0.3, -0.5, 0.7):.2e}")
print(f"free identity residual (small-rate form): {check_free_identity(PhysParams(1, 1), 1.0, 0.0, 1.0, 1.0):.2e}")
slope, _ = checks.free_rate_slope()
print(f"free identity at finite rate: error slope {slope:.3f} in gamma")
print(f"ground state vs stationary density: {check_ground_state(q):.2e}")

# %% Entropy plus phase assemble a wavefunction; with zero phase it is the ground state.
x = uniform_grid()
psi = assemble_wavefunction(x, -0.5 * p.s * x * x, np.zeros_like(x), p.kB, q.hbar)
print(f"assembled vs ground state: {np.max(np.abs(psi.psi - harmonic_ground_state(x, q))):.2e}")

# %% Born map forgets the phase; the continuity equation recovers it from rho(t).
times = (0.999, 1.0, 1.001)
series = checks.free_packet_series(x, times, PhysParams(1, 1))
rebuilt = born_inverse(series, times, 1.0, 1.0)
print(f"born(born_inverse(rho)) - rho: {np.max(np.abs(born(rebuilt).rho - series[1].rho)):.2e}")
print(f"recovered phase-gradient error: {checks.phase_gradient_error():.2e}")
