"""A single fluctuating variable: transition densities, extremal paths, sampling.

The most likely path between two observations, the action it costs, and a
Langevin ensemble all point to the same Gaussian transition law.
"""

from __future__ import annotations

import math

import numpy as np

from wickbridge.ou_process import (
    conditional_density,
    extremal_path,
    minimized_action_density,
    minimized_action_exponent,
    sample_paths,
)
from wickbridge.params import OUParams

p = OUParams(R=1.0, s=1.0, kB=1.0)
dtau = math.log(2.0)

# %% Transition density: start at 1, after ln 2 the mean is 1/2 and the variance 3/4.
print(f"f1(0.5 | 1, ln 2) = {conditional_density(p, 0.5, dtau, 1.0):.10f}")
print(f"1/sqrt(2 pi 0.75) = {1 / math.sqrt(2 * math.pi * 0.75):.10f}")

# %% The extremal path and its action reproduce the exponent exactly.
print(f"minimised-action exponent to y2 = 1: {minimized_action_exponent(p, 1.0, 0.0, 1.0, dtau):.12f} (expect -1/6)")
path = extremal_path(p, 0.0, 1.0, dtau, 1.0, n=6)
print("extremal path:", np.round(path.y, 5))

ys = np.linspace(-2, 2, 5)
ratio = minimized_action_density(p, 1.0, 0.0, ys, dtau) / conditional_density(p, ys, dtau, 1.0)
print("density ratio (should be 1):", np.round(ratio, 14))

# %% Sample 20000 Langevin paths and compare moments with the closed form.
ens = sample_paths(p, 1.0, dtau, 1e-3, 20_000, seed=1)
print(f"sampled mean {ens.mean[-1]:.4f} (0.5), variance {ens.var[-1]:.4f} (0.75)")
print(ens.stats_csv(precision=5).splitlines()[-1])
