"""Semiclassical propagators, Onsager linear response and the dictionary between them."""

from __future__ import annotations

from .errors import (
    BranchAmbiguity,
    Caustic,
    NumericalError,
    ReciprocityViolation,
    ValidationError,
    WickBridgeError,
)
from .gaussian_kernel import ComplexGaussianKernel, compose, kernel_free, kernel_harmonic, kernel_ou
from .params import OUParams, PhysParams
from .quantum import WavefunctionGrid, evolve_wavefunction, exact_propagator, semiclassical_propagator
from .thermo_linear import OnsagerSystem, production_report, relax
from .ou_process import conditional_density, extremal_path, sample_paths, sliced_path_density
from .dictionary import DictionaryMap, born, born_inverse, map_params, unmap_params, wick

__version__ = "0.1.0"

__all__ = [
    "BranchAmbiguity",
    "Caustic",
    "ComplexGaussianKernel",
    "DictionaryMap",
    "NumericalError",
    "OUParams",
    "OnsagerSystem",
    "PhysParams",
    "ReciprocityViolation",
    "ValidationError",
    "WavefunctionGrid",
    "WickBridgeError",
    "born",
    "born_inverse",
    "compose",
    "conditional_density",
    "evolve_wavefunction",
    "exact_propagator",
    "extremal_path",
    "kernel_free",
    "kernel_harmonic",
    "kernel_ou",
    "map_params",
    "production_report",
    "relax",
    "sample_paths",
    "semiclassical_propagator",
    "sliced_path_density",
    "unmap_params",
    "wick",
]
