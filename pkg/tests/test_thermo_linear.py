from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, linalg

from wickbridge.errors import NotPositiveDefinite, ReciprocityViolation, ValidationError
from wickbridge.thermo_linear import (
    OnsagerSystem,
    entropy,
    fluxes,
    forces,
    forces_from_fluxes,
    production_report,
    relax,
    relaxation_rates,
    stationary_covariance,
    stationary_density,
)


def random_spd(rng, n, cond=20.0):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    w = np.exp(rng.uniform(0.0, math.log(cond), n))
    return (Q * w) @ Q.T


def random_system(seed, n=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(1, 6))
    L = random_spd(rng, n)
    s = random_spd(rng, n)
    return OnsagerSystem(L=0.5 * (L + L.T), s=0.5 * (s + s.T), kB=float(rng.uniform(0.5, 2.0))), rng


seeds = st.integers(0, 2**32 - 1)


class TestConstruction:
    def test_nonsymmetric_rejected(self):
        with pytest.raises(ReciprocityViolation):
            OnsagerSystem(L=[[1.0, 0.2], [0.1, 1.0]], s=np.eye(2))

    def test_indefinite_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            OnsagerSystem(L=[[1.0, 0.0], [0.0, -1.0]], s=np.eye(2))

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            OnsagerSystem(L=np.eye(2), s=np.eye(3))

    def test_resistance_is_inverse(self):
        sys, _ = random_system(3, 4)
        assert np.max(np.abs(sys.R @ sys.L - np.eye(4))) < 1e-10

    def test_json_round_trip(self, tmp_path):
        sys, _ = random_system(7, 3)
        path = tmp_path / "sys.json"
        sys.dump(path)
        back = OnsagerSystem.load(path)
        assert np.array_equal(back.L, sys.L) and np.array_equal(back.s, sys.s) and back.kB == sys.kB


class TestEntropyAndForces:
    def test_examples(self):
        sys = OnsagerSystem(L=np.eye(2), s=np.diag([2.0, 3.0]), S0=1.25)
        assert entropy(sys, [0, 0]) == 1.25
        assert entropy(OnsagerSystem(L=np.eye(2), s=np.diag([2.0, 3.0])), [1, 1]) == -2.5
        assert np.array_equal(forces(sys, [1, 1]), [-2.0, -3.0])
        assert np.array_equal(forces(sys, [0, 0]), [0.0, 0.0])

    @given(seeds)
    def test_entropy_below_equilibrium(self, seed):
        sys, rng = random_system(seed)
        y = rng.standard_normal(sys.N)
        assert entropy(sys, y) < sys.S0

    @given(seeds)
    def test_forces_are_entropy_gradient(self, seed):
        sys, rng = random_system(seed)
        y = rng.standard_normal(sys.N)
        h = 1e-5
        fd = np.array([(entropy(sys, y + h * e) - entropy(sys, y - h * e)) / (2 * h) for e in np.eye(sys.N)])
        assert np.max(np.abs(fd - forces(sys, y))) < 1e-8 * max(1.0, np.max(np.abs(fd)))

    def test_curved_path_difference_is_second_order(self):
        # S is quadratic, so straight-line central differences are exact; along the
        # curve y + h v + h**3 1 the truncation error is h**2 |Y . 1|
        sys, rng = random_system(11, 3)
        y = rng.standard_normal(3)
        v = rng.standard_normal(3)

        def S_curved(h):
            return entropy(sys, y + h * v + h * h * h * np.ones(3))

        exact = forces(sys, y) @ v
        errs = [abs((S_curved(h) - S_curved(-h)) / (2 * h) - exact) for h in (1e-2, 5e-3, 2.5e-3)]
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert all(abs(o - 2.0) < 0.1 for o in orders)


class TestFluxes:
    def test_diagonal(self):
        sys = OnsagerSystem(L=np.diag([1.0, 2.0]), s=np.eye(2))
        assert np.array_equal(fluxes(sys, [1, 1]), [1.0, 2.0])
        assert np.array_equal(fluxes(sys, [0, 0]), [0.0, 0.0])

    @given(seeds)
    def test_inverse_relation(self, seed):
        sys, rng = random_system(seed)
        Y = rng.standard_normal(sys.N)
        assert np.max(np.abs(forces_from_fluxes(sys, fluxes(sys, Y)) - Y)) < 1e-10


class TestProduction:
    def test_example(self):
        sys = OnsagerSystem(L=np.diag([1.0, 2.0]), s=np.eye(2))
        rep = production_report(sys, [1.0, 1.0])
        assert rep == pytest.approx((3.0, 1.5, 1.5))

    def test_equilibrium(self):
        sys, _ = random_system(1, 3)
        assert production_report(sys, np.zeros(3)) == (0.0, 0.0, 0.0)

    @given(seeds)
    def test_half_production_identity(self, seed):
        sys, rng = random_system(seed)
        y = rng.standard_normal(sys.N)
        rep = production_report(sys, y)
        scale = max(1.0, rep.Sdot)
        assert abs(rep.Phi - rep.Psi) < 1e-12 * scale
        assert abs(rep.Sdot - 2 * rep.Phi) < 1e-12 * scale
        assert rep.Sdot > 0


class TestRelax:
    def test_scalar_decay(self):
        sys = OnsagerSystem(L=[[1.0]], s=[[1.0]])
        assert relax(sys, [1.0], 1.0)[0] == pytest.approx(math.exp(-1.0), rel=1e-15)

    def test_zero_time(self):
        sys, rng = random_system(5, 4)
        y = rng.standard_normal(4)
        assert np.allclose(relax(sys, y, 0.0), y, rtol=0, atol=1e-13)

    def test_long_time(self):
        sys, rng = random_system(5, 4)
        assert np.max(np.abs(relax(sys, rng.standard_normal(4), 1e4))) < 1e-12

    @given(seeds, st.floats(0.0, 3.0))
    def test_matches_expm(self, seed, tau):
        sys, rng = random_system(seed)
        y = rng.standard_normal(sys.N)
        ref = linalg.expm(-sys.L @ sys.s * tau) @ y
        assert np.max(np.abs(relax(sys, y, tau) - ref)) < 1e-10 * max(1.0, np.max(np.abs(y)))

    @given(seeds)
    def test_derivative_is_flux(self, seed):
        sys, rng = random_system(seed)
        y0 = rng.standard_normal(sys.N)
        tau, h = 0.4, 1e-5
        fd = (relax(sys, y0, tau + h) - relax(sys, y0, tau - h)) / (2 * h)
        y = relax(sys, y0, tau)
        assert np.max(np.abs(fd - fluxes(sys, forces(sys, y)))) < 1e-6

    @given(seeds)
    def test_entropy_nondecreasing(self, seed):
        sys, rng = random_system(seed)
        path = relax(sys, rng.standard_normal(sys.N), np.linspace(0.0, 5.0, 50))
        S = [entropy(sys, y) for y in path]
        assert np.all(np.diff(S) >= -1e-14)

    def test_rates_positive(self):
        sys, _ = random_system(9, 5)
        assert np.all(relaxation_rates(sys) > 0)


class TestStationaryDensity:
    def test_mode(self):
        sys = OnsagerSystem(L=[[1.0]], s=[[1.0]])
        assert stationary_density(sys, [0.0]) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)

    def test_normalized_and_covariance_1d(self):
        sys = OnsagerSystem(L=[[0.7]], s=[[2.5]], kB=1.3)
        total, _ = integrate.quad(lambda y: stationary_density(sys, [y]), -np.inf, np.inf, epsrel=1e-12)
        second, _ = integrate.quad(lambda y: y * y * stationary_density(sys, [y]), -np.inf, np.inf, epsrel=1e-12)
        assert total == pytest.approx(1.0, abs=1e-10)
        assert second == pytest.approx(stationary_covariance(sys)[0, 0], abs=1e-8)

    def test_covariance_2d(self):
        sys = OnsagerSystem(L=np.eye(2), s=[[2.0, 0.5], [0.5, 1.0]], kB=0.8)

        def moment(i, j):
            f = lambda b, a: (a, b)[i] * (a, b)[j] * stationary_density(sys, [a, b])
            return integrate.dblquad(f, -12, 12, -12, 12, epsabs=1e-11)[0]

        cov = np.array([[moment(i, j) for j in range(2)] for i in range(2)])
        assert np.max(np.abs(cov - stationary_covariance(sys))) < 1e-8

    def test_mode_is_maximum(self):
        sys, rng = random_system(2, 3)
        assert stationary_density(sys, np.zeros(3)) > stationary_density(sys, 0.1 * rng.standard_normal(3))
