from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from wickbridge import checks
from wickbridge.dictionary import (
    ENTROPY_ACTION_FACTOR,
    ComplexAction,
    DensityGrid,
    DictionaryMap,
    assemble_wavefunction,
    born,
    born_inverse,
    check_free_identity,
    check_ground_state,
    check_harmonic_identity,
    continuity_residual,
    madelung_phase_gradient,
    map_params,
    observable_average,
    unmap_params,
    wick,
    wick_inverse,
)
from wickbridge.errors import (
    Caustic,
    DensityFloor,
    InsufficientTimeSamples,
    UnnormalizedDensity,
    ZeroFrequency,
    ZeroInterval,
    ZeroNorm,
)
from wickbridge.ou_process import one_gate_density
from wickbridge.params import OUParams, PhysParams
from wickbridge.quantum import WavefunctionGrid, free_packet, harmonic_ground_state, uniform_grid

Q = PhysParams(1.0, 1.0, 1.0)


def harmonic_propagator_oracle(m, hbar, w, t, x2, x1):
    # textbook Mehler kernel, written out independently of the kernel class
    sn, cs = math.sin(w * t), math.cos(w * t)
    pref = cmath.sqrt(m * w / (2j * math.pi * hbar * sn))
    return pref * cmath.exp(1j * m * w / (2 * hbar * sn) * ((x1 * x1 + x2 * x2) * cs - 2 * x1 * x2))


def ou_literal_oracle(s, kB, g, y2, tau, y1):
    # literal-prefactor transition density, continued to complex tau with cmath
    beta = s / (2 * kB)
    sh = cmath.sinh(g * tau)
    return (
        beta * cmath.exp(g * tau / 2) / cmath.sqrt(math.pi * sh)
        * cmath.exp(-beta * (cmath.exp(g * tau / 2) * y2 - cmath.exp(-g * tau / 2) * y1) ** 2 / (2 * sh))
    )


class TestWick:
    def test_zero(self):
        assert wick(0.0) == 0

    def test_round_trip(self):
        for t in (0.3, -2.0, 1e-9, 7.25):
            assert wick_inverse(wick(t)) == t

    def test_purely_imaginary(self):
        tau = wick(np.array([0.5, 1.5]))
        assert np.all(tau.real == 0) and np.array_equal(tau.imag, [0.5, 1.5])


class TestParameterMap:
    def test_unit_example(self):
        p = map_params(Q, 1.0)
        assert (p.gamma, p.s, p.R) == pytest.approx((1.0, 2.0, 2.0))

    @given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10))
    def test_round_trip(self, m, hbar, w, kB):
        q = PhysParams(m, hbar, w)
        back = unmap_params(map_params(q, kB), hbar)
        assert abs(back.m - m) <= 1e-15 * m
        assert abs(back.omega - w) <= 1e-15 * w

    def test_small_frequency_keeps_resistance(self):
        for w in (1e-2, 1e-5, 1e-8):
            p = map_params(PhysParams(2.0, 0.5, w), 1.5)
            assert p.R == pytest.approx(2 * 1.5 * 2.0 / 0.5, rel=1e-14)
            assert p.s == pytest.approx(2 * 1.5 * 2.0 * w / 0.5, rel=1e-14)

    def test_zero_frequency(self):
        with pytest.raises(ZeroFrequency):
            map_params(PhysParams(1.0, 1.0, 0.0))

    def test_length_scale(self):
        m = DictionaryMap(length_scale=2.0)
        p = m.to_thermo(Q)
        assert p.s == pytest.approx(8.0)
        assert m.to_quantum(p).m == pytest.approx(1.0)


class TestFreeIdentity:
    def test_example(self):
        assert check_free_identity(Q, 1.0, 0.0, 1.0, 1.0) < 1e-10

    def test_coincident_points(self):
        assert check_free_identity(PhysParams(1.7, 0.6), 0.8, 0.4, 0.4, 2.3) < 1e-12

    def test_zero_time(self):
        with pytest.raises(ZeroInterval):
            check_free_identity(Q, 1.0, 0.0, 1.0, 0.0)

    def test_finite_rate_is_first_order(self):
        slope, res = checks.free_rate_slope()
        assert slope == pytest.approx(1.0, abs=0.2)
        assert check_free_identity(Q, 1.0, 0.0, 1.0, 1.0, gamma=1e-4) > 1e-6

    @given(st.floats(0.5, 2), st.floats(0.5, 2), st.floats(0.1, 4), st.floats(-2, 2), st.floats(-2, 2))
    def test_against_textbook_forms(self, m, hbar, t, x1, x2):
        # both sides from independent closed forms at a small rate
        g = 1e-7
        s = 2 * m * g / hbar
        rhs = math.sqrt(1 / s) * ou_literal_oracle(s, 1.0, g, x2, 1j * t, x1)
        lhs = cmath.sqrt(m / (2j * math.pi * hbar * t)) * cmath.exp(1j * m * (x2 - x1) ** 2 / (2 * hbar * t))
        assert abs(lhs - rhs) / abs(lhs) < 1e-5


class TestHarmonicIdentity:
    def test_example(self):
        assert check_harmonic_identity(Q, 1.0, 0.3, -0.5, 0.7) < 1e-10

    def test_equal_points(self):
        assert check_harmonic_identity(PhysParams(1.4, 0.8, 0.9), 1.0, 0.6, 0.6, 1.1) < 1e-12

    def test_caustic(self):
        with pytest.raises(Caustic):
            check_harmonic_identity(Q, 1.0, 0.1, 0.2, math.pi)

    @given(st.floats(0.5, 2), st.floats(0.5, 2), st.floats(0.5, 2), st.floats(0.05, 10), st.floats(-2, 2), st.floats(-2, 2))
    def test_against_textbook_forms(self, m, hbar, w, t, x1, x2):
        assume(abs(math.sin(w * t)) > 0.05)
        s = 2 * m * w / hbar
        lhs = ou_literal_oracle(s, 1.0, w, x2, 1j * t, x1)
        dV = 0.5 * m * w * w * (x2 * x2 - x1 * x1)
        rhs = cmath.exp(0.5j * w * t - dV / (hbar * w)) * math.sqrt(2 * m * w / hbar) * harmonic_propagator_oracle(m, hbar, w, t, x2, x1)
        assert abs(lhs - rhs) / abs(rhs) < 1e-9

    def test_small_frequency_approaches_free(self):
        # with omega -> 0 the harmonic kernel tends to the free one at rate O(omega**2)
        from wickbridge.gaussian_kernel import kernel_free, kernel_harmonic

        for w in (1e-2, 1e-3):
            H = kernel_harmonic(1, 1, w, 0, 1.0)(0.8, -0.3)
            F = kernel_free(1, 1, 0, 1.0)(0.8, -0.3)
            assert abs(H - F) / abs(F) < w


class TestGroundState:
    def test_unit(self):
        assert check_ground_state(Q) < 1e-10

    def test_variance(self):
        x = uniform_grid()
        rho = born(WavefunctionGrid(x, harmonic_ground_state(x, Q)))
        var = np.trapezoid(x * x * rho.rho, x)
        assert var == pytest.approx(0.5, rel=1e-10)

    def test_mode_ratio(self):
        p = map_params(Q)
        psi0 = harmonic_ground_state(np.array([0.0]), Q)
        assert (one_gate_density(p, 0.0) / abs(psi0[0]) ** 2) == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("scale", [0.5, 1.0, 2.5])
    def test_length_scale_invariant(self, scale):
        assert check_ground_state(PhysParams(1.3, 0.7, 2.0), 1.0, length_scale=scale) < 1e-10


class TestBorn:
    def test_phase_discarded(self):
        x = uniform_grid(512, 8.0)
        amp = np.exp(-x * x / 2)
        a = born(WavefunctionGrid(x, amp))
        b = born(WavefunctionGrid(x, amp * np.exp(1j * np.sin(3 * x))))
        assert np.allclose(a.rho, b.rho, rtol=1e-14, atol=0)

    def test_normalized(self):
        x = uniform_grid(512, 8.0)
        assert born(WavefunctionGrid(x, 3.0 * np.exp(-x * x))).total() == pytest.approx(1.0, abs=1e-10)

    def test_zero(self):
        with pytest.raises(ZeroNorm):
            born(WavefunctionGrid(np.linspace(0, 1, 5), np.zeros(5)))


def packet_series(t=1.0, dt=1e-3, n=2048):
    x = uniform_grid(n)
    return x, checks.free_packet_series(x, (t - dt, t, t + dt), PhysParams(1.0, 1.0))


class TestBornInverse:
    def test_round_trip(self):
        x, series = packet_series()
        psi = born_inverse(series, [0.999, 1.0, 1.001], 1.0, 1.0)
        assert np.max(np.abs(born(psi).rho - series[1].rho)) < 1e-10

    def test_static_density_has_no_phase(self):
        x = uniform_grid(256, 6.0)
        rho = DensityGrid(x, np.exp(-x * x) / math.sqrt(math.pi))
        psi = born_inverse([rho, rho], [0.0, 1.0], 1.0, 1.0)
        assert np.max(np.abs(psi.psi.imag)) == 0
        assert np.allclose(psi.psi.real, np.sqrt(rho.rho))

    def test_phase_gradient_recovery(self):
        assert checks.phase_gradient_error() < 1e-4

    def test_recovers_packet_phase(self):
        q = PhysParams(1.0, 1.0)
        x, series = packet_series()
        psi = born_inverse(series, [0.999, 1.0, 1.001], q.m, q.hbar)
        exact = free_packet(x, 1.0, q)
        mask = np.abs(exact) ** 2 > 1e-6 * np.max(np.abs(exact) ** 2)
        rel = np.angle(psi.psi[mask] * np.conj(exact[mask]))
        rel -= rel[np.argmax(np.abs(exact[mask]))]
        assert np.max(np.abs(rel)) < 1e-3

    def test_too_few_samples(self):
        x, series = packet_series()
        with pytest.raises(InsufficientTimeSamples):
            born_inverse(series[:1], [1.0], 1.0, 1.0)

    def test_node_rejected(self):
        x = uniform_grid(257, 6.0)
        rho = DensityGrid(x, x * x * np.exp(-x * x))
        with pytest.raises(DensityFloor):
            born_inverse([rho, rho], [0.0, 1.0], 1.0, 1.0)

    def test_mass_enters_velocity(self):
        x, series = packet_series()
        rho = series[1].rho
        rdot = (series[2].rho - series[0].rho) / 2e-3
        g1 = madelung_phase_gradient(x, rho, rdot, 1.0)
        g2 = madelung_phase_gradient(x, rho, rdot, 2.0)
        assert np.allclose(g2, 2 * g1)


class TestContinuity:
    def test_second_order(self):
        errs = checks.continuity_errors()
        orders = np.log2(errs[:-1] / errs[1:])
        assert np.all(np.abs(orders - 2.0) < 0.3)


class TestObservableAverage:
    @pytest.fixture
    def rho(self):
        p = OUParams(1.0, 2.0, 0.5)
        x = uniform_grid(4001, 10.0)
        return p, DensityGrid(x, one_gate_density(p, x))

    def test_constant(self, rho):
        assert observable_average(3.5, rho[1]) == 3.5

    def test_odd(self, rho):
        _, g = rho
        assert abs(observable_average(g.y, g)) < 1e-15

    def test_second_moment(self, rho):
        p, g = rho
        assert observable_average(g.y**2, g) == pytest.approx(p.kB / p.s, abs=1e-8)

    def test_unnormalized(self, rho):
        _, g = rho
        with pytest.raises(UnnormalizedDensity):
            observable_average(g.y, DensityGrid(g.y, 2 * g.rho))

    @given(st.floats(-3, 3), st.floats(-3, 3))
    def test_linear(self, a, b):
        x = uniform_grid(801, 8.0)
        g = DensityGrid(x, np.exp(-x * x / 2) / math.sqrt(2 * math.pi))
        f1, f2 = np.cos(x), x**2
        lhs = observable_average(a * f1 + b * f2, g)
        rhs = a * observable_average(f1, g) + b * observable_average(f2, g)
        assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))

    def test_linear_in_density(self):
        x = uniform_grid(801, 8.0)
        r1 = np.exp(-x * x / 2) / math.sqrt(2 * math.pi)
        r2 = np.exp(-((x - 1) ** 2)) / math.sqrt(math.pi)
        f = np.tanh(x)
        mix = observable_average(f, DensityGrid(x, 0.3 * r1 + 0.7 * r2))
        parts = 0.3 * observable_average(f, DensityGrid(x, r1)) + 0.7 * observable_average(f, DensityGrid(x, r2))
        assert abs(mix - parts) < 1e-12


class TestComplexAction:
    def test_factor_default(self):
        assert ENTROPY_ACTION_FACTOR == 1.0

    def test_euclidean(self):
        act = ComplexAction.from_physical([0.0], [2.0], 1.0, 1.0)
        assert act.euclidean()[0] == -2j

    def test_ground_state_assembly(self):
        x = uniform_grid()
        p = map_params(Q)
        # S = -s y**2 / 2, the Gaussian entropy of the mapped OU process
        psi = assemble_wavefunction(x, -0.5 * p.s * x * x, np.zeros_like(x), p.kB, Q.hbar)
        assert np.max(np.abs(psi.psi.imag)) == 0
        assert np.max(np.abs(psi.psi - harmonic_ground_state(x, Q))) < 1e-12

    def test_born_of_assembly(self):
        x = uniform_grid(1024, 8.0)
        S = -0.7 * x * x + 0.1 * x
        psi = assemble_wavefunction(x, S, np.sin(x), 0.9, 1.0)
        rho = np.exp(S / 0.9)
        rho /= np.trapezoid(rho, x)
        assert np.max(np.abs(np.abs(psi.psi) ** 2 - rho)) < 1e-12

    def test_flat_entropy(self):
        x = uniform_grid(101, 5.0)
        psi = assemble_wavefunction(x, np.full(101, 3.0), np.zeros(101), 1.0, 1.0)
        assert np.allclose(np.abs(psi.psi), 1 / math.sqrt(10.0), rtol=1e-14)

    def test_constant_shift(self):
        x = uniform_grid(101, 5.0)
        S = -(x**2)
        a = assemble_wavefunction(x, S, x, 1.0, 1.0)
        b = assemble_wavefunction(x, S + 123.0, x, 1.0, 1.0)
        assert np.allclose(a.psi, b.psi, rtol=1e-13, atol=0)

    @given(st.integers(-5, 5))
    def test_phase_periodicity(self, k):
        x = uniform_grid(101, 5.0)
        hbar = 0.7
        S, I = -(x**2), 0.3 * x
        a = assemble_wavefunction(x, S, I, 1.0, hbar)
        b = assemble_wavefunction(x, S, I + 2 * math.pi * hbar * k, 1.0, hbar)
        assert np.max(np.abs(a.psi - b.psi)) < 1e-14 * (1 + abs(k)) * 10

    def test_overflow_guard(self):
        x = uniform_grid(101, 5.0)
        psi = assemble_wavefunction(x, np.full(101, 5000.0) - x * x, np.zeros(101), 1.0, 1.0)
        assert np.all(np.isfinite(psi.psi)) and psi.norm2() == pytest.approx(1.0)
