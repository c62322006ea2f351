import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from landauer_qft.cavity import CavityConfig, mode, mode_frequency
from landauer_qft.integrals import (DEFAULT_TOLERANCE, RESONANCE_EPS, CouplingWindow,
                                    QuadratureNotConverged, compute_all, compute_grid,
                                    integral_quadrature, integral_static)
from landauer_qft.trajectories import CavityExitError, Static, UniformAcceleration, max_proper_time

from oracles import qawo_accelerated, trapezoid_integral

FIG2 = CavityConfig(3.0)
FIG2_GAP = mode_frequency(15, FIG2)
FIG2_EXIT = max_proper_time(UniformAcceleration(50.0), FIG2)


class TestStatic:
    def test_resonant_growth(self):
        cav = CavityConfig(1.56789)
        m = mode(10, cav)
        x0 = 0.212345
        for T in (0.1, 1.0, 7.5):
            I = integral_static("-", m, x0, m.omega, T)
            assert abs(I) == pytest.approx(abs(m.profile(x0)) * T, rel=1e-12)

    def test_empty_window(self):
        m = mode(3, CavityConfig(1.0))
        assert integral_static("+", m, 0.3, 2.0, 0.0) == 0
        assert integral_static("-", m, 0.3, 2.0, 0.0) == 0

    def test_full_period_cancels(self):
        m = mode(4, CavityConfig(1.0))
        omega_d = 3.0
        delta = m.omega + omega_d
        T = 2 * math.pi / delta
        assert abs(integral_static("+", m, 0.3, omega_d, T)) < 1e-15

    def test_exact_antiderivative(self):
        m = mode(2, CavityConfig(1.3))
        omega_d, T, x0 = 7.1, 0.83, 0.4
        for s in (1, -1):
            d = s * omega_d + m.omega
            expected = m.profile(x0) * (np.exp(1j * d * T) - 1) / (1j * d)
            assert integral_static(s, m, x0, omega_d, T) == pytest.approx(expected, rel=1e-13)

    def test_rejects_negative_duration(self):
        with pytest.raises(ValueError):
            integral_static("+", mode(1, CavityConfig(1.0)), 0.3, 1.0, -0.1)

    def test_threshold_continuity(self):
        cav = CavityConfig(1.1)
        m = mode(7, cav)
        eps = RESONANCE_EPS * m.omega
        for T in (0.5, 3.0, 40.0):
            series = integral_static("-", m, 0.3, m.omega - eps, T)
            closed = integral_static("-", m, 0.3, m.omega - eps * (1 + 1e-9), T)
            assert closed == pytest.approx(series, rel=1e-10)

    def test_resonant_linearity_grid(self):
        cav = CavityConfig(1.234)
        m = mode(15, cav)
        x0 = 0.52345
        T = np.linspace(0.0, 5.0, 100)
        grid = compute_grid(cav, Static(x0), m.omega, T, modes=range(15, 16))
        np.testing.assert_allclose(np.abs(grid.i_minus[:, 0]), abs(m.profile(x0)) * T,
                                   rtol=1e-12, atol=0)

    @given(st.floats(0.3, 5.0), st.floats(0.01, 0.99), st.integers(1, 200),
           st.floats(0.1, 100.0), st.floats(0.0, 50.0))
    def test_off_resonant_bound(self, L, xfrac, j, omega_d, T):
        m = mode(j, CavityConfig(L))
        x0 = xfrac * L
        u = abs(m.profile(x0))
        for s in (1, -1):
            d = abs(s * omega_d + m.omega)
            if d > RESONANCE_EPS * m.omega:
                assert abs(integral_static(s, m, x0, omega_d, T)) <= 2 * u / d * (1 + 1e-12) + 1e-300


class TestQuadratureOnStatic:
    @pytest.mark.parametrize("j", [1, 5, 10, 33, 64])
    def test_matches_closed_form(self, j):
        cav = CavityConfig(1.56789)
        m = mode(j, cav)
        x0, omega_d, T = 0.212345, mode_frequency(10, cav), 2.0
        for s in (1, -1):
            exact = integral_static(s, m, x0, omega_d, T)
            value, err = integral_quadrature(s, m, Static(x0), omega_d, T)
            assert abs(value - exact) < 1e-9 * abs(exact) + 1e-12
            assert err <= DEFAULT_TOLERANCE

    def test_empty_window(self):
        assert integral_quadrature("+", mode(1, FIG2), UniformAcceleration(50.0), 1.0, 0.0) == (0, 0)


class TestAccelerated:
    @pytest.fixture(scope="class")
    @staticmethod
    def trapezoid_j15():
        T = FIG2_EXIT
        return {s: trapezoid_integral(s, 15, 3.0, FIG2_GAP, UniformAcceleration(50.0), T)
                for s in (1, -1)}

    def test_trapezoid_oracle(self, trapezoid_j15):
        m = mode(15, FIG2)
        for s in (1, -1):
            value, _ = integral_quadrature(s, m, UniformAcceleration(50.0), FIG2_GAP, FIG2_EXIT,
                                           cavity=FIG2)
            ref = trapezoid_j15[s]
            assert abs(value - ref) <= 1e-7 * abs(ref)

    @pytest.mark.parametrize("j", [1, 15, 64, 300, 2000])
    @pytest.mark.parametrize("T", [0.03, 0.09, FIG2_EXIT])
    def test_qawo_oracle(self, j, T):
        m = mode(j, FIG2)
        for s in (1, -1):
            value, err = integral_quadrature(s, m, UniformAcceleration(50.0), FIG2_GAP, T)
            ref = qawo_accelerated(s, j, 3.0, FIG2_GAP, 50.0, T)
            assert abs(value - ref) <= 2e-10 + 1e-8 * abs(ref)
            assert err <= DEFAULT_TOLERANCE

    @pytest.mark.parametrize("j", [1500, 3000, 4096])
    def test_series_matches_panels(self, j):
        m = mode(j, FIG2)
        tr = UniformAcceleration(50.0)
        for s in (1, -1):
            fast, _ = integral_quadrature(s, m, tr, FIG2_GAP, FIG2_EXIT, method="asymptotic")
            slow, _ = integral_quadrature(s, m, tr, FIG2_GAP, FIG2_EXIT, method="panels")
            assert abs(fast - slow) <= 2 * DEFAULT_TOLERANCE

    def test_asymptotic_unavailable_for_low_modes(self):
        with pytest.raises(QuadratureNotConverged):
            integral_quadrature("+", mode(1, FIG2), UniformAcceleration(50.0), FIG2_GAP,
                                FIG2_EXIT, method="asymptotic")

    def test_panel_cap_raises(self):
        with pytest.raises(QuadratureNotConverged):
            integral_quadrature("+", mode(15, FIG2), UniformAcceleration(50.0), FIG2_GAP,
                                FIG2_EXIT, tolerance=1e-14, method="panels", max_panels=50)

    def test_outside_cavity(self):
        with pytest.raises(CavityExitError):
            integral_quadrature("+", mode(1, FIG2), UniformAcceleration(50.0), FIG2_GAP,
                                FIG2_EXIT * 1.1, cavity=FIG2)

    @pytest.mark.parametrize("j", [1, 2, 7, 8])
    def test_periodic_split_matches_direct(self, j):
        cav = CavityConfig(2.0, "periodic")
        m = mode(j, cav)
        tr = UniformAcceleration(4.0)
        for s in (1, -1):
            split, _ = integral_quadrature(s, m, tr, 5.0, 1.2)
            direct, _ = integral_quadrature(s, m, tr, 5.0, 1.2, method="panels")
            assert abs(split - direct) <= 2e-10


class TestComputeAll:
    def test_static_tags(self):
        cav = CavityConfig(1.56789)
        res = compute_all(cav, Static(0.212345), mode_frequency(10, cav), CouplingWindow(0.01, 2.0))
        assert set(res.method) == {"closed-form"}
        assert res.i_plus.shape == res.i_minus.shape == res.err_plus.shape == (64,)

    def test_accelerated_tags(self):
        res = compute_all(FIG2, UniformAcceleration(50.0), FIG2_GAP,
                          CouplingWindow(0.01, FIG2_EXIT), n_modes=80)
        assert set(res.method) == {"quadrature"} and res.converged
        assert res.n_modes == 80 and np.all(res.err_plus <= DEFAULT_TOLERANCE)

    def test_window_past_exit(self):
        with pytest.raises(CavityExitError):
            compute_all(FIG2, UniformAcceleration(50.0), FIG2_GAP,
                        CouplingWindow(0.01, FIG2_EXIT * 1.5), n_modes=4)

    def test_unconverged_flag(self):
        grid = compute_grid(FIG2, UniformAcceleration(50.0), FIG2_GAP, [FIG2_EXIT],
                            tolerance=1e-15, modes=range(15, 17), max_panels=40)
        assert not grid.converged

    def test_concurrent_modes_independent(self):
        # each mode is computed on its own; splitting the mode range changes nothing
        tr = UniformAcceleration(50.0)
        taus = np.linspace(0, FIG2_EXIT, 7)
        whole = compute_grid(FIG2, tr, FIG2_GAP, taus, modes=range(1, 41))
        parts = compute_grid(FIG2, tr, FIG2_GAP, taus, modes=range(1, 21)).concat(
            compute_grid(FIG2, tr, FIG2_GAP, taus, modes=range(21, 41)))
        assert np.array_equal(whole.i_plus, parts.i_plus)
        assert np.array_equal(whole.i_minus, parts.i_minus)

    @pytest.mark.parametrize("case", ["static", "accelerated"])
    def test_high_frequency_decay(self, case):
        if case == "static":
            cav, tr, gap, T = CavityConfig(1.56789), Static(0.212345), None, 2.0
            gap = mode_frequency(10, cav)
        else:
            cav, tr, gap, T = FIG2, UniformAcceleration(50.0), FIG2_GAP, FIG2_EXIT
        grid = compute_grid(cav, tr, gap, [T], modes=range(1, 4097)).at(0)
        # envelope over octaves 32-63, 64-127, ..., 2048-4095
        env = [np.abs(grid.i_plus[j - 1:2 * j - 1]).max() for j in 2 ** np.arange(5, 12)]
        assert all(b < a for a, b in zip(env, env[1:]))
