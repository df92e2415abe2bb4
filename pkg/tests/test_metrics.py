import numpy as np
import pytest

from qbcharge import (avg_power, charge_report, energy_series,
                      instantaneous_power, run_protocol, state_populations,
                      stored_energy)
from qbcharge.propagator import Trajectory

R = 0.3809


def pure_trajectory(times, p3_of_t):
    """Synthetic pure trajectory with prescribed top-level population."""
    p3 = np.clip(p3_of_t(times), 0.0, 1.0)
    states = np.column_stack([np.sqrt(1.0 - p3),
                              np.zeros_like(p3), np.sqrt(p3)]).astype(complex)
    return Trajectory(times=times, states=states, kind="pure")


class TestStoredEnergy:
    def test_ground_state_is_empty(self):
        assert stored_energy(np.array([1.0, 0.0, 0.0]), R) == 0.0

    def test_top_level_is_full(self):
        assert stored_energy(np.array([0.0, 0.0, 1.0]), R) == 1.0

    def test_middle_level_weighs_by_ratio(self):
        rho = np.diag([0.0, 1.0, 0.0]).astype(complex)
        assert stored_energy(rho, R) == pytest.approx(R)

    def test_matches_population_combination(self, rng):
        for _ in range(10):
            psi = rng.normal(size=3) + 1j * rng.normal(size=3)
            psi /= np.linalg.norm(psi)
            p = state_populations(psi)
            assert stored_energy(psi, R) == pytest.approx(R * p[1] + p[2])

    def test_ratio_domain(self):
        with pytest.raises(ValueError):
            stored_energy(np.array([1.0, 0, 0]), 1.0)

    def test_bounds_for_physical_states(self, rng):
        for _ in range(50):
            psi = rng.normal(size=3) + 1j * rng.normal(size=3)
            psi /= np.linalg.norm(psi)
            w = stored_energy(psi, R)
            assert 0.0 <= w <= 1.0 + 1e-6


class TestAvgPower:
    def test_full_charge_at_bound_time(self):
        assert avg_power(1.0, 1.0, 7.2) == pytest.approx(0.13888888888, rel=1e-9)

    def test_zero_energy_zero_power(self):
        assert avg_power(0.0, 1.0, 12.0) == 0.0

    def test_rejects_nonpositive_time(self):
        with pytest.raises(ValueError):
            avg_power(1.0, 1.0, 0.0)


class TestInstantaneousPower:
    def test_constant_energy_gives_zero(self):
        times = np.linspace(0.0, 5.0, 21)
        traj = pure_trajectory(times, lambda t: np.full_like(t, 0.5))
        np.testing.assert_allclose(instantaneous_power(traj, R),
                                   np.zeros_like(times), atol=1e-12)

    def test_linear_ramp(self):
        tau = 4.0
        times = np.linspace(0.0, tau, 41)
        traj = pure_trajectory(times, lambda t: t / tau)
        np.testing.assert_allclose(instantaneous_power(traj, R),
                                   np.full_like(times, 1.0 / tau), atol=1e-9)

    def test_needs_three_samples(self):
        traj = pure_trajectory(np.array([0.0, 1.0]), lambda t: t)
        with pytest.raises(ValueError):
            instantaneous_power(traj, R)

    def test_integral_recovers_stored_energy(self, sta72):
        traj, report = run_protocol(sta72, samples=801)
        p = instantaneous_power(traj, sta72.level_ratio)
        integral = np.trapezoid(p, traj.times)
        assert integral == pytest.approx(report.w_norm, abs=1e-3)


class TestChargeReport:
    def test_consistent_with_final_sample(self, sta72):
        traj, report = run_protocol(sta72, samples=301)
        p = traj.populations[-1]
        assert report.w_norm == pytest.approx(R * p[1] + p[2], rel=1e-12)
        assert report.p3 == pytest.approx(p[2], rel=1e-12)
        assert report.p_avg == pytest.approx(report.w_norm / 7.2, rel=1e-12)
        assert report.p_avg_p3 == pytest.approx(report.p3 / 7.2, rel=1e-12)
        assert report.populations == pytest.approx(tuple(p))

    def test_energy_series_matches_report(self, sta72):
        traj, report = run_protocol(sta72, samples=301)
        w = energy_series(traj, sta72.level_ratio)
        assert w[-1] == pytest.approx(report.w_norm, rel=1e-12)
        assert np.all(w >= -1e-12) and np.all(w <= 1.0 + 1e-6)

    def test_charge_report_helper(self, sta72):
        traj, _ = run_protocol(sta72, samples=301)
        rep = charge_report(traj, 0.2, 1.0, 7.2)
        p = traj.populations[-1]
        assert rep.w_norm == pytest.approx(0.2 * p[1] + p[2], rel=1e-12)
