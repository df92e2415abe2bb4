import math

import numpy as np
import pytest

from qbcharge import DegeneracyError, PulseSpec, pulses
from qbcharge.pulses import (eval_cd_analytic, eval_cd_from_derivatives,
                             eval_pair, eval_pair_derivatives,
                             max_cd_amplitude, mixing_angle, modified_pulses,
                             phi_angle, phi_dot)

TAU = 7.2


def fd_theta_dot(spec, t, h):
    """Independent oracle: central difference of the mixing angle."""
    o1p, o2p = eval_pair(spec, t + h)
    o1m, o2m = eval_pair(spec, t - h)
    return (mixing_angle(o1p, o2p) - mixing_angle(o1m, o2m)) / (2.0 * h)


class TestPulseSpec:
    def test_defaults_reproduce_shape_parameters(self):
        spec = PulseSpec("gaussian", tau_c=TAU)
        assert spec.alpha == pytest.approx(TAU / 10.0)
        assert spec.sigma == pytest.approx(TAU / 6.0)
        assert spec.beta == pytest.approx(TAU / 10.0)

    @pytest.mark.parametrize("kwargs,msg", [
        (dict(family="square"), "family"),
        (dict(omega0=0.0), "omega0"),
        (dict(tau_c=-1.0), "tau_c"),
        (dict(sigma=-1.0), "sigma"),
    ])
    def test_invalid_spec_rejected(self, kwargs, msg):
        base = dict(family="gaussian", tau_c=TAU)
        base.update(kwargs)
        with pytest.raises(ValueError, match=msg):
            PulseSpec(**base)

    def test_sinusoid_beta_window(self):
        with pytest.raises(ValueError, match="beta"):
            PulseSpec("sinusoid", tau_c=1.0, beta=0.6)


class TestEvalPair:
    def test_gaussian_peak_is_omega0(self):
        spec = PulseSpec("gaussian", omega0=2.5, tau_c=TAU)
        o1, _ = eval_pair(spec, TAU / 2 + spec.alpha)
        assert o1 == pytest.approx(2.5, rel=1e-14)

    def test_gaussian_midpoint_value(self):
        # exp(-alpha^2/sigma^2) = exp(-0.36) at the defaults
        spec = PulseSpec("gaussian", tau_c=TAU)
        o1, o2 = eval_pair(spec, TAU / 2)
        assert o1 == pytest.approx(0.697676326071031, rel=1e-12)
        assert o2 == pytest.approx(o1, rel=1e-14)

    def test_ramp_boundary_values(self):
        spec = PulseSpec("ramp", omega0=3.0, tau_c=TAU)
        assert eval_pair(spec, 0.0) == pytest.approx((0.0, 3.0))
        assert eval_pair(spec, TAU / 2) == pytest.approx((3.0, 0.0), abs=1e-12)
        # Stokes goes negative past mid-window (spec open question)
        assert eval_pair(spec, TAU)[1] == pytest.approx(-3.0)

    def test_gaussian_mirror_symmetry(self, rng):
        spec = PulseSpec("gaussian", tau_c=TAU)
        for s in rng.uniform(-TAU, TAU, size=25):
            o1p, _ = eval_pair(spec, TAU / 2 + s)
            _, o2m = eval_pair(spec, TAU / 2 - s)
            assert o1p == pytest.approx(o2m, rel=1e-13, abs=1e-300)

    def test_boundary_conditions(self):
        g = PulseSpec("gaussian", tau_c=TAU)
        assert eval_pair(g, 0.0)[0] <= 1e-5
        assert eval_pair(g, TAU)[1] <= 1e-5
        for family in ("sinusoid", "ramp"):
            spec = PulseSpec(family, tau_c=TAU)
            assert eval_pair(spec, 0.0)[0] == 0.0

    def test_total_functions_outside_window(self):
        for family in ("gaussian", "sinusoid", "ramp"):
            spec = PulseSpec(family, tau_c=TAU)
            for t in (-0.5 * TAU, 1.5 * TAU):
                o1, o2 = eval_pair(spec, t)
                assert math.isfinite(o1) and math.isfinite(o2)


class TestMixingAngle:
    @pytest.mark.parametrize("o1,o2,theta", [
        (0.0, 1.0, 0.0),
        (1.0, 0.0, math.pi / 2),
        (1.0, 1.0, math.pi / 4),
    ])
    def test_reference_angles(self, o1, o2, theta):
        assert mixing_angle(o1, o2) == pytest.approx(theta, abs=1e-15)

    def test_negative_stokes_maps_above_pi_half(self):
        theta = mixing_angle(2.0, -1.0)
        assert math.pi / 2 < theta < math.pi

    def test_range_and_continuity_for_ramp(self):
        spec = PulseSpec("ramp", tau_c=TAU)
        ts = np.linspace(0.0, TAU, 400)
        thetas = [mixing_angle(*eval_pair(spec, t)) for t in ts]
        assert all(0.0 <= th < math.pi for th in thetas)
        assert np.max(np.abs(np.diff(thetas))) < 0.05  # no branch jump

    def test_degenerate_error(self):
        with pytest.raises(DegeneracyError):
            mixing_angle(0.0, 0.0)


class TestCdPulse:
    def test_constant_pulses_give_zero(self):
        assert eval_cd_from_derivatives(0.3, 1.7, 0.0, 0.0) == 0.0

    def test_unit_example(self):
        assert eval_cd_from_derivatives(0.0, 1.0, 1.0, 0.0) == pytest.approx(1.0)

    def test_degenerate_error(self):
        with pytest.raises(DegeneracyError):
            eval_cd_from_derivatives(0.0, 0.0, 1.0, 1.0)

    def test_gaussian_center_value(self):
        # 2*alpha/sigma^2 = 7.2/tau_c at the defaults
        spec = PulseSpec("gaussian", tau_c=TAU)
        assert eval_cd_analytic(spec, TAU / 2) == pytest.approx(7.2 / TAU,
                                                               rel=1e-13)
        o1, o2 = eval_pair(spec, TAU / 2)
        do1, do2 = eval_pair_derivatives(spec, TAU / 2)
        assert eval_cd_from_derivatives(o1, o2, do1, do2) == pytest.approx(
            7.2 / TAU, rel=1e-12)

    def test_ramp_center_value(self):
        spec = PulseSpec("ramp", tau_c=TAU)
        assert eval_cd_analytic(spec, TAU / 2) == pytest.approx(
            math.pi / TAU, rel=1e-13)

    def test_gaussian_even_about_center(self, rng):
        spec = PulseSpec("gaussian", tau_c=TAU)
        for s in rng.uniform(0.0, TAU / 2, size=20):
            assert eval_cd_analytic(spec, TAU / 2 + s) == pytest.approx(
                eval_cd_analytic(spec, TAU / 2 - s), rel=1e-13)

    @pytest.mark.parametrize("family", ["gaussian", "sinusoid", "ramp"])
    def test_analytic_matches_derivative_form(self, family, rng):
        spec = PulseSpec(family, tau_c=TAU)
        for t in rng.uniform(0.0, TAU, size=60):
            o1, o2 = eval_pair(spec, t)
            do1, do2 = eval_pair_derivatives(spec, t)
            expected = eval_cd_from_derivatives(o1, o2, do1, do2)
            got = eval_cd_analytic(spec, t)
            assert got == pytest.approx(expected, rel=1e-10, abs=1e-14)

    @pytest.mark.parametrize("family", ["gaussian", "sinusoid", "ramp"])
    def test_analytic_matches_fd_mixing_angle(self, family, rng):
        # independent oracle: theta-dot by central difference
        spec = PulseSpec(family, tau_c=TAU)
        h = 1e-6 * TAU
        for t in rng.uniform(2 * h, TAU - 2 * h, size=40):
            assert eval_cd_analytic(spec, t) == pytest.approx(
                fd_theta_dot(spec, t, h), abs=1e-6)

    @pytest.mark.parametrize("family", ["gaussian", "sinusoid", "ramp"])
    def test_pair_derivatives_match_fd(self, family, rng):
        spec = PulseSpec(family, tau_c=TAU)
        h = 1e-7 * TAU
        for t in rng.uniform(2 * h, TAU - 2 * h, size=30):
            o1p, o2p = eval_pair(spec, t + h)
            o1m, o2m = eval_pair(spec, t - h)
            do1, do2 = eval_pair_derivatives(spec, t)
            assert do1 == pytest.approx((o1p - o1m) / (2 * h), abs=2e-6)
            assert do2 == pytest.approx((o2p - o2m) / (2 * h), abs=2e-6)


class TestMaxCdAmplitude:
    def test_gaussian_bound_saturates_at_7p2(self):
        spec = PulseSpec("gaussian", tau_c=7.2)
        assert max_cd_amplitude(spec) == pytest.approx(1.0, rel=1e-12)

    def test_gaussian_scaling(self):
        spec = PulseSpec("gaussian", tau_c=14.4)
        assert max_cd_amplitude(spec) == pytest.approx(0.5, rel=1e-12)

    def test_ramp_against_closed_form(self):
        # interior maximizer solves 2c^3 - 5c + 2 = 0 with c = cos(pi t/tau)
        spec = PulseSpec("ramp", tau_c=TAU)
        roots = np.roots([2.0, 0.0, -5.0, 2.0])
        c = float(next(r.real for r in roots
                       if abs(r.imag) < 1e-12 and 0.0 < r.real < 1.0))
        s = math.sqrt(1.0 - c * c)
        expected = (math.pi / TAU) * s / (2.0 * c * c - 2.0 * c + 1.0)
        assert max_cd_amplitude(spec) == pytest.approx(expected, rel=1e-10)

    def test_sinusoid_against_dense_grid(self):
        spec = PulseSpec("sinusoid", tau_c=TAU)
        ts = np.linspace(0.0, TAU, 400001)
        brute = max(abs(eval_cd_analytic(spec, t)) for t in ts[::1])
        assert max_cd_amplitude(spec) >= brute - 1e-12
        assert max_cd_amplitude(spec) == pytest.approx(brute, rel=1e-8)


class TestModifiedPulses:
    def test_three_four_five(self):
        # omega1_tilde is the hypotenuse of (omega1, omega_a); find a time
        # where both are nonzero and check against the closed identity
        spec = PulseSpec("gaussian", tau_c=TAU)
        t = 0.3 * TAU
        o1, o2 = eval_pair(spec, t)
        oa = eval_cd_analytic(spec, t)
        o1t, o2t, phi = modified_pulses(spec, t)
        assert o1t == pytest.approx(math.hypot(o1, oa), rel=1e-14)
        assert phi == pytest.approx(math.atan2(oa, o1), rel=1e-14)
        scale = 5.0 / math.hypot(o1, oa)
        assert math.hypot(o1 * scale, oa * scale) == pytest.approx(5.0)

    def test_zero_assist_collapses_to_identity(self, rng):
        # alpha = 0 makes the two pulses coincide and the CD term vanish
        spec = PulseSpec("gaussian", tau_c=TAU, alpha=0.0)
        for t in rng.uniform(0.0, TAU, size=10):
            o1, o2 = eval_pair(spec, t)
            o1t, o2t, phi = modified_pulses(spec, t)
            assert phi == 0.0
            assert o1t == pytest.approx(o1, rel=1e-14)
            assert o2t == pytest.approx(o2, rel=1e-12, abs=1e-12)

    def test_rotated_assist_component_vanishes(self, rng):
        spec = PulseSpec("gaussian", tau_c=TAU)
        for t in rng.uniform(0.0, TAU, size=30):
            o1, _ = eval_pair(spec, t)
            oa = eval_cd_analytic(spec, t)
            _, _, phi = modified_pulses(spec, t)
            assert o1 * math.sin(phi) - oa * math.cos(phi) == pytest.approx(
                0.0, abs=1e-14)

    def test_degenerate_time_reported(self):
        spec = PulseSpec("ramp", tau_c=TAU)
        with pytest.raises(DegeneracyError, match="t = 0.0"):
            modified_pulses(spec, 0.0)
        with pytest.raises(DegeneracyError):
            modified_pulses(PulseSpec("sinusoid", tau_c=TAU), 0.1)

    @pytest.mark.parametrize("family,t0,t1", [
        ("gaussian", 0.0, TAU),
        ("sinusoid", 0.8, TAU - 0.8),
        ("ramp", 0.5, TAU - 0.5),
    ])
    def test_phi_dot_against_richardson(self, family, t0, t1, rng):
        spec = PulseSpec(family, tau_c=TAU)
        for t in rng.uniform(t0, t1, size=12):
            h = 1e-4 * TAU
            d1 = (phi_angle(spec, t + h) - phi_angle(spec, t - h)) / (2 * h)
            d2 = (phi_angle(spec, t + h / 2)
                  - phi_angle(spec, t - h / 2)) / h
            richardson = (4.0 * d2 - d1) / 3.0
            assert phi_dot(spec, t) == pytest.approx(richardson, abs=5e-7)


def test_cd_zero_where_mixing_angle_frozen():
    # sinusoid outside the lobe overlap: one pulse off, theta constant
    spec = PulseSpec("sinusoid", tau_c=TAU)
    for t in (0.0, 0.3, TAU - 0.3, TAU):
        assert eval_cd_analytic(spec, t) == 0.0
        o1, o2 = eval_pair(spec, t)
        do1, do2 = eval_pair_derivatives(spec, t)
        assert eval_cd_from_derivatives(o1, o2, do1, do2) == pytest.approx(
            0.0, abs=1e-15)


def test_fd_phi_step_constant_matches_module():
    assert pulses.PHI_FD_STEP == 1e-6
