import math

import numpy as np
import pytest

from qbcharge import (DegeneracyError, ProtocolSpec, bare_h0,
                      build_rotated_sta, build_sta, build_stirap,
                      eigenstructure, hamiltonian_fn, rotation_frame_u)
from qbcharge.hamiltonian import S1, S2, S3
from qbcharge.pulses import eval_cd_analytic, eval_pair, modified_pulses


class TestBuilders:
    def test_stirap_zero(self):
        np.testing.assert_array_equal(build_stirap(0.0, 0.0, 0.0),
                                      np.zeros((3, 3)))

    def test_stirap_transcription(self):
        h = build_stirap(1.0, 2.0, 0.0)
        np.testing.assert_allclose(
            h, [[0, 1, 0], [1, 0, 2], [0, 2, 0]], atol=0)

    def test_stirap_detuning_slot(self):
        assert build_stirap(0.0, 0.0, 0.7)[1, 1] == 0.7

    def test_sta_reduces_to_stirap(self, rng):
        o1, o2, d = rng.uniform(-2, 2, size=3)
        np.testing.assert_array_equal(build_sta(o1, o2, 0.0, d),
                                      build_stirap(o1, o2, d))

    def test_sta_pure_cd_block(self):
        h = build_sta(0.0, 0.0, 1.0, 0.0)
        np.testing.assert_allclose(
            h, [[0, 0, 1j], [0, 0, 0], [-1j, 0, 0]], atol=0)

    def test_rotated_form(self):
        h = build_rotated_sta(1.0, 1.0)
        np.testing.assert_allclose(
            h, [[0, 1, 0], [1, 0, 1], [0, 1, 0]], atol=0)
        assert build_rotated_sta(0.0, 0.0).any() == False  # noqa: E712

    def test_rotated_has_no_forbidden_element(self, rng):
        for _ in range(20):
            a, b = rng.uniform(-3, 3, size=2)
            h = build_rotated_sta(a, b)
            assert h[0, 2] == 0.0 and h[2, 0] == 0.0

    @pytest.mark.parametrize("builder,args", [
        (build_stirap, (0.3, -1.2, 0.5)),
        (build_sta, (0.3, -1.2, 0.8, 0.5)),
        (build_rotated_sta, (1.3, -0.4)),
    ])
    def test_hermiticity(self, builder, args):
        h = builder(*args)
        np.testing.assert_array_equal(h, h.conj().T)

    def test_su2_decomposition(self, rng):
        # STA Hamiltonian at resonance equals o1*S1 + o2*S3 - oa*S2
        o1, o2, oa = rng.uniform(-2, 2, size=3)
        np.testing.assert_allclose(build_sta(o1, o2, oa, 0.0),
                                   o1 * S1 + o2 * S3 - oa * S2, atol=1e-15)


class TestRotationFrame:
    def test_identity_at_zero(self):
        np.testing.assert_allclose(rotation_frame_u(0.0), np.eye(3), atol=0)

    def test_quarter_turn(self):
        u = rotation_frame_u(math.pi / 2)
        expected = np.array([[1, 0, 0], [0, 0, -1j], [0, -1j, 0]])
        np.testing.assert_allclose(u, expected, atol=1e-16)

    def test_unitarity(self, rng):
        for phi in rng.uniform(-10, 10, size=20):
            u = rotation_frame_u(phi)
            np.testing.assert_allclose(u @ u.conj().T, np.eye(3), atol=1e-14)

    def test_generated_by_s3(self, rng):
        phi = rng.uniform(-2, 2)
        from scipy.linalg import expm
        np.testing.assert_allclose(rotation_frame_u(phi),
                                   expm(-1j * phi * S3), atol=1e-13)


class TestEigenstructure:
    def test_stokes_only(self):
        e = eigenstructure(0.0, 1.0)
        np.testing.assert_allclose(e.dark, [1, 0, 0], atol=1e-15)
        assert e.eigenvalues == pytest.approx((0.0, 1.0, -1.0))

    def test_pump_only(self):
        e = eigenstructure(1.0, 0.0)
        np.testing.assert_allclose(e.dark, [0, 0, -1], atol=1e-15)

    def test_three_four_five(self):
        e = eigenstructure(3.0, 4.0)
        assert e.eigenvalues[1] == pytest.approx(5.0)
        h = build_stirap(3.0, 4.0, 0.0)
        for vec, lam in ((e.dark, 0.0), (e.bright_plus, 5.0),
                         (e.bright_minus, -5.0)):
            np.testing.assert_allclose(h @ vec, lam * vec, atol=1e-12)

    def test_random_pairs_are_eigenvectors(self, rng):
        for _ in range(25):
            o1, o2 = rng.uniform(-3, 3, size=2)
            if o1 == 0 and o2 == 0:
                continue
            e = eigenstructure(o1, o2)
            h = build_stirap(o1, o2, 0.0)
            omega = math.hypot(o1, o2)
            np.testing.assert_allclose(h @ e.dark, np.zeros(3), atol=1e-12)
            np.testing.assert_allclose(h @ e.bright_plus,
                                       omega * e.bright_plus, atol=1e-12)
            np.testing.assert_allclose(h @ e.bright_minus,
                                       -omega * e.bright_minus, atol=1e-12)
            # orthonormal triple, dark middle component exactly zero
            basis = np.column_stack([e.dark, e.bright_plus, e.bright_minus])
            np.testing.assert_allclose(basis.conj().T @ basis, np.eye(3),
                                       atol=1e-12)
            assert e.dark[1] == 0.0

    def test_no_geometric_phase(self):
        # real parametrization: <dark | d dark/d theta> vanishes identically
        h = 1e-6
        for o1, o2 in ((0.5, 1.0), (2.0, 0.3), (1.0, -0.5)):
            d0 = eigenstructure(o1, o2).dark
            d1 = eigenstructure(o1 + h, o2).dark
            overlap = np.vdot(d0, (d1 - d0) / h)
            assert abs(overlap) < 1e-5

    def test_degenerate_error(self):
        with pytest.raises(DegeneracyError):
            eigenstructure(0.0, 0.0)


class TestBareH0:
    def test_diagonal(self):
        np.testing.assert_array_equal(bare_h0(0.5), np.diag([0.0, 0.5, 1.0]))

    def test_ground_and_top_expectations(self):
        h0 = bare_h0(0.3809)
        ground = np.array([1, 0, 0])
        top = np.array([0, 0, 1])
        assert ground @ h0 @ ground == 0.0
        assert top @ h0 @ top == 1.0

    @pytest.mark.parametrize("r", [0.0, 1.0, -0.2, 1.5])
    def test_ratio_domain(self, r):
        with pytest.raises(ValueError):
            bare_h0(r)


class TestProtocolSpec:
    def test_rejects_unknown_protocol(self, gauss72):
        with pytest.raises(ValueError, match="protocol"):
            ProtocolSpec("adiabatic", gauss72)

    def test_rejects_bad_ratio(self, gauss72):
        with pytest.raises(ValueError, match="level_ratio"):
            ProtocolSpec("sta", gauss72, level_ratio=1.2)

    def test_rotated_requires_resonance(self, gauss72):
        with pytest.raises(ValueError, match="resonance"):
            ProtocolSpec("sta_rotated", gauss72, detuning=0.1)
        ProtocolSpec("sta_rotated", gauss72)  # fine at delta = 0


class TestFrameEquivalence:
    def test_rotated_hamiltonian_matches_transformed_sta(self, gauss72):
        # U^+ H_sta U - i U^+ dU/dt == rotated builder, dU by central diff
        from qbcharge.pulses import phi_angle
        spec = gauss72
        fd = 1e-7 * spec.tau_c
        for t in np.linspace(0.05, spec.tau_c - 0.05, 29):
            o1, o2 = eval_pair(spec, t)
            oa = eval_cd_analytic(spec, t)
            h_sta = build_sta(o1, o2, oa, 0.0)
            u = rotation_frame_u(phi_angle(spec, t))
            dudt = (rotation_frame_u(phi_angle(spec, t + fd))
                    - rotation_frame_u(phi_angle(spec, t - fd))) / (2 * fd)
            transformed = u.conj().T @ h_sta @ u - 1j * u.conj().T @ dudt
            o1t, o2t, _ = modified_pulses(spec, t)
            np.testing.assert_allclose(transformed,
                                       build_rotated_sta(o1t, o2t), atol=1e-8)


class TestHamiltonianFn:
    def test_matches_builders(self, gauss72, rng):
        for protocol in ("stirap", "sta", "sta_rotated"):
            spec = ProtocolSpec(protocol, gauss72)
            h = hamiltonian_fn(spec)
            for t in rng.uniform(0, gauss72.tau_c, size=5):
                m = h(float(t))
                np.testing.assert_array_equal(m, m.conj().T)
                assert m.shape == (3, 3)

    def test_detuning_propagates(self, gauss72):
        spec = ProtocolSpec("stirap", gauss72, detuning=0.25)
        assert hamiltonian_fn(spec)(1.0)[1, 1] == 0.25
