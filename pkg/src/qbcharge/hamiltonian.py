"""Time-dependent 3x3 Hamiltonians of the charging protocols.

Builders for the bare battery Hamiltonian, the two-pulse (STIRAP)
rotating-frame Hamiltonian, its counter-diabatically assisted version
(STA), the frame-rotated two-laser equivalent, the dark/bright
eigenstructure, and the rotation between the last two frames.

Energies are expressed in units of the full battery gap (top level at
1, ground at 0), frequencies in units of ``omega0``, and ``hbar = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pulses
from .errors import DegeneracyError
from .pulses import PulseSpec

PROTOCOLS = ("stirap", "sta", "sta_rotated")

# su(2) ladder generators embedded in the three-level basis
S1 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
S2 = np.array([[0, 0, -1j], [0, 0, 0], [1j, 0, 0]], dtype=complex)
S3 = np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)


@dataclass(frozen=True)
class ProtocolSpec:
    """A charging protocol: which Hamiltonian to drive with.

    Parameters
    ----------
    protocol : {"stirap", "sta", "sta_rotated"}
    pulse : PulseSpec
    detuning : float
        One-photon detuning in units of ``omega0``.  Must be zero for
        ``sta_rotated`` (the two-laser decomposition only exists on
        resonance).
    level_ratio : float
        Middle-to-top level energy ratio, in ``(0, 1)``.
    """

    protocol: str
    pulse: PulseSpec
    detuning: float = 0.0
    level_ratio: float = 0.3809

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(
                f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if not (0.0 < self.level_ratio < 1.0):
            raise ValueError(
                f"level_ratio must lie in (0, 1), got {self.level_ratio}")
        if self.protocol == "sta_rotated" and self.detuning != 0.0:
            raise ValueError(
                "sta_rotated requires detuning = 0 (two-laser form only "
                f"exists on resonance), got {self.detuning}")


def bare_h0(r: float) -> np.ndarray:
    """Bare battery Hamiltonian ``diag(0, r, 1)`` in units of the full gap."""
    if not (0.0 < r < 1.0):
        raise ValueError(f"level ratio must lie in (0, 1), got {r}")
    return np.diag([0.0, r, 1.0])


def build_stirap(omega1: float, omega2: float, delta: float = 0.0) -> np.ndarray:
    """Two-pulse rotating-frame Hamiltonian with one-photon detuning."""
    return np.array([[0.0, omega1, 0.0],
                     [omega1, delta, omega2],
                     [0.0, omega2, 0.0]], dtype=complex)


def build_sta(omega1: float, omega2: float, omega_a: float,
              delta: float = 0.0) -> np.ndarray:
    """STIRAP Hamiltonian plus the counter-diabatic 1-3 block."""
    h = build_stirap(omega1, omega2, delta)
    h[0, 2] = 1j * omega_a
    h[2, 0] = -1j * omega_a
    return h


def build_rotated_sta(omega1_tilde: float, omega2_tilde: float) -> np.ndarray:
    """Two-laser Hamiltonian in the rotated frame (no 1-3 element)."""
    return np.array([[0.0, omega1_tilde, 0.0],
                     [omega1_tilde, 0.0, omega2_tilde],
                     [0.0, omega2_tilde, 0.0]], dtype=complex)


def rotation_frame_u(phi: float) -> np.ndarray:
    """Unitary ``exp(-i*phi*S3)`` linking the STA and rotated frames."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[1.0, 0.0, 0.0],
                     [0.0, c, -1j * s],
                     [0.0, -1j * s, c]], dtype=complex)


@dataclass(frozen=True)
class Eigenstructure:
    """Instantaneous eigenbasis of the two-pulse Hamiltonian at resonance.

    ``dark`` has eigenvalue 0 and no middle-level component;
    ``bright_plus``/``bright_minus`` have eigenvalues ``+/-Omega`` with
    ``Omega = hypot(omega1, omega2)``.
    """

    dark: np.ndarray
    bright_plus: np.ndarray
    bright_minus: np.ndarray
    eigenvalues: tuple[float, float, float]


def eigenstructure(omega1: float, omega2: float) -> Eigenstructure:
    """Dark/bright eigenvectors of ``build_stirap(omega1, omega2, 0)``.

    Built from ``sin(theta) = omega1/Omega`` and ``cos(theta) =
    omega2/Omega`` directly (exact algebra, no angle round-trip); for
    the pulse families' domain ``omega1 >= 0`` this is the dark state
    ``(cos(theta), 0, -sin(theta))`` of the mixing angle.
    """
    if omega1 == 0.0 and omega2 == 0.0:
        raise DegeneracyError("eigenstructure undefined: omega1 = omega2 = 0")
    big_omega = float(np.hypot(omega1, omega2))
    s, c = omega1 / big_omega, omega2 / big_omega
    dark = np.array([c, 0.0, -s], dtype=complex)
    sq2 = np.sqrt(2.0)
    bright_plus = np.array([s, 1.0, c], dtype=complex) / sq2
    bright_minus = np.array([s, -1.0, c], dtype=complex) / sq2
    return Eigenstructure(dark, bright_plus, bright_minus,
                          (0.0, big_omega, -big_omega))


def hamiltonian_fn(spec: ProtocolSpec):
    """Callable ``t -> H(t)`` for the given protocol.

    The returned closure evaluates the pulse family and assembles the
    3x3 matrix; it is the reference implementation the compiled kernel
    is checked against.
    """
    p = spec.pulse
    if spec.protocol == "stirap":
        def h_of_t(t, _p=p, _d=spec.detuning):
            o1, o2 = pulses.eval_pair(_p, t)
            return build_stirap(o1, o2, _d)
    elif spec.protocol == "sta":
        def h_of_t(t, _p=p, _d=spec.detuning):
            o1, o2 = pulses.eval_pair(_p, t)
            oa = pulses.eval_cd_analytic(_p, t)
            return build_sta(o1, o2, oa, _d)
    else:
        def h_of_t(t, _p=p):
            o1t, o2t, _ = pulses.modified_pulses(_p, t)
            return build_rotated_sta(o1t, o2t)
    return h_of_t
