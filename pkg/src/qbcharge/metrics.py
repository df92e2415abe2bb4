"""Stored energy, charging power, and derived trajectory metrics.

Energies are normalized to the full battery gap, so the stored energy
of a state with level occupations ``(p1, p2, p3)`` is ``r*p2 + p3``
with ``r`` the middle-to-top level ratio, and the fully charged value
is 1.  The top-level occupation ``p3`` is reported alongside: it is
the charge measure behind the headline speed-up figures, insensitive
to the (hardware-dependent) value of ``r``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .propagator import Trajectory


def state_populations(state) -> np.ndarray:
    """Level occupations of a pure 3-vector or a 3x3 density matrix."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.abs(state) ** 2
    if state.shape == (3, 3):
        return np.real(np.diag(state)).copy()
    raise ValueError(f"expected a 3-vector or 3x3 matrix, got shape {state.shape}")


def stored_energy(state, r: float) -> float:
    """Normalized stored energy ``Tr(rho * diag(0, r, 1)) = r*p2 + p3``.

    Assumes the battery starts in the ground state, whose bare energy
    is zero by convention.
    """
    if not (0.0 < r < 1.0):
        raise ValueError(f"level ratio must lie in (0, 1), got {r}")
    p = state_populations(state)
    return float(r * p[1] + p[2])


def avg_power(w_norm: float, omega0: float, tau_c: float) -> float:
    """Dimensionless average charging power ``w_norm / (omega0 * tau_c)``."""
    if not (tau_c > 0.0):
        raise ValueError(f"tau_c must be > 0, got {tau_c}")
    if not (omega0 > 0.0):
        raise ValueError(f"omega0 must be > 0, got {omega0}")
    return w_norm / (omega0 * tau_c)


def energy_series(traj: Trajectory, r: float) -> np.ndarray:
    """Normalized stored energy at every trajectory sample."""
    if not (0.0 < r < 1.0):
        raise ValueError(f"level ratio must lie in (0, 1), got {r}")
    p = traj.populations
    return r * p[:, 1] + p[:, 2]


def instantaneous_power(traj: Trajectory, r: float) -> np.ndarray:
    """Charging power ``dW/dt`` by finite differences on the sample grid.

    Central differences in the interior, one-sided at the ends.
    """
    if traj.times.size < 3:
        raise ValueError("instantaneous power needs at least 3 samples")
    return np.gradient(energy_series(traj, r), traj.times)


@dataclass(frozen=True)
class ChargeReport:
    """Final-state summary of one charging run.

    ``w_norm`` is the normalized stored energy ``r*p2 + p3`` at the end
    of the run, ``p3`` the bare top-level occupation, and the two power
    figures are both referred to the nominal charging time.
    """

    w_norm: float
    p3: float
    p_avg: float
    p_avg_p3: float
    populations: tuple[float, float, float]


def charge_report(traj: Trajectory, r: float, omega0: float,
                  tau_c: float) -> ChargeReport:
    """Summarize the last sample of ``traj``."""
    p = traj.populations[-1]
    w = float(r * p[1] + p[2])
    return ChargeReport(
        w_norm=w,
        p3=float(p[2]),
        p_avg=avg_power(w, omega0, tau_c),
        p_avg_p3=avg_power(float(p[2]), omega0, tau_c),
        populations=(float(p[0]), float(p[1]), float(p[2])),
    )
