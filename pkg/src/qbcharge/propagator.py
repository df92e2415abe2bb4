"""Closed- and open-system propagation over a sample grid.

Closed dynamics integrates ``i dpsi/dt = H(t) psi`` (``hbar = 1``)
without renormalization --- the norm drift is kept as an accuracy
diagnostic.  Open dynamics integrates the master equation with one
dissipation ladder (quantum jumps top -> middle -> ground, rate
``gamma_minus``) and one dephasing channel per excited level (rate
``gamma_z``), the state being re-symmetrized after every accepted step
and the trace watched.

Two execution paths produce the same trajectories: a generic one that
accepts any ``t -> H`` callable, and a protocol-specialized one that is
dispatched to the compiled kernel when it is available (see
:mod:`qbcharge._backend`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import TraceDriftError
from .hamiltonian import PROTOCOLS, ProtocolSpec, hamiltonian_fn
from .integrate import dopri5
from .pulses import FAMILIES

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12
TRACE_ABORT = 1e-6

# jump and dephasing operators of the cascade (ground, middle, top) basis
SIGMA_MINUS_12 = np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0]], dtype=complex)
SIGMA_MINUS_23 = np.array([[0, 0, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)
SIGMA_Z_22 = np.diag([-1.0, 1.0, 0.0]).astype(complex)
SIGMA_Z_33 = np.diag([0.0, -1.0, 1.0]).astype(complex)


@dataclass(frozen=True)
class DecoherenceSpec:
    """State-independent decoherence rates, in units of ``omega0``."""

    gamma_minus: float = 0.0
    gamma_z: float = 0.0

    def __post_init__(self):
        if self.gamma_minus < 0.0:
            raise ValueError(f"gamma_minus must be >= 0, got {self.gamma_minus}")
        if self.gamma_z < 0.0:
            raise ValueError(f"gamma_z must be >= 0, got {self.gamma_z}")

    @property
    def is_closed(self) -> bool:
        return self.gamma_minus == 0.0 and self.gamma_z == 0.0


@dataclass
class Diagnostics:
    """Integrator health indicators for one propagation."""

    n_steps: int = 0
    n_rejected: int = 0
    max_norm_drift: float = 0.0
    max_trace_drift: float = 0.0
    min_eigenvalue: float = 0.0
    backend: str = "python"


@dataclass
class Trajectory:
    """Sampled states over a strictly increasing time grid.

    ``states`` has shape ``(n, 3)`` for pure runs and ``(n, 3, 3)``
    for density-matrix runs; ``populations[k]`` are the three level
    occupations at ``times[k]``.
    """

    times: np.ndarray
    states: np.ndarray
    kind: str
    populations: np.ndarray = field(init=False)
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def __post_init__(self):
        if self.kind == "pure":
            self.populations = np.abs(self.states) ** 2
        else:
            self.populations = np.real(
                np.einsum("tii->ti", self.states)).copy()


def _validate_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("time grid must contain at least two points")
    if np.any(np.diff(grid) <= 0.0):
        raise ValueError("time grid must be strictly increasing")
    return grid


def _validate_tol(rtol: float):
    if not (1e-12 <= rtol <= 1e-6):
        raise ValueError(f"rtol must lie in [1e-12, 1e-6], got {rtol}")


def validate_pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size != 3:
        raise ValueError(f"pure state must have 3 amplitudes, got {psi.size}")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"pure state norm is {norm}, expected 1 within 1e-9")
    return psi


def validate_density_matrix(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (3, 3):
        raise ValueError(f"density matrix must be 3x3, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ValueError("density matrix is not Hermitian within 1e-10")
    trace = float(np.real(np.trace(rho)))
    if abs(trace - 1.0) > 1e-8:
        raise ValueError(f"density matrix trace is {trace}, expected 1 within 1e-8")
    if float(np.min(np.linalg.eigvalsh(rho))) < -1e-8:
        raise ValueError("density matrix has an eigenvalue below -1e-8")
    return rho


def ground_state() -> np.ndarray:
    """The empty-battery state: all population on the ground level."""
    return np.array([1.0, 0.0, 0.0], dtype=complex)


def propagate_pure(hfun, psi0, grid, rtol: float = DEFAULT_RTOL,
                   atol: float = DEFAULT_ATOL) -> Trajectory:
    """Integrate the closed-system dynamics under ``hfun``.

    ``hfun`` maps a time to a Hermitian 3x3 ndarray.  The state is not
    renormalized; the maximum norm drift over accepted steps and sample
    points lands in the trajectory diagnostics.
    """
    psi0 = validate_pure_state(psi0)
    grid = _validate_grid(grid)
    _validate_tol(rtol)

    def rhs(t, y):
        return -1j * (np.asarray(hfun(t)) @ y)

    drift = [0.0]

    def watch(_t, y):
        drift[0] = max(drift[0], abs(float(np.linalg.norm(y)) - 1.0))
        return y

    states, stats = dopri5(rhs, psi0, grid, rtol=rtol, atol=atol,
                           post_accept=watch)
    traj = Trajectory(times=grid, states=states, kind="pure")
    sample_drift = float(np.max(np.abs(np.linalg.norm(states, axis=1) - 1.0)))
    traj.diagnostics = Diagnostics(
        n_steps=stats.n_steps, n_rejected=stats.n_rejected,
        max_norm_drift=max(drift[0], sample_drift), backend="python")
    return traj


def lindblad_rhs(rho: np.ndarray, h: np.ndarray,
                 dec: DecoherenceSpec) -> np.ndarray:
    """Right-hand side of the master equation for state ``rho``.

    ``-i[H, rho]`` plus, for each excited level, a dissipation term
    ``(gamma_minus/2) * (2 A rho A^+ - {A^+A, rho})`` with ``A`` the
    downward jump, and the analogous dephasing term with the population
    difference operator.  The output is traceless for any input.
    """
    rho = np.asarray(rho, dtype=complex)
    h = np.asarray(h, dtype=complex)
    out = -1j * (h @ rho - rho @ h)
    for rate, op in ((dec.gamma_minus, SIGMA_MINUS_12),
                     (dec.gamma_minus, SIGMA_MINUS_23),
                     (dec.gamma_z, SIGMA_Z_22),
                     (dec.gamma_z, SIGMA_Z_33)):
        if rate == 0.0:
            continue
        opd_op = op.conj().T @ op
        out += 0.5 * rate * (2.0 * op @ rho @ op.conj().T
                             - opd_op @ rho - rho @ opd_op)
    return out


def propagate_lindblad(hfun, rho0, dec: DecoherenceSpec, grid,
                       rtol: float = DEFAULT_RTOL,
                       atol: float = DEFAULT_ATOL) -> Trajectory:
    """Integrate the master equation under ``hfun`` with rates ``dec``.

    The 3x3 state is propagated as a flattened 9-component complex
    vector, re-symmetrized after every accepted step; a trace drift
    beyond ``1e-6`` aborts with :class:`TraceDriftError`.
    """
    rho0 = validate_density_matrix(rho0)
    grid = _validate_grid(grid)
    _validate_tol(rtol)

    def rhs(t, y):
        return lindblad_rhs(y.reshape(3, 3), hfun(t), dec).ravel()

    drift = [0.0]

    def symmetrize(t, y):
        rho = y.reshape(3, 3)
        rho = 0.5 * (rho + rho.conj().T)
        d = abs(float(np.real(np.trace(rho))) - 1.0)
        drift[0] = max(drift[0], d)
        if d > TRACE_ABORT:
            raise TraceDriftError(
                f"trace drift {d:.3g} beyond {TRACE_ABORT} at t = {t!r}")
        return rho.ravel()

    flat, stats = dopri5(rhs, rho0.ravel(), grid, rtol=rtol, atol=atol,
                         post_accept=symmetrize)
    states = flat.reshape(-1, 3, 3)
    states = 0.5 * (states + states.conj().transpose(0, 2, 1))
    traj = Trajectory(times=grid, states=states, kind="density")
    traces = np.real(np.einsum("tii->t", states))
    traj.diagnostics = Diagnostics(
        n_steps=stats.n_steps, n_rejected=stats.n_rejected,
        max_trace_drift=max(drift[0], float(np.max(np.abs(traces - 1.0)))),
        min_eigenvalue=float(np.min(np.linalg.eigvalsh(states))),
        backend="python")
    return traj


# ---------------------------------------------------------------------------
# protocol-specialized paths (compiled kernel when available)

_FAMILY_CODE = {name: i for i, name in enumerate(FAMILIES)}
_PROTOCOL_CODE = {name: i for i, name in enumerate(PROTOCOLS)}


def _kernel_args(spec: ProtocolSpec):
    p = spec.pulse
    return (_FAMILY_CODE[p.family], _PROTOCOL_CODE[spec.protocol],
            p.omega0, p.tau_c, p.alpha, p.sigma, p.beta, spec.detuning)


def propagate_pure_protocol(spec: ProtocolSpec, psi0, grid,
                            rtol: float = DEFAULT_RTOL,
                            atol: float = DEFAULT_ATOL,
                            backend: str | None = None) -> Trajectory:
    """Closed-system propagation of a named protocol.

    Equivalent to ``propagate_pure(hamiltonian_fn(spec), ...)`` but
    runs in the compiled kernel when one is active.
    """
    kern = _backend.kernel(backend)
    if kern is None:
        traj = propagate_pure(hamiltonian_fn(spec), psi0, grid, rtol, atol)
        return traj
    psi0 = validate_pure_state(psi0)
    grid = _validate_grid(grid)
    _validate_tol(rtol)
    states, n_steps, n_rejected, drift = kern.propagate_pure(
        *_kernel_args(spec), np.ascontiguousarray(psi0),
        np.ascontiguousarray(grid), rtol, atol)
    traj = Trajectory(times=grid, states=states, kind="pure")
    traj.diagnostics = Diagnostics(
        n_steps=n_steps, n_rejected=n_rejected,
        max_norm_drift=drift, backend="compiled")
    return traj


def propagate_lindblad_protocol(spec: ProtocolSpec, rho0,
                                dec: DecoherenceSpec, grid,
                                rtol: float = DEFAULT_RTOL,
                                atol: float = DEFAULT_ATOL,
                                backend: str | None = None) -> Trajectory:
    """Open-system propagation of a named protocol (kernel-dispatched)."""
    kern = _backend.kernel(backend)
    if kern is None:
        return propagate_lindblad(hamiltonian_fn(spec), rho0, dec, grid,
                                  rtol, atol)
    rho0 = validate_density_matrix(rho0)
    grid = _validate_grid(grid)
    _validate_tol(rtol)
    states, n_steps, n_rejected, drift = kern.propagate_lindblad(
        *_kernel_args(spec), dec.gamma_minus, dec.gamma_z,
        np.ascontiguousarray(rho0), np.ascontiguousarray(grid), rtol, atol)
    states = 0.5 * (states + states.conj().transpose(0, 2, 1))
    traj = Trajectory(times=grid, states=states, kind="density")
    traces = np.real(np.einsum("tii->t", states))
    traj.diagnostics = Diagnostics(
        n_steps=n_steps, n_rejected=n_rejected,
        max_trace_drift=max(drift, float(np.max(np.abs(traces - 1.0)))),
        min_eigenvalue=float(np.min(np.linalg.eigvalsh(states))),
        backend="compiled")
    return traj
