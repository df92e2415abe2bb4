"""Counter-diabatic Hamiltonian by numerical eigendecomposition.

For an arbitrary time-dependent Hermitian 3x3 matrix this module
evaluates

    H_cd = i * sum_j ( |d/dt v_j><v_j| - <v_j|d/dt v_j> |v_j><v_j| )

over the instantaneous eigenbasis ``{v_j}``, with the time derivative
taken by a gauge-aligned central difference.  It is deliberately
independent of the closed-form assistant pulses and serves as their
oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, GaugeTrackingError

# default central-difference step, in units of the window length
DEFAULT_DT_FRACTION = 1e-5

_MIN_PAIR_OVERLAP = 0.5


@dataclass
class GaugeFixedBasis:
    """Eigendecomposition with a deterministic phase convention.

    ``eigenvalues`` ascend; ``vectors[:, j]`` is the j-th orthonormal
    eigenvector with its largest-magnitude component made real and
    positive.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray


def gauge_fixed_eigh(matrix: np.ndarray) -> GaugeFixedBasis:
    """Hermitian eigendecomposition with phase-fixed eigenvectors."""
    vals, vecs = np.linalg.eigh(matrix)
    vecs = vecs.copy()
    for j in range(vecs.shape[1]):
        k = int(np.argmax(np.abs(vecs[:, j])))
        pivot = vecs[k, j]
        mag = abs(pivot)
        if mag > 0.0:
            vecs[:, j] *= pivot.conjugate() / mag
    return GaugeFixedBasis(vals, vecs)


def gauge_align(reference: GaugeFixedBasis,
                candidate: GaugeFixedBasis) -> GaugeFixedBasis:
    """Match ``candidate`` vectors to ``reference`` order and phase.

    Columns are paired by maximum overlap, then each is multiplied by a
    unit phase so its overlap with the paired reference vector is real
    and positive.  Raises :class:`GaugeTrackingError` when any overlap
    magnitude falls below 0.5 (crossing, or differencing step too
    coarse) or when the pairing is not one-to-one.
    """
    overlaps = reference.vectors.conj().T @ candidate.vectors
    n = overlaps.shape[0]
    order = np.empty(n, dtype=int)
    for j in range(n):
        i = int(np.argmax(np.abs(overlaps[:, j])))
        mag = abs(overlaps[i, j])
        if mag < _MIN_PAIR_OVERLAP:
            raise GaugeTrackingError(
                f"eigenvector overlap {mag:.3g} below {_MIN_PAIR_OVERLAP} "
                f"for candidate column {j}")
        order[j] = i
    if len(set(order.tolist())) != n:
        raise GaugeTrackingError("maximum-overlap pairing is not one-to-one")

    vals = np.empty_like(candidate.eigenvalues)
    vecs = np.empty_like(candidate.vectors)
    for j in range(n):
        i = order[j]
        z = overlaps[i, j]
        vals[i] = candidate.eigenvalues[j]
        vecs[:, i] = candidate.vectors[:, j] * (z.conjugate() / abs(z))
    return GaugeFixedBasis(vals, vecs)


def compute_hcd_numeric(hfun, t: float, dt: float | None = None,
                        degeneracy_tol: float | None = None) -> np.ndarray:
    """Counter-diabatic matrix of ``hfun`` at time ``t``.

    Parameters
    ----------
    hfun : callable
        ``t -> Hermitian ndarray``.
    t : float
        Evaluation time.
    dt : float, optional
        Central-difference step.  Truncation error is O(dt^2).
    degeneracy_tol : float, optional
        Minimum admissible gap between adjacent eigenvalues; defaults
        to ``1e-8 * max(1, spectral radius)``.

    Returns
    -------
    ndarray
        3x3 complex matrix, exactly Hermitian (symmetrized).
    """
    h0 = np.asarray(hfun(t), dtype=complex)
    if dt is None:
        dt = DEFAULT_DT_FRACTION * max(abs(t), 1.0)
    if not (dt > 0.0):
        raise ValueError(f"dt must be > 0, got {dt}")

    base = gauge_fixed_eigh(h0)
    scale = max(1.0, float(np.max(np.abs(base.eigenvalues))))
    if degeneracy_tol is None:
        degeneracy_tol = 1e-8 * scale
    gaps = np.diff(base.eigenvalues)
    if np.min(gaps) < degeneracy_tol:
        raise DegeneracyError(
            f"spectrum degenerate at t = {t!r}: minimum gap "
            f"{float(np.min(gaps)):.3g} below {degeneracy_tol:.3g}")

    minus = gauge_align(base, gauge_fixed_eigh(np.asarray(hfun(t - dt), complex)))
    plus = gauge_align(base, gauge_fixed_eigh(np.asarray(hfun(t + dt), complex)))

    dvecs = (plus.vectors - minus.vectors) / (2.0 * dt)
    # <v_j | dv_j> projector correction, one scalar per column
    diag = np.einsum("ij,ij->j", base.vectors.conj(), dvecs)
    hcd = 1j * (dvecs @ base.vectors.conj().T
                - base.vectors @ (diag[:, None] * base.vectors.conj().T))
    return 0.5 * (hcd + hcd.conj().T)
