"""Adaptive Dormand-Prince 5(4) integration with continuous output.

Self-contained rather than delegating to ``scipy.integrate`` because
the open-system stepper needs a hook after every accepted step (state
symmetrization, trace watchdog) and because the compiled kernel mirrors
this exact loop; keep the two implementations in sync.

The dense output uses the standard fourth-order continuous extension of
the DOPRI5 pair, so sample points can be requested on an arbitrary grid
without constraining the step sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, StiffnessError

# Dormand-Prince 5(4) tableau
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                      64448.0 / 6561.0, -212.0 / 729.0)
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                           49.0 / 176.0, -5103.0 / 18656.0)
B1, B3, B4, B5, B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                      -2187.0 / 6784.0, 11.0 / 84.0)
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)
# continuous-extension weights
D1 = -12715105075.0 / 11282082432.0
D3 = 87487479700.0 / 32700410799.0
D4 = -10690763975.0 / 1880347072.0
D5 = 701980252875.0 / 199316789632.0
D6 = -1453857185.0 / 822651844.0
D7 = 69997945.0 / 29380423.0

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
MAX_STEPS = 2_000_000


@dataclass
class StepStats:
    """Bookkeeping from one integration."""

    n_steps: int = 0
    n_rejected: int = 0
    n_rhs: int = 0


def _error_norm(err, y0, y1, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(f, t0, y0, f0, rtol, atol, span):
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean(np.abs(y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean(np.abs(f0 / scale) ** 2)))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = f(t0 + h0, y0 + h0 * f0)
    d2 = float(np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, span)


def dopri5(f, y0, t_eval, rtol: float = 1e-9, atol: float = 1e-12,
           post_accept=None):
    """Integrate ``dy/dt = f(t, y)`` and sample at ``t_eval``.

    Parameters
    ----------
    f : callable
        ``(t, y) -> dy/dt`` on complex vectors.
    y0 : array_like
        Initial state at ``t_eval[0]``.
    t_eval : array_like
        Strictly increasing sample times; integration runs over
        ``[t_eval[0], t_eval[-1]]``.
    rtol, atol : float
        Relative and absolute local error tolerances.
    post_accept : callable, optional
        ``(t, y) -> y`` applied after every accepted step.  Meant for
        cheap projections (e.g. re-symmetrization); the stage reuse
        assumes it changes the state at rounding level only.

    Returns
    -------
    (ndarray, StepStats)
        Array of shape ``(len(t_eval), len(y0))`` with the sampled
        states, and step statistics.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval.ndim != 1 or t_eval.size < 1:
        raise ValueError("t_eval must be a non-empty 1-d array")
    if np.any(np.diff(t_eval) <= 0.0):
        raise ValueError("t_eval must be strictly increasing")

    y = np.array(y0, dtype=complex).ravel()
    out = np.empty((t_eval.size, y.size), dtype=complex)
    out[0] = y
    stats = StepStats()
    t = float(t_eval[0])
    t_end = float(t_eval[-1])
    if t_eval.size == 1:
        return out, stats

    k1 = f(t, y)
    stats.n_rhs += 1
    span = t_end - t
    h = _initial_step(f, t, y, k1, rtol, atol, span)
    stats.n_rhs += 1
    next_i = 1
    max_factor = MAX_FACTOR
    bad_steps = 0

    while t < t_end:
        if stats.n_steps + stats.n_rejected >= MAX_STEPS:
            raise StiffnessError(
                f"step budget {MAX_STEPS} exhausted at t = {t!r}")
        if h < 1e-14 * max(abs(t), span):
            raise StiffnessError(f"step size underflow at t = {t!r}")
        clipped = t + h >= t_end
        if clipped:
            h = t_end - t

        k2 = f(t + C2 * h, y + h * (A21 * k1))
        k3 = f(t + C3 * h, y + h * (A31 * k1 + A32 * k2))
        k4 = f(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))
        k5 = f(t + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
        k6 = f(t + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3
                               + A64 * k4 + A65 * k5))
        y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        k7 = f(t + h, y_new)
        stats.n_rhs += 6
        err_vec = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5
                       + E6 * k6 + E7 * k7)
        err = _error_norm(err_vec, y, y_new, rtol, atol)

        if not np.isfinite(err):
            bad_steps += 1
            if bad_steps > 50:
                raise DivergenceError(
                    f"state became non-finite near t = {t!r}")
            stats.n_rejected += 1
            h *= 0.1
            max_factor = 1.0
            continue
        bad_steps = 0

        if err > 1.0:
            stats.n_rejected += 1
            h *= max(MIN_FACTOR, SAFETY * err ** -0.2)
            max_factor = 1.0
            continue

        # accepted: fill requested samples inside (t, t_new]
        t_new = t_end if clipped else t + h
        if next_i < t_eval.size and t_eval[next_i] <= t_new:
            ydiff = y_new - y
            bspl = h * k1 - ydiff
            rc4 = ydiff - h * k7 - bspl
            rc5 = h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5
                       + D6 * k6 + D7 * k7)
            while next_i < t_eval.size and t_eval[next_i] <= t_new:
                th = (t_eval[next_i] - t) / h
                th1 = 1.0 - th
                out[next_i] = y + th * (ydiff + th1 * (bspl + th * (rc4 + th1 * rc5)))
                next_i += 1

        t = t_new
        y = y_new
        if post_accept is not None:
            y = post_accept(t, y)
        k1 = k7
        stats.n_steps += 1
        factor = max_factor if err == 0.0 else min(
            max_factor, max(MIN_FACTOR, SAFETY * err ** -0.2))
        h *= factor
        max_factor = MAX_FACTOR

    return out, stats


def rk4_fixed(f, y0, t_eval, substeps: int = 10):
    """Classical fixed-step RK4 over the same sample grid.

    Cross-check mode only; ``substeps`` uniform RK4 steps are taken
    between consecutive sample points.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    y = np.array(y0, dtype=complex).ravel()
    out = np.empty((t_eval.size, y.size), dtype=complex)
    out[0] = y
    for i in range(t_eval.size - 1):
        t = t_eval[i]
        h = (t_eval[i + 1] - t) / substeps
        for _ in range(substeps):
            k1 = f(t, y)
            k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = f(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        out[i + 1] = y
    return out
