"""Driving-pulse families and their counter-diabatic companions.

Three pump/Stokes shapes are provided (``gaussian``, ``sinusoid``,
``ramp``) together with the closed-form assistant pulse that cancels
non-adiabatic transitions, the dark-state mixing angle, and the
frame-rotated ("modified") pulse pair used when the direct 1-3
transition is forbidden.

Conventions
-----------
* ``omega0`` is the base pulse strength and sets the frequency unit;
  times are in units of ``1/omega0``.
* All shapes are total functions of time: evaluating outside the
  charging window ``[0, tau_c]`` is allowed and returns whatever the
  closed form gives.  The sinusoid envelopes are single lobes --- the
  pump is zero before it switches on at ``t = beta`` and the Stokes
  pulse is zero after it switches off at ``t = tau_c - beta`` --- so
  the dark state starts exactly on the ground level and ends exactly
  on the top level for that family.
* The ramp Stokes pulse goes negative for ``t > tau_c/2``; the mixing
  angle uses a continuous two-argument arctangent so the dark state
  stays continuous there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegeneracyError

FAMILIES = ("gaussian", "sinusoid", "ramp")

# central-difference step for the numerical frame-angle derivative,
# in units of tau_c
PHI_FD_STEP = 1e-6


@dataclass(frozen=True)
class PulseSpec:
    """Shape parameters of one pump/Stokes pulse pair.

    Parameters
    ----------
    family : {"gaussian", "sinusoid", "ramp"}
    omega0 : float
        Base pulse strength (> 0); the frequency unit.
    tau_c : float
        Total charging time (> 0), in units of ``1/omega0``.
    alpha : float, optional
        Gaussian peak offset from mid-window.  Defaults to ``tau_c/10``.
    sigma : float, optional
        Gaussian width (> 0).  Defaults to ``tau_c/6``.
    beta : float, optional
        Sinusoid lobe offset, in ``[0, tau_c/2)``.  Defaults to
        ``tau_c/10``.
    """

    family: str
    omega0: float = 1.0
    tau_c: float = 1.0
    alpha: float | None = None
    sigma: float | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(
                f"family must be one of {FAMILIES}, got {self.family!r}")
        if not (self.omega0 > 0.0):
            raise ValueError(f"omega0 must be > 0, got {self.omega0}")
        if not (self.tau_c > 0.0):
            raise ValueError(f"tau_c must be > 0, got {self.tau_c}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", self.tau_c / 10.0)
        if self.sigma is None:
            object.__setattr__(self, "sigma", self.tau_c / 6.0)
        if self.beta is None:
            object.__setattr__(self, "beta", self.tau_c / 10.0)
        if not (self.sigma > 0.0):
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.family == "sinusoid" and not (0.0 <= self.beta < self.tau_c / 2.0):
            raise ValueError(
                f"beta must lie in [0, tau_c/2) for the sinusoid family, "
                f"got {self.beta}")


def eval_pair(spec: PulseSpec, t: float) -> tuple[float, float]:
    """Pump and Stokes strengths ``(omega1, omega2)`` at time ``t``."""
    w0, tc = spec.omega0, spec.tau_c
    if spec.family == "gaussian":
        u = t - 0.5 * tc
        s2 = spec.sigma * spec.sigma
        o1 = w0 * math.exp(-((u - spec.alpha) ** 2) / s2)
        o2 = w0 * math.exp(-((u + spec.alpha) ** 2) / s2)
        return o1, o2
    if spec.family == "sinusoid":
        b = spec.beta
        o1 = 0.0
        if b <= t <= tc + b:
            o1 = w0 * math.sin(math.pi * (t - b) / tc) ** 4
        o2 = 0.0
        if -b <= t <= tc - b:
            o2 = w0 * math.sin(math.pi * (t + b) / tc) ** 4
        return o1, o2
    # ramp
    c = math.cos(math.pi * t / tc)
    return w0 * (1.0 - c), w0 * c


def eval_pair_derivatives(spec: PulseSpec, t: float) -> tuple[float, float]:
    """Exact time derivatives ``(d omega1/dt, d omega2/dt)`` at ``t``."""
    w0, tc = spec.omega0, spec.tau_c
    if spec.family == "gaussian":
        u = t - 0.5 * tc
        s2 = spec.sigma * spec.sigma
        o1 = w0 * math.exp(-((u - spec.alpha) ** 2) / s2)
        o2 = w0 * math.exp(-((u + spec.alpha) ** 2) / s2)
        return -2.0 * (u - spec.alpha) / s2 * o1, -2.0 * (u + spec.alpha) / s2 * o2
    if spec.family == "sinusoid":
        b = spec.beta
        w = math.pi / tc
        do1 = 0.0
        if b <= t <= tc + b:
            a = w * (t - b)
            do1 = 4.0 * w0 * w * math.sin(a) ** 3 * math.cos(a)
        do2 = 0.0
        if -b <= t <= tc - b:
            a = w * (t + b)
            do2 = 4.0 * w0 * w * math.sin(a) ** 3 * math.cos(a)
        return do1, do2
    # ramp
    w = math.pi / tc
    s = math.sin(w * t)
    return w0 * w * s, -w0 * w * s


def mixing_angle(omega1: float, omega2: float) -> float:
    """Dark-state angle ``theta`` in ``[0, pi)`` with ``tan(theta) = omega1/omega2``.

    Continuous branch: ``theta = 0`` when only the Stokes pulse is on,
    ``pi/2`` when only the pump is on, and values in ``(pi/2, pi)``
    when the Stokes strength is negative (ramp family, late times).
    """
    if omega1 == 0.0 and omega2 == 0.0:
        raise DegeneracyError("mixing angle undefined: omega1 = omega2 = 0")
    theta = math.atan2(omega1, omega2)
    if theta < 0.0:
        theta += math.pi
    if theta >= math.pi:  # atan2(0, -x) == pi; same dark state as theta = 0
        theta -= math.pi
    return theta


def eval_cd_from_derivatives(omega1: float, omega2: float,
                             domega1: float, domega2: float) -> float:
    """Assistant strength ``(do1*o2 - o1*do2) / (o1^2 + o2^2)``.

    This is the rate of change of the mixing angle; it vanishes for
    constant pulses.
    """
    norm2 = omega1 * omega1 + omega2 * omega2
    if norm2 == 0.0:
        raise DegeneracyError("CD pulse undefined: omega1 = omega2 = 0")
    return (domega1 * omega2 - omega1 * domega2) / norm2


def eval_cd_analytic(spec: PulseSpec, t: float) -> float:
    """Closed-form assistant (counter-diabatic) strength at ``t``.

    Gaussian pair: ``(2*alpha/sigma^2) * sech(4*alpha*(t - tau_c/2)/sigma^2)``.
    Sinusoid and ramp pairs use their own closed forms; the sinusoid
    value is zero outside the lobe overlap ``[beta, tau_c - beta]``,
    where the mixing angle is constant.
    """
    tc = spec.tau_c
    if spec.family == "gaussian":
        s2 = spec.sigma * spec.sigma
        amp = 2.0 * spec.alpha / s2
        return amp / math.cosh(4.0 * spec.alpha * (t - 0.5 * tc) / s2)
    if spec.family == "sinusoid":
        b = spec.beta
        if not (b <= t <= tc - b):
            return 0.0
        w = math.pi / tc
        sa = math.sin(w * (t - b))
        sb = math.sin(w * (t + b))
        num = 4.0 * w * math.sin(2.0 * w * b) * sa ** 3 * sb ** 3
        den = sa ** 8 + sb ** 8
        return num / den
    # ramp
    x = math.pi * t / tc
    c = math.cos(x)
    return (math.pi / tc) * math.sin(x) / (2.0 * c * c - 2.0 * c + 1.0)


def max_cd_amplitude(spec: PulseSpec, grid_points: int = 4001) -> float:
    """Supremum of ``|omega_a|`` over the charging window.

    The Gaussian value is analytic: ``2*|alpha|/sigma^2``, attained at
    mid-window.  The other families are located on a dense grid and
    refined by golden-section search.
    """
    if spec.family == "gaussian":
        return 2.0 * abs(spec.alpha) / (spec.sigma * spec.sigma)
    if spec.family == "sinusoid":
        lo, hi = spec.beta, spec.tau_c - spec.beta
        if hi <= lo:
            return 0.0
    else:
        lo, hi = 0.0, spec.tau_c

    def value(t):
        return abs(eval_cd_analytic(spec, t))

    step = (hi - lo) / (grid_points - 1)
    best_i, best_v = 0, -1.0
    for i in range(grid_points):
        v = value(lo + i * step)
        if v > best_v:
            best_i, best_v = i, v
    a = lo + max(best_i - 1, 0) * step
    b = lo + min(best_i + 1, grid_points - 1) * step
    return _golden_max(value, a, b)


def _golden_max(fn, a: float, b: float, iters: int = 80) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = fn(x2)
    return max(f1, f2)


def phi_angle(spec: PulseSpec, t: float) -> float:
    """Frame-rotation angle ``phi = atan2(omega_a, omega1)`` at ``t``."""
    o1, _ = eval_pair(spec, t)
    oa = eval_cd_analytic(spec, t)
    if o1 == 0.0 and oa == 0.0:
        raise DegeneracyError(
            f"frame angle undefined at t = {t!r}: omega1 = omega_a = 0")
    return math.atan2(oa, o1)


def phi_dot(spec: PulseSpec, t: float) -> float:
    """Time derivative of the frame-rotation angle.

    Analytic for the Gaussian family; central finite difference with
    step ``PHI_FD_STEP * tau_c`` for the others (no closed form kept).
    """
    if spec.family == "gaussian":
        tc = spec.tau_c
        s2 = spec.sigma * spec.sigma
        u = t - 0.5 * tc
        o1 = spec.omega0 * math.exp(-((u - spec.alpha) ** 2) / s2)
        do1 = -2.0 * (u - spec.alpha) / s2 * o1
        amp = 2.0 * spec.alpha / s2
        x = 4.0 * spec.alpha * u / s2
        oa = amp / math.cosh(x)
        doa = -amp * (4.0 * spec.alpha / s2) * math.tanh(x) / math.cosh(x)
        den = o1 * o1 + oa * oa
        if den == 0.0:
            raise DegeneracyError(
                f"frame angle undefined at t = {t!r}: omega1 = omega_a = 0")
        return (doa * o1 - oa * do1) / den
    h = PHI_FD_STEP * spec.tau_c
    return (phi_angle(spec, t + h) - phi_angle(spec, t - h)) / (2.0 * h)


def modified_pulses(spec: PulseSpec, t: float) -> tuple[float, float, float]:
    """Frame-rotated pulse pair ``(omega1_tilde, omega2_tilde, phi)``.

    The rotation angle ``phi`` is chosen so the rotated Hamiltonian has
    no 1-3 element: ``omega1_tilde = hypot(omega1, omega_a)`` and
    ``omega2_tilde = omega2 - dphi/dt``.
    """
    o1, o2 = eval_pair(spec, t)
    oa = eval_cd_analytic(spec, t)
    if o1 == 0.0 and oa == 0.0:
        raise DegeneracyError(
            f"frame angle undefined at t = {t!r}: omega1 = omega_a = 0")
    phi = math.atan2(oa, o1)
    return math.hypot(o1, oa), o2 - phi_dot(spec, t), phi
