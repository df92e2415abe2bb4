# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled propagation core for the named protocols.

Mirrors the adaptive Dormand-Prince 5(4) loop of
:mod:`qbcharge.integrate` with the pulse families and Hamiltonians
evaluated inline, for both the 3-component pure state and the
9-component density matrix.  Keep the algorithm identical to the
Python path: the parity tests compare the two trajectory by trajectory.
"""

import numpy as np

from qbcharge.errors import DivergenceError, StiffnessError, TraceDriftError

from libc.math cimport atan2, cos, cosh, exp, fabs, hypot, isfinite
from libc.math cimport sin, sqrt, tanh

cdef double M_PI = 3.14159265358979323846

# Dormand-Prince 5(4) tableau (keep in sync with qbcharge.integrate)
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0
cdef double A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0
cdef double D1 = -12715105075.0 / 11282082432.0
cdef double D3 = 87487479700.0 / 32700410799.0
cdef double D4 = -10690763975.0 / 1880347072.0
cdef double D5 = 701980252875.0 / 199316789632.0
cdef double D6 = -1453857185.0 / 822651844.0
cdef double D7 = 69997945.0 / 29380423.0

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 5.0
cdef long MAX_STEPS = 2_000_000

cdef double PHI_FD_STEP = 1e-6     # x tau_c; must match qbcharge.pulses
cdef double TRACE_ABORT = 1e-6

DEF NMAX = 9

cdef int FAM_GAUSSIAN = 0
cdef int FAM_SINUSOID = 1
cdef int FAM_RAMP = 2
cdef int PROTO_STIRAP = 0
cdef int PROTO_STA = 1
cdef int PROTO_ROTATED = 2

cdef int STATUS_OK = 0
cdef int STATUS_STIFF = 1
cdef int STATUS_DIVERGED = 2
cdef int STATUS_TRACE = 3


cdef struct Params:
    int family
    int protocol
    int lindblad
    double omega0
    double tau_c
    double alpha
    double sigma
    double beta
    double delta
    double gm
    double gz


cdef inline void pulse_pair(const Params* p, double t,
                            double* o1, double* o2) noexcept nogil:
    cdef double u, s2, b, w, a, c
    if p.family == FAM_GAUSSIAN:
        u = t - 0.5 * p.tau_c
        s2 = p.sigma * p.sigma
        o1[0] = p.omega0 * exp(-((u - p.alpha) * (u - p.alpha)) / s2)
        o2[0] = p.omega0 * exp(-((u + p.alpha) * (u + p.alpha)) / s2)
    elif p.family == FAM_SINUSOID:
        b = p.beta
        w = M_PI / p.tau_c
        o1[0] = 0.0
        if b <= t <= p.tau_c + b:
            a = sin(w * (t - b))
            o1[0] = p.omega0 * a * a * a * a
        o2[0] = 0.0
        if -b <= t <= p.tau_c - b:
            a = sin(w * (t + b))
            o2[0] = p.omega0 * a * a * a * a
    else:
        c = cos(M_PI * t / p.tau_c)
        o1[0] = p.omega0 * (1.0 - c)
        o2[0] = p.omega0 * c


cdef inline double cd_pulse(const Params* p, double t) noexcept nogil:
    cdef double s2, amp, b, w, sa, sb, x, c
    if p.family == FAM_GAUSSIAN:
        s2 = p.sigma * p.sigma
        amp = 2.0 * p.alpha / s2
        return amp / cosh(4.0 * p.alpha * (t - 0.5 * p.tau_c) / s2)
    elif p.family == FAM_SINUSOID:
        b = p.beta
        if not (b <= t <= p.tau_c - b):
            return 0.0
        w = M_PI / p.tau_c
        sa = sin(w * (t - b))
        sb = sin(w * (t + b))
        return (4.0 * w * sin(2.0 * w * b) * sa * sa * sa * sb * sb * sb
                / (sa ** 8 + sb ** 8))
    else:
        x = M_PI * t / p.tau_c
        c = cos(x)
        return (M_PI / p.tau_c) * sin(x) / (2.0 * c * c - 2.0 * c + 1.0)


cdef inline double phi_angle(const Params* p, double t) noexcept nogil:
    cdef double o1, o2
    pulse_pair(p, t, &o1, &o2)
    return atan2(cd_pulse(p, t), o1)


cdef inline double phi_dot(const Params* p, double t) noexcept nogil:
    cdef double s2, u, o1, do1, amp, x, oa, doa, den, h
    if p.family == FAM_GAUSSIAN:
        s2 = p.sigma * p.sigma
        u = t - 0.5 * p.tau_c
        o1 = p.omega0 * exp(-((u - p.alpha) * (u - p.alpha)) / s2)
        do1 = -2.0 * (u - p.alpha) / s2 * o1
        amp = 2.0 * p.alpha / s2
        x = 4.0 * p.alpha * u / s2
        oa = amp / cosh(x)
        doa = -amp * (4.0 * p.alpha / s2) * tanh(x) / cosh(x)
        den = o1 * o1 + oa * oa
        return (doa * o1 - oa * do1) / den
    h = PHI_FD_STEP * p.tau_c
    return (phi_angle(p, t + h) - phi_angle(p, t - h)) / (2.0 * h)


cdef inline void build_h(const Params* p, double t,
                         double complex h[3][3]) noexcept nogil:
    """Dense Hamiltonian for the protocol at time t."""
    cdef double o1, o2, oa
    pulse_pair(p, t, &o1, &o2)
    h[0][0] = 0.0
    h[1][1] = 0.0
    h[2][2] = 0.0
    h[0][2] = 0.0
    h[2][0] = 0.0
    if p.protocol == PROTO_ROTATED:
        oa = cd_pulse(p, t)
        o1 = hypot(o1, oa)
        o2 = o2 - phi_dot(p, t)
    else:
        h[1][1] = p.delta
        if p.protocol == PROTO_STA:
            oa = cd_pulse(p, t)
            h[0][2] = 1j * oa
            h[2][0] = -1j * oa
    h[0][1] = o1
    h[1][0] = o1
    h[1][2] = o2
    h[2][1] = o2


cdef inline void rhs(const Params* p, double t, const double complex* y,
                     double complex* out) noexcept nogil:
    cdef double complex h[3][3]
    cdef double complex c
    cdef double gm = p.gm, gz = p.gz
    cdef int i, j, k
    build_h(p, t, h)
    if not p.lindblad:
        for i in range(3):
            c = 0.0
            for k in range(3):
                c = c + h[i][k] * y[k]
            out[i] = -1j * c
        return
    # commutator on the row-major 3x3 state
    for i in range(3):
        for j in range(3):
            c = 0.0
            for k in range(3):
                c = c + h[i][k] * y[3 * k + j] - y[3 * i + k] * h[k][j]
            out[3 * i + j] = -1j * c
    if gm != 0.0:
        out[0] += gm * y[4]
        out[4] += gm * (y[8] - y[4])
        out[8] -= gm * y[8]
        out[1] -= 0.5 * gm * y[1]
        out[3] -= 0.5 * gm * y[3]
        out[2] -= 0.5 * gm * y[2]
        out[6] -= 0.5 * gm * y[6]
        out[5] -= gm * y[5]
        out[7] -= gm * y[7]
    if gz != 0.0:
        out[1] -= 2.5 * gz * y[1]
        out[3] -= 2.5 * gz * y[3]
        out[2] -= gz * y[2]
        out[6] -= gz * y[6]
        out[5] -= 2.5 * gz * y[5]
        out[7] -= 2.5 * gz * y[7]


cdef inline double abs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double drift_of(const Params* p, const double complex* y,
                            int n) noexcept nogil:
    """|norm - 1| of a pure state, or |trace - 1| of a density matrix."""
    cdef double s
    if p.lindblad:
        s = y[0].real + y[4].real + y[8].real
        return fabs(s - 1.0)
    s = sqrt(abs2(y[0]) + abs2(y[1]) + abs2(y[2]))
    return fabs(s - 1.0)


cdef double initial_step(const Params* p, int n, double t0,
                         const double complex* y0, const double complex* f0,
                         double rtol, double atol, double span) noexcept nogil:
    cdef double complex y1[NMAX]
    cdef double complex f1[NMAX]
    cdef double sc, d0 = 0.0, d1 = 0.0, d2 = 0.0, h0, h1, m
    cdef int i
    for i in range(n):
        sc = atol + rtol * sqrt(abs2(y0[i]))
        d0 += abs2(y0[i]) / (sc * sc)
        d1 += abs2(f0[i]) / (sc * sc)
    d0 = sqrt(d0 / n)
    d1 = sqrt(d1 / n)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    if h0 > span:
        h0 = span
    for i in range(n):
        y1[i] = y0[i] + h0 * f0[i]
    rhs(p, t0 + h0, y1, f1)
    for i in range(n):
        sc = atol + rtol * sqrt(abs2(y0[i]))
        d2 += abs2(f1[i] - f0[i]) / (sc * sc)
    d2 = sqrt(d2 / n) / h0
    m = d1 if d1 > d2 else d2
    if m <= 1e-15:
        h1 = h0 * 1e-3
        if h1 < 1e-6:
            h1 = 1e-6
    else:
        h1 = (0.01 / m) ** 0.2
    h0 = 100.0 * h0
    if h1 < h0:
        h0 = h1
    if span < h0:
        h0 = span
    return h0


cdef int integrate(const Params* p, int n, double complex* y,
                   const double[::1] t_eval, double complex[:, ::1] out,
                   double rtol, double atol, double* max_drift,
                   long* n_steps, long* n_rejected) noexcept nogil:
    cdef double complex k1[NMAX]
    cdef double complex k2[NMAX]
    cdef double complex k3[NMAX]
    cdef double complex k4[NMAX]
    cdef double complex k5[NMAX]
    cdef double complex k6[NMAX]
    cdef double complex k7[NMAX]
    cdef double complex ytmp[NMAX]
    cdef double complex ynew[NMAX]
    cdef double complex ydiff[NMAX]
    cdef double complex bspl[NMAX]
    cdef double complex rc4[NMAX]
    cdef double complex rc5[NMAX]
    cdef double complex sample
    cdef double complex zc
    cdef double t, t_new, t_end, span, h, sc, err, m1, m2, factor, max_factor
    cdef double th, th1, d
    cdef Py_ssize_t n_eval = t_eval.shape[0]
    cdef Py_ssize_t next_i = 1
    cdef int i, j, bad_steps = 0, clipped
    cdef double sample_drift

    t = t_eval[0]
    t_end = t_eval[n_eval - 1]
    for i in range(n):
        out[0, i] = y[i]
    max_drift[0] = drift_of(p, y, n)
    if n_eval == 1 or t_end == t:
        return STATUS_OK

    span = t_end - t
    rhs(p, t, y, k1)
    h = initial_step(p, n, t, y, k1, rtol, atol, span)
    max_factor = MAX_FACTOR

    while t < t_end:
        if n_steps[0] + n_rejected[0] >= MAX_STEPS:
            return STATUS_STIFF
        if h < 1e-14 * (fabs(t) if fabs(t) > span else span):
            return STATUS_STIFF
        clipped = t + h >= t_end
        if clipped:
            h = t_end - t

        for i in range(n):
            ytmp[i] = y[i] + h * (A21 * k1[i])
        rhs(p, t + C2 * h, ytmp, k2)
        for i in range(n):
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
        rhs(p, t + C3 * h, ytmp, k3)
        for i in range(n):
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        rhs(p, t + C4 * h, ytmp, k4)
        for i in range(n):
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i]
                                  + A54 * k4[i])
        rhs(p, t + C5 * h, ytmp, k5)
        for i in range(n):
            ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                  + A64 * k4[i] + A65 * k5[i])
        rhs(p, t + h, ytmp, k6)
        for i in range(n):
            ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                                  + B5 * k5[i] + B6 * k6[i])
        rhs(p, t + h, ynew, k7)

        err = 0.0
        for i in range(n):
            zc = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                      + E6 * k6[i] + E7 * k7[i])
            m1 = sqrt(abs2(y[i]))
            m2 = sqrt(abs2(ynew[i]))
            sc = atol + rtol * (m1 if m1 > m2 else m2)
            err += abs2(zc) / (sc * sc)
        err = sqrt(err / n)

        if not isfinite(err):
            bad_steps += 1
            if bad_steps > 50:
                return STATUS_DIVERGED
            n_rejected[0] += 1
            h *= 0.1
            max_factor = 1.0
            continue
        bad_steps = 0

        if err > 1.0:
            n_rejected[0] += 1
            factor = SAFETY * err ** -0.2
            if factor < MIN_FACTOR:
                factor = MIN_FACTOR
            h *= factor
            max_factor = 1.0
            continue

        t_new = t_end if clipped else t + h
        if next_i < n_eval and t_eval[next_i] <= t_new:
            for i in range(n):
                ydiff[i] = ynew[i] - y[i]
                bspl[i] = h * k1[i] - ydiff[i]
                rc4[i] = ydiff[i] - h * k7[i] - bspl[i]
                rc5[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i]
                              + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
            while next_i < n_eval and t_eval[next_i] <= t_new:
                th = (t_eval[next_i] - t) / h
                th1 = 1.0 - th
                for i in range(n):
                    sample = y[i] + th * (ydiff[i] + th1 * (bspl[i]
                                          + th * (rc4[i] + th1 * rc5[i])))
                    out[next_i, i] = sample
                    ytmp[i] = sample
                sample_drift = drift_of(p, ytmp, n)
                if sample_drift > max_drift[0]:
                    max_drift[0] = sample_drift
                next_i += 1

        t = t_new
        for i in range(n):
            y[i] = ynew[i]
        if p.lindblad:
            for i in range(3):
                for j in range(i + 1, 3):
                    zc = 0.5 * (y[3 * i + j] + (y[3 * j + i]).conjugate())
                    y[3 * i + j] = zc
                    y[3 * j + i] = zc.conjugate()
                y[4 * i] = y[4 * i].real + 0.0j
        d = drift_of(p, y, n)
        if d > max_drift[0]:
            max_drift[0] = d
        if p.lindblad and d > TRACE_ABORT:
            return STATUS_TRACE
        for i in range(n):
            k1[i] = k7[i]
        n_steps[0] += 1
        if err == 0.0:
            factor = max_factor
        else:
            factor = SAFETY * err ** -0.2
            if factor < MIN_FACTOR:
                factor = MIN_FACTOR
            if factor > max_factor:
                factor = max_factor
        h *= factor
        max_factor = MAX_FACTOR

    return STATUS_OK


cdef _raise_status(int status, double t_end):
    if status == STATUS_STIFF:
        raise StiffnessError(
            f"step size underflow or step budget exhausted before t = {t_end!r}")
    if status == STATUS_DIVERGED:
        raise DivergenceError(f"state became non-finite before t = {t_end!r}")
    if status == STATUS_TRACE:
        raise TraceDriftError(f"trace drift beyond {TRACE_ABORT}")


def propagate_pure(int family, int protocol, double omega0, double tau_c,
                   double alpha, double sigma, double beta, double delta,
                   double complex[::1] psi0, double[::1] t_eval,
                   double rtol, double atol):
    """Closed-system protocol run; returns (states, n_steps, n_rejected, drift)."""
    cdef Params p
    p.family = family
    p.protocol = protocol
    p.lindblad = 0
    p.omega0 = omega0
    p.tau_c = tau_c
    p.alpha = alpha
    p.sigma = sigma
    p.beta = beta
    p.delta = delta
    p.gm = 0.0
    p.gz = 0.0
    cdef double complex y[NMAX]
    cdef int i
    for i in range(3):
        y[i] = psi0[i]
    out_arr = np.empty((t_eval.shape[0], 3), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double drift = 0.0
    cdef long n_steps = 0, n_rejected = 0
    cdef int status
    with nogil:
        status = integrate(&p, 3, y, t_eval, out, rtol, atol,
                           &drift, &n_steps, &n_rejected)
    _raise_status(status, t_eval[t_eval.shape[0] - 1])
    return out_arr, n_steps, n_rejected, drift


def propagate_lindblad(int family, int protocol, double omega0, double tau_c,
                       double alpha, double sigma, double beta, double delta,
                       double gamma_minus, double gamma_z,
                       double complex[:, ::1] rho0, double[::1] t_eval,
                       double rtol, double atol):
    """Open-system protocol run; returns (states, n_steps, n_rejected, drift)."""
    cdef Params p
    p.family = family
    p.protocol = protocol
    p.lindblad = 1
    p.omega0 = omega0
    p.tau_c = tau_c
    p.alpha = alpha
    p.sigma = sigma
    p.beta = beta
    p.delta = delta
    p.gm = gamma_minus
    p.gz = gamma_z
    cdef double complex y[NMAX]
    cdef int i, j
    for i in range(3):
        for j in range(3):
            y[3 * i + j] = rho0[i, j]
    out_arr = np.empty((t_eval.shape[0], 9), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double drift = 0.0
    cdef long n_steps = 0, n_rejected = 0
    cdef int status
    with nogil:
        status = integrate(&p, 9, y, t_eval, out, rtol, atol,
                           &drift, &n_steps, &n_rejected)
    _raise_status(status, t_eval[t_eval.shape[0] - 1])
    return out_arr.reshape(t_eval.shape[0], 3, 3), n_steps, n_rejected, drift
