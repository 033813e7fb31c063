"""Compiled Runge-Kutta-Fehlberg 4(5) propagation kernel.

All Hamiltonians in this project share one algebraic form,

    H psi = (1-s) (psi - <b|psi> b) + s (1+chi) (psi - <c|psi> c) + w * psi,

with two projector directions b, c and a diagonal term w: the full
computational-basis Hamiltonian (b = |+>, c = |m>, w = 0), the reduced
two-dimensional Hamiltonian (b = |+> restricted, c = e_0), and the
noisy Hamiltonian rotated to the noise eigenbasis (w = noise
eigenvalues).  The kernel integrates i dpsi/dt = H(s(t)) psi with the
classic Fehlberg embedded pair, propagating the fifth-order solution,
restarting at schedule knots so a discontinuous ds/dt never straddles
a step.

Status codes: 0 ok, 1 step underflow (error unreachable at min_step).
"""

import math

import numpy as np
from numba import njit

__all__ = ["rkf45_propagate", "STATUS_OK", "STATUS_UNDERFLOW"]

STATUS_OK = 0
STATUS_UNDERFLOW = 1

# Fehlberg 4(5) tableau
_C2, _C3, _C4, _C5, _C6 = 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5
_A21 = 0.25
_A31, _A32 = 3.0 / 32.0, 9.0 / 32.0
_A41, _A42, _A43 = 1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0
_A51, _A52, _A53, _A54 = 439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0
_A61, _A62, _A63, _A64, _A65 = (
    -8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0,
)
# fifth-order weights (propagated) and error weights (b5 - b4)
_B1, _B3, _B4, _B5, _B6 = (
    16.0 / 135.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0,
)
_E1, _E3, _E4, _E5, _E6 = (
    1.0 / 360.0, -128.0 / 4275.0, -2197.0 / 75240.0, 1.0 / 50.0, 2.0 / 55.0,
)


@njit(cache=True, fastmath=True)
def _apply_h(s, psi, b, c, w, chip, eshift, out):
    pb = 0.0 + 0.0j
    pc = 0.0 + 0.0j
    n = psi.shape[0]
    for i in range(n):
        pb += np.conj(b[i]) * psi[i]
        pc += np.conj(c[i]) * psi[i]
    om = 1.0 - s
    sc = s * chip
    for i in range(n):
        h = (om * (psi[i] - pb * b[i]) + sc * (psi[i] - pc * c[i])
             + (w[i] - eshift) * psi[i])
        out[i] = -1j * h


@njit(cache=True)
def _s_at(t, exact, T, inv2r, alpha, s0, slope, t0):
    if exact:
        x = math.tan((2.0 * t / T - 1.0) * alpha) * inv2r + 0.5
        if x < 0.0:
            x = 0.0
        elif x > 1.0:
            x = 1.0
        return x
    return s0 + slope * (t - t0)


@njit(cache=True, fastmath=True)
def rkf45_propagate(psi0, b, c, w, chip, eshift, exact, T, N_sched,
                    knot_t, knot_s,
                    rel_tol, abs_tol, h0, hmax, hmin,
                    safety, max_growth, min_shrink):
    """Integrate from t = 0 to t = T; returns (psi, accepted, rejected, status)."""
    n = psi0.shape[0]
    psi = psi0.copy()
    k1 = np.empty(n, np.complex128)
    k2 = np.empty(n, np.complex128)
    k3 = np.empty(n, np.complex128)
    k4 = np.empty(n, np.complex128)
    k5 = np.empty(n, np.complex128)
    k6 = np.empty(n, np.complex128)
    y = np.empty(n, np.complex128)

    r = math.sqrt(N_sched - 1.0)
    alpha = math.atan(r)
    inv2r = 1.0 / (2.0 * r)

    accepted = 0
    rejected = 0
    status = STATUS_OK
    nseg = knot_t.shape[0] - 1
    h = h0

    for seg in range(nseg):
        t0 = knot_t[seg]
        t1 = knot_t[seg + 1]
        if exact:
            s0 = 0.0
            slope = 0.0
        else:
            s0 = knot_s[seg]
            slope = (knot_s[seg + 1] - knot_s[seg]) / (t1 - t0)
        t = t0
        if h > hmax:
            h = hmax
        while t < t1:
            last = False
            if t + h >= t1:
                h = t1 - t
                last = True

            s = _s_at(t, exact, T, inv2r, alpha, s0, slope, t0)
            _apply_h(s, psi, b, c, w, chip, eshift, k1)

            for i in range(n):
                y[i] = psi[i] + h * _A21 * k1[i]
            s = _s_at(t + _C2 * h, exact, T, inv2r, alpha, s0, slope, t0)
            _apply_h(s, y, b, c, w, chip, eshift, k2)

            for i in range(n):
                y[i] = psi[i] + h * (_A31 * k1[i] + _A32 * k2[i])
            s = _s_at(t + _C3 * h, exact, T, inv2r, alpha, s0, slope, t0)
            _apply_h(s, y, b, c, w, chip, eshift, k3)

            for i in range(n):
                y[i] = psi[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
            s = _s_at(t + _C4 * h, exact, T, inv2r, alpha, s0, slope, t0)
            _apply_h(s, y, b, c, w, chip, eshift, k4)

            for i in range(n):
                y[i] = psi[i] + h * (_A51 * k1[i] + _A52 * k2[i]
                                     + _A53 * k3[i] + _A54 * k4[i])
            s = _s_at(t + _C5 * h, exact, T, inv2r, alpha, s0, slope, t0)
            _apply_h(s, y, b, c, w, chip, eshift, k5)

            for i in range(n):
                y[i] = psi[i] + h * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i]
                                     + _A64 * k4[i] + _A65 * k5[i])
            s = _s_at(t + _C6 * h, exact, T, inv2r, alpha, s0, slope, t0)
            _apply_h(s, y, b, c, w, chip, eshift, k6)

            err2 = 0.0
            nrm2 = 0.0
            for i in range(n):
                e = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i]
                         + _E5 * k5[i] + _E6 * k6[i])
                err2 += e.real * e.real + e.imag * e.imag
                nrm2 += psi[i].real ** 2 + psi[i].imag ** 2
            err = math.sqrt(err2)
            tol = rel_tol * math.sqrt(nrm2)
            if tol < abs_tol:
                tol = abs_tol

            if err <= tol:
                for i in range(n):
                    psi[i] = psi[i] + h * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i]
                                           + _B5 * k5[i] + _B6 * k6[i])
                t = t1 if last else t + h
                accepted += 1
            else:
                if h <= hmin:
                    status = STATUS_UNDERFLOW
                    return psi, accepted, rejected, status
                rejected += 1

            if err > 0.0:
                fac = safety * (tol / err) ** 0.2
            else:
                fac = max_growth
            if fac > max_growth:
                fac = max_growth
            elif fac < min_shrink:
                fac = min_shrink
            h = h * fac
            if h > hmax:
                h = hmax
            if h < hmin:
                h = hmin

    return psi, accepted, rejected, status
