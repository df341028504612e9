"""Compiled RK45 (Dormand-Prince) kernels for the determinant shooting.

Two second-order linear problems are integrated:

* the direct shot  psi'' = (W(t) - lam) psi, carried in log-rescaled form
  because psi grows like exp(omega*T); the kernel also counts interior sign
  changes (Sturm oscillation) and tracks the running maximum of log|psi| so
  callers can detect catastrophic terminal cancellation;
* the gauged shot for near-zero modes: with psi = y(t)*chi and y a nodeless
  (or sector-nodeless) solution of the lam = 0 equation, chi' = q*exp(-u),
  q' = -lam*exp(u)*chi where u(t) = log y(t)^2.  At lam = 0 the momentum q
  is exactly conserved, so eigenvalues as small as exp(-40) are resolved
  without any terminal cancellation.

Both W(t) and u(t) enter as cubic splines on (possibly non-uniform)
breakpoints, with linear extension beyond the ends for u and clamped-edge
evaluation for W.
"""

import numpy as np
from numba import njit

_MAX_STEPS = 4_000_000
_RESCALE = 1e120

__all__ = ["shoot_direct", "shoot_gauged"]


@njit(cache=True, fastmath=False)
def _pp_eval(bp, coef, t):
    n = bp.shape[0] - 1
    idx = np.searchsorted(bp, t) - 1
    if idx < 0:
        idx = 0
    elif idx > n - 1:
        idx = n - 1
    dt = t - bp[idx]
    return ((coef[0, idx] * dt + coef[1, idx]) * dt + coef[2, idx]) * dt + coef[3, idx]


@njit(cache=True, fastmath=False)
def shoot_direct(bp, coef, lam, t0, t1, y0, dy0, rtol):
    """Integrate psi'' = (W - lam) psi from t0 to t1.

    Returns (psi_m, dpsi_m, log_scale, max_logpsi, n_sign_changes, status):
    the terminal values are psi_m * exp(log_scale) etc.; status 0 = ok,
    1 = step underflow, 2 = step budget exhausted.
    """
    y = y0
    dy = dy0
    ls = 0.0
    maxlog = -1.0e308
    ncross = 0
    t = t0
    h = (t1 - t0) * 1e-6
    if h <= 0.0:
        h = 1e-6
    hmax = (t1 - t0) / 16.0
    atol = 1e-280
    steps = 0
    while t < t1:
        if t + h > t1:
            h = t1 - t
        # Dormand-Prince stages
        k1y = dy
        k1d = (_pp_eval(bp, coef, t) - lam) * y

        ty = y + h * 0.2 * k1y
        td = dy + h * 0.2 * k1d
        k2y = td
        k2d = (_pp_eval(bp, coef, t + 0.2 * h) - lam) * ty

        ty = y + h * (3.0 / 40.0 * k1y + 9.0 / 40.0 * k2y)
        td = dy + h * (3.0 / 40.0 * k1d + 9.0 / 40.0 * k2d)
        k3y = td
        k3d = (_pp_eval(bp, coef, t + 0.3 * h) - lam) * ty

        ty = y + h * (44.0 / 45.0 * k1y - 56.0 / 15.0 * k2y + 32.0 / 9.0 * k3y)
        td = dy + h * (44.0 / 45.0 * k1d - 56.0 / 15.0 * k2d + 32.0 / 9.0 * k3d)
        k4y = td
        k4d = (_pp_eval(bp, coef, t + 0.8 * h) - lam) * ty

        ty = y + h * (
            19372.0 / 6561.0 * k1y
            - 25360.0 / 2187.0 * k2y
            + 64448.0 / 6561.0 * k3y
            - 212.0 / 729.0 * k4y
        )
        td = dy + h * (
            19372.0 / 6561.0 * k1d
            - 25360.0 / 2187.0 * k2d
            + 64448.0 / 6561.0 * k3d
            - 212.0 / 729.0 * k4d
        )
        k5y = td
        k5d = (_pp_eval(bp, coef, t + 8.0 / 9.0 * h) - lam) * ty

        ty = y + h * (
            9017.0 / 3168.0 * k1y
            - 355.0 / 33.0 * k2y
            + 46732.0 / 5247.0 * k3y
            + 49.0 / 176.0 * k4y
            - 5103.0 / 18656.0 * k5y
        )
        td = dy + h * (
            9017.0 / 3168.0 * k1d
            - 355.0 / 33.0 * k2d
            + 46732.0 / 5247.0 * k3d
            + 49.0 / 176.0 * k4d
            - 5103.0 / 18656.0 * k5d
        )
        k6y = td
        k6d = (_pp_eval(bp, coef, t + h) - lam) * ty

        ynew = y + h * (
            35.0 / 384.0 * k1y
            + 500.0 / 1113.0 * k3y
            + 125.0 / 192.0 * k4y
            - 2187.0 / 6784.0 * k5y
            + 11.0 / 84.0 * k6y
        )
        dynew = dy + h * (
            35.0 / 384.0 * k1d
            + 500.0 / 1113.0 * k3d
            + 125.0 / 192.0 * k4d
            - 2187.0 / 6784.0 * k5d
            + 11.0 / 84.0 * k6d
        )
        k7y = dynew
        k7d = (_pp_eval(bp, coef, t + h) - lam) * ynew

        erry = h * (
            71.0 / 57600.0 * k1y
            - 71.0 / 16695.0 * k3y
            + 71.0 / 1920.0 * k4y
            - 17253.0 / 339200.0 * k5y
            + 22.0 / 525.0 * k6y
            - 1.0 / 40.0 * k7y
        )
        errd = h * (
            71.0 / 57600.0 * k1d
            - 71.0 / 16695.0 * k3d
            + 71.0 / 1920.0 * k4d
            - 17253.0 / 339200.0 * k5d
            + 22.0 / 525.0 * k6d
            - 1.0 / 40.0 * k7d
        )
        sy = atol + rtol * max(abs(y), abs(ynew))
        sd = atol + rtol * max(abs(dy), abs(dynew))
        err = max(abs(erry) / sy, abs(errd) / sd)

        if err <= 1.0:
            if ynew != 0.0 and y != 0.0 and (ynew > 0.0) != (y > 0.0):
                ncross += 1
            t += h
            y = ynew
            dy = dynew
            mag = max(abs(y), abs(dy))
            if mag > _RESCALE:
                ls += np.log(mag)
                y /= mag
                dy /= mag
            if abs(y) > 0.0:
                lg = np.log(abs(y)) + ls
                if lg > maxlog:
                    maxlog = lg
        fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
        if fac < 0.2:
            fac = 0.2
        elif fac > 5.0:
            fac = 5.0
        h *= fac
        if h > hmax:
            h = hmax
        if h < 1e-14 * (t1 - t0):
            return y, dy, ls, maxlog, ncross, 1
        steps += 1
        if steps > _MAX_STEPS:
            return y, dy, ls, maxlog, ncross, 2
    return y, dy, ls, maxlog, ncross, 0


@njit(cache=True, fastmath=False)
def shoot_gauged(
    bp, coef, lo_val, lo_slope, hi_val, hi_slope, lam, t0, t1, chi0, q0, rtol
):
    """Integrate chi' = q exp(-u), q' = -lam exp(u) chi from t0 to t1.

    u(t) is the cubic spline (bp, coef) with linear extension (slope
    lo_slope/hi_slope) outside the breakpoint range.  Returns
    (chi, q, status); the dynamic range of (chi, q) stays within double
    precision for horizons up to ~50/omega, so no rescaling is needed.
    """
    chi = chi0
    q = q0
    t = t0
    h = (t1 - t0) * 1e-6
    if h <= 0.0:
        h = 1e-6
    hmax = (t1 - t0) / 16.0
    atol = 1e-280
    steps = 0
    blo = bp[0]
    bhi = bp[bp.shape[0] - 1]
    while t < t1:
        if t + h > t1:
            h = t1 - t

        # stage evaluations of u at the RK nodes
        tt0 = t
        tt1 = t + 0.2 * h
        tt2 = t + 0.3 * h
        tt3 = t + 0.8 * h
        tt4 = t + 8.0 / 9.0 * h
        tt5 = t + h

        if tt0 < blo:
            u0 = lo_val + lo_slope * (tt0 - blo)
        elif tt0 > bhi:
            u0 = hi_val + hi_slope * (tt0 - bhi)
        else:
            u0 = _pp_eval(bp, coef, tt0)
        if tt1 < blo:
            u1 = lo_val + lo_slope * (tt1 - blo)
        elif tt1 > bhi:
            u1 = hi_val + hi_slope * (tt1 - bhi)
        else:
            u1 = _pp_eval(bp, coef, tt1)
        if tt2 < blo:
            u2 = lo_val + lo_slope * (tt2 - blo)
        elif tt2 > bhi:
            u2 = hi_val + hi_slope * (tt2 - bhi)
        else:
            u2 = _pp_eval(bp, coef, tt2)
        if tt3 < blo:
            u3 = lo_val + lo_slope * (tt3 - blo)
        elif tt3 > bhi:
            u3 = hi_val + hi_slope * (tt3 - bhi)
        else:
            u3 = _pp_eval(bp, coef, tt3)
        if tt4 < blo:
            u4 = lo_val + lo_slope * (tt4 - blo)
        elif tt4 > bhi:
            u4 = hi_val + hi_slope * (tt4 - bhi)
        else:
            u4 = _pp_eval(bp, coef, tt4)
        if tt5 < blo:
            u5 = lo_val + lo_slope * (tt5 - blo)
        elif tt5 > bhi:
            u5 = hi_val + hi_slope * (tt5 - bhi)
        else:
            u5 = _pp_eval(bp, coef, tt5)

        k1c = q * np.exp(-u0)
        k1q = -lam * np.exp(u0) * chi

        tc = chi + h * 0.2 * k1c
        tq = q + h * 0.2 * k1q
        k2c = tq * np.exp(-u1)
        k2q = -lam * np.exp(u1) * tc

        tc = chi + h * (3.0 / 40.0 * k1c + 9.0 / 40.0 * k2c)
        tq = q + h * (3.0 / 40.0 * k1q + 9.0 / 40.0 * k2q)
        k3c = tq * np.exp(-u2)
        k3q = -lam * np.exp(u2) * tc

        tc = chi + h * (44.0 / 45.0 * k1c - 56.0 / 15.0 * k2c + 32.0 / 9.0 * k3c)
        tq = q + h * (44.0 / 45.0 * k1q - 56.0 / 15.0 * k2q + 32.0 / 9.0 * k3q)
        k4c = tq * np.exp(-u3)
        k4q = -lam * np.exp(u3) * tc

        tc = chi + h * (
            19372.0 / 6561.0 * k1c
            - 25360.0 / 2187.0 * k2c
            + 64448.0 / 6561.0 * k3c
            - 212.0 / 729.0 * k4c
        )
        tq = q + h * (
            19372.0 / 6561.0 * k1q
            - 25360.0 / 2187.0 * k2q
            + 64448.0 / 6561.0 * k3q
            - 212.0 / 729.0 * k4q
        )
        k5c = tq * np.exp(-u4)
        k5q = -lam * np.exp(u4) * tc

        tc = chi + h * (
            9017.0 / 3168.0 * k1c
            - 355.0 / 33.0 * k2c
            + 46732.0 / 5247.0 * k3c
            + 49.0 / 176.0 * k4c
            - 5103.0 / 18656.0 * k5c
        )
        tq = q + h * (
            9017.0 / 3168.0 * k1q
            - 355.0 / 33.0 * k2q
            + 46732.0 / 5247.0 * k3q
            + 49.0 / 176.0 * k4q
            - 5103.0 / 18656.0 * k5q
        )
        k6c = tq * np.exp(-u5)
        k6q = -lam * np.exp(u5) * tc

        cnew = chi + h * (
            35.0 / 384.0 * k1c
            + 500.0 / 1113.0 * k3c
            + 125.0 / 192.0 * k4c
            - 2187.0 / 6784.0 * k5c
            + 11.0 / 84.0 * k6c
        )
        qnew = q + h * (
            35.0 / 384.0 * k1q
            + 500.0 / 1113.0 * k3q
            + 125.0 / 192.0 * k4q
            - 2187.0 / 6784.0 * k5q
            + 11.0 / 84.0 * k6q
        )
        k7c = qnew * np.exp(-u5)
        k7q = -lam * np.exp(u5) * cnew

        errc = h * (
            71.0 / 57600.0 * k1c
            - 71.0 / 16695.0 * k3c
            + 71.0 / 1920.0 * k4c
            - 17253.0 / 339200.0 * k5c
            + 22.0 / 525.0 * k6c
            - 1.0 / 40.0 * k7c
        )
        errq = h * (
            71.0 / 57600.0 * k1q
            - 71.0 / 16695.0 * k3q
            + 71.0 / 1920.0 * k4q
            - 17253.0 / 339200.0 * k5q
            + 22.0 / 525.0 * k6q
            - 1.0 / 40.0 * k7q
        )
        sc = atol + rtol * max(abs(chi), abs(cnew))
        sq = atol + rtol * max(abs(q), abs(qnew))
        err = max(abs(errc) / sc, abs(errq) / sq)

        if err <= 1.0:
            t += h
            chi = cnew
            q = qnew
        fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
        if fac < 0.2:
            fac = 0.2
        elif fac > 5.0:
            fac = 5.0
        h *= fac
        if h > hmax:
            h = hmax
        if h < 1e-14 * (t1 - t0):
            return chi, q, 1
        steps += 1
        if steps > _MAX_STEPS:
            return chi, q, 2
    return chi, q, 0
