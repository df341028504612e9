"""Fluctuation-determinant ratios for instanton trajectories.

Determinant ratios are produced by the shooting form of the boundary-value
determinant identity: the ratio of two Dirichlet determinants equals the
ratio of the terminal values of the two initial-value solutions.  Near-zero
eigenvalues (the translation mode lifted by the finite horizon) are
extracted with a gauged shot that factors the nodeless lam = 0 solution out
of the wavefunction, which removes the exponential terminal cancellation
that defeats a direct shot; the zero-mode-removed ratio is the finite-T
ratio divided by that eigenvalue, extrapolated over a grid of horizons.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq
from scipy.special import gammaln, gammasgn

from . import _ode
from .errors import (
    DegenerateError,
    ExtrapolationError,
    IntegrationError,
    PoleError,
    SemanticsError,
    ValidationError,
)
from .potentials import well_shifted

__all__ = [
    "FluctuationResult",
    "bargmann_wigner_det",
    "eigenvalue_near",
    "gelfand_yaglom_ratio",
    "k_coefficient",
    "lowest_eigenvalue",
    "warmup",
    "zero_mode_removed_ratio",
]

_RTOL = 1e-11
# Terminal-cancellation guard: if the reference solution ends this many
# e-folds below its running maximum, the requested shift sits on (or
# numerically indistinguishably close to) one of its Dirichlet eigenvalues.
_CANCEL_LOG = math.log(1e-9)
_SPREAD_TOL = 1e-3


def warmup():
    """Force compilation of the integration kernels (cached on disk)."""
    bp = np.array([0.0, 1.0])
    coef = np.zeros((4, 1))
    _ode.shoot_direct(bp, coef, 0.0, 0.0, 1.0, 0.0, 1.0, 1e-8)
    _ode.shoot_gauged(bp, coef, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1e-8)


def _as_spline(w, t_lo, t_hi):
    """Cubic-spline tables (breakpoints, coefficients) for W on [t_lo, t_hi].

    ``w`` may be a scalar (constant potential) or a callable of t.
    """
    if callable(w):
        n = max(4001, int((t_hi - t_lo) / 0.005) + 1)
        ts = np.linspace(t_lo, t_hi, n)
        vals = np.asarray(w(ts), dtype=float)
        if vals.shape != ts.shape:
            vals = np.array([float(w(t)) for t in ts])
        cs = CubicSpline(ts, vals)
        return np.ascontiguousarray(cs.x), np.ascontiguousarray(cs.c)
    bp = np.array([float(t_lo), float(t_hi)])
    coef = np.zeros((4, 1))
    coef[3, 0] = float(w)
    return bp, coef


def _direct(bp, coef, lam, t0, t1, y0, dy0):
    y, dy, ls, maxlog, ncross, status = _ode.shoot_direct(
        bp, coef, float(lam), float(t0), float(t1), float(y0), float(dy0), _RTOL
    )
    if status != 0:
        raise IntegrationError("adaptive step control failed in determinant shot")
    return y, dy, ls, maxlog, ncross


def _signed_terminal(bp, coef, lam, t0, t1, y0=0.0, dy0=1.0):
    y, _, ls, _, ncross = _direct(bp, coef, lam, t0, t1, y0, dy0)
    return y * math.exp(min(max(ls, -600.0), 600.0)), ncross


def gelfand_yaglom_ratio(w1, w2, T, lam=0.0):
    """Ratio of Dirichlet determinants det(-d2/dt2 + W1 - lam) over the same
    expression with W2, on the interval [-T/2, T/2].

    Each determinant is represented by the terminal value of the solution of
    psi'' = (W - lam) psi with psi(-T/2) = 0, psi'(-T/2) = 1.  ``w1``/``w2``
    may be callables of t or scalars.  If lam sits on an eigenvalue of the
    reference operator the terminal value cancels to zero: detected via the
    running maximum of log|psi| and reported as PoleError.
    """
    if not T > 0.0:
        raise ValidationError("interval length must be positive")
    half = 0.5 * T
    bp1, c1 = _as_spline(w1, -half, half)
    bp2, c2 = _as_spline(w2, -half, half)
    y1, _, ls1, _, _ = _direct(bp1, c1, lam, -half, half, 0.0, 1.0)
    y2, _, ls2, max2, _ = _direct(bp2, c2, lam, -half, half, 0.0, 1.0)
    if y2 == 0.0 or math.log(abs(y2)) + ls2 < max2 + _CANCEL_LOG:
        raise PoleError(
            "reference solution vanishes at the endpoint: the shift sits on "
            "an eigenvalue of the reference operator"
        )
    return (y1 / y2) * math.exp(ls1 - ls2)


def bargmann_wigner_det(lambda_pt, omega, eps):
    """Closed-form determinant ratio for the reflectionless sech^2 well.

    The well with integer depth parameter ``lambda_pt`` and width ``omega``
    is compared against its asymptotic constant, at the spectral point
    z = sqrt(1 + eps)/omega; eps measures the detuning of the squared decay
    rate from the unit continuum edge.  Evaluated through log-Gamma, which
    is stable for large z and across the negative-argument strips.
    """
    if not omega > 0.0:
        raise ValidationError("well width must be positive")
    if eps <= -1.0:
        raise PoleError("spectral point at or below the continuum edge")
    z = math.sqrt(1.0 + eps) / omega
    a = z - lambda_pt
    if a <= 1e-300 and abs(a - round(a)) < 1e-12:
        # exact bound-state hit: the determinant vanishes
        return 0.0
    sign = (
        gammasgn(1.0 + z)
        * gammasgn(z)
        * gammasgn(1.0 + lambda_pt + z)
        * gammasgn(a)
    )
    logmag = (
        gammaln(1.0 + z) + gammaln(z) - gammaln(1.0 + lambda_pt + z) - gammaln(a)
    )
    return float(sign * math.exp(logmag))


def eigenvalue_near(w, T, guess):
    """Refine a Dirichlet eigenvalue of -d2/dt2 + W on [-T/2, T/2] near
    ``guess`` by bracketing the sign change of the terminal shot value."""
    if not T > 0.0:
        raise ValidationError("interval length must be positive")
    half = 0.5 * T
    bp, coef = _as_spline(w, -half, half)

    def f(lam):
        return _signed_terminal(bp, coef, lam, -half, half)[0]

    span = max(abs(guess) * 0.25, 1e-6)
    lo, hi = guess - span, guess + span
    flo, fhi = f(lo), f(hi)
    for _ in range(40):
        if flo == 0.0:
            return float(lo)
        if fhi == 0.0:
            return float(hi)
        if (flo > 0.0) != (fhi > 0.0):
            return float(brentq(f, lo, hi, xtol=1e-13 * max(1.0, abs(guess))))
        span *= 2.0
        lo, hi = guess - span, guess + span
        flo, fhi = f(lo), f(hi)
    raise ValidationError("no eigenvalue sign change found near the guess")


def lowest_eigenvalue(w, T, floor=-8.0):
    """Lowest Dirichlet eigenvalue of -d2/dt2 + W on [-T/2, T/2].

    Located by oscillation counting: the number of interior nodes of the
    shot solution equals the number of eigenvalues below the shift, so the
    first crossing of the count is bisected down from above.  ``floor`` must
    lie below the lowest eigenvalue.
    """
    if not T > 0.0:
        raise ValidationError("interval length must be positive")
    half = 0.5 * T
    bp, coef = _as_spline(w, -half, half)

    def count(lam):
        return _signed_terminal(bp, coef, lam, -half, half)[1]

    if count(floor) != 0:
        raise ValidationError("floor is not below the lowest eigenvalue")
    cap = 0.0
    step = max(1.0, 0.25 * abs(floor))
    tries = 0
    while count(cap) == 0:
        cap += step
        tries += 1
        if tries > 64:
            raise ValidationError("no eigenvalue found above the floor")
    lo, hi = float(floor), float(cap)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if count(mid) >= 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def k_coefficient(S0, ratio_prime, hbar):
    """Tunneling prefactor magnitude sqrt(S0 / 2 pi hbar) / sqrt(|ratio'|)."""
    if not (S0 > 0.0 and hbar > 0.0):
        raise ValidationError("S0 and hbar must be positive")
    if ratio_prime == 0.0:
        raise DegenerateError("zero-mode-removed ratio must be nonzero")
    return math.sqrt(S0 / (2.0 * math.pi * hbar)) / math.sqrt(abs(ratio_prime))


@dataclass(frozen=True)
class FluctuationResult:
    """Zero-mode-removed determinant data at the largest requested horizon."""

    ratio_full: float
    lambda0: float
    ratio_prime: float
    negative_mode: bool
    K: float
    horizon: float


class _PathTables:
    """Splines of W(t) = V''(x(t)) and u(t) = log xdot^2 on the trajectory's
    quadrature knots (centered time), plus tail metadata."""

    def __init__(self, path):
        if path._knots_t is None or path.model is None:
            raise SemanticsError("path carries no trajectory tables")
        self.kind = path.kind
        self.omega = path.omega
        self.S0 = path.S0
        model = path.model
        vs = well_shifted(model, path.well)
        tk = np.asarray(path._knots_t, dtype=float) - path.center_time
        xk = np.asarray(path._knots_x, dtype=float)
        wk = np.asarray(model.second_derivative(xk), dtype=float)
        vk = None if path._knots_v is None else np.asarray(path._knots_v, dtype=float)

        if self.kind == "kink":
            far = path._well_far
            mid = 0.5 * (path.well + far)
            vfar = well_shifted(model, far)
            v = vk if vk is not None else np.where(
                xk <= mid, vs.value(xk), vfar.value(xk)
            )
            keep = slice(None)
            self.cover = float(min(-tk[0], tk[-1]))
        else:
            v = vk if vk is not None else vs.value(xk)
            keep = slice(1, None)  # drop the turning-point knot where xdot = 0
            self.cover = float(tk[-1])
            self.c_exit = float(vs.derivative(path.exit))

        self.w_spline = CubicSpline(tk, wk)
        self.w_bp = np.ascontiguousarray(self.w_spline.x)
        self.w_c = np.ascontiguousarray(self.w_spline.c)

        uk = np.log(2.0 * v[keep])
        tu = tk[keep]
        self.u_spline = CubicSpline(tu, uk)
        self.u_bp = np.ascontiguousarray(self.u_spline.x)
        self.u_c = np.ascontiguousarray(self.u_spline.c)
        self.u_lo_val = float(uk[0])
        self.u_hi_val = float(uk[-1])
        self.u_lo_slope = 2.0 * self.omega if self.kind == "kink" else 0.0
        self.u_hi_slope = -2.0 * self.omega

    def u(self, t):
        return float(self.u_spline(t))

    def gauged(self, lam, t0, t1, chi0, q0):
        chi, q, status = _ode.shoot_gauged(
            self.u_bp,
            self.u_c,
            self.u_lo_val,
            self.u_lo_slope,
            self.u_hi_val,
            self.u_hi_slope,
            float(lam),
            float(t0),
            float(t1),
            float(chi0),
            float(q0),
            _RTOL,
        )
        if status != 0:
            raise IntegrationError("gauged determinant shot failed")
        return chi, q


def _bracket_root(f, hi_start):
    """Bracket the first sign change of f on (0, hi] starting from hi_start."""
    f0 = f(0.0)
    hi = hi_start
    for _ in range(16):
        fhi = f(hi)
        if (fhi > 0.0) != (f0 > 0.0):
            return hi, f0, fhi
        hi *= 3.0
    raise ExtrapolationError("near-zero eigenvalue could not be bracketed")


def _kink_lambda0(tab, half):
    """Near-zero eigenvalue of the kink fluctuation operator on [-L, L]."""

    def chi_end(lam):
        return tab.gauged(lam, -half, half, 0.0, 1.0)[0]

    est = 4.0 * tab.omega * math.exp(tab.u(half)) / tab.S0
    hi, _, _ = _bracket_root(chi_end, 3.0 * est)
    lam = brentq(chi_end, 0.0, hi, xtol=1e-14 * hi, maxiter=200)
    return float(lam)


def _bounce_odd_lambda0(tab, half):
    """Near-zero eigenvalue in the odd sector of the bounce operator.

    The gauge function is the (odd) velocity itself; initial data at a small
    t_a come from the power series of the gauged variables, for which the
    momentum q = y psi' - y' psi vanishes like lam * t^3.
    """
    t_a = 0.02 / tab.omega
    c2 = tab.c_exit**2

    def chi_end(lam):
        chi0 = 1.0 - lam * t_a**2 / 6.0
        q0 = -lam * c2 * t_a**3 / 3.0
        return tab.gauged(lam, t_a, half, chi0, q0)[0]

    est = 4.0 * tab.omega * math.exp(tab.u(half)) / tab.S0
    hi, _, _ = _bracket_root(chi_end, 3.0 * est)
    lam = brentq(chi_end, 0.0, hi, xtol=1e-14 * hi, maxiter=200)
    return float(lam)


def _bounce_even_lowest(tab, half):
    """Lowest even-sector eigenvalue (the bounce's negative mode)."""
    w_floor = float(np.min(tab.w_c[3])) - 1.0

    def shot(lam):
        return _signed_terminal(tab.w_bp, tab.w_c, lam, 0.0, half, 1.0, 0.0)

    if shot(w_floor)[1] != 0:
        raise IntegrationError("even-sector floor estimate failed")
    cap = 0.0
    step = max(tab.omega**2, 1.0)
    tries = 0
    while shot(cap)[1] == 0:
        cap += step
        tries += 1
        if tries > 64:
            raise ExtrapolationError("no even-sector eigenvalue located")
    lo, hi = w_floor, cap
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if shot(mid)[1] >= 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _log_cosh(x):
    return abs(x) + math.log1p(math.exp(-2.0 * abs(x))) - math.log(2.0)


def _log_sinh(x):
    # x > 0
    return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)


def zero_mode_removed_ratio(path, T_grid=None):
    """Zero-mode-removed fluctuation ratio for an instanton path.

    For each horizon T in ``T_grid`` (default spans [20/omega, 40/omega])
    the finite-T determinant ratio against the harmonic reference is divided
    by its near-zero eigenvalue; the T -> infinity limit is taken by
    extrapolating in exp(-omega T).  ``lambda0`` reports the lowest
    eigenvalue at the largest horizon: the exponentially small lifted zero
    mode for kinks, the negative mode for bounces.
    """
    if not (np.isfinite(path.S0) and path.S0 > 0.0) or not np.any(path.xdot):
        raise SemanticsError(
            "path has no translation zero mode (zero action or frozen velocity)"
        )
    tab = _PathTables(path)
    omega = tab.omega
    if T_grid is None:
        ts = [20.0 / omega, 30.0 / omega, 40.0 / omega]
    else:
        ts = sorted(float(t) for t in T_grid)
        if not ts:
            raise ValidationError("T_grid must contain at least one horizon")
    uniq = sorted(dict.fromkeys(ts))
    if uniq[0] <= 0.0:
        raise ValidationError("horizons must be positive")
    if 0.5 * uniq[-1] > tab.cover + 1e-9:
        raise ValidationError(
            "requested horizon exceeds the trajectory's resolved time range"
        )

    ratio_fulls = []
    primes = []
    lam0_kink = None
    for T in uniq:
        half = 0.5 * T
        if tab.kind == "kink":
            lam_z = _kink_lambda0(tab, half)
            phi0 = tab.gauged(0.0, -half, half, 0.0, 1.0)[0]
            log_ends = 0.5 * (tab.u(half) + tab.u(-half))
            ratio_full = (
                math.copysign(1.0, phi0)
                * math.exp(log_ends + math.log(abs(phi0)) + math.log(omega) - _log_sinh(omega * T))
            )
            lam0_kink = lam_z
        else:
            lam_z = _bounce_odd_lambda0(tab, half)
            chi0 = tab.gauged(0.0, 0.02 / omega, half, 1.0, 0.0)[0]
            u_o = math.exp(0.5 * tab.u(half)) * chi0 / tab.c_exit
            ratio_odd = -u_o * omega * math.exp(-_log_sinh(omega * half))
            ye, _, ls, _, _ = _direct(tab.w_bp, tab.w_c, 0.0, 0.0, half, 1.0, 0.0)
            ratio_even = ye * math.exp(ls - _log_cosh(omega * half))
            ratio_full = ratio_even * ratio_odd
        ratio_fulls.append(ratio_full)
        primes.append(ratio_full / lam_z)

    if len(uniq) == 1:
        ratio_prime = primes[0]
    else:
        # The leading finite-horizon correction to the removed ratio decays
        # like exp(-omega T / 2): the trajectory tail perturbs the
        # fluctuation potential by O(exp(-omega t)) near the endpoint, where
        # the Dirichlet Green's function weight is O(exp(omega(t - T/2))).
        ests = []
        for i in range(len(uniq) - 1):
            e1 = math.exp(-0.5 * omega * uniq[i])
            e2 = math.exp(-0.5 * omega * uniq[i + 1])
            ests.append((primes[i + 1] * e1 - primes[i] * e2) / (e1 - e2))
        mean = sum(ests) / len(ests)
        spread = (max(ests) - min(ests)) / abs(mean) if mean != 0.0 else math.inf
        if spread > _SPREAD_TOL:
            raise ExtrapolationError(
                "zero-mode-removed ratio did not converge across the horizon grid"
            )
        ratio_prime = ests[-1]

    if tab.kind == "kink":
        lambda0 = lam0_kink
    else:
        lambda0 = _bounce_even_lowest(tab, 0.5 * uniq[-1])

    return FluctuationResult(
        ratio_full=ratio_fulls[-1],
        lambda0=float(lambda0),
        ratio_prime=float(ratio_prime),
        negative_mode=bool(lambda0 < 0.0),
        K=k_coefficient(tab.S0, ratio_prime, 1.0),
        horizon=float(uniq[-1]),
    )
