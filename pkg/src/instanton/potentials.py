"""Potential families in dimensionless internal units (m = 1).

Each model exposes vectorized ``value``, ``derivative`` and
``second_derivative`` methods.  Well-relative evaluation goes through
:func:`well_shifted`, which rearranges the algebra so that V(x) - V(well)
stays accurate down to distances ~1e-10 from the well (a naive float
subtraction loses every digit there).
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import ConfigurationError, NoExitError, NoWellError, ValidationError

TWO_PI = 2.0 * np.pi


def _reject_extras(family, extra):
    if extra:
        raise ConfigurationError(
            f"unknown parameter(s) for {family}: {', '.join(sorted(extra))}"
        )


class SampledCorrection:
    """Periodic correction term built from samples of a 2*pi-periodic curve.

    ``delta_grid`` must be strictly increasing and cover one period, either
    open ([x0, x0 + 2*pi) with the wrap point implied) or closed (endpoint
    repeated).  Interpolation is a periodic cubic spline; calling the object
    evaluates it with automatic wrapping.
    """

    def __init__(self, delta_grid, values):
        delta = np.asarray(delta_grid, dtype=float)
        vals = np.asarray(values, dtype=float)
        if delta.ndim != 1 or delta.shape != vals.shape or delta.size < 4:
            raise ValidationError("need matching 1-d sample arrays (>= 4 points)")
        if np.any(np.diff(delta) <= 0.0):
            raise ValidationError("sample grid must be strictly increasing")
        span = delta[-1] - delta[0]
        if abs(span - TWO_PI) < 1e-9:
            # closed grid: force exact periodicity for the spline
            vals = vals.copy()
            vals[-1] = vals[0]
        elif span < TWO_PI:
            delta = np.append(delta, delta[0] + TWO_PI)
            vals = np.append(vals, vals[0])
        else:
            raise ValidationError("sample grid spans more than one period")
        self._x0 = delta[0]
        self.period = TWO_PI
        self._spline = CubicSpline(delta, vals, bc_type="periodic")
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)

    @classmethod
    def _from_ppoly(cls, ppoly, x0):
        """Wrap an existing piecewise polynomial covering [x0, x0 + 2*pi]."""
        obj = object.__new__(cls)
        obj._x0 = x0
        obj.period = TWO_PI
        obj._spline = ppoly
        obj._d1 = ppoly.derivative(1)
        obj._d2 = ppoly.derivative(2)
        return obj

    def _wrap(self, x):
        return self._x0 + np.mod(np.asarray(x, dtype=float) - self._x0, self.period)

    def value(self, x):
        return self._spline(self._wrap(x))

    __call__ = value

    def derivative(self, x):
        return self._d1(self._wrap(x))

    def second_derivative(self, x):
        return self._d2(self._wrap(x))


class QuarticDoubleWell:
    """V(x) = (x^2 - 1/4)^2 / 2, degenerate wells at x = +/- 1/2.

    The value is computed in the factored form (x-1/2)^2 (x+1/2)^2 / 2 so it
    vanishes exactly at the wells.
    """

    family = "quartic_double_well"
    metastable = False

    def value(self, x):
        x = np.asarray(x, dtype=float)
        u = (x - 0.5) * (x + 0.5)
        return 0.5 * u * u

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return 2.0 * x * ((x - 0.5) * (x + 0.5))

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        return 6.0 * x * x - 0.5


class PolyBounce:
    """Metastable single well V(x) = x^2/2 + c_N g x^(2N) with g < 0.

    The quartic member (N = 2) uses c_2 = 1/4 — the classic toy normalization
    whose bounce is x(t) = sqrt(-2/g) sech(t); the higher members use
    c_N = 1/2, matching the g x^(2N)/2 family whose exit point is
    (-1/g)^(1/(2N-2)).
    """

    family = "poly_bounce"
    metastable = True

    def __init__(self, big_n, g, **extra):
        _reject_extras("PolyBounce", extra)
        if int(big_n) != big_n or big_n < 2:
            raise ConfigurationError("exponent N must be an integer >= 2")
        if not g < 0.0:
            raise ConfigurationError("coupling g must be negative (metastable well)")
        self.big_n = int(big_n)
        self.g = float(g)
        self._c = 0.25 if self.big_n == 2 else 0.5

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * x * x + self._c * self.g * x ** (2 * self.big_n)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        n2 = 2 * self.big_n
        return x + self._c * n2 * self.g * x ** (n2 - 1)

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        n2 = 2 * self.big_n
        return 1.0 + self._c * n2 * (n2 - 1) * self.g * x ** (n2 - 2)

    def exit_estimate(self):
        """Analytic far-side zero of V, used to bound the numeric search."""
        if self.big_n == 2:
            return np.sqrt(-2.0 / self.g)
        return (-1.0 / self.g) ** (1.0 / (2 * self.big_n - 2))


class Washboard:
    """Tilted washboard U(x) = E_J [(1 - cos x) - s x] + eps(x), s = I_e/I_c.

    The tilt slope is E_J * I_e / I_c, i.e. the current scale I_c is by
    definition the critical current of the junction.  An optional sampled
    correction eps(x) (from the current-phase-relation solver) is added on
    top.
    """

    family = "washboard"
    metastable = True

    def __init__(self, e_j, e_c, i_e, i_c, correction=None, **extra):
        _reject_extras("Washboard", extra)
        if e_j <= 0.0 or e_c <= 0.0 or i_c <= 0.0:
            raise ConfigurationError("E_J, E_C and I_c must be positive")
        if i_e < 0.0:
            raise ConfigurationError("bias current I_e must be >= 0")
        self.e_j = float(e_j)
        self.e_c = float(e_c)
        self.i_e = float(i_e)
        self.i_c = float(i_c)
        self.tilt = self.i_e / self.i_c
        self.correction = correction

    def value(self, x):
        x = np.asarray(x, dtype=float)
        s = np.sin(0.5 * x)
        v = self.e_j * (2.0 * s * s - self.tilt * x)
        if self.correction is not None:
            v = v + self.correction.value(x)
        return v

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        d = self.e_j * (np.sin(x) - self.tilt)
        if self.correction is not None:
            d = d + self.correction.derivative(x)
        return d

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        d2 = self.e_j * np.cos(x)
        if self.correction is not None:
            d2 = d2 + self.correction.second_derivative(x)
        return d2


class Flux:
    """Flux-qubit potential E_J (1 - cos x) + E_L (x - phi_e)^2 / 2."""

    family = "flux"
    metastable = False

    def __init__(self, e_j, e_c, e_l, phi_e, **extra):
        _reject_extras("Flux", extra)
        if e_j <= 0.0 or e_c <= 0.0 or e_l <= 0.0:
            raise ConfigurationError("E_J, E_C and E_L must be positive")
        self.e_j = float(e_j)
        self.e_c = float(e_c)
        self.e_l = float(e_l)
        self.phi_e = float(phi_e)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        s = np.sin(0.5 * x)
        d = x - self.phi_e
        return self.e_j * 2.0 * s * s + 0.5 * self.e_l * d * d

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.e_j * np.sin(x) + self.e_l * (x - self.phi_e)

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.e_j * np.cos(x) + self.e_l * np.ones_like(x)


class PeriodicCosine:
    """Charge-qubit potential E_J (1 - cos x); E_C sets the effective hbar."""

    family = "periodic_cosine"
    metastable = False

    def __init__(self, e_j, e_c, **extra):
        _reject_extras("PeriodicCosine", extra)
        if e_j <= 0.0 or e_c <= 0.0:
            raise ConfigurationError("E_J and E_C must be positive")
        self.e_j = float(e_j)
        self.e_c = float(e_c)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        s = np.sin(0.5 * x)
        return self.e_j * 2.0 * s * s

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.e_j * np.sin(x)

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.e_j * np.cos(x)

    def hbar_effective(self):
        """Dimensionless hbar of the phase variable, sqrt(2 E_C / E_J)."""
        return np.sqrt(2.0 * self.e_c / self.e_j)


class ParabolicDoubleWell:
    """Matched-parabola double well V(x) = omega^2 (|x| - a)^2 / 2."""

    family = "parabolic_double_well"
    metastable = False

    def __init__(self, a, omega=1.0, **extra):
        _reject_extras("ParabolicDoubleWell", extra)
        if a <= 0.0 or omega <= 0.0:
            raise ConfigurationError("well position a and omega must be positive")
        self.a = float(a)
        self.omega = float(omega)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        u = np.abs(x) - self.a
        return 0.5 * self.omega**2 * u * u

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.omega**2 * (np.abs(x) - self.a) * np.sign(x)

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.omega**2 * np.ones_like(x)


@dataclass
class StationaryPoint:
    x: float
    kind: str  # "min" or "max"
    omega: float | None  # sqrt(V'') for minima, None otherwise


def evaluate(model, x):
    """Return the triple (V, V', V'') at a point, as plain floats."""
    return (
        float(model.value(x)),
        float(model.derivative(x)),
        float(model.second_derivative(x)),
    )


def stationary_points(model, window):
    """All roots of V' inside an interval, classified by the sign of V''.

    Returns a sorted list of :class:`StationaryPoint`.  For the washboard
    family an overtilted bias (I_e >= I_c, no local minima anywhere) raises
    :class:`NoWellError` up front.
    """
    a, b = float(window[0]), float(window[1])
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise ValidationError("window must be a finite increasing interval")
    if isinstance(model, Washboard) and model.tilt >= 1.0:
        raise NoWellError(
            f"tilt ratio {model.tilt:g} >= 1: washboard has no local minima"
        )

    xs = np.linspace(a, b, 4097)
    d = model.derivative(xs)
    roots = []
    for i in range(len(xs) - 1):
        if d[i] == 0.0:
            if i > 0:  # interior sample landing exactly on a root
                roots.append(xs[i])
        elif d[i] * d[i + 1] < 0.0:
            roots.append(
                brentq(lambda x: float(model.derivative(x)), xs[i], xs[i + 1],
                       xtol=1e-14)
            )

    points = []
    for r in sorted(roots):
        v2 = float(model.second_derivative(r))
        if v2 > 0.0:
            points.append(StationaryPoint(x=r, kind="min", omega=float(np.sqrt(v2))))
        else:
            points.append(StationaryPoint(x=r, kind="max", omega=None))
    return points


class _ShiftedPotential:
    """V measured from a well: value(x) = V(x) - V(well), computed stably."""

    def __init__(self, model, well):
        self.model = model
        self.well = float(well)
        self.c0 = float(model.value(well))

    def value(self, x):
        return self._shifted_value(np.asarray(x, dtype=float))

    def derivative(self, x):
        return self.model.derivative(x)

    def second_derivative(self, x):
        return self.model.second_derivative(x)

    def _shifted_value(self, x):
        m, w = self.model, self.well
        if isinstance(m, (Washboard, Flux, PeriodicCosine, QuarticDoubleWell,
                          ParabolicDoubleWell, PolyBounce)):
            return self.value_from_well(x - w)
        # families whose wells sit at exact zeros of the (factored) value
        return m.value(x) - self.c0

    def value_from_well(self, d):
        """V(well + d) - V(well) evaluated from the displacement directly.

        Reconstituting d as x - well costs ulp(well) of absolute accuracy,
        which dominates deep in the tail (d of order exp(-omega T)); every
        family below has an algebraic form that keeps d exact.
        """
        d = np.asarray(d, dtype=float)
        m, w = self.model, self.well
        if isinstance(m, Washboard):
            half = np.sin(0.5 * d)
            resid = _snap_residual(float(np.sin(w)) - m.tilt, 1.0 + abs(m.tilt))
            v = m.e_j * (
                2.0 * np.cos(w) * half * half
                + m.tilt * _sin_minus_arg(d)
                + resid * np.sin(d)
            )
            if m.correction is not None:
                v = v + _correction_difference(m.correction, w, d)
            return v
        if isinstance(m, Flux):
            half = np.sin(0.5 * d)
            slope = _snap_residual(
                float(m.e_j * np.sin(w) + m.e_l * (w - m.phi_e)),
                m.e_j + m.e_l * (1.0 + abs(w - m.phi_e)),
            )
            return (
                m.e_j * (2.0 * np.cos(w) * half * half + np.sin(w) * _sin_minus_arg(d))
                + slope * d
                + 0.5 * m.e_l * d * d
            )
        if isinstance(m, PeriodicCosine):
            half = np.sin(0.5 * d)
            resid = _snap_residual(float(np.sin(w)), 1.0)
            return m.e_j * (2.0 * np.cos(w) * half * half + resid * np.sin(d))
        if isinstance(m, QuarticDoubleWell):
            # difference of squares of (x^2 - 1/4): products only, no
            # subtraction of like-sized well constants
            lin = d * (2.0 * w + d)
            return 0.5 * lin * (2.0 * (w - 0.5) * (w + 0.5) + lin)
        if isinstance(m, ParabolicDoubleWell):
            s = np.where(w + d >= 0.0, 1.0, -1.0)
            u0 = abs(w) - m.a
            diff = s * d + (s * w - abs(w))  # u1 - u0, exact on the well's side
            u1 = diff + u0
            return 0.5 * m.omega**2 * diff * (u1 + u0)
        if isinstance(m, PolyBounce):
            return m.value(d)  # the well sits at the origin
        return self._shifted_value(w + d)

    def value_from_exit(self, exit_x, h):
        """V(exit - h) - V(exit) with an exact zero at h = 0.

        Near a simple turning point the well-anchored algebra cancels two
        O(1) terms, so its absolute rounding noise is amplified by 1/h in
        the traversal-time integrand (and a nonzero residual at the root
        rigidly shifts the whole time ladder).  A difference anchored at the
        exit keeps full relative accuracy: below |h| = 1e-3 integrate the
        slope with Simpson's rule (error O(h^5), value exactly 0 at h = 0),
        above it the direct difference no longer cancels."""
        h = np.asarray(h, dtype=float)
        m = self.model
        direct = m.value(exit_x - h) - m.value(exit_x)
        small = np.abs(h) < 1e-3
        if not np.any(small):
            return direct
        simpson = -(h / 6.0) * (
            m.derivative(exit_x)
            + 4.0 * m.derivative(exit_x - 0.5 * h)
            + m.derivative(exit_x - h)
        )
        return np.where(small, simpson, direct)


def _snap_residual(resid, scale):
    """Zero out a stationarity residual that is pure rounding noise.

    A root-found well (or its exact periodic translate) leaves |V'(well)|
    at ulp level; carried into the displacement algebra it becomes a linear
    term of relative size ~eps/d, which wrecks the tail exactly where the
    quadratic term is smallest.  Anything below threshold is treated as an
    exact stationary point."""
    return 0.0 if abs(resid) <= 1e-13 * scale else resid


def _sin_minus_arg(d):
    """sin(d) - d without cancellation for small d."""
    d = np.asarray(d, dtype=float)
    small = np.abs(d) < 1e-3
    d2 = d * d
    series = -d * d2 / 6.0 * (1.0 - d2 / 20.0 * (1.0 - d2 / 42.0))
    return np.where(small, series, np.sin(d) - d)


def _correction_difference(corr, w, d):
    """corr(w + d) - corr(w) without the small-d value cancellation.

    Below |d| = 1e-2 the direct difference bottoms out at absolute rounding
    while the quadratic well term keeps shrinking, so integrate the
    derivative with Simpson's rule instead (error O(d^5))."""
    d = np.asarray(d, dtype=float)
    direct = corr.value(w + d) - corr.value(w)
    small = np.abs(d) < 1e-2
    if not np.any(small):
        return direct
    simpson = (d / 6.0) * (
        corr.derivative(w)
        + 4.0 * corr.derivative(w + 0.5 * d)
        + corr.derivative(w + d)
    )
    return np.where(small, simpson, direct)


def well_shifted(model, well):
    """Shifted view of the potential with V(well) subtracted exactly."""
    return _ShiftedPotential(model, well)


def _scan_span(model, well):
    if isinstance(model, PolyBounce):
        return 1.5 * (model.exit_estimate() - 0.0) + abs(well)
    if isinstance(model, (Washboard, Flux, PeriodicCosine)):
        return TWO_PI
    if isinstance(model, ParabolicDoubleWell):
        return 2.0 * model.a + 1.0
    return 2.5  # quartic double well and friends: wells within unit distance


def exit_point(model, well):
    """Far-side zero of the well-shifted potential.

    For metastable families (PolyBounce, Washboard) this is the bounce
    turning point: the shifted potential must *cross* zero and keep falling.
    For degenerate double wells it is the partner minimum (a touching zero).
    Raises :class:`NoExitError` when neither exists within one scan period.
    """
    well = float(well)
    vs = well_shifted(model, well)
    span = _scan_span(model, well)

    step0 = span * 1e-6
    xs = well + np.linspace(step0, span, 8193)
    v = vs.value(xs)

    # first strict sign crossing beyond the barrier -> bounce exit
    neg = np.nonzero(v < 0.0)[0]
    if neg.size:
        j = neg[0]
        lo, hi = (xs[j - 1], xs[j]) if j > 0 else (well + 1e-15, xs[j])
        return brentq(lambda x: float(vs.value(x)), lo, hi, xtol=1e-14)

    if getattr(model, "metastable", False):
        raise NoExitError("shifted potential never crosses zero on the far side")

    # degenerate family: look for the partner well (touching zero at a
    # minimum of V beyond the barrier).  The barrier is the first local
    # maximum of the scan (the global argmax may be a rising far wall).
    decreasing = np.nonzero(v[1:] < v[:-1])[0]
    ibar = int(decreasing[0]) + 1 if decreasing.size else int(np.argmax(v))
    vbar = v[ibar - 1] if decreasing.size else v[ibar]
    dv = model.derivative(xs)
    for i in range(ibar, len(xs) - 1):
        if dv[i] == 0.0 and v[i] <= 1e-9 * vbar:
            return float(xs[i])
        if dv[i] * dv[i + 1] < 0.0:
            r = brentq(lambda x: float(model.derivative(x)), xs[i], xs[i + 1],
                       xtol=1e-14)
            if float(vs.value(r)) <= 1e-9 * vbar:
                return float(r)
    raise NoExitError("no far-side zero of the shifted potential found")
