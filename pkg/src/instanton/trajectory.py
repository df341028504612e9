"""Euclidean minimum-action trajectories and their classical actions.

The solver works in the inverted potential: a path starts in a well of the
(shifted) potential, crosses the classically forbidden region at zero
Euclidean energy and either reaches a degenerate partner well (a kink) or
bounces off the barrier-exit turning point (a bounce).  Everything is built
from the quadrature form of the zero-energy equation of motion,

    t(x) = integral dz / sqrt(2 V(z)),

evaluated on a graded knot set that resolves the exponential approach to the
wells, so no ODE integration (and no stiffness near the fixed points) is
involved.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import PchipInterpolator

from ._quad import panel_nodes
from .errors import DomainError, SingularityError, TailError, ValidationError
from .potentials import well_shifted

__all__ = [
    "GridSpec",
    "InstantonPath",
    "action",
    "action_coefficient",
    "action_coefficient_inconsistent_form",
    "action_coefficient_quadrature",
    "asymptotic_coefficient",
    "solve_path",
]

# Fraction of the well separation at which the graded knot set is cut off;
# beyond this the approach to a well is exponential to ~1e-12 relative
# accuracy and the analytic tail takes over.
_DMIN_FRACTION = 1e-12
_SEGMENTS = 5600
_GL_ORDER = 10

# Tail-fit window for the normalized velocity (the would-be zero mode).
_FIT_LO = 1e-8
_FIT_HI = 1e-7
_FIT_MIN_SAMPLES = 10
_FIT_MIN_R2 = 0.9999


@dataclass(frozen=True)
class GridSpec:
    """Sampling control for :func:`solve_path`.

    ``horizon`` is the total Euclidean-time span of the returned sample grid
    (default ``40 / omega``); ``dt`` the sample spacing (default
    ``0.02 / omega``).  The grid always contains t = 0 exactly and is
    symmetric about it.
    """

    horizon: float | None = None
    dt: float | None = None

    def resolve(self, omega):
        dt = self.dt if self.dt is not None else 0.02 / omega
        span = self.horizon if self.horizon is not None else 40.0 / omega
        if dt <= 0.0 or span <= 0.0:
            raise ValidationError("grid horizon and dt must be positive")
        n = max(int(round(span / (2.0 * dt))), 2)
        return dt, n


@dataclass
class InstantonPath:
    """A sampled zero-energy Euclidean trajectory.

    ``x1 = xdot / sqrt(S0)`` is the normalized velocity profile (the
    translation zero mode of the second variation); ``A`` and ``omega`` are
    its fitted tail amplitude and decay rate, ``jacobian`` the collective-
    coordinate measure sqrt(S0).
    """

    kind: str
    t: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    S0: float
    omega: float
    A: float | None
    jacobian: float
    center_time: float
    horizon: float
    well: float
    exit: float | None
    model: object = field(repr=False, default=None)
    # Graded knot tables (quadrature-accurate, free of resampling error);
    # the fluctuation-determinant machinery builds its potentials on these.
    _knots_t: np.ndarray = field(repr=False, default=None)
    _knots_x: np.ndarray = field(repr=False, default=None)
    # Knot displacements from the anchoring well (positive: near well;
    # negative: far well of a kink), exact where x - well would cancel,
    # and the shifted-potential values on the knots (exit-anchored near a
    # turning point, where reconstruction from x or d loses the tail).
    _knots_d: np.ndarray = field(repr=False, default=None)
    _knots_v: np.ndarray = field(repr=False, default=None)
    _d_edge: float = field(repr=False, default=0.0)
    _well_far: float | None = field(repr=False, default=None)

    @property
    def samples(self):
        return list(zip(self.t, self.x, self.xdot))

    def shifted(self, dt):
        """Same trajectory translated in Euclidean time by ``dt``."""
        return replace(
            self,
            t=self.t + dt,
            x=self.x.copy(),
            xdot=self.xdot.copy(),
            center_time=self.center_time + dt,
            _knots_t=None if self._knots_t is None else self._knots_t + dt,
            _knots_x=None if self._knots_x is None else self._knots_x.copy(),
            _knots_d=None if self._knots_d is None else self._knots_d.copy(),
            _knots_v=None if self._knots_v is None else self._knots_v.copy(),
        )


def _shifted_scale(vs, a, b):
    xs = np.linspace(a, b, 513)
    return float(np.max(np.abs(vs.value(xs))))


def _validate_window(model, a, b):
    if not (np.isfinite(a) and np.isfinite(b)) or not b > a:
        raise ValidationError("endpoints must be finite with a < b")
    vs = well_shifted(model, a)
    scale = _shifted_scale(vs, a, b)
    if scale == 0.0:
        raise DomainError("potential is identically zero between the endpoints")
    xs = np.linspace(a, b, 4097)[1:-1]
    if np.min(vs.value(xs)) < -1e-9 * scale:
        raise DomainError(
            "shifted potential dips below zero between the endpoints; "
            "the zero-energy path would stop short of the far endpoint"
        )
    if abs(vs.value(b)) > 1e-9 * scale:
        raise DomainError("far endpoint is not a zero of the shifted potential")
    omega_sq = float(vs.second_derivative(a))
    if omega_sq <= 0.0:
        raise SingularityError("starting point is not a quadratic minimum")
    return vs, math.sqrt(omega_sq), scale


def _log_side(value_from_well, sign, d_lo, d_hi, n_seg):
    """Per-segment time/action integrals on a geometric ladder off a well.

    The segment edges sit at signed displacement ``sign*d`` from the
    anchoring well, with d log-spaced in [d_lo, d_hi]; integration uses the
    substitution v = log d, which makes both integrands analytic across the
    well's quadratic zero.  ``value_from_well`` evaluates the shifted
    potential from the displacement directly, so the deep tail keeps full
    relative accuracy.  Returns (d_edges, seg_time, seg_action) with
    segments ordered by increasing d.
    """
    v_edges = np.linspace(math.log(d_lo), math.log(d_hi), n_seg + 1)
    nodes, weights = panel_nodes(v_edges, _GL_ORDER)
    d = np.exp(nodes)
    speed = np.sqrt(2.0 * np.maximum(value_from_well(sign * d), 0.0))
    seg_time = np.sum(d * weights / speed, axis=1)
    seg_action = np.sum(d * weights * speed, axis=1)
    return np.exp(v_edges), seg_time, seg_action


def _sqrt_side(value_from_exit, u_hi, n_seg):
    """Per-segment integrals off a simple turning point.

    Edges sit at depth ``h = u**2`` behind the exit with u linear in
    [0, u_hi]; the substitution removes the inverse-square-root singularity
    of the traversal time.  ``value_from_exit`` maps the depth h to the
    shifted potential, exactly zero at h = 0 so root-location residue
    cannot shift the time origin.  Returns (u_edges, seg_time, seg_action),
    segments ordered by increasing u (decreasing x).
    """
    u_edges = np.linspace(0.0, u_hi, n_seg + 1)
    nodes, weights = panel_nodes(u_edges, _GL_ORDER)
    speed = np.sqrt(2.0 * np.maximum(value_from_exit(nodes**2), 0.0))
    seg_time = np.sum(2.0 * nodes * weights / speed, axis=1)
    seg_action = np.sum(2.0 * nodes * weights * speed, axis=1)
    return u_edges, seg_time, seg_action


def _suffix_sums(seg):
    return np.concatenate((np.cumsum(seg[::-1])[::-1], [0.0]))


def _far_side_from(model, a, b, vs_near):
    """Displacement-anchored potential evaluation at the far endpoint, for
    cancellation-free sampling deep in the far well (degenerate wells only).

    The returned callable maps a signed displacement from ``b`` to the
    shifted potential value.
    """
    slope = abs(float(model.derivative(b)))
    curv = float(model.second_derivative(b))
    if curv > 0.0 and slope < 1e-6 * curv * max(abs(b), 1.0):
        return well_shifted(model, b).value_from_well
    span = b - a

    def from_far(d):
        return vs_near.value_from_well(span + d)

    return from_far


def action(model, endpoints, method="gauss"):
    """Zero-energy classical action integral(sqrt(2 V_shifted)) dx.

    ``endpoints`` are (well, far zero) of the well-shifted potential; the
    integrand's endpoint behavior (quadratic zero at the well, quadratic or
    simple zero at the far end) is handled by substitutions.  ``method`` is
    "gauss" (graded Gauss-Legendre panels) or "tanh-sinh" (an independent
    arbitrary-precision double-exponential route).
    """
    a, b = float(endpoints[0]), float(endpoints[1])
    vs, _, _ = _validate_window(model, a, b)
    if method == "gauss":
        mid = 0.5 * (a + b)
        d_min = _DMIN_FRACTION * (b - a)
        _, _, s_left = _log_side(
            vs.value_from_well, +1.0, d_min, mid - a, _SEGMENTS
        )
        slope_b = float(model.derivative(b))
        if slope_b < 0.0:
            _, _, s_right = _sqrt_side(
                lambda h: vs.value_from_exit(b, h), math.sqrt(b - mid), _SEGMENTS
            )
        else:
            _, _, s_right = _log_side(
                _far_side_from(model, a, b, vs), -1.0, d_min, b - mid, _SEGMENTS
            )
        return float(np.sum(s_left) + np.sum(s_right))
    if method == "tanh-sinh":
        import mpmath

        def integrand(z):
            return math.sqrt(max(2.0 * float(vs.value(float(z))), 0.0))

        with mpmath.workdps(25):
            mid = 0.5 * (a + b)
            val = mpmath.quad(integrand, [a, mid, b])
        return float(val)
    raise ValidationError(f"unknown quadrature method {method!r}")


def solve_path(model, endpoints, grid=None):
    """Construct the zero-energy trajectory between ``endpoints``.

    Returns an :class:`InstantonPath` sampled on a uniform, time-centered
    grid.  A far endpoint that is itself a quadratic minimum produces a kink
    (monotone x(t), one-way action); a simple zero produces a bounce (even
    x(t), the one-way action counted twice).
    """
    a, b = float(endpoints[0]), float(endpoints[1])
    vs, omega, _ = _validate_window(model, a, b)
    grid = grid if grid is not None else GridSpec()
    dt, n_half = grid.resolve(omega)

    slope_b = float(model.derivative(b))
    curv_b = float(model.second_derivative(b))
    is_kink = curv_b > 0.0 and abs(slope_b) < 1e-6 * curv_b * max(abs(b - a), 1.0)

    mid = 0.5 * (a + b)
    d_min = _DMIN_FRACTION * (b - a)

    d_left, seg_t_left, seg_s_left = _log_side(
        vs.value_from_well, +1.0, d_min, mid - a, _SEGMENTS
    )

    if is_kink:
        vfar = well_shifted(model, b)
        d_right, seg_t_right, seg_s_right = _log_side(
            vfar.value_from_well, -1.0, d_min, b - mid, _SEGMENTS
        )
        s_oneway = float(np.sum(seg_s_left) + np.sum(seg_s_right))
        s_total = s_oneway
        # Knots left of center: x = a + d ascending, t(mid) = 0.
        t_left = -_suffix_sums(seg_t_left)
        x_left = a + d_left
        # Right of center: x = b - d with d descending as x ascends.
        t_right = _suffix_sums(seg_t_right)[::-1]
        x_right = (b - d_right)[::-1]
        knots_t = np.concatenate((t_left, t_right[1:]))
        knots_x = np.concatenate((x_left, x_right[1:]))
        # Signed displacement knots: positive values anchor at the near
        # well, negative at the far one, so tail values stay exact.
        knots_d = np.concatenate((d_left, -d_right[::-1][1:]))
        knots_v = np.concatenate(
            (vs.value_from_well(d_left), vfar.value_from_well(-d_right)[::-1][1:])
        )
        x_of = PchipInterpolator(knots_t, knots_x, extrapolate=False)

        t_s = dt * np.arange(-n_half, n_half + 1)
        x_s = x_of(t_s)
        below = t_s < knots_t[0]
        above = t_s > knots_t[-1]
        if np.any(below):
            x_s[below] = a + d_min * np.exp(omega * (t_s[below] - knots_t[0]))
        if np.any(above):
            x_s[above] = b - d_min * np.exp(-omega * (t_s[above] - knots_t[-1]))
        left_half = x_s <= mid
        v_s = np.where(left_half, vs.value(x_s), vfar.value(x_s))
        xdot_s = np.sqrt(2.0 * np.maximum(v_s, 0.0))
        exit_x = None
        well_far = b
    else:
        if slope_b >= 0.0:
            raise DomainError("far endpoint is neither a well nor a barrier exit")
        u_hi = math.sqrt(b - mid)
        span = b - a
        u_right, seg_t_right, seg_s_right = _sqrt_side(
            lambda h: vs.value_from_exit(b, h), u_hi, _SEGMENTS
        )
        s_oneway = float(np.sum(seg_s_left) + np.sum(seg_s_right))
        s_total = 2.0 * s_oneway
        # Half-trajectory for t >= 0: x runs from the exit point back to the
        # well.  t(exit) = 0; the sqrt-side knots come first.  Interpolation
        # and sampling work on the displacement from the well so the grid
        # tail is immune to cancellation in x - well.
        t_sqrt = np.concatenate(([0.0], np.cumsum(seg_t_right)))
        d_sqrt = span - u_right**2
        t_mid = t_sqrt[-1]
        t_log = t_mid + _suffix_sums(seg_t_left)
        knots_t = np.concatenate((t_sqrt, t_log[::-1][1:]))
        knots_d = np.concatenate((d_sqrt, d_left[::-1][1:]))
        knots_x = a + knots_d
        knots_v = np.concatenate(
            (vs.value_from_exit(b, u_right**2), vs.value_from_well(d_left)[::-1][1:])
        )
        d_of = PchipInterpolator(knots_t, knots_d, extrapolate=False)

        t_pos = dt * np.arange(0, n_half + 1)
        d_pos = d_of(t_pos)
        beyond = t_pos > knots_t[-1]
        if np.any(beyond):
            d_pos[beyond] = d_min * np.exp(-omega * (t_pos[beyond] - knots_t[-1]))
        x_pos = a + d_pos
        speed_pos = np.sqrt(2.0 * np.maximum(vs.value_from_well(d_pos), 0.0))
        speed_pos[0] = 0.0
        t_s = dt * np.arange(-n_half, n_half + 1)
        x_s = np.concatenate((x_pos[::-1], x_pos[1:]))
        xdot_s = np.concatenate((speed_pos[::-1], -speed_pos[1:]))
        exit_x = b
        well_far = None

    path = InstantonPath(
        kind="kink" if is_kink else "bounce",
        t=t_s,
        x=x_s,
        xdot=xdot_s,
        S0=s_total,
        omega=omega,
        A=None,
        jacobian=math.sqrt(s_total),
        center_time=0.0,
        horizon=float(t_s[-1] - t_s[0]),
        well=a,
        exit=exit_x,
        model=model,
        _knots_t=knots_t,
        _knots_x=knots_x,
        _knots_d=knots_d,
        _knots_v=knots_v,
        _d_edge=d_min,
        _well_far=well_far,
    )
    try:
        amp, _ = asymptotic_coefficient(path)
        path.A = amp
    except TailError:
        path.A = None
    return path


def asymptotic_coefficient(path):
    """Fit the tail of the normalized velocity x1 = xdot/sqrt(S0).

    Returns ``(A, omega)`` from a straight-line fit of log x1 against t over
    the decade x1 in [1e-8, 1e-7] on the t > center side.  Raises
    :class:`TailError` when the sampled horizon does not reach that decade
    or the fit is not cleanly exponential.
    """
    tau = path.t - path.center_time
    right = tau > 0.0
    x1 = np.abs(path.xdot[right]) / path.jacobian
    ts = tau[right]
    window = (x1 >= _FIT_LO) & (x1 <= _FIT_HI)
    if int(np.count_nonzero(window)) < _FIT_MIN_SAMPLES:
        raise TailError(
            "sampled horizon too short to resolve the velocity tail decade"
        )
    tw = ts[window]
    yw = np.log(x1[window])
    slope, intercept = np.polyfit(tw, yw, 1)
    resid = yw - (slope * tw + intercept)
    ss_tot = float(np.sum((yw - yw.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0.0 else 0.0
    if r2 < _FIT_MIN_R2 or slope >= 0.0:
        raise TailError("velocity tail is not cleanly exponential")
    return float(math.exp(intercept)), float(-slope)


def action_coefficient(big_n):
    """Closed-form one-way action coefficient for the x^(2N) bounce family,
    4**nu * Gamma(N*nu)**2 / Gamma(2*N*nu) with nu = 1/(N-1)."""
    n = int(big_n)
    if n < 2:
        raise ValidationError("exponent parameter must be an integer >= 2")
    nu = 1.0 / (n - 1.0)
    return float(
        4.0**nu * math.gamma(n * nu) ** 2 / math.gamma(2.0 * n * nu)
    )


def action_coefficient_quadrature(big_n):
    """The same coefficient as 2*integral_0^1 x*sqrt(1 - x**(2N-2)) dx via an
    independent double-exponential quadrature (endpoint-singular integrand)."""
    import mpmath

    n = int(big_n)
    if n < 2:
        raise ValidationError("exponent parameter must be an integer >= 2")
    p = 2 * n - 2

    def integrand(x):
        return 2.0 * x * mpmath.sqrt(max(1.0 - float(x) ** p, 0.0))

    with mpmath.workdps(25):
        val = mpmath.quad(integrand, [0.0, 1.0])
    return float(val)


def action_coefficient_inconsistent_form(big_n):
    """A superficially plausible but wrong closed form, Gamma(N/(N-1))/2,
    kept as a regression guard: it disagrees with the quadrature route for
    every N >= 2."""
    n = int(big_n)
    if n < 2:
        raise ValidationError("exponent parameter must be an integer >= 2")
    return float(math.gamma(n / (n - 1.0)) / 2.0)
