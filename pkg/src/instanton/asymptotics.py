"""Gaussian integrals, one-dimensional steepest descent, and a toy
analytic continuation.

Three small pieces of semiclassical machinery that the physics modules
lean on for cross-checks:

* ``gaussian_integral`` evaluates exp(-x.A.x/2 + b.x) integrals in
  closed form through a Cholesky factorization.
* ``steepest_descent`` expands integrals of exp(-A(x)/h) about the
  interior minimum of the exponent, optionally including the first
  correction factor built from the third and fourth derivatives.
* ``toy_imaginary_part`` continues the normalized quartic integral to
  negative coupling along straight rays at +/- pi/4 and reports the
  imaginary part next to its weak-coupling asymptotic form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import minimize_scalar

from .errors import DefinitenessError, SaddleError, ValidationError

__all__ = [
    "QuadraticForm",
    "ToyImaginaryPart",
    "gaussian_integral",
    "steepest_descent",
    "toy_imaginary_part",
]

_MAX_DIM = 16


@dataclass(frozen=True)
class QuadraticForm:
    """Exponent data -x.matrix.x/2 + offset.x of a Gaussian integrand."""

    matrix: np.ndarray
    offset: np.ndarray | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"matrix must be square, got shape {m.shape}")
        n = m.shape[0]
        if n == 0 or n > _MAX_DIM:
            raise ValidationError(
                f"matrix dimension must be between 1 and {_MAX_DIM}, got {n}"
            )
        scale = np.max(np.abs(m)) or 1.0
        if not np.allclose(m, m.T, rtol=1e-10, atol=1e-13 * scale):
            raise ValidationError("matrix must be symmetric")
        b = self.offset
        b = np.zeros(n) if b is None else np.asarray(b, dtype=float)
        if b.shape != (n,):
            raise ValidationError(
                f"offset must have shape ({n},), got {b.shape}"
            )
        # Store symmetrized/validated copies.
        object.__setattr__(self, "matrix", 0.5 * (m + m.T))
        object.__setattr__(self, "offset", b)


def gaussian_integral(form):
    """Closed-form value of the n-dimensional Gaussian integral."""
    a = form.matrix
    b = form.offset
    n = a.shape[0]
    try:
        chol = cho_factor(a, lower=True)
    except LinAlgError as exc:
        raise DefinitenessError(
            "quadratic form is not positive definite"
        ) from exc
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol[0]))))
    shift = 0.5 * float(b @ cho_solve(chol, b))
    return math.exp(0.5 * n * math.log(2.0 * math.pi) - 0.5 * log_det + shift)


def _stencil(a_func, x0, delta):
    """Values of the exponent on the five-point stencil around x0."""
    return np.array(
        [float(a_func(x0 + k * delta)) for k in (-2.0, -1.0, 0.0, 1.0, 2.0)]
    )


def _locate_minimum(a_func, bracket):
    lo, hi = bracket
    if not lo < hi:
        raise ValidationError(f"bracket must be increasing, got {bracket}")
    res = minimize_scalar(
        lambda x: float(a_func(x)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12 * max(1.0, abs(lo), abs(hi))},
    )
    x0 = float(res.x)
    guard = 1e-6 * (hi - lo)
    if x0 - lo < guard or hi - x0 < guard:
        raise SaddleError(
            "exponent has no interior minimum inside the bracket "
            f"({lo}, {hi})"
        )
    return x0


def steepest_descent(a_func, h, order=1, bracket=None):
    """Small-h expansion of the integral of exp(-A(x)/h).

    ``order=0`` is the bare Gaussian about the minimum of ``A``;
    ``order=1`` multiplies in the first correction factor,
    1 + h (5 A'''^2 / A''^3 - 3 A'''' / A''^2) / 24.  Derivatives are
    finite-differenced, so ``A`` only needs to be smooth near the
    minimum.
    """
    if not math.isfinite(h) or h <= 0.0:
        raise ValidationError(f"h must be positive, got {h}")
    if order not in (0, 1):
        raise ValidationError(f"order must be 0 or 1, got {order}")
    x0 = _locate_minimum(a_func, bracket if bracket is not None else (-10.0, 10.0))
    scale = max(1.0, abs(x0))
    d_curv = 3e-3 * scale

    # Polish the optimizer's minimum with Newton steps on the
    # finite-differenced gradient before measuring curvatures there.
    for _ in range(3):
        v = _stencil(a_func, x0, d_curv)
        grad = (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * d_curv)
        curv = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (
            12.0 * d_curv**2
        )
        if curv <= 0.0:
            raise SaddleError(
                f"exponent is not convex at its stationary point x = {x0:.6g}"
            )
        step = grad / curv
        x0 -= step
        if abs(step) < 1e-12 * scale:
            break

    v = _stencil(a_func, x0, d_curv)
    a0 = v[2]
    d2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (
        12.0 * d_curv**2
    )
    if d2 <= 0.0:
        raise SaddleError(
            f"exponent is not convex at its stationary point x = {x0:.6g}"
        )
    lead = math.sqrt(2.0 * math.pi * h / d2) * math.exp(-a0 / h)
    if order == 0:
        return lead
    w = _stencil(a_func, x0, 1e-2 * scale)
    d_wide = 1e-2 * scale
    d3 = (w[4] - 2.0 * w[3] + 2.0 * w[1] - w[0]) / (2.0 * d_wide**3)
    d4 = (w[4] - 4.0 * w[3] + 6.0 * w[2] - 4.0 * w[1] + w[0]) / d_wide**4
    factor = 1.0 + h * (5.0 * d3 * d3 / d2**3 - 3.0 * d4 / d2**2) / 24.0
    return lead * factor


@dataclass(frozen=True)
class ToyImaginaryPart:
    """Continued quartic toy integral next to its asymptotic form."""

    g: float
    exact: float
    asymptotic: float
    real_part: float
    radius_spread: float
    flagged: bool


def _ray_integral(alpha, g_val, cut):
    """Integral of the toy integrand along the ray arg(z) = alpha.

    The quadrature interval is split at every half-oscillation of the
    exp(i s^2 / 2) phase up to ``cut`` so tanh-sinh panels stay smooth,
    then runs to infinity where the quartic term kills the tail.
    """
    direction = mp.expjpi(alpha / mp.pi)

    def integrand(s):
        z = direction * s
        return mp.exp(-0.5 * z * z - 0.25 * g_val * z**4) * direction

    points = [mp.mpf(0)]
    k = 1
    while k < 400:
        knot = mp.sqrt(2.0 * mp.pi * k)
        if knot >= cut:
            break
        points.append(knot)
        k += 1
    points.extend([cut, mp.inf])
    return mp.quad(integrand, points)


def toy_imaginary_part(g):
    """Imaginary part of the continued quartic integral at coupling g < 0.

    The integral of exp(-x^2/2 - g x^4/4)/sqrt(2 pi) is continued to
    negative coupling by bending the contour ends onto rays at
    arg(z) = -pi/4 and 3 pi/4; the magnitude of the resulting imaginary
    part is reported as ``exact`` next to the weak-coupling form
    exp(1/(4g))/sqrt(2).  ``radius_spread`` measures how much the value
    moves when the quadrature split point slides along the ray, and
    ``flagged`` marks couplings outside the asymptotic regime.
    """
    if not math.isfinite(g) or g >= 0.0:
        raise ValidationError(
            f"continuation needs a negative coupling, got {g}"
        )
    asymptotic = math.exp(1.0 / (4.0 * g)) / math.sqrt(2.0)
    with mp.workdps(25):
        g_val = mp.mpf(g)
        saddle_radius = 1.0 / mp.sqrt(-g_val)
        values = []
        for mult in (2.0, 3.0, 4.0):
            cut = mult * saddle_radius
            total = _ray_integral(-0.25 * mp.pi, g_val, cut) - _ray_integral(
                0.75 * mp.pi, g_val, cut
            )
            values.append(total / mp.sqrt(2.0 * mp.pi))
        ims = [abs(mp.im(v)) for v in values]
        exact = float(ims[1])
        real_part = float(mp.re(values[1]))
        spread = float((max(ims) - min(ims)) / ims[1]) if ims[1] > 0 else 0.0
    flagged = abs(g) >= 0.5 or abs(exact / asymptotic - 1.0) > 0.5
    return ToyImaginaryPart(
        g=float(g),
        exact=exact,
        asymptotic=asymptotic,
        real_part=real_part,
        radius_spread=spread,
        flagged=flagged,
    )
