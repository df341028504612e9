"""Current-phase relation of a one-dimensional weak link.

The order parameter along the link obeys, in coherence-length units,

    f'' + f - |f|^2 f = 0,   f(0) = 1,   f(L) = exp(i delta),

with ``L`` the junction length over the coherence length.  Dropping the
cubic term gives the closed-form ``linear_cpr`` (a sine with a 1/sinc
amplitude); ``nonlinear_cpr`` solves the full boundary-value problem on
a uniform grid with damped-free Newton iterations, walking the cubic
term in with a homotopy parameter.  The supercurrent is read off the
exactly conserved discrete flux Im(conj(f_j) f_{j+1})/h and rescaled by
``L`` so the short-junction limit reduces to sin(delta) with unit
critical current.

``washboard_correction`` turns the deviation of a computed relation
from a pure sine into the phase-dependent energy correction it induces,
by spectral antidifferentiation over one full period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from .errors import ContinuationError, ResonanceError, ValidationError

__all__ = [
    "CurrentPhaseRelation",
    "WashboardCorrection",
    "linear_cpr",
    "nonlinear_cpr",
    "washboard_correction",
]

_HOMOTOPY = (0.4, 0.7, 1.0)
_MAX_NEWTON = 40


@dataclass(frozen=True)
class CurrentPhaseRelation:
    """Sampled current-phase relation of a weak link."""

    l_over_zeta: float
    delta: np.ndarray
    current: np.ndarray
    j_c: float
    deviation: np.ndarray
    profiles: np.ndarray
    x_grid: np.ndarray
    method: str


def _check_inputs(l_over_zeta, delta, x_points):
    if not math.isfinite(l_over_zeta) or l_over_zeta <= 0.0:
        raise ValidationError(
            f"junction length must be positive, got {l_over_zeta}"
        )
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    if delta.ndim != 1 or delta.size == 0 or not np.all(np.isfinite(delta)):
        raise ValidationError("delta must be a one-dimensional finite array")
    if x_points < 8:
        raise ValidationError(f"x_points must be at least 8, got {x_points}")
    return delta


def _linear_profiles(lam, delta, x):
    # f(x) = [sin(L - x) + exp(i delta) sin(x)] / sin(L)
    sin_l = math.sin(lam)
    base = np.sin(lam - x)[None, :] + 0.0j
    drive = np.exp(1j * delta)[:, None] * np.sin(x)[None, :]
    return (base + drive) / sin_l


def linear_cpr(l_over_zeta, delta, x_points=513):
    """Sine relation of the linearized link, amplitude L/sin(L)."""
    delta = _check_inputs(l_over_zeta, delta, x_points)
    lam = float(l_over_zeta)
    if abs(math.sin(lam)) < 1e-8:
        raise ResonanceError(
            f"junction length {lam} sits on a resonance of the linearized "
            "link; the boundary-value problem is singular there"
        )
    x = np.linspace(0.0, lam, x_points)
    profiles = _linear_profiles(lam, delta, x)
    j_c = lam / math.sin(lam)
    current = j_c * np.sin(delta)
    deviation = current / j_c - np.sin(delta)
    return CurrentPhaseRelation(
        l_over_zeta=lam,
        delta=delta,
        current=current,
        j_c=j_c,
        deviation=deviation,
        profiles=profiles,
        x_grid=x,
        method="sinc-corrected",
    )


def _residual(f, k, inv_h2):
    lap = (f[2:] - 2.0 * f[1:-1] + f[:-2]) * inv_h2
    mid = f[1:-1]
    return lap + mid - k * np.abs(mid) ** 2 * mid


def _newton_step(f, k, inv_h2):
    """One Newton update of the interior nodes; returns (f, max|F|)."""
    res = _residual(f, k, inv_h2)
    a = f[1:-1].real
    b = f[1:-1].imag
    mod2 = a * a + b * b
    n = a.size
    # Interleaved (Re, Im) unknowns: the 2x2 local blocks sit on the
    # diagonal and first off-diagonals, grid neighbors two entries away.
    ab = np.zeros((5, 2 * n))
    ab[0, 2:] = inv_h2
    ab[1, 1::2] = -2.0 * k * a * b
    ab[2, 0::2] = -2.0 * inv_h2 + 1.0 - k * (mod2 + 2.0 * a * a)
    ab[2, 1::2] = -2.0 * inv_h2 + 1.0 - k * (mod2 + 2.0 * b * b)
    ab[3, 0:-1:2] = -2.0 * k * a * b
    ab[4, :-2] = inv_h2
    rhs = np.empty(2 * n)
    rhs[0::2] = -res.real
    rhs[1::2] = -res.imag
    step = solve_banded((2, 2), ab, rhs)
    f = f.copy()
    f[1:-1] += step[0::2] + 1j * step[1::2]
    return f, float(np.max(np.abs(res)))


def _solve_profile(delta, lam, x, inv_h2, tol):
    if abs(math.sin(lam)) > 0.1:
        f = _linear_profiles(lam, np.array([delta]), x)[0]
    else:
        s = x / lam
        f = (1.0 - s) + np.exp(1j * delta) * s
    f[0] = 1.0
    f[-1] = np.exp(1j * delta)
    for k in _HOMOTOPY:
        for _ in range(_MAX_NEWTON):
            f, worst = _newton_step(f, k, inv_h2)
            if worst < tol:
                break
        else:
            raise ContinuationError(
                f"Newton iteration stalled at homotopy weight {k} for "
                f"phase {delta:.3f} (residual {worst:.2e})"
            )
    # Polish once more so the stored profile, not its predecessor, is
    # the one whose residual met the tolerance.
    f, worst = _newton_step(f, 1.0, inv_h2)
    if worst > tol:
        raise ContinuationError(
            f"final residual {worst:.2e} exceeds {tol:.2e} at phase {delta:.3f}"
        )
    return f


def nonlinear_cpr(l_over_zeta, delta, x_points=513):
    """Current-phase relation with the cubic depairing term kept."""
    delta = _check_inputs(l_over_zeta, delta, x_points)
    lam = float(l_over_zeta)
    x = np.linspace(0.0, lam, x_points)
    h = x[1] - x[0]
    inv_h2 = 1.0 / (h * h)
    # The discrete residual is dominated by the 1/h^2 second difference,
    # so its float64 floor scales the same way.
    tol = max(1e-12, 12.0 * np.finfo(float).eps * (2.0 * inv_h2 + 1.0))
    profiles = np.empty((delta.size, x_points), dtype=complex)
    current = np.empty(delta.size)
    for i, d in enumerate(delta):
        f = _solve_profile(float(d), lam, x, inv_h2, tol)
        profiles[i] = f
        flux = np.imag(np.conj(f[:-1]) * f[1:]) / h
        current[i] = lam * float(np.mean(flux))
    j_c = float(np.max(np.abs(current)))
    deviation = current / j_c - np.sin(delta) if j_c > 0.0 else 0.0 * current
    return CurrentPhaseRelation(
        l_over_zeta=lam,
        delta=delta,
        current=current,
        j_c=j_c,
        deviation=deviation,
        profiles=profiles,
        x_grid=x,
        method="nonlinear-homotopy",
    )


@dataclass(frozen=True)
class WashboardCorrection:
    """Phase-dependent energy correction induced by a non-sine relation."""

    e_j: float
    _value: CubicSpline
    _slope: CubicSpline

    def value(self, delta):
        return self._value(delta)

    def derivative(self, delta):
        return self._slope(delta)


def _periodic_antiderivative(grid, samples):
    """Cumulative integral of uniform periodic samples, last point dropped."""
    n = grid.size - 1
    period = grid[-1] - grid[0]
    coef = np.fft.rfft(samples[:n])
    freq = 2.0j * np.pi * np.arange(coef.size) / period
    mean = coef[0].real / n
    coef[0] = 0.0
    coef[1:] /= freq[1:]
    wavy = np.fft.irfft(coef, n)
    anti = wavy + mean * (grid[:n] - grid[0])
    return np.append(anti, wavy[0] + mean * period)


def washboard_correction(cpr, e_j):
    """Energy correction ``e_j * integral of the sine deviation``.

    Needs a nonlinearly solved relation sampled uniformly over one full
    2*pi period of the phase.
    """
    if not math.isfinite(e_j) or e_j <= 0.0:
        raise ValidationError(f"e_j must be positive, got {e_j}")
    if cpr.method != "nonlinear-homotopy":
        raise ValidationError(
            "washboard correction needs a nonlinearly solved relation; "
            f"got method {cpr.method!r}"
        )
    grid = np.asarray(cpr.delta, dtype=float)
    spacing = np.diff(grid)
    if grid.size < 16 or np.max(np.abs(spacing - spacing[0])) > 1e-9:
        raise ValidationError("phase grid must be uniform")
    if abs((grid[-1] - grid[0]) - 2.0 * np.pi) > 1e-9:
        raise ValidationError(
            "phase grid must span one full period of 2*pi, got "
            f"{grid[-1] - grid[0]:.6f}"
        )
    dev = np.asarray(cpr.deviation, dtype=float)
    anti = _periodic_antiderivative(grid, dev)
    anti = e_j * (anti - anti[0])
    return WashboardCorrection(
        e_j=float(e_j),
        _value=CubicSpline(grid, anti),
        _slope=CubicSpline(grid, e_j * dev),
    )
