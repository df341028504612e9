"""Parity doublets of a symmetric double well from phase integrals.

Instead of diagonalizing anything, the even/odd levels of the ``n``-th
doublet are located as energy roots of the two quantization conditions

    sin(theta) - 2 exp(phi) cos(theta) = 0   (even member, ``e_plus``)
    sin(theta) + 2 exp(phi) cos(theta) = 0   (odd member, ``e_minus``)

where ``theta`` is the phase accumulated across one classically allowed
well and ``phi`` is the suppression integral across the central barrier.
Both integrals are evaluated with a turning-point-absorbing change of
variable so fixed-order Gauss panels converge at machine precision.

The potential is assumed symmetric about ``x = 0`` with the barrier
crest there and one well on each side.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ._quad import panel_nodes
from .errors import DomainError, NoWellError, ValidationError

__all__ = ["ParityDoublet", "phase_integrals", "quantize"]

_ORDER = 48
_PANELS = 6
# brentq tolerances; rtol is pinned at scipy's floor of 4*eps.
_XTOL = 1e-14
_RTOL = 4.0 * np.finfo(float).eps


@dataclass(frozen=True)
class ParityDoublet:
    """One even/odd pair of levels below the barrier crest."""

    n: int
    e_plus: float
    e_minus: float
    parity_split: float


@dataclass(frozen=True)
class _Geometry:
    """Right-well minimum and crest height of a symmetric double well."""

    x_well: float
    v_min: float
    v_top: float


def _geometry(model) -> _Geometry:
    v_top = float(model.value(0.0))
    hi = 1.0
    while float(model.value(hi)) <= v_top:
        hi *= 2.0
        if hi > 1e9:
            raise NoWellError("no confining outer wall found on x > 0")
    res = minimize_scalar(
        lambda x: float(model.value(x)),
        bounds=(0.0, hi),
        method="bounded",
        options={"xatol": 1e-13},
    )
    x_well = float(res.x)
    v_min = float(res.fun)
    if not v_min < v_top:
        raise NoWellError("potential has no well below its value at x = 0")
    return _Geometry(x_well, v_min, v_top)


def _turning_points(model, energy, geom):
    """Inner and outer classical turning points of the right-hand well."""
    f = lambda x: float(model.value(x)) - energy
    x_in = brentq(f, 0.0, geom.x_well, xtol=_XTOL, rtol=_RTOL)
    step = max(geom.x_well, 1.0)
    hi = geom.x_well + step
    while f(hi) <= 0.0:
        step *= 2.0
        hi += step
    x_out = brentq(f, geom.x_well, hi, xtol=_XTOL, rtol=_RTOL)
    return x_in, x_out


def _well_phase(model, energy, hbar, x_in, x_out):
    # x = x_in + (x_out - x_in) sin^2(s/2) absorbs the sqrt zeros at both
    # turning points, leaving an analytic integrand on [0, pi].
    s, w = panel_nodes(np.linspace(0.0, math.pi, _PANELS + 1), _ORDER)
    width = x_out - x_in
    x = x_in + width * np.sin(0.5 * s) ** 2
    jac = 0.5 * width * np.sin(s)
    speed = np.sqrt(np.maximum(2.0 * (energy - model.value(x)), 0.0))
    return float(np.sum(speed * jac * w)) / hbar


def _barrier_phase(model, energy, hbar, x_in):
    # Only the upper endpoint is a turning point; x = x_in sin(s) clusters
    # nodes there while the crest end stays regular.
    s, w = panel_nodes(np.linspace(0.0, 0.5 * math.pi, _PANELS + 1), _ORDER)
    x = x_in * np.sin(s)
    jac = x_in * np.cos(s)
    speed = np.sqrt(np.maximum(2.0 * (model.value(x) - energy), 0.0))
    # Factor 2: the barrier integral runs over both signs of x.
    return 2.0 * float(np.sum(speed * jac * w)) / hbar


def _phases(model, energy, hbar, geom):
    x_in, x_out = _turning_points(model, energy, geom)
    theta = _well_phase(model, energy, hbar, x_in, x_out)
    phi = _barrier_phase(model, energy, hbar, x_in)
    return theta, phi


def phase_integrals(model, energy, hbar=1.0):
    """Well phase ``theta`` and barrier suppression ``phi`` at ``energy``.

    ``theta`` integrates sqrt(2(E - V)) across one well, ``phi`` integrates
    sqrt(2(V - E)) across the barrier, both divided by ``hbar``.  Energies
    must lie strictly between the well bottom and the barrier crest.
    """
    if hbar <= 0.0:
        raise ValidationError(f"hbar must be positive, got {hbar}")
    energy = float(energy)
    if not math.isfinite(energy):
        raise ValidationError(f"energy must be finite, got {energy}")
    geom = _geometry(model)
    if energy <= geom.v_min:
        raise DomainError(
            f"energy {energy} does not clear the well bottom {geom.v_min}"
        )
    if energy >= geom.v_top:
        raise DomainError(
            f"energy {energy} is not below the barrier crest {geom.v_top}"
        )
    return _phases(model, energy, hbar, geom)


def _invert_phase(target, theta_of, e_lo, e_hi):
    """Energy at which the monotone well phase reaches ``target``."""
    return brentq(
        lambda e: theta_of(e) - target, e_lo, e_hi, xtol=_XTOL, rtol=_RTOL
    )


def quantize(model, hbar=1.0, n_max=0):
    """Parity doublets ``n = 0 .. n_max`` below the barrier crest.

    Doublets whose quantization roots would climb past the crest are
    dropped with a ``UserWarning``; the returned list is then shorter
    than requested.
    """
    if hbar <= 0.0:
        raise ValidationError(f"hbar must be positive, got {hbar}")
    n_max = int(n_max)
    if n_max < 0:
        raise ValidationError(f"n_max must be nonnegative, got {n_max}")
    geom = _geometry(model)
    span = geom.v_top - geom.v_min
    e_floor = geom.v_min + 1e-12 * span
    e_ceil = geom.v_top - 1e-12 * span

    cache = {}

    def phases_of(e):
        if e not in cache:
            cache[e] = _phases(model, e, hbar, geom)
        return cache[e]

    theta_of = lambda e: phases_of(e)[0]

    def residual(e, sign):
        theta, phi = phases_of(e)
        return math.sin(theta) + sign * 2.0 * math.exp(phi) * math.cos(theta)

    theta_top = theta_of(e_ceil)
    doublets = []
    for n in range(n_max + 1):
        t_lo = (n + 0.1) * math.pi
        t_hi = (n + 0.9) * math.pi
        if theta_top <= t_lo:
            break
        e_lo = _invert_phase(t_lo, theta_of, e_floor, e_ceil)
        e_hi = (
            _invert_phase(t_hi, theta_of, e_lo, e_ceil)
            if theta_top > t_hi
            else e_ceil
        )
        pair = []
        for sign in (-1.0, +1.0):
            f_lo = residual(e_lo, sign)
            f_hi = residual(e_hi, sign)
            if f_lo * f_hi >= 0.0:
                pair = None
                break
            pair.append(
                brentq(
                    residual,
                    e_lo,
                    e_hi,
                    args=(sign,),
                    xtol=_XTOL,
                    rtol=_RTOL,
                )
            )
        if pair is None:
            break
        e_plus, e_minus = pair
        doublets.append(ParityDoublet(n, e_plus, e_minus, e_minus - e_plus))
    if len(doublets) < n_max + 1:
        warnings.warn(
            f"only {len(doublets)} doublet(s) fit below the barrier crest; "
            f"requested {n_max + 1}",
            UserWarning,
            stacklevel=2,
        )
    return doublets
