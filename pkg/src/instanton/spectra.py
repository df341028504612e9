"""Semiclassical spectra assembled from dilute-instanton ingredients.

The trajectory and determinant layers deliver four numbers per well: the
classical action ``S0``, the tail amplitude ``A`` of the normalized zero
mode, the well frequency ``omega`` and the removed-zero-mode determinant
ratio.  This module turns those into the quoted physics: parity doublets
of a degenerate double well, the Bloch band of a periodic chain of wells,
metastable decay rates with survival curves, and a couple of bookkeeping
diagnostics for the dilute-gas assumption itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import determinants, potentials, trajectory
from .errors import SemanticsError, ValidationError

__all__ = [
    "Diagnostics",
    "SemiclassicalSpectrum",
    "bloch_band",
    "decay_rate",
    "diagnostics",
    "double_well_splitting",
    "flux_ground_energy",
    "survival_curve",
    "washboard_analysis",
]

# Potential families with a single metastable well (decay physics); every
# other known family has degenerate minima and exhibits level splitting.
_METASTABLE_FAMILIES = frozenset({"poly_bounce", "washboard"})
_DEGENERATE_FAMILIES = frozenset(
    {"quartic_double_well", "parabolic_double_well", "flux", "periodic_cosine"}
)


@dataclass(frozen=True)
class SemiclassicalSpectrum:
    """Parity doublet of a degenerate double well at one loop."""

    delta_e: float
    e_plus: float
    e_minus: float
    k_coeff: float
    s0: float
    omega: float
    hbar: float


@dataclass(frozen=True)
class DecayResult:
    """One-loop metastable decay data; ``gamma`` is exactly ``2 * im_e0``."""

    im_e0: float
    gamma: float
    lifetime: float
    k_coeff: float
    s0: float
    omega: float
    hbar: float


@dataclass(frozen=True)
class WashboardResult:
    """Decay analysis of one tilted-washboard well."""

    s0: float
    omega: float
    hbar: float
    k_coeff: float
    im_e0: float
    gamma: float
    lifetime: float
    negative_mode: bool
    ratio_prime: float
    well: float
    exit: float


@dataclass(frozen=True)
class Diagnostics:
    """Sanity numbers for the dilute-instanton approximation."""

    thermal_ratio: float
    diluteness: float
    dilute_gas_violated: bool
    expected_count: float | None


def _check_inputs(s0, a_coeff, omega, hbar):
    for name, value in (("s0", s0), ("a", a_coeff), ("omega", omega), ("hbar", hbar)):
        if not (np.isfinite(value) and value > 0.0):
            raise ValidationError(f"{name} must be positive and finite, got {value!r}")


def _check_family(family, *, metastable):
    if family is None:
        return
    if family not in _METASTABLE_FAMILIES | _DEGENERATE_FAMILIES:
        raise ValidationError(f"unknown potential family {family!r}")
    if metastable and family not in _METASTABLE_FAMILIES:
        raise SemanticsError(
            f"family {family!r} has degenerate minima; it splits levels instead "
            "of decaying"
        )
    if not metastable and family in _METASTABLE_FAMILIES:
        raise SemanticsError(
            f"family {family!r} is metastable; its doublet partner is a "
            "resonance, not a bound state"
        )


def _removed_mode_ratio(a_coeff, omega):
    # Infinite-horizon determinant ratio with the translation mode removed,
    # for a trajectory whose zero mode has tail amplitude A and decay rate
    # omega.  Positive for a monotonic (kink) profile; the bounce analogue
    # carries one sign flip from the single negative mode.
    return 1.0 / (2.0 * omega * a_coeff * a_coeff)


def double_well_splitting(s0, a_coeff, omega, hbar=1.0, ratio_prime=None, family=None):
    """One-loop parity splitting of a symmetric double well.

    ``ratio_prime`` overrides the removed-mode determinant ratio (as
    produced by :func:`instanton.determinants.zero_mode_removed_ratio`);
    by default the closed-form kink value ``1 / (2 omega A^2)`` is used.
    """
    _check_inputs(s0, a_coeff, omega, hbar)
    _check_family(family, metastable=False)
    if ratio_prime is None:
        ratio_prime = _removed_mode_ratio(a_coeff, omega)
    elif ratio_prime <= 0.0:
        raise SemanticsError(
            "splitting needs a positive removed-mode ratio; a negative value "
            "signals a bounce (decaying well)"
        )
    k = determinants.k_coefficient(s0, ratio_prime, hbar)
    delta_e = 2.0 * hbar * k * math.exp(-s0 / hbar)
    center = 0.5 * hbar * omega
    return SemiclassicalSpectrum(
        delta_e=delta_e,
        e_plus=center - 0.5 * delta_e,
        e_minus=center + 0.5 * delta_e,
        k_coeff=k,
        s0=float(s0),
        omega=float(omega),
        hbar=float(hbar),
    )


def bloch_band(s0, a_coeff, omega, hbar, theta=0.0):
    """Lowest tight-binding band of a periodic chain of identical wells.

    ``E(theta) = hbar omega / 2 + delta_e cos(theta)`` where ``delta_e`` is
    the two-well splitting; the bandwidth is twice that splitting.
    """
    spec = double_well_splitting(s0, a_coeff, omega, hbar=hbar)
    theta_arr = np.asarray(theta, dtype=float)
    band = 0.5 * hbar * omega + spec.delta_e * np.cos(theta_arr)
    if band.ndim == 0:
        return float(band)
    return band


def decay_rate(s0, a_coeff, omega, hbar, family=None, ratio_prime=None):
    """One-loop decay data of a metastable well.

    The imaginary ground-state energy shift is ``hbar K exp(-S0/hbar)``;
    the decay rate is twice that, and the lifetime its inverse (times
    hbar).  ``ratio_prime``, if given, must be negative: a metastable
    bounce has exactly one negative fluctuation mode.
    """
    _check_inputs(s0, a_coeff, omega, hbar)
    _check_family(family, metastable=True)
    if ratio_prime is None:
        ratio_prime = -_removed_mode_ratio(a_coeff, omega)
    elif ratio_prime >= 0.0:
        raise SemanticsError(
            "decay needs a negative removed-mode ratio (one unstable mode); "
            "a positive value signals a kink between degenerate wells"
        )
    k = determinants.k_coefficient(s0, ratio_prime, hbar)
    im_e0 = hbar * k * math.exp(-s0 / hbar)
    return DecayResult(
        im_e0=im_e0,
        gamma=2.0 * im_e0,
        lifetime=hbar / im_e0,
        k_coeff=k,
        s0=float(s0),
        omega=float(omega),
        hbar=float(hbar),
    )


def survival_curve(result, samples=512):
    """Exponential survival probability out to five lifetimes."""
    t = np.linspace(0.0, 5.0 * result.lifetime, samples)
    p = np.exp(-result.gamma * t / result.hbar)
    return t, p


def washboard_analysis(model, well_index=0, dt=None):
    """Full decay pipeline for one well of a tilted washboard.

    Locates the requested well (index counts 2*pi periods from the first
    minimum above zero), traces the escape trajectory, removes the
    translation mode from the fluctuation determinant and assembles the
    decay rate with the charging-energy hbar ``sqrt(2 E_C / E_J)``.
    """
    if getattr(model, "family", None) != "washboard":
        raise SemanticsError("washboard_analysis needs a washboard potential")
    points = potentials.stationary_points(model, (0.0, 2.0 * np.pi))
    wells = [p for p in points if p.kind == "min"]
    if not wells:
        raise SemanticsError("no metastable well below the requested bias")
    well = wells[0].x + 2.0 * np.pi * int(well_index)
    exit_x = potentials.exit_point(model, well)
    grid = None if dt is None else trajectory.GridSpec(dt=float(dt))
    path = trajectory.solve_path(model, (well, exit_x), grid=grid)
    fluct = determinants.zero_mode_removed_ratio(path)
    hbar_eff = math.sqrt(2.0 * model.e_c / model.e_j)
    decay = decay_rate(
        path.S0,
        path.A,
        path.omega,
        hbar_eff,
        family="washboard",
        ratio_prime=fluct.ratio_prime,
    )
    return WashboardResult(
        s0=path.S0,
        omega=path.omega,
        hbar=hbar_eff,
        k_coeff=decay.k_coeff,
        im_e0=decay.im_e0,
        gamma=decay.gamma,
        lifetime=decay.lifetime,
        negative_mode=fluct.negative_mode,
        ratio_prime=fluct.ratio_prime,
        well=float(well),
        exit=float(exit_x),
    )


def flux_ground_energy(s0, a_coeff, hbar):
    """Ground energy of the symmetric flux doublet, ``hbar/2`` minus half
    the splitting written in its tail-amplitude form."""
    _check_inputs(s0, a_coeff, 1.0, hbar)
    shift = hbar * math.exp(-s0 / hbar) * a_coeff * math.sqrt(s0 / (math.pi * hbar))
    return 0.5 * hbar + shift


def diagnostics(*, k_coeff, s0, hbar, delta_e, temperature, horizon_T=None):
    """Dilute-gas sanity checks.

    ``thermal_ratio`` compares the splitting against the thermal energy;
    ``diluteness`` is the instanton density ``K exp(-S0/hbar)`` (per unit
    Euclidean time), flagged when it exceeds 0.1; ``expected_count`` is
    the mean number of instantons inside a horizon of length
    ``horizon_T``, when one is given.
    """
    if temperature <= 0.0:
        raise ValidationError("temperature must be positive")
    _check_inputs(s0, 1.0, 1.0, hbar)
    if k_coeff <= 0.0:
        raise ValidationError("k_coeff must be positive")
    density = k_coeff * math.exp(-s0 / hbar)
    count = None if horizon_T is None else density * float(horizon_T)
    return Diagnostics(
        thermal_ratio=delta_e / temperature,
        diluteness=density,
        dilute_gas_violated=bool(density > 0.1),
        expected_count=count,
    )
