"""Independent exact-diagonalization oracles.

Everything here deliberately avoids the semiclassical machinery: a
second-order finite-difference grid Hamiltonian for one-dimensional wells, a
charge-basis Bloch-band solver (float64 and arbitrary-precision Sturm
bisection for exponentially narrow bands), position matrix elements, and a
driven population propagation in the energy eigenbasis.  Results from this
module are what the instanton formulas get compared against, so none of the
tunneling approximations may leak in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal

from .errors import BoxError, CutoffError, IntegrationError, ValidationError

TWO_PI = 2.0 * math.pi

# Norm drift beyond this is an integrator failure, not physics: the
# propagation is unitary and the default tolerances hold drift near 1e-12.
_NORM_GUARD = 1e-6


@dataclass(frozen=True)
class GridSpectrum:
    """Low-lying eigenpairs of a one-dimensional Hamiltonian on a grid.

    ``states`` holds one eigenfunction per column, normalized so that
    ``sum(psi**2) * h == 1`` with ``h`` the grid spacing.
    """

    energies: np.ndarray
    states: np.ndarray
    grid: np.ndarray
    hbar: float


@dataclass(frozen=True)
class BlochSpectrum:
    """Charge-basis band energies at one Bloch angle."""

    energies: np.ndarray
    charges: np.ndarray
    theta: float
    charge_cutoff: int


@dataclass(frozen=True)
class DriveSpec:
    """Classical cosine drive amplitude * cos(frequency * t + phase)."""

    amplitude: float
    frequency: float
    phase: float = 0.0


@dataclass(frozen=True)
class PopulationTrace:
    """Sampled level populations and the final complex amplitudes."""

    times: np.ndarray
    populations: np.ndarray
    final_amplitudes: np.ndarray


def grid_spectrum(model, domain, points=4096, hbar=1.0, levels=6):
    """Diagonalize -(hbar^2/2) d^2/dx^2 + V(x) on a hard-wall grid.

    ``model`` only needs a ``value`` method.  The discretization is the
    plain three-point Laplacian, so eigenvalues converge as h^2 (the
    Richardson diagnostic in the tests pins that rate).  Raises
    :class:`BoxError` when the requested box cannot confine the highest
    returned level, i.e. when the walls would act as part of the potential.
    """
    a, b = float(domain[0]), float(domain[1])
    if not (np.isfinite(a) and np.isfinite(b)) or not b > a:
        raise ValidationError("domain must be finite with left edge < right edge")
    points = int(points)
    if points < 64:
        raise ValidationError("need at least 64 grid points")
    levels = int(levels)
    if levels < 1:
        raise ValidationError("levels must be positive")
    if levels > points - 2:
        raise ValidationError("more levels requested than the grid can hold")
    if not hbar > 0.0:
        raise ValidationError("hbar must be positive")

    grid = np.linspace(a, b, points)
    h = grid[1] - grid[0]
    v = np.asarray(model.value(grid), dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValidationError("potential is not finite on the grid")

    kin = hbar * hbar / (h * h)
    diag = kin + v
    off = np.full(points - 1, -0.5 * kin)
    energies, vecs = eigh_tridiagonal(
        diag, off, select="i", select_range=(0, levels - 1)
    )

    # Hard walls must sit above every returned level, otherwise the box --
    # not the potential -- sets the spectrum.
    if min(v[0], v[-1]) <= energies[-1]:
        raise BoxError(
            "domain too narrow: the potential at the walls lies below the "
            f"highest requested level ({energies[-1]:.6g}); widen the box"
        )
    states = vecs / math.sqrt(h)
    return GridSpectrum(energies=energies, states=states, grid=grid, hbar=float(hbar))


def _required_cutoff(e_c, e_j):
    # charge support of the lowest well states grows like (e_j/e_c)^(1/4)
    return int(math.ceil(3.0 * (e_j / e_c) ** 0.25)) + 8


def bloch_spectrum(e_c, e_j, theta=0.0, charge_cutoff=None):
    """Band energies at Bloch angle ``theta`` from the charge basis.

    H = e_c (n - theta/2pi)^2 - (e_j/2) (|n><n+1| + h.c.) on integer charge
    states |n| <= cutoff; the float64 tridiagonal diagonalization is exact
    for every band wide enough for float64 to resolve (use
    :func:`bloch_bandwidth` beyond that).
    """
    e_c, e_j, theta = float(e_c), float(e_j), float(theta)
    if not (e_c > 0.0 and np.isfinite(e_c)):
        raise ValidationError("charging scale e_c must be positive")
    if not (e_j >= 0.0 and np.isfinite(e_j)):
        raise ValidationError("junction scale e_j must be non-negative")
    if not np.isfinite(theta):
        raise ValidationError("Bloch angle must be finite")
    required = _required_cutoff(e_c, e_j)
    cutoff = max(24, required) if charge_cutoff is None else int(charge_cutoff)
    if cutoff < required:
        raise CutoffError(
            f"charge cutoff {cutoff} too small for e_j/e_c = {e_j / e_c:.3g} "
            f"(need at least {required})"
        )
    n = np.arange(-cutoff, cutoff + 1, dtype=float)
    diag = e_c * (n - theta / TWO_PI) ** 2
    off = np.full(2 * cutoff, -0.5 * e_j)
    energies = (
        np.sort(diag)
        if e_j == 0.0
        else eigh_tridiagonal(diag, off, eigvals_only=True)
    )
    return BlochSpectrum(
        energies=energies, charges=n, theta=theta, charge_cutoff=cutoff
    )


def _sturm_count(diag, off_sq, lam, tiny):
    """Number of eigenvalues of the tridiagonal matrix below ``lam``."""
    count = 0
    t = diag[0] - lam
    if t == 0:
        t = -tiny
    if t < 0:
        count += 1
    for i in range(1, len(diag)):
        t = diag[i] - lam - off_sq / t
        if t == 0:
            t = -tiny
        if t < 0:
            count += 1
    return count


def _sturm_ground(diag, off_sq, lo, hi, tol, tiny):
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _sturm_count(diag, off_sq, mid, tiny) >= 1:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def bloch_bandwidth(e_c, e_j, charge_cutoff=None, dps=None):
    """Width of the lowest band, E0(pi) - E0(0), in exact arithmetic.

    Deep bands are exponentially narrow (log-width ~ -8/sqrt(2 e_c/e_j)), far
    below float64 resolution of the absolute energies, so the two band edges
    are located by Sturm bisection with mpmath numbers at a working precision
    that scales with the expected exponent.
    """
    import mpmath

    e_c, e_j = float(e_c), float(e_j)
    if not (e_c > 0.0 and e_j > 0.0):
        raise ValidationError("bandwidth needs positive e_c and e_j")
    ratio = e_j / e_c
    cutoff = (
        max(24, int(math.ceil(math.sqrt(8.0 * ratio))) + 10)
        if charge_cutoff is None
        else int(charge_cutoff)
    )
    if cutoff < _required_cutoff(e_c, e_j):
        raise CutoffError(f"charge cutoff {cutoff} too small for the band edge")
    work_dps = (
        max(25, int(8.0 * math.sqrt(ratio / 2.0) / math.log(10.0)) + 20)
        if dps is None
        else int(dps)
    )
    with mpmath.workdps(work_dps):
        ec, ej = mpmath.mpf(e_c), mpmath.mpf(e_j)
        off_sq = (ej / 2) ** 2
        tiny = mpmath.mpf(10) ** (-2 * work_dps)
        tol = (ec + ej) * mpmath.mpf(10) ** (-(work_dps - 5))
        edges = []
        for frac in (mpmath.mpf(0), mpmath.mpf(1) / 2):
            n = [mpmath.mpf(k) for k in range(-cutoff, cutoff + 1)]
            diag = [ec * (k - frac) ** 2 for k in n]
            lo, hi = -ej - 1, min(diag) + ec / 4 + 1
            edges.append(_sturm_ground(diag, off_sq, lo, hi, tol, tiny))
        width = edges[1] - edges[0]
        return float(width)


def band_trace(e_c, e_j, points=33, charge_cutoff=None):
    """Lowest band sampled over one Brillouin zone, theta in [0, 2pi]."""
    points = int(points)
    if points < 3:
        raise ValidationError("need at least 3 trace points")
    thetas = np.linspace(0.0, TWO_PI, points)
    energies = np.array(
        [
            bloch_spectrum(e_c, e_j, theta=t, charge_cutoff=charge_cutoff).energies[0]
            for t in thetas
        ]
    )
    return thetas, energies


def matrix_elements(spec, k):
    """Position matrix <i|x|j> on the first k grid eigenstates."""
    k = int(k)
    if k < 1 or k > spec.states.shape[1]:
        raise ValidationError(
            f"need 1 <= k <= {spec.states.shape[1]} computed states"
        )
    h = spec.grid[1] - spec.grid[0]
    s = spec.states[:, :k]
    return (s.T * spec.grid) @ s * h


def propagate_populations(
    spec,
    drive,
    t_final,
    levels=2,
    samples=801,
    initial=None,
    reverse=False,
    rtol=None,
):
    """Drive the first ``levels`` eigenstates and track their populations.

    The coupling is x * amplitude * cos(frequency t + phase), integrated in
    the interaction picture (so an undriven state is exactly stationary).
    ``reverse=True`` integrates from t_final back to zero, for time-reversal
    checks.  Raises :class:`IntegrationError` when the integrator's norm
    drift betrays tolerances too loose for the requested horizon.
    """
    levels = int(levels)
    if levels < 1 or levels > spec.states.shape[1]:
        raise ValidationError("levels outside the computed spectrum")
    t_final = float(t_final)
    if not (t_final > 0.0 and np.isfinite(t_final)):
        raise ValidationError("t_final must be positive and finite")
    samples = int(samples)
    if samples < 3:
        raise ValidationError("need at least 3 samples")
    rtol = 1e-10 if rtol is None else float(rtol)
    if not 0.0 < rtol < 0.1:
        raise ValidationError("rtol out of range")

    hbar = spec.hbar
    energies = np.asarray(spec.energies[:levels], dtype=float)
    x = matrix_elements(spec, levels)
    omega_ij = (energies[:, None] - energies[None, :]) / hbar

    if initial is None:
        y0 = np.zeros(levels, dtype=complex)
        y0[0] = 1.0
    else:
        y0 = np.asarray(initial, dtype=complex)
        if y0.shape != (levels,):
            raise ValidationError("initial amplitudes must match the level count")

    amp, freq, phase = drive.amplitude, drive.frequency, drive.phase

    def rhs(t, a):
        f = amp * math.cos(freq * t + phase)
        return (-1j * f / hbar) * ((x * np.exp(1j * omega_ij * t)) @ a)

    if reverse:
        t_span = (t_final, 0.0)
        t_eval = np.linspace(t_final, 0.0, samples)
    else:
        t_span = (0.0, t_final)
        t_eval = np.linspace(0.0, t_final, samples)

    sol = solve_ivp(
        rhs,
        t_span,
        y0,
        method="DOP853",
        t_eval=t_eval,
        rtol=rtol,
        atol=rtol * 1e-2,
    )
    if not sol.success:
        raise IntegrationError(f"propagation failed: {sol.message}")
    pops = np.abs(sol.y.T) ** 2
    drift = float(np.max(np.abs(pops.sum(axis=1) - 1.0)))
    if drift > _NORM_GUARD:
        raise IntegrationError(
            f"norm drifted by {drift:.3g}: tolerance rtol={rtol:g} is too "
            "loose for this drive and horizon"
        )
    return PopulationTrace(
        times=sol.t, populations=pops, final_amplitudes=sol.y[:, -1].copy()
    )
