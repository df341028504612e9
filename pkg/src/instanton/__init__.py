"""Semiclassical tunneling toolkit.

Computes Euclidean instanton/bounce trajectories, Gelfand-Yaglom fluctuation
determinants, dilute-gas energy splittings, Bloch bands and metastable decay
rates for superconducting-qubit potential families, validated against an
independent exact-diagonalization oracle, plus a Ginzburg-Landau
current-phase-relation solver feeding the washboard-potential correction.
"""

__version__ = "0.1.0"

from . import errors
from .potentials import (
    Flux,
    ParabolicDoubleWell,
    PeriodicCosine,
    PolyBounce,
    QuarticDoubleWell,
    SampledCorrection,
    StationaryPoint,
    Washboard,
    evaluate,
    exit_point,
    stationary_points,
    well_shifted,
)
from .trajectory import GridSpec, InstantonPath, action, asymptotic_coefficient, solve_path
from .determinants import (
    FluctuationResult,
    bargmann_wigner_det,
    eigenvalue_near,
    gelfand_yaglom_ratio,
    k_coefficient,
    lowest_eigenvalue,
    zero_mode_removed_ratio,
)
from .spectra import (
    DecayResult,
    Diagnostics,
    SemiclassicalSpectrum,
    WashboardResult,
    bloch_band,
    decay_rate,
    diagnostics,
    double_well_splitting,
    flux_ground_energy,
    survival_curve,
    washboard_analysis,
)
from .oracle import (
    BlochSpectrum,
    DriveSpec,
    GridSpectrum,
    PopulationTrace,
    band_trace,
    bloch_bandwidth,
    bloch_spectrum,
    grid_spectrum,
    matrix_elements,
    propagate_populations,
)
from .wkb import ParityDoublet, phase_integrals, quantize
from .gl_junction import (
    CurrentPhaseRelation,
    WashboardCorrection,
    linear_cpr,
    nonlinear_cpr,
    washboard_correction,
)
from .asymptotics import (
    QuadraticForm,
    ToyImaginaryPart,
    gaussian_integral,
    steepest_descent,
    toy_imaginary_part,
)

__all__ = [
    "__version__",
    "errors",
    # potentials
    "QuarticDoubleWell",
    "PolyBounce",
    "Washboard",
    "Flux",
    "PeriodicCosine",
    "ParabolicDoubleWell",
    "SampledCorrection",
    "StationaryPoint",
    "evaluate",
    "stationary_points",
    "exit_point",
    "well_shifted",
    # trajectory
    "GridSpec",
    "InstantonPath",
    "solve_path",
    "action",
    "asymptotic_coefficient",
    # determinants
    "FluctuationResult",
    "gelfand_yaglom_ratio",
    "bargmann_wigner_det",
    "zero_mode_removed_ratio",
    "eigenvalue_near",
    "lowest_eigenvalue",
    "k_coefficient",
    # spectra
    "SemiclassicalSpectrum",
    "DecayResult",
    "WashboardResult",
    "Diagnostics",
    "double_well_splitting",
    "bloch_band",
    "decay_rate",
    "survival_curve",
    "washboard_analysis",
    "flux_ground_energy",
    "diagnostics",
    # oracle
    "GridSpectrum",
    "BlochSpectrum",
    "DriveSpec",
    "PopulationTrace",
    "grid_spectrum",
    "bloch_spectrum",
    "bloch_bandwidth",
    "band_trace",
    "matrix_elements",
    "propagate_populations",
    # wkb
    "ParityDoublet",
    "phase_integrals",
    "quantize",
    # gl_junction
    "CurrentPhaseRelation",
    "WashboardCorrection",
    "linear_cpr",
    "nonlinear_cpr",
    "washboard_correction",
    # asymptotics
    "QuadraticForm",
    "ToyImaginaryPart",
    "gaussian_integral",
    "steepest_descent",
    "toy_imaginary_part",
]
