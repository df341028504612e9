"""Exception taxonomy for the instanton toolkit.

Every error raised by the library derives from :class:`InstantonError`, so
callers (and the CLI) can catch one base class and still report the specific
failure mode.
"""


class InstantonError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(InstantonError):
    """Unknown or inconsistent model/CLI parameters."""


class ValidationError(InstantonError):
    """Structurally invalid input data (grids, sampled curves, configs)."""


class DomainError(InstantonError):
    """A quantity was requested outside its mathematical domain."""


class NoWellError(InstantonError):
    """The potential admits no local minimum for the given parameters."""


class NoExitError(InstantonError):
    """No far-side zero of the shifted potential could be located."""


class SingularityError(InstantonError):
    """An endpoint singularity of the path quadrature is not integrable
    (e.g. a non-quadratic minimum)."""


class TailError(InstantonError):
    """The trajectory tail is not in its exponential regime on the sampled
    grid, so the asymptotic coefficient cannot be extracted."""


class IntegrationError(InstantonError):
    """An ODE integration failed (step-size collapse or norm drift)."""


class PoleError(InstantonError):
    """A determinant evaluation hit an eigenvalue/pole of the reference
    operator."""


class ExtrapolationError(InstantonError):
    """A horizon extrapolation did not converge across the requested grid."""


class DegenerateError(InstantonError):
    """A determinant ratio vanished where a finite value is required."""


class SemanticsError(InstantonError):
    """Kink-type inputs were passed to a bounce-type operation or vice
    versa."""


class ResonanceError(InstantonError):
    """The linear junction solution is resonant (sinc zero)."""


class ContinuationError(InstantonError):
    """Homotopy continuation diverged.

    Attributes:
        last_good_k: last homotopy parameter with a converged solution.
    """

    def __init__(self, message, last_good_k=None):
        super().__init__(message)
        self.last_good_k = last_good_k


class BoxError(InstantonError):
    """Box diagonalization domain too small (eigenfunction touches the
    boundary)."""


class CutoffError(InstantonError):
    """Charge-basis cutoff too small (amplitude leaks to the top states)."""


class DefinitenessError(InstantonError):
    """A quadratic form expected to be positive definite is not."""


class SaddleError(InstantonError):
    """The steepest-descent expansion point is not a proper minimum."""
