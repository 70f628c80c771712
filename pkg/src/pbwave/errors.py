"""Exception types raised by the pulsed-beam engine."""


class PBWaveError(Exception):
    """Base class for all engine errors."""


class DegenerateDilation(PBWaveError):
    """The imaginary spatial part vanishes where branch data was requested."""


class OnCutAmbiguous(PBWaveError):
    """Point lies on the open branch disk and no side was given."""


class NotOnCut(PBWaveError):
    """A sided evaluation was requested off the closed branch disk."""


class UnsupportedKind(PBWaveError):
    """Unknown analytic-signal kind."""


class PoleOnEvaluation(PBWaveError):
    """A signal was evaluated at (or numerically at) one of its poles."""


class OutOfDisk(PBWaveError):
    """Cylindrical radius exceeds the disk radius."""


class LightConeSingular(PBWaveError):
    """z^2 vanishes: the Euclidean Green function is singular."""


class OnBranchSphere(PBWaveError):
    """The complex distance vanishes."""


class SingularDenominator(PBWaveError):
    """tau -/+ r~ vanishes."""


class QuadratureFailure(PBWaveError):
    """Requested quadrature tolerance was not reached.

    The best available estimate and its error are attached.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConfigError(PBWaveError):
    """Invalid run configuration (CLI exit code 2)."""


class NotTimelikeWarning(UserWarning):
    """Beam-quality quantities requested outside the timelike case."""
