"""Exception hierarchy shared across the package."""


class RollWaveError(Exception):
    """Base class for all package-specific errors."""


class InvalidWaveError(RollWaveError):
    """Parameters outside the existence window (see validate_params)."""

    def __init__(self, reason, message):
        super().__init__(message)
        self.reason = reason


class QuadratureError(RollWaveError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class SolvabilityError(RollWaveError):
    """Spectral parameter outside the analytic solvability half-plane."""


class ResonanceError(RollWaveError):
    """Near-zero denominator in the sonic series recursion (roundoff guard)."""


class StepFailure(RollWaveError):
    """ODE integration could not meet its tolerance within the step budget."""


class DegenerateSystemError(RollWaveError):
    """Modulation system with (numerically) singular time Jacobian."""


class NoSignChange(RollWaveError):
    """Bisection target function does not change sign over the bracket."""


class ContourNearZero(RollWaveError):
    """|det| fell under the guard threshold on the winding contour."""


class NonconvergentRefinement(RollWaveError):
    """Contour refinement hit its budget with phase jumps still too large."""


class BracketInvalid(RollWaveError):
    """Bisection bracket endpoints do not classify differently."""


class ContinuationStall(RollWaveError):
    """Root continuation stopped early; carries the partial curve."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class ConfigError(RollWaveError):
    """Unparseable sweep configuration."""


class SchemaMismatch(RollWaveError):
    """External overlay CSV does not match the declared schema."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line
