from typing import Optional


class PainleveToolsError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(PainleveToolsError, ValueError):
    """Argument outside the validated domain of a special function."""


class PoleError(PainleveToolsError, ArithmeticError):
    """Gamma evaluated at a nonpositive integer."""


class ParameterError(PainleveToolsError, ValueError):
    """Problem parameters violate a hypothesis of the boundary-value problem."""


class NotSingularRegime(PainleveToolsError, ValueError):
    """kappa*(kappa - kappa_star) <= 0, so the singular asymptotics do not apply."""


class SeparatrixError(NotSingularRegime):
    """|rho| = 1: the log-frequency shift b is undefined."""


class NumericalFailure(PainleveToolsError, RuntimeError):
    """A numerical procedure failed; carries the abscissa where it stopped."""

    def __init__(self, message: str, x: Optional[float] = None):
        super().__init__(message if x is None else f"{message} (at x = {x:.17g})")
        self.x = x


class SingularStateError(NumericalFailure, ArithmeticError):
    """Right-hand side evaluated at a state where it is undefined."""


class SingularBreakdown(NumericalFailure):
    """Integration hit a singular state of the current chart."""


class StepFailure(NumericalFailure):
    """Step-size controller could not meet the tolerance."""


class UnderflowError(NumericalFailure):
    """Boundary data too small to represent."""


class NonConvergence(NumericalFailure):
    """Root iteration did not converge."""


class MatchFailure(NumericalFailure):
    """A detected pole has no predicted partner."""


class OutOfSpanError(PainleveToolsError, ValueError):
    """Abscissa outside an integrated trajectory."""
