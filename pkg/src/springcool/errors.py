"""Exception hierarchy shared by the library and the CLI."""


class SpringcoolError(Exception):
    """Base class for all library errors."""


class DomainError(SpringcoolError, ValueError):
    """An argument lies outside the domain of a formula (e.g. zero frequency)."""


class ConfigurationError(SpringcoolError, ValueError):
    """The parameter set describes a physically meaningless configuration."""


class SignalBlindError(ConfigurationError):
    """The homodyne quadrature carries no displacement information."""


class InstabilityError(SpringcoolError):
    """The closed loop is unstable; ``violated`` names the failing condition."""

    def __init__(self, message, violated=None):
        super().__init__(message)
        self.violated = violated


class ConvergenceError(SpringcoolError):
    """Numerical integration or optimization did not converge."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InfeasibleError(SpringcoolError):
    """No feasible (stable) point was found inside the search bounds."""


class ConfigParseError(SpringcoolError, ValueError):
    """A run configuration is malformed; ``field`` is the offending key path."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
