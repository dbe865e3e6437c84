"""Exception types raised by phasekit."""


class PhasekitError(Exception):
    """Base class for all phasekit errors."""


class TruncationInsufficient(PhasekitError):
    """The truncated number basis is too small for the requested quantity."""


class DomainError(PhasekitError, ValueError):
    """An argument lies outside the domain of the function."""


class DimensionMismatch(PhasekitError, ValueError):
    """Operands do not have conforming shapes."""


class UnknownOperator(PhasekitError, ValueError):
    """An operator name is not recognized."""


class ParseError(PhasekitError, ValueError):
    """A state specification or config file could not be parsed."""


class ConfigError(PhasekitError, ValueError):
    """A run configuration is invalid."""
