"""Exception hierarchy shared by all axkit modules."""


class AxkitError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(AxkitError):
    """Bad construction parameters (widths, rates, schedules, ...)."""


class DomainError(AxkitError):
    """A value lies outside its declared domain (operand range, table shape)."""


class CapacityError(AxkitError):
    """A request exceeds an enumerable-space or sample-count capacity."""


class ValidationError(AxkitError):
    """Structured data failed validation (netlist files, CSV rows, configs)."""


class UndefinedCorrelationError(AxkitError):
    """Correlation is undefined because one of the columns has zero variance."""
