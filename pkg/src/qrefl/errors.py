"""Exception hierarchy shared by every module."""


class QReflError(Exception):
    """Base class for all package errors."""


class DomainError(QReflError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConfigurationError(QReflError, ValueError):
    """Invalid or inconsistent configuration (units, maps, files, flags)."""


class NumericError(QReflError, RuntimeError):
    """A numerical procedure failed to converge or produced non-finite data."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})

    def __str__(self):
        msg = super().__str__()
        if self.diagnostics:
            extra = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
            msg = f"{msg} ({extra})"
        return msg


class FitError(NumericError):
    """The low-energy fit could not be performed on the supplied scan."""
