"""Exception hierarchy shared by all simulator modules."""


class MmDroneError(Exception):
    """Base class for every error raised by the package."""


class DomainError(MmDroneError, ValueError):
    """An argument lies outside the domain of a model function."""


class UnreachableError(DomainError):
    """A target SNR cannot be met at any positive distance."""


class ValidationError(MmDroneError, ValueError):
    """A configuration value violates an invariant.

    ``field`` names the violated field as ``Type.attribute`` so CLI
    diagnostics can point at it directly.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
