"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """An experiment, game or policy configuration is invalid.

    ``key`` names the offending setting when one can be identified.
    """

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class TraceAuditError(RuntimeError):
    """A recorded game trace violates one of the engine's conservation rules."""
