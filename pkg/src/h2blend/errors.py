"""Exception hierarchy shared by all modules."""


class H2BlendError(Exception):
    """Base class for every error raised by the package."""


class InvalidArgument(H2BlendError, ValueError):
    pass


class IncompleteMapping(H2BlendError, ValueError):
    pass


class InconsistentWeights(H2BlendError, ValueError):
    pass


class SchemaError(H2BlendError, ValueError):
    """Input table violates a field invariant. Carries the row location."""

    def __init__(self, message, table=None, row=None):
        self.table = table
        self.row = row
        where = ""
        if table is not None:
            where = f"{table}" + (f", row {row}" if row is not None else "") + ": "
        super().__init__(where + message)


class LinkError(SchemaError):
    """A record references a node, bus or unit that does not exist."""


class ConfigError(H2BlendError, ValueError):
    pass


class RegimeError(H2BlendError, ValueError):
    """Friction correlation called outside the turbulent regime."""


class NoFeasibleFlow(H2BlendError, ValueError):
    pass


class ModelError(H2BlendError):
    """Inconsistent optimization model (duplicate names, unknown variables)."""


class EmissionError(ModelError):
    pass


class SolverEnvironmentError(H2BlendError):
    """Solver executable missing or not runnable."""


class ProtocolError(H2BlendError):
    """Solver output could not be parsed."""


class AuditError(H2BlendError):
    pass
