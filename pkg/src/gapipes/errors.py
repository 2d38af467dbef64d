"""Exception types shared across the package."""


class PipeDesignError(Exception):
    """Base class for every error raised by this package."""


class NetworkStructureError(PipeDesignError):
    """The network violates a structural invariant (not a tree, bad balance).

    Carries the full list of violation messages so callers can report all of
    them at once instead of fixing one at a time.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InvalidDesignError(PipeDesignError):
    """A design vector does not fit the network or catalog it is applied to."""


class HydraulicDomainError(PipeDesignError):
    """A hydraulic quantity is outside its physical domain."""


class SearchSpaceError(PipeDesignError):
    """Enumeration refused: the design space exceeds the configured ceiling."""


class DatasetFormatError(PipeDesignError):
    """A network dataset file failed to parse or failed schema validation."""
