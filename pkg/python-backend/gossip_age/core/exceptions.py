class GossipAgeError(Exception):
    """Base class for library errors."""


class ParameterDomainError(GossipAgeError, ValueError):
    """A precondition on parameters or indices is violated."""


class EmptyDomainError(ParameterDomainError):
    """The query has no non-subscriber to report on."""


class SearchCapExceeded(GossipAgeError):
    """No feasible period was found below the search cap."""


class AnalyticUnavailable(GossipAgeError):
    """Analytical verdicts exist only for line and fully-connected profiles."""


class ComparisonFailed(GossipAgeError):
    """Simulated means disagree with the analytical values."""

    def __init__(self, message: str, worst_z: float):
        super().__init__(message)
        self.worst_z = worst_z
