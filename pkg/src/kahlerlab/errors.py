"""Exception hierarchy shared by all modules."""


class KahlerLabError(Exception):
    """Base class for every error raised by kahlerlab."""


class PointOutsideDomain(KahlerLabError, ValueError):
    pass


class NotPositiveDefinite(KahlerLabError, ValueError):
    """Metric matrix failed the positivity test (usually bad model parameters)."""


class UnsupportedOrder(KahlerLabError, ValueError):
    pass


class SingularMetric(KahlerLabError, ValueError):
    pass


class ZeroVector(KahlerLabError, ValueError):
    pass


class NonUnitaryFrame(KahlerLabError, ValueError):
    pass


class InvalidFrame(KahlerLabError, ValueError):
    pass


class UnsupportedDegree(KahlerLabError, ValueError):
    pass


class SolverError(KahlerLabError, RuntimeError):
    """Monge-Ampere iteration failed; ``state`` holds the last accepted iterate."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class ConfigError(KahlerLabError, ValueError):
    pass
