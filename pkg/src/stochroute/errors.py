"""Exception hierarchy shared by every solver module."""


class StochRouteError(Exception):
    """Base class for all errors raised by the package."""


class DistributionError(StochRouteError, ValueError):
    pass


class NegativeProbability(DistributionError):
    pass


class SumNotOne(DistributionError):
    pass


class EmptySupport(DistributionError):
    pass


class InfiniteOperand(DistributionError):
    """An operation that needs a finite distribution received PlusInfinity."""


class ParseError(StochRouteError, ValueError):
    pass


class ValidationError(StochRouteError, ValueError):
    pass


class Loop(ValidationError):
    pass


class ZeroCircuit(ValidationError):
    def __init__(self, circuit):
        self.circuit = list(circuit)
        super().__init__(f"circuit of deterministic-zero arcs through vertices {self.circuit}")


class NoPathToDestination(ValidationError):
    pass


class ResidualZeroArc(ValidationError):
    """Raised when a deterministic-zero origin-destination arc cannot be rewritten away.

    The partially transformed instance is available as ``instance``.
    """

    def __init__(self, message, instance=None):
        super().__init__(message)
        self.instance = instance


class InvalidChain(StochRouteError, ValueError):
    pass


class NoPath(StochRouteError):
    pass


class ZeroArcPresent(StochRouteError, ValueError):
    pass


class PreconditionViolated(StochRouteError, ValueError):
    pass


class BudgetExceeded(StochRouteError, RuntimeError):
    pass


class DegenerateArc(StochRouteError):
    pass


class ZeroMassAtZero(StochRouteError, ValueError):
    pass
