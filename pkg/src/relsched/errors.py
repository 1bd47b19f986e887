"""Exception types shared across the package."""


class RelschedError(Exception):
    """Base class for all package-specific errors."""


class AvailabilityOutOfRange(RelschedError):
    """Steady-state availability left [0, 1]; the offered load is infeasible."""

    def __init__(self, node: int, value: float):
        super().__init__(
            f"availability of node {node} is {value:.6g}, outside [0, 1]"
        )
        self.node = node
        self.value = value


class DivisionByZeroAvailability(RelschedError):
    """A node's availability is exactly zero, so its reciprocal is undefined."""

    def __init__(self, node: int):
        super().__init__(f"availability of node {node} is exactly zero")
        self.node = node


class NodeSaturatedByOthers(RelschedError):
    """Other schedulers already consume the node's full capacity."""

    def __init__(self, scheduler: int, node: int):
        super().__init__(
            f"node {node} is saturated by schedulers other than {scheduler}"
        )
        self.scheduler = scheduler
        self.node = node


class DegenerateActiveSet(RelschedError):
    """No positive multiplier closes the simplex constraint for this active set."""


class NoFeasibleResponse(RelschedError):
    """Every candidate active set failed; the scheduler's load cannot be placed."""


class NotConverged(RelschedError):
    """Iteration cap reached before the objective change fell below threshold."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class AllNodesSaturated(RelschedError):
    """Balanced allocation impossible: no node has spare capacity left."""


class EmptyInput(RelschedError):
    """Metric invoked on an empty or all-zero value list."""


class ParseError(RelschedError):
    """Configuration file is structurally invalid."""


class ValidationError(RelschedError):
    """Configuration or allocation violates a feasibility constraint."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
