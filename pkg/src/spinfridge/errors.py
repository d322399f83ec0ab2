"""Exception types shared across the package."""


class SpinFridgeError(Exception):
    """Base class for all package-specific errors."""


class PhysicalityViolation(SpinFridgeError):
    """Reconstructed density matrix has a significantly negative eigenvalue."""


class IntegrationFailure(SpinFridgeError):
    """Adaptive ODE integration could not meet the requested tolerance."""


class NoSolution(SpinFridgeError):
    """A requested root or quantized solution does not exist."""


class DegenerateField(SpinFridgeError):
    """A field configuration makes an expression singular (e.g. log of zero)."""


class ScheduleInfeasible(SpinFridgeError):
    """A field schedule leaves the admissible range omega >= 0."""


class NoUniqueLimitCycle(SpinFridgeError):
    """The cycle map is not contractive; no unique fixed point exists."""


class NoFeasibleRefrigerator(SpinFridgeError):
    """No sampled time allocation yields positive heat extraction."""


class ValidationError(SpinFridgeError):
    """A configuration field violates a precondition."""


class ParseError(SpinFridgeError):
    """A configuration document is syntactically invalid or has unknown keys."""
