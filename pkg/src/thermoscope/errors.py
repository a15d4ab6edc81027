"""Exception types shared across the toolkit."""


class ThermoscopeError(Exception):
    """Base class for all toolkit errors."""


class DegenerateGraph(ThermoscopeError):
    """The cut-out de Bruijn graph has no surviving cycle at this depth."""


class SingularCylinder(ThermoscopeError):
    """The singularity lies inside the closed dyadic interval of the word."""


class MassFloorViolation(ThermoscopeError):
    """A negative-moment partition sum hit a cell below the mass floor."""


class BudgetExceeded(ThermoscopeError):
    """A quadrature or iteration budget was exceeded."""


class DomainError(ThermoscopeError):
    """An argument lies outside the admissible range of the operation."""


class InsufficientCurve(ThermoscopeError):
    """The sampled pressure curve does not cover the required t-interval."""
