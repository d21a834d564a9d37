"""Exception hierarchy shared by all modules."""


class SmallBodyError(Exception):
    """Base class for library errors."""


class InsideBodyError(SmallBodyError, ValueError):
    """An evaluation point lies inside (or on) the solid."""


class SingularityError(SmallBodyError, ValueError):
    """Evaluation at the position of a point vortex with zero core."""


class ConvergenceError(SmallBodyError, RuntimeError):
    """A quadrature or series solve failed its self-consistency certificate."""


class TangencyError(SmallBodyError, ValueError):
    """A vector field expected to be tangent to a curve is not."""


class CollisionError(SmallBodyError, RuntimeError):
    """Two vortices, or a vortex and the body, came too close to continue."""


class NonFiniteError(SmallBodyError, FloatingPointError):
    """A state or integrand produced NaN or infinity."""
