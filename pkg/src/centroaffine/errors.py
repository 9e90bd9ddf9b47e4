"""Exception types shared across the package."""


class ParseError(ValueError):
    """Syntax error in a polynomial expression; carries the 0-based position."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class MixedDegreeError(ValueError):
    """The monomials of a would-be homogeneous polynomial disagree in total degree."""


class DomainError(ValueError):
    """A point lies outside the domain where an operation is defined."""


class DegenerateFrameError(ValueError):
    """A chart frame, basis or adapted frame cannot be built (rank/conditioning)."""


class ConsistencyError(RuntimeError):
    """Two internal computation routes that must agree disagree beyond tolerance."""


class UnboundedRayError(RuntimeError):
    """A ray inside the cone never leaves the positivity region.

    Witnesses that the hypersurface piece under analysis is not closed in the
    ambient space: the slice of the cone is not relatively compact.
    """

    def __init__(self, origin_coords, direction, radius):
        super().__init__(
            "positivity region is unbounded along a chart ray "
            f"(still positive at radius {radius:g})"
        )
        self.origin_coords = origin_coords
        self.direction = direction
        self.radius = radius
