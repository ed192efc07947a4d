"""Exception types raised across the package."""


class SceneError(ValueError):
    """A ball-CSG scene violates its structural invariants."""


class PreconditionError(ValueError):
    """An operation was called outside its domain of definition."""


class ConfigurationError(ValueError):
    """A test-function family or run configuration is unusable."""


class NonFiniteValueError(ValueError):
    """A function returned a non-finite value at a point where it must be finite."""

    def __init__(self, point, value, what="function"):
        self.point = point
        self.value = value
        super().__init__(f"{what} returned non-finite value {float(value)!r} at point {[float(v) for v in point]!r}")
