"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A scenario or reference document is malformed or names unknown keys."""


class RangeError(ConfigError):
    """A parameter value is outside its documented bounds."""


class BoundsError(ValueError):
    """A grid coordinate lies outside the world."""


class NoFoodError(RuntimeError):
    """Harvest attempted on an empty food source."""


class UnreachableError(RuntimeError):
    """No path exists between two engineers; signals corrupted topology."""


class InsufficientReplicationsError(ValueError):
    """A statistical comparison needs at least two replications per side."""
