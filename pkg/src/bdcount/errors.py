"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter, argument, or input document lies outside its admissible domain."""


class DivergenceError(ArithmeticError):
    """The normalizing series diverges, so no stationary distribution exists."""


class SeriesCapError(ArithmeticError):
    """A series summation hit the max_terms cap before meeting its tolerance."""


class UnsupportedFamilyError(ValueError):
    """The requested representation does not exist for this family."""


class StateExplosionError(RuntimeError):
    """A simulated trajectory left the plausible-state guard region."""
