"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed input: unknown symbol, wrong family, bad parameters."""


class NonAmenableError(InputError):
    """Operation needs Følner sets but the group family is non-amenable."""


class WindowError(InputError):
    """A finite window is too small for the requested computation."""


class ValidationError(InputError):
    """A base complex violates a structural invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class MatchingError(InputError):
    """A discrete field is not an acyclic matching."""


class ExpressionError(InputError):
    """An expression string falls outside the supported grammar."""


class ContourError(ValueError):
    """The field vanishes (numerically) on an index contour."""


class QuadratureError(ArithmeticError):
    """A quadrature value is too far from an integer to be rounded."""


class ConfigError(InputError):
    """A scenario configuration cannot be resolved."""
