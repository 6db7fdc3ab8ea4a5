"""Exception hierarchy. Every domain error derives from :class:`ShcError`."""


class ShcError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(ShcError, ValueError):
    pass


class InvalidParameterError(ShcError, ValueError):
    pass


class SingularMatrixError(ShcError, ArithmeticError):
    pass


class ResonanceError(ShcError, ArithmeticError):
    """The center return multiplier is (numerically) 1, so the loop has no isolated fixed point."""

    def __init__(self, message, product=None, params=None):
        super().__init__(message)
        self.product = product
        self.params = params


class DegenerateLoopError(ShcError, ArithmeticError):
    def __init__(self, message, block=None, params=None):
        super().__init__(message)
        self.block = block
        self.params = params


class RegionError(ShcError):
    """A point left the region in which the affine model is valid."""

    def __init__(self, message, block=None, value=None, bound=None):
        super().__init__(message)
        self.block = block
        self.value = value
        self.bound = bound


class LeftLinearizedRegionError(RegionError):
    pass


class OutsideTransitionRegionError(RegionError):
    pass


class EnumerationBudgetError(ShcError):
    def __init__(self, message, required=None, budget=None):
        super().__init__(message)
        self.required = required
        self.budget = budget


class SearchExhaustedError(ShcError):
    pass


class PlanVerificationError(ShcError):
    pass


class BudgetExceededError(ShcError):
    """A cocycle correction needs a larger C1 budget than the one granted."""

    def __init__(self, message, required=None, epsilon=None, step=None):
        super().__init__(message)
        self.required = required
        self.epsilon = epsilon
        self.step = step


class InvalidResolutionError(ShcError, ValueError):
    pass


class ConfigError(ShcError):
    pass


class ConfigParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class ConfigSchemaError(ConfigError):
    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path


class ConfigValidationError(ConfigError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
