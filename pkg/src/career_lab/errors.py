"""Exception hierarchy for career_lab."""


class CareerLabError(Exception):
    """Base class for all library errors."""


class ParamError(CareerLabError, ValueError):
    """A single violated constraint on model primitives or cost parameters."""


class NonPositivePrecision(ParamError):
    pass


class BetaOutOfRange(ParamError):
    pass


class CostParamInvalid(ParamError):
    pass


class InvalidModel(CareerLabError, ValueError):
    """Raised by ``validate_params``; ``errors`` lists every violated constraint."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{type(e).__name__}: {e}" for e in self.errors))


class NegativeEffort(CareerLabError, ValueError):
    pass


class NegativeTarget(CareerLabError, ValueError):
    pass


class NonFiniteSignal(CareerLabError, ValueError):
    pass


class NoSteadyState(CareerLabError, ValueError):
    """Steady state requested with a persistent type (infinite shock precision)."""


class PathTooShort(CareerLabError, IndexError):
    pass


class DivergentSeries(CareerLabError, ArithmeticError):
    """The marginal-benefit series diverges (beta = 1 with persistent type)."""


class VariantRequiresPersistentType(CareerLabError, ValueError):
    pass


class NotDivergentRegime(CareerLabError, ValueError):
    pass


class TooFewReplications(CareerLabError, ValueError):
    pass
