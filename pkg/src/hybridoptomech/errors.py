"""Exception hierarchy shared by all modules."""


class HybridOptomechError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(HybridOptomechError, ValueError):
    pass


class NonPositiveRate(ParameterError):
    pass


class NonFiniteInput(ParameterError):
    pass


class SingularDetuning(HybridOptomechError, ValueError):
    """Dopant detuning sits on the omega_m pole of the polariton drive condition."""


class DetuningNotZero(HybridOptomechError, ValueError):
    pass


class NoConvergence(HybridOptomechError, RuntimeError):
    pass


class DegenerateDenominator(HybridOptomechError, ArithmeticError):
    pass


class EigenFailure(HybridOptomechError, RuntimeError):
    pass


class UnstableSystem(HybridOptomechError, ValueError):
    pass


class SingularSystem(HybridOptomechError, ArithmeticError):
    pass


class StepTooLarge(HybridOptomechError, ValueError):
    pass


class AsymmetricInput(HybridOptomechError, ValueError):
    pass


class ConfigError(HybridOptomechError, ValueError):
    pass


class ParseError(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class MissingField(ConfigError):
    pass


class BadRange(ConfigError):
    pass
