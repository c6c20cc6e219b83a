"""Exception types raised across the package."""


class WittSumsError(Exception):
    """Base class for every error raised by this package."""


# finite fields
class NotPrime(WittSumsError, ValueError):
    pass


class ReducibleModulus(WittSumsError, ValueError):
    pass


class NoGeneratorRoot(WittSumsError, ValueError):
    pass


class ZeroElement(WittSumsError, ValueError):
    pass


# cyclotomic rings
class ConductorMismatch(WittSumsError, ValueError):
    pass


class NotAMultiple(WittSumsError, ValueError):
    pass


# local rings
class HenselFails(WittSumsError, ArithmeticError):
    pass


class BadConductor(WittSumsError, ValueError):
    pass


class PrecisionExhausted(WittSumsError, ArithmeticError):
    pass


class NotIntegral(WittSumsError, ArithmeticError):
    pass


# Witt vectors
class LengthMismatch(WittSumsError, ValueError):
    pass


class NonConstantTrace(WittSumsError, ArithmeticError):
    pass


class ZeroCoordinate(WittSumsError, ValueError):
    pass


# polytopes
class NotFullDimensional(WittSumsError, ValueError):
    pass


class AlreadyFullDimensional(WittSumsError, ValueError):
    pass


class DimensionUnsupported(WittSumsError, NotImplementedError):
    pass


class OutsideCone(WittSumsError, ValueError):
    pass


class NonPolynomialSeries(WittSumsError, ArithmeticError):
    pass


class NegativeCoefficient(WittSumsError, ValueError):
    pass


# L-functions and checks
class PolynomialityViolated(WittSumsError, ArithmeticError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"coefficient {index} is nonzero past the degree")


class CheckFailed(WittSumsError, AssertionError):
    def __init__(self, message, residual=None, point=None):
        self.residual = residual
        self.point = point
        super().__init__(message)


class OutOfRange(WittSumsError, ValueError):
    pass


class MismatchWithClosedForm(WittSumsError, AssertionError):
    pass


class ConfigError(WittSumsError, ValueError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
