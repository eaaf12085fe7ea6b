"""Exception and warning types raised across the package."""


class HHVerifyError(Exception):
    """Base class for all package errors."""


class NonConvergence(HHVerifyError):
    pass


class DomainViolation(HHVerifyError):
    def __init__(self, value, function=None):
        self.value = value
        self.function = function
        where = f" of {function}" if function else ""
        super().__init__(f"value {value!r} outside the domain{where}")


class DimensionMismatch(HHVerifyError):
    pass


class BadExponent(HHVerifyError):
    pass


class BadWeight(HHVerifyError):
    pass


class NotPositive(HHVerifyError):
    pass


class NotPositiveDefinite(NotPositive):
    pass


class NotUnitary(HHVerifyError):
    pass


class QuadratureFailure(HHVerifyError):
    pass


class SingularX(HHVerifyError):
    pass


class EmptyList(HHVerifyError):
    pass


class MatrixFormatError(HHVerifyError, ValueError):
    pass


class ConfigError(HHVerifyError, ValueError):
    pass


class IllConditionedWarning(UserWarning):
    pass
