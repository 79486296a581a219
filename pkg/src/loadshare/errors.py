"""Exception hierarchy.

Each family carries the process exit code the CLI maps it to:
1 I/O, 2 validation, 3 convergence, 4 math precondition.
"""


class LoadShareError(Exception):
    exit_code = 1


class ValidationError(LoadShareError, ValueError):
    exit_code = 2


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonMonotoneData(ValidationError):
    pass


class SlopeOutOfRange(ValidationError):
    pass


class ContractionViolated(ValidationError):
    pass


class ConvergenceError(LoadShareError, ArithmeticError):
    exit_code = 3


class NoConvergence(ConvergenceError):
    pass


class QuadratureFailure(ConvergenceError):
    pass


class SchroderResidualError(ConvergenceError):
    pass


class MathPreconditionError(LoadShareError, ArithmeticError):
    exit_code = 4


class NonConvexObjective(MathPreconditionError):
    pass


class DegenerateRatio(MathPreconditionError):
    pass


class DomainError(MathPreconditionError):
    pass


class RangeError(MathPreconditionError):
    pass


class ForceOutOfDomain(MathPreconditionError):
    pass
