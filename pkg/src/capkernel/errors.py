"""Exception hierarchy shared by every module."""


class CapkernelError(Exception):
    """Base class for all errors raised by the package."""


class InternalOverflow(CapkernelError):
    """An integer exceeded the configured bit-length ceiling."""


class IllFormedHom(CapkernelError):
    pass


class NotComposable(CapkernelError):
    pass


class DegreeOutOfRange(CapkernelError):
    pass


class NotEquivariant(CapkernelError):
    pass


class DivisionByZero(CapkernelError, ZeroDivisionError):
    pass


class NotPrime(CapkernelError):
    pass


class IndexDivisor(CapkernelError):
    """The rational prime divides [O_K : Z[theta]] and no decomposition was supplied."""


class NotSmooth(CapkernelError):
    pass


class WitnessMismatch(CapkernelError):
    pass


class CoverageGap(CapkernelError):
    pass


class SaturationViolation(CapkernelError):
    pass


class SolveFailure(CapkernelError):
    pass


class NotAUnit(CapkernelError):
    pass


class RecoveryFailure(CapkernelError):
    """Exponent recovery failed."""


class PrecisionExhausted(RecoveryFailure):
    """Interval solve did not converge below the precision ceiling."""


class NotAnNthPower(CapkernelError):
    pass


class ResolventDegenerate(CapkernelError):
    pass


class ExactnessFailure(CapkernelError):
    def __init__(self, message, node=None, witnesses=None):
        super().__init__(message)
        self.node = node
        self.witnesses = witnesses or {}


class ParseError(CapkernelError):
    def __init__(self, message, line=None, column=None):
        loc = f"line {line}" if line is not None else ""
        if column is not None:
            loc += f", column {column}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.line = line
        self.column = column


class ValidationError(CapkernelError):
    def __init__(self, message, failures=None):
        super().__init__(message)
        self.failures = failures or []
