"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class QuasiReduceError(Exception):
    """Base class for every error raised by the package."""


class InputContainsJets(QuasiReduceError):
    pass


class DivisionByZeroPolynomial(QuasiReduceError, ZeroDivisionError):
    pass


class LinearSolveError(QuasiReduceError):
    pass


class SingularSystem(LinearSolveError):
    pass


class Inconsistent(LinearSolveError):
    def __init__(self, message: str, residuals=()):
        super().__init__(message)
        self.residuals = list(residuals)


class Underdetermined(LinearSolveError):
    def __init__(self, message: str, free=()):
        super().__init__(message)
        self.free = list(free)


class SignatureMismatch(QuasiReduceError):
    pass


class AnsatzTooSmall(QuasiReduceError):
    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class UnsupportedShape(QuasiReduceError):
    pass


class VerificationFailed(QuasiReduceError):
    pass


class SingularJetMap(QuasiReduceError):
    def __init__(self, message: str, determinant=None):
        super().__init__(message)
        self.determinant = determinant


class IndexOutOfRange(QuasiReduceError, IndexError):
    pass


class ExprSyntaxError(QuasiReduceError):
    """Parse failure with a 1-based line/column position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class UndeclaredSymbol(ExprSyntaxError):
    pass


class SessionError(QuasiReduceError):
    pass
