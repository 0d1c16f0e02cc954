"""
Error Types
Exceptions raised by the engine, grouped by the CLI exit code they map to
"""


class NilAsthenoError(Exception):
    """Base class for every error raised by the engine."""

    exit_code = 1


class ParseError(NilAsthenoError, ValueError):
    """Input text does not follow the expression or file grammar."""

    exit_code = 2

    def __init__(self, message: str, text: str = "", position: int = -1, expected: str = ""):
        """
        Args:
            message: Human readable description
            text: The offending input
            position: Character offset of the failure, -1 when unknown
            expected: Description of the expected token
        """
        self.text = text
        self.position = position
        self.expected = expected
        detail = message
        if position >= 0:
            detail += f" at position {position}"
        if expected:
            detail += f" (expected {expected})"
        if text:
            detail += f" in {text!r}"
        super().__init__(detail)


class MissingParameter(NilAsthenoError, KeyError):
    """A parameter occurring in an expression was not given a value or not declared."""

    exit_code = 2

    def __init__(self, name: str, message: str = ""):
        self.name = name
        super().__init__(message or f"Missing value for parameter '{name}'")

    def __str__(self):
        return self.args[0]


class InvalidStructure(NilAsthenoError, ValueError):
    """Input data is well formed text but violates a structural requirement."""

    exit_code = 2


class MathDomainError(NilAsthenoError, ArithmeticError):
    """The computation is undefined at the requested point."""

    exit_code = 3


class DenominatorVanishes(MathDomainError, ZeroDivisionError):
    """A rational expression was evaluated where its denominator is zero."""


class DimensionMismatch(MathDomainError):
    """Operands live over different ambient dimensions."""

    def __init__(self, left: int, right: int):
        self.left = left
        self.right = right
        super().__init__(f"Dimension mismatch: {left} != {right}")


class SingularOperator(MathDomainError):
    """A coframe operator is not invertible over the coefficient field."""

    def __init__(self, determinant, description: str = ""):
        self.determinant = determinant
        message = "Coframe operator is singular"
        if description:
            message += f" ({description})"
        super().__init__(message)


class NotIntegrableAt(MathDomainError):
    """The deformed structure has a nonzero (0,2) residual at the requested point."""

    def __init__(self, point: dict, residual: list):
        self.point = point
        self.residual = residual
        shown = ", ".join(f"{k}={v}" for k, v in sorted(point.items()))
        super().__init__(f"Deformed structure is not integrable at {{{shown}}}")


class NonDiagonalMetric(MathDomainError):
    """An operation requiring the unit diagonal metric received another metric."""


class SymbolicRankRefused(NilAsthenoError):
    """A rank computation was requested over a parameter field."""

    exit_code = 4
