"""Shared exception types for the exact symbolic kernel and its consumers."""


class LogspinorError(Exception):
    """Base class for all package errors."""


class ChartMismatchError(LogspinorError):
    """Two values from different charts were combined."""


class ExponentError(LogspinorError):
    """A negative exponent appeared on a variable not flagged logarithmic."""


class PoleEvaluationError(LogspinorError):
    """Evaluation hit a pole: a log variable was set to zero under a negative power."""


class MissingRuleError(LogspinorError):
    """A formal symbol lacks the derivative or conjugation rule needed here."""


class UnassignedSymbolError(LogspinorError):
    """Evaluation reached a formal symbol with no assigned value."""


class DegreeError(LogspinorError):
    """An operand has the wrong homogeneous degree for this operation."""


class NonUnitDivisionError(LogspinorError):
    """Division was requested by something other than a single-term unit."""


class ZeroSpinorError(LogspinorError):
    """The spinor vanishes at the requested point, so the query is undefined."""


class ComplexStructureError(LogspinorError):
    """The spinor is degenerate: its annihilator meets its conjugate."""


class SchemaError(LogspinorError):
    """An expression or complex file violates the JSON schema."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message
