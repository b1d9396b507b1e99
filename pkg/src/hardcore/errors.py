"""Exception hierarchy shared by every module.

The CLI maps the three top-level classes onto exit codes
(parse -> 2, size -> 3, numeric -> 4).
"""


class HardcoreError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ParseError(HardcoreError, ValueError):
    """Malformed input document or invalid instance description."""

    exit_code = 2


class LayoutError(ParseError):
    """Gadget layout with overlapping or missing mode triples."""


class TargetError(ParseError):
    """Target Hamiltonian outside the supported XZ form."""


class UnsupportedCouplingError(TargetError):
    """Negative two-qubit coupling."""


class SizeError(HardcoreError):
    """Instance exceeds a hard capacity limit."""

    exit_code = 3


class NumericalError(HardcoreError, ArithmeticError):
    """Eigensolver failure or violated numerical precondition."""

    exit_code = 4

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConsistencyError(HardcoreError, ValueError):
    """Operands that do not belong together (e.g. basis built on another graph)."""


class PreconditionError(NumericalError):
    """Input violates a numerical precondition (e.g. state not in a kernel)."""
