"""Exception hierarchy shared by the library and the CLI.

The CLI maps :class:`InputError` to exit code 1 and :class:`NumericalError`
to exit code 2.
"""

from __future__ import annotations


class InputError(ValueError):
    """Malformed or insufficient input (shapes, ranges, lengths)."""


class NumericalError(ArithmeticError):
    """Base class for numerical breakdowns during estimation."""


class BreakdownError(NumericalError):
    """Gram-Schmidt breakdown: a basis column is numerically dependent.

    Attributes:
        column: zero-based index of the basis column that failed.
        residual: squared norm left after orthogonalisation.
    """

    def __init__(self, column: int, residual: float, threshold: float):
        self.column = column
        self.residual = residual
        self.threshold = threshold
        super().__init__(
            f"QR breakdown at column {column}: squared residual norm "
            f"{residual:.3e} <= {threshold:.3e}; the Krylov vectors are "
            f"linearly dependent, reduce S"
        )


class IllConditionedShiftError(NumericalError):
    """The projected resolvent is singular to working precision."""

    def __init__(self, condition: float, gamma: complex):
        self.condition = condition
        self.gamma = gamma
        super().__init__(
            f"projected resolvent is ill-conditioned (cond={condition:.3e}) "
            f"for gamma={gamma}; try a different shift"
        )


class ARFitError(NumericalError):
    """Autoregressive least squares has a rank-deficient design."""
