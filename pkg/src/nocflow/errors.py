"""Exception types shared across the package."""

from __future__ import annotations


class InputError(ValueError):
    """Invalid caller-supplied input: bad dimensions, node ids, grids, files."""


class SingularMatrixError(ArithmeticError):
    """Elimination met a pivot at or below tolerance.

    ``column`` is the offending pivot column when known, else None.
    """

    def __init__(self, column: int | None = None, message: str | None = None):
        self.column = column
        if message is None:
            if column is None:
                message = "singular matrix"
            else:
                message = f"singular matrix: no usable pivot in column {column}"
        super().__init__(message)


class InfeasibleError(RuntimeError):
    """An allocation violates the constraints a downstream step relies on."""
