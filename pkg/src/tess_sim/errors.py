"""Exception hierarchy shared by all tess_sim modules."""


class TessSimError(Exception):
    """Base class for every error raised by tess_sim."""


class InvalidInputError(TessSimError, ValueError):
    """A precondition on an argument was violated."""


class InvalidGeometryError(InvalidInputError):
    """Non-physical dimensions (non-positive sizes, inverted radii)."""


class UnknownHydrateError(TessSimError, KeyError):
    """Requested hydrate level is not tabulated for the sorbent."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class InvalidComparisonError(InvalidInputError):
    """Two configurations cannot be compared on equal terms."""


class SolverDivergenceError(TessSimError, ArithmeticError):
    """Integration produced NaN or a non-positive absolute temperature."""


class NumericFailureError(TessSimError, ArithmeticError):
    """An iterative solve did not converge within its iteration cap."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class ConfigError(TessSimError, ValueError):
    """Scenario document failed to parse or validate."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.key = key
