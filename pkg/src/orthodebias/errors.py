"""Exception hierarchy shared across the package.

Two branches matter for the CLI exit-code contract: ``DataError`` (bad or
degenerate input, exit code 2) and ``NumericalError`` (a numerical kernel
failed, exit code 3).
"""


class OrthodebiasError(Exception):
    """Base class for all package exceptions."""


class DataError(OrthodebiasError):
    """Input data is malformed, degenerate, or inconsistent."""


class NumericalError(OrthodebiasError):
    """A numerical routine could not complete reliably."""


class NotPositiveDefinite(NumericalError):
    def __init__(self, pivot_index, message=None):
        self.pivot_index = pivot_index
        super().__init__(message or f"matrix is not positive definite (pivot {pivot_index})")


class ConvergenceFailure(NumericalError):
    def __init__(self, iterations, message=None):
        self.iterations = iterations
        super().__init__(message or f"iteration budget exhausted after {iterations} sweeps")


class DegenerateDirection(NumericalError):
    """A direction vector is not unit length, or no complement exists."""


class IllConditionedKernel(NumericalError):
    """Surrogate kernel matrix stayed singular after jitter escalation."""


class ZeroMeanDifference(DataError):
    """The two class means coincide; no discriminant direction exists."""


class ZeroWithinScatter(DataError):
    """Within-class scatter has zero trace; shrinkage has no scale."""


class DegenerateClass(DataError):
    def __init__(self, labeling, class_value, message=None):
        self.labeling = labeling
        self.class_value = class_value
        super().__init__(
            message or f"{labeling} class {class_value} has fewer than 2 samples"
        )


class DegenerateGroup(DataError):
    """An attribute group is missing or lacks both label classes."""


class SingleClass(DataError):
    """Only one label class present where two are required."""


class ZeroVariance(DataError):
    def __init__(self, coordinate, message=None):
        self.coordinate = coordinate
        super().__init__(message or f"coordinate {coordinate} has zero variance")


class DimensionMismatch(DataError):
    """Feature dimension does not match the fitted model."""


class ResampleDegenerate(DataError):
    """Could not draw a non-degenerate bootstrap replicate."""


class ParseError(DataError):
    def __init__(self, line, column, reason):
        self.line = line
        self.column = column
        self.reason = reason
        super().__init__(f"line {line}, column {column}: {reason}")


class SchemaError(DataError):
    """File violates the feature-file or artifact schema."""
