"""Exception types shared across the package.

The CLI maps these onto exit codes: input/format problems are usage errors
(exit 2), physics verdicts such as a non-Hermitian Hamiltonian are domain
errors (exit 1), and runtime numerical failures are exit 3.
"""


class PilotwaveError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(PilotwaveError):
    """Objects of different ambient dimension were combined."""


class ExpressionSyntaxError(PilotwaveError):
    """Malformed expression text; carries line/column of the offense."""

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class EvaluationDomainError(PilotwaveError):
    """Evaluation hit a domain fault (division by zero, log of zero, overflow)."""

    def __init__(self, message, subexpression):
        super().__init__(f"{message} in '{subexpression}'")
        self.subexpression = subexpression


class SamplingError(PilotwaveError):
    """Could not draw enough valid sample points for a randomized check."""


class HamiltonianFormatError(PilotwaveError):
    """Malformed Hamiltonian or state specification file."""


class NonHermitianError(PilotwaveError):
    """An operation that requires a Hermitian Hamiltonian was given one that is not."""


class GridError(PilotwaveError):
    """Grid construction or resolution constraint violated."""


class StabilityError(PilotwaveError):
    """Time step violates the integrator stability bound."""


class NormDriftError(PilotwaveError):
    """Norm conservation broke down during evolution."""


class NodeError(PilotwaveError):
    """A trajectory entered a near-node region where the velocity is singular."""


class TruncationError(PilotwaveError):
    """Every trajectory in an ensemble was truncated."""
