"""Exception hierarchy for the solver package.

Errors are grouped by how a front end should react: configuration problems,
admissibility failures (mesh/kernel/CFL), runtime numeric failures, and
violations of the a-priori bounds in strict mode.
"""


class SolverError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SolverError):
    """Configuration cannot be used to assemble a run."""


class ConfigSyntax(ConfigError):
    """Malformed configuration document (bad JSON, wrong types, missing keys)."""


class ConfigSemantic(ConfigError):
    """Well-formed configuration with inconsistent content."""


class NegativeDatum(ConfigError):
    """Prescribed data take negative values where nonnegativity is required."""


class AdmissibilityError(SolverError):
    """Mesh, kernel, or time-step fails an admissibility requirement."""


class InvalidDomain(AdmissibilityError):
    """Interval endpoints are not finite with a < b."""


class InvalidCellCount(AdmissibilityError):
    """Cell count is not a positive integer."""


class InvalidMesh(AdmissibilityError):
    """Mesh quantities are inconsistent (dx, dt, lambda, step count)."""


class CFLViolation(AdmissibilityError):
    """Time step exceeds the stability cap for the given flux bounds."""


class DegenerateSupport(AdmissibilityError):
    """Kernel support has zero length."""


class NonPositiveWindow(AdmissibilityError):
    """A window weight W_{j+1/2} is not strictly positive on this mesh."""


class NumericError(SolverError):
    """A computation produced non-finite or otherwise unusable numbers."""


class NonFiniteValue(NumericError):
    """A pointwise evaluation returned NaN or infinity."""


class NonFiniteState(NumericError):
    """A solver state contains NaN or infinity."""


class BoundViolation(SolverError):
    """A monitored a-priori bound failed while running in strict mode."""

    def __init__(self, message, step=None, quantity=None, margin=None):
        super().__init__(message)
        self.step = step
        self.quantity = quantity
        self.margin = margin


class LengthMismatch(SolverError):
    """Array argument has the wrong length for this mesh."""


class StateMismatch(SolverError):
    """Two states passed together do not belong to consecutive steps of one run."""


class MissingNorm(SolverError):
    """A required data norm table is absent."""


class EmptyBox(SolverError):
    """A sampling box has empty interior."""
