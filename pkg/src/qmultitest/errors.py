"""Exception types shared across the package.

Each validation error names the invariant that failed so callers (and the
CLI exit-code mapping) can distinguish bad input data from resource limits.
"""


class HermiticityViolation(ValueError):
    """Input matrix is not square or not self-adjoint within tolerance."""


class PSDViolation(ValueError):
    """Matrix has an eigenvalue below the negativity tolerance."""


class TraceViolation(ValueError):
    """Density matrix trace differs from one beyond tolerance."""


class NormalizationViolation(ValueError):
    """Probability vector is negative or does not sum to one."""


class DegenerateInput(ValueError):
    """Input is degenerate (e.g. a zero state vector)."""


class DimensionMismatch(ValueError):
    """Operands live on different Hilbert-space dimensions."""


class DimensionCapExceeded(RuntimeError):
    """A tensor power would exceed the configured dimension cap."""


class PartialsExceedIdentity(ValueError):
    """Partial detector elements sum above the identity."""


class PartialsEqualIdentity(ValueError):
    """Partial detector elements sum to the identity, leaving no room
    for the binary test."""


class SplitTooSmall(ValueError):
    """Copy budget cannot be split into two nonempty parts."""


class UndefinedQuantity(ValueError):
    """Requested quantity is undefined for this ensemble size."""


class CalibrationFailed(RuntimeError):
    """Scenario generation could not reach the requested target."""


class ScenarioParseError(ValueError):
    """Scenario file is malformed; message carries field context."""
