"""Exception types shared across the toolkit."""


class LimasError(Exception):
    """Base class for all toolkit errors."""


class ShapeMismatch(LimasError):
    """Operands have incompatible or unexpected shapes."""


class NotSymmetric(LimasError):
    """A symmetric matrix was required but the input is not symmetric."""


class NoConvergence(LimasError):
    """An eigenvalue iteration failed to converge."""


class DegenerateInput(LimasError):
    """Input is numerically degenerate for the requested operation."""


class NotCommuting(LimasError):
    """The two Laplacians do not commute within tolerance."""


class DegenerateSpectrum(LimasError):
    """Joint diagonalization failed its residual check."""


class EmptyRange(LimasError):
    """An extremum was requested over an empty index range."""


class AssumptionViolated(LimasError):
    """A structural assumption required by an analysis step does not hold.

    ``which`` is 1 (commuting Laplacians), 2 (modal controllability),
    3 (proportional physical coupling) or 0 for the standing requirement
    that the communication graph is connected.
    """

    def __init__(self, which: int, detail: str = ""):
        self.which = which
        self.detail = detail
        super().__init__(f"assumption {which} violated: {detail}" if detail
                         else f"assumption {which} violated")


class NotControllable(LimasError):
    """A pair (A, B) fails the controllability rank test."""


class Divergence(LimasError):
    """The Riccati fixed-point iteration diverged (sigma at or below critical)."""

    def __init__(self, message: str, iterations: int = 0):
        self.iterations = iterations
        super().__init__(message)


class SynthesisFailed(LimasError):
    """Gain synthesis could not produce a verified stabilizing gain."""


class Overflow(LimasError):
    """A simulated state exceeded the magnitude guard (instability)."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"state overflow at step {step}")


class NotDeviationInvariant(LimasError):
    """Matrix does not keep the all-ones direction invariant."""


class NotScalar(LimasError):
    """Operation requires a model with scalar (n = 1) agent dynamics."""


class SchemaError(LimasError):
    """A model or gain file does not satisfy the expected schema."""
