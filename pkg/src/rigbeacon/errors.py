"""Exception hierarchy shared across the package."""


class RigError(Exception):
    """Base class for all errors raised by rigbeacon."""


class InvalidParameters(RigError, ValueError):
    """Parameters violate a documented precondition."""


class OracleTooLarge(RigError, ValueError):
    """An exponential-time oracle was asked for a dimension it refuses to handle."""


class VerificationError(RigError):
    """An input that must carry a valid proof did not."""


class InsufficientShares(RigError):
    """Fewer than ``t`` distinct verified shares were supplied."""


class PhaseError(RigError):
    """An operation was attempted in the wrong protocol phase."""


class AvailabilityFailure(RigError):
    """A dealer's secret could not be reconstructed (below threshold)."""

    def __init__(self, dealer: int, shares: int, threshold: int):
        self.dealer = dealer
        self.shares = shares
        self.threshold = threshold
        super().__init__(
            f"dealer {dealer}: only {shares} verified shares, threshold is {threshold}"
        )


class TimingViolation(RigError, ValueError):
    """A session configuration violates the synchrony timing constraints."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ScenarioError(RigError, ValueError):
    """A scenario document is malformed; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class EpochAborted(RigError):
    """A beacon session inside an epoch loop aborted."""

    def __init__(self, epoch: int, cause: Exception):
        self.epoch = epoch
        self.cause = cause
        super().__init__(f"epoch {epoch}: {cause}")
