"""Error types shared across the package."""


class ZeroVector(ValueError):
    """A vector with numerically zero norm was given where a direction is required."""


class IdenticalStates(ValueError):
    """The two candidate states coincide up to a global phase."""


class ProductState(ValueError):
    """Both candidate states are product states; the ratio solver does not apply."""


class Infeasible(RuntimeError):
    """No measurement bases satisfy the zero-error conditions."""


class ConstraintViolated(Infeasible):
    """A closed-form solvability constraint does not hold for this state pair."""


class ResidualTooLarge(RuntimeError):
    """A constructed scheme fails its zero-error residual check."""


class NotDetectorCase(ValueError):
    """The classification does not admit a one-state detector."""


class ConfigError(ValueError):
    """Invalid simulation configuration."""


class DomainError(ValueError):
    """A parameter lies outside its valid domain."""
