"""Exception types shared across the package."""


class SpaceMismatchError(ValueError):
    """Operands live on different grid spaces."""


class DomainError(ValueError):
    """Input violates a sign or positivity requirement."""


class ParameterError(ValueError):
    """A scalar parameter is outside its admissible range."""


class DegeneratePotentialError(ValueError):
    """Every stationary weight underflowed to zero."""


class SupportError(ValueError):
    """A marginal puts mass where the reference measure has none."""


class InfeasibleError(RuntimeError):
    """The coupling problem has no finite-entropy solution."""


class NotConvergedError(RuntimeError):
    """An iterative solve stopped before reaching its tolerance."""


class SizeError(ValueError):
    """Problem size exceeds the supported exact-computation limit."""
