"""Exception types shared across the library."""


class DomainError(ValueError):
    """A thermodynamic or geometric quantity left its admissible domain.

    Raised instead of clamping: covolume violations (beta*rho >= 1), loss
    of hyperbolicity (a^2 <= 0), nonpositive logarithm arguments.
    """


class DegenerateBackgroundError(DomainError):
    """Background state makes a required decomposition singular (p_s = 0)."""


class AdmissibilityError(ValueError):
    """A run configuration violates a named parameter inequality."""

    def __init__(self, inequality: str, message: str = ""):
        self.inequality = inequality
        super().__init__(message or f"violated: {inequality}")


class NumericalError(RuntimeError):
    """An integrator or scheme failed (nonfinite state, CFL violation, ...)."""
