"""Exception types raised by rdshock."""


class RDShockError(Exception):
    """Base class for all rdshock errors."""


class ConfigError(RDShockError, ValueError):
    """Invalid or incomplete run configuration."""


class NumericalError(RDShockError):
    """Base class for failures of a numerical solve."""


class PoleError(NumericalError, ValueError):
    """Reaction term evaluated inside the guard band around a diffusivity root."""


class NoRootError(NumericalError, ValueError):
    """The flux potential does not attain the requested level on [0, 1]."""


class InfeasibleShockError(NumericalError):
    """The shock endpoints fall outside (0, 1)."""

    def __init__(self, message, u_l=None, u_r=None):
        super().__init__(message)
        self.u_l = u_l
        self.u_r = u_r


class ConvergenceError(NumericalError):
    """An iterative solve stopped without meeting its tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class LevelNotCrossedError(NumericalError):
    """A multi-valued profile never reaches the shock level on its grid."""


class StencilError(NumericalError, ValueError):
    """A finite-difference stencil straddles a shock or the fold band."""
