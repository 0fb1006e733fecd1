"""Exception hierarchy for the lindblad_tunneling package."""


class LindbladTunnelingError(Exception):
    """Base class for all package errors."""


class SingularParameters(LindbladTunnelingError):
    """Raised when lambda^2 is too close to omega^2 + mu^2.

    The stationary-variance denominators vanish there; callers should fall
    back to direct ODE integration of the moment equations.
    """


class AmbiguousRegime(LindbladTunnelingError):
    """Raised when lambda is too close to nu = sqrt(omega^2 + mu^2).

    The escaping/stuck classification of the asymptotic dynamics is not
    defined at equality.
    """


class RegimeViolation(LindbladTunnelingError):
    """Raised when dimensionless parameters fall outside the admissible window."""


class NegativeDelta(LindbladTunnelingError):
    """Raised when the asymptotic spread quantity is non-positive.

    This only happens for coefficient sets that violate the diffusion
    positivity bound; the penetrability formula has no real value there.
    """


class CFLViolation(LindbladTunnelingError):
    """Raised when a requested time step exceeds the explicit-scheme bound."""


class NegativeDensity(LindbladTunnelingError):
    """Raised when the phase-space field dips below tolerance (scheme defect)."""


class MassLoss(LindbladTunnelingError):
    """Raised when grid mass leakage exceeds the moment-extraction budget."""


class StepSizeUnderflow(LindbladTunnelingError):
    """Raised when the adaptive integrator cannot proceed at the requested tolerance."""


class NonFiniteState(LindbladTunnelingError):
    """Raised when integration overflows to non-finite moments.

    Expected for the divergent barrier regime (lambda < nu) at large times;
    use the scaled co-moving integration instead.
    """
