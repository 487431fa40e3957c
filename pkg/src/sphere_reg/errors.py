"""Exception types shared across the package."""


class SphereRegError(Exception):
    """Base class for all errors raised by sphere_reg."""


class ValidationError(SphereRegError, ValueError):
    """Invalid input: bad domain, mismatched shapes/radii, broken invariants."""


class NumericalError(SphereRegError, RuntimeError):
    """A numerical procedure failed (non-convergence, singular system)."""
