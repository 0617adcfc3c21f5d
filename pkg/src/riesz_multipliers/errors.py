"""Exception types shared across the package."""


class KernelAdmissibilityError(ValueError):
    """Raised when a kernel violates the zero-mean admissibility condition.

    The singular transform only has a well-defined Fourier multiplier when the
    kernel integrates to zero over the unit sphere; for a monomial kernel that
    holds exactly when at least one coordinate carries an odd multiplicity.
    """


class UnsupportedDimensionError(ValueError):
    """Raised when a sampler is asked for a dimension it does not support."""


class SizeCapError(RuntimeError):
    """Raised when a combinatorial enumeration would exceed its configured cap."""
