"""Exception types shared across the package."""


class WigstatError(ValueError):
    """Base class for all wigstat errors."""


class InvalidDimensionError(WigstatError):
    """Hilbert-space dimension is unusable (too small, even where odd is required, mismatch)."""


class InvalidArgumentError(WigstatError):
    """Argument outside its allowed range (multipole indices, harmonic orders, ...)."""


class OutOfDomainError(WigstatError):
    """Parameter outside the physical domain of a formula."""


class DegenerateDistributionError(WigstatError):
    """Statistics undefined because the sample distribution has zero variance."""


class EmptyInputError(WigstatError):
    """Operation received no data."""


class DegenerateLineError(WigstatError):
    """A Wigner line is identically zero; zeros are undefined."""


class EmptyStatisticsError(WigstatError):
    """No zero crossings in any supplied line; structure statistics undefined."""


class InvalidOperatorError(WigstatError):
    """Matrix fails a required operator property (e.g. unitarity)."""
