"""Exception types raised across the toolkit.

Every error the library raises on purpose derives from :class:`IrisToolkitError`
so callers (CLI, HTTP service) can distinguish data problems from bugs.
"""


class IrisToolkitError(Exception):
    """Base class for all toolkit errors."""


class EmptyMask(IrisToolkitError):
    """A binary mask contains no set pixels."""


class DegenerateGeometry(IrisToolkitError):
    """Circle geometry is unusable (pupil >= iris, ill-posed inversion, ...)."""


class BadRadius(IrisToolkitError):
    """A requested pupil radius or ratio violates its preconditions."""


class DimensionMismatch(IrisToolkitError):
    """Rasters or vectors that must be dimension-matched are not."""


class OutOfRange(IrisToolkitError):
    """A pupil-to-iris ratio falls outside the binning range."""


class OutOfAnnulus(IrisToolkitError):
    """A radius falls outside the annulus it must belong to."""


class ExternalUnavailable(IrisToolkitError):
    """The external deformation endpoint is down or replied garbage."""


class KernelTooLarge(IrisToolkitError):
    """A filter kernel exceeds the extent of the data it is applied to."""


class NoValidOverlap(IrisToolkitError):
    """Two codes or response maps share no jointly valid positions."""


class ZeroNorm(IrisToolkitError):
    """An embedding with zero norm was passed to a cosine operation."""


class EmptyClass(IrisToolkitError):
    """A score set is missing genuine or impostor entries."""


class TooSmall(IrisToolkitError):
    """An image is too small for the requested filtering operation."""


class IrisTooLarge(IrisToolkitError):
    """The iris does not fit the requested crop window."""
