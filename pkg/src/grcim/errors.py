"""Exception types shared across the package."""


class CapacityError(ValueError):
    """Raised when a user/code assignment does not fit into the codebook."""


class FramingError(ValueError):
    """Raised when a bit word has the wrong length or non-binary entries."""


class GridAlignmentError(ValueError):
    """Raised when sweep results cannot be aligned on a common SNR grid."""
