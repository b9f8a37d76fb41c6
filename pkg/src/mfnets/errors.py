"""Exception types shared across the package."""


class MFNetsError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(MFNetsError):
    """Input vector length does not match the network's input dimension."""


class ShapeError(MFNetsError):
    """Weight arrays are inconsistent with the declared architecture."""


class DepthMismatch(MFNetsError):
    """Two networks that must share depth do not."""


class ArchitectureMismatch(MFNetsError):
    """Two networks that must share depth and widths do not."""


class ArityMismatch(MFNetsError):
    """Outer network input dimension does not match the number of inner components."""


class ZeroLayer(MFNetsError):
    """A layer is identically zero; balancing is undefined."""


class DegenerateNet(MFNetsError):
    """Network has zero path-norm proxy; subsampling is undefined."""


class Diverged(MFNetsError):
    """Training risk exceeded the divergence threshold."""

    def __init__(self, message, partial_log=None):
        super().__init__(message)
        self.partial_log = partial_log
