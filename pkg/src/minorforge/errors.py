"""Exception types shared across the package."""


class MinorforgeError(Exception):
    """Base class for all errors raised by this package."""


class UnreachableError(MinorforgeError):
    """No path exists between the requested vertices."""


class InvalidPartitionError(MinorforgeError):
    """A partial partition violates a structural constraint."""


class UnsupportedParametersError(MinorforgeError):
    """No implemented construction applies to the requested parameters."""


class InfeasibleError(MinorforgeError):
    """Exhaustive search proved that no object with the requested parameters exists."""


class ArityMismatchError(MinorforgeError):
    """A gadget and a block design disagree on the number of terminals per block."""


class LemmaViolationError(MinorforgeError):
    """An internal structural guarantee failed; signals an implementation bug."""


class BadCorrespondenceError(MinorforgeError):
    """A terminal correspondence for a merge is not a valid injection."""


class NotPlanarError(MinorforgeError):
    """A rotation system fails the Euler check, or a planar-only operation got a bad input."""


class NotTriangulatedError(MinorforgeError):
    """An operation requires a triangulated embedding."""


class TooLargeError(MinorforgeError):
    """Input exceeds the guard limit of an exhaustive-enumeration operation."""


class DominationViolatedError(MinorforgeError):
    """A minor in a distribution fails the domination requirement d_H >= d_G."""


class FormatError(MinorforgeError):
    """A text file does not conform to the expected line format."""
