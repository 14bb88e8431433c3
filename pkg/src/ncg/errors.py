"""Exception types shared across the package."""


class SizeGuard(Exception):
    """Raised when an exhaustive operation is asked to exceed its instance-size bound."""


class Disconnected(Exception):
    """Raised when an operation requires a connected graph and some vertex is unreachable."""


class AssignmentAmbiguous(Exception):
    """Raised if a vertex has two closest component vertices.

    Cannot happen for a true biconnected component of a connected graph;
    seeing it indicates a bug in the caller or in the decomposition.
    """


class PreconditionUnmet(Exception):
    """Raised when a constructive deviation's structural precondition does not hold."""


class NotTree(Exception):
    """Raised when a tree-only certificate is requested for a non-tree profile."""


class NotEquilibrium(Exception):
    """Raised when a certificate is requested for a profile that fails verification."""


class ProfileFormatError(Exception):
    """Base class for profile text format errors; carries a 1-based line number."""

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class BadHeader(ProfileFormatError):
    """Missing or malformed header / structural line."""


class BadVertexIndex(ProfileFormatError):
    """Vertex index out of range, or a self-loop purchase."""


class DuplicateBuy(ProfileFormatError):
    """The same `buy u v` directive appears twice."""


class BadRational(ProfileFormatError):
    """Unparseable rational number."""
