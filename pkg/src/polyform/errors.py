"""Exception and warning types shared across the package."""


class PolyformError(Exception):
    """Base class for all library errors."""


class DomainError(PolyformError, ValueError):
    """Input does not describe a valid cell or lies outside a function's domain."""


class ScaleIndeterminate(DomainError):
    """Euclidean edge lengths cannot be recovered from angles alone."""


class InverseOutOfRange(DomainError):
    """A chart value lies outside the image of its chart."""


class PathExitsDomain(DomainError):
    """A straight segment in chart coordinates leaves the valid region."""


class NotStrictlyConvex(PolyformError):
    """A Legendre transform was requested where the energy is not strictly convex."""


class ParseError(PolyformError):
    """Malformed surface or target document."""


class InvalidCombinatorics(PolyformError):
    """A surface document violates a gluing invariant."""


class IndexMismatch(PolyformError):
    """Per-edge or per-vertex data has the wrong length."""


class InvalidMetric(PolyformError):
    """Edge lengths or radii fail the per-face validity checks."""


class TooLargeForExhaustiveCheck(PolyformError):
    """Subset enumeration was requested on too many edges."""


class ConfigError(PolyformError):
    """Solver or target configuration is inconsistent."""


class Infeasible(PolyformError):
    """A constraint system has no interior point."""


class NearDegenerate(UserWarning):
    """The Gram quantity is so small that derivative values are unreliable."""
