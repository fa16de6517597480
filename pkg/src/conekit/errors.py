"""Exception hierarchy.

Every failure that a caller can meaningfully react to gets its own class so
the CLI can map it onto an exit code without string matching.
"""


class ConeKitError(Exception):
    """Base class for all toolkit errors."""


class InputError(ConeKitError, ValueError):
    """Malformed input: wrong dimension, non-finite entries, bad parameters."""


class NotPolyhedral(InputError):
    """A vertex enumeration was requested for a norm with a smooth ball."""


class PreconditionError(InputError):
    """A documented hypothesis of an operation does not hold."""


class SolverError(ConeKitError):
    """Numerical breakdown inside the simplex engine."""


class NotDecomposable(ConeKitError):
    """The point is not a sum of members of the family's cones."""

    def __init__(self, x, certificate=None):
        self.x = x
        self.certificate = certificate
        super().__init__(f"point {list(map(float, x))} admits no decomposition")


class EmptyIntersection(ConeKitError):
    """The translated cones share no common point."""

    def __init__(self, xi, certificate=None):
        self.xi = xi
        self.certificate = certificate
        super().__init__("translated cones have empty intersection")


class NotGenerating(ConeKitError):
    """The family fails to generate the whole space."""


class NotCoadditive(ConeKitError):
    """Some tuple of translated cones has empty intersection."""


class WitnessNotFound(ConeKitError):
    """A constructive witness search ran out of steps."""
