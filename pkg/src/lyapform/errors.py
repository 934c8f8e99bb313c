"""Exception hierarchy shared by all modules."""


class LyapformError(Exception):
    """Base class for library errors."""


class RankMismatch(LyapformError, ValueError):
    pass


class NotInvariant(LyapformError, ValueError):
    """A node set that was required to be invariant is not."""


class NotIsolated(LyapformError):
    """``inv(block)`` is strictly larger than the requested set."""

    def __init__(self, message, z=None, inv=None):
        super().__init__(message)
        self.z = z
        self.inv = inv


class InvalidIsolation(LyapformError, ValueError):
    pass


class NotExact(LyapformError):
    """A cochain has no primitive on a node set.

    ``witness`` is a list of ``(edge_index, sign)`` pairs forming a closed
    undirected cycle whose signed sum ``total`` is nonzero.
    """

    def __init__(self, message, witness=(), total=None):
        super().__init__(message)
        self.witness = list(witness)
        self.total = total


class NotInHZ(NotExact):
    pass


class NonIntegralClass(LyapformError, ValueError):
    pass


class StepTooLarge(LyapformError, ValueError):
    pass


class Cancelled(LyapformError):
    pass
