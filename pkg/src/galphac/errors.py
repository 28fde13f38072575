"""Exception hierarchy shared by every module of the package."""


class GmeError(Exception):
    """Base class for all errors raised by :mod:`galphac`."""


class InvalidArgumentError(GmeError, ValueError):
    """An argument violates a documented precondition."""


class InvalidPartitionError(InvalidArgumentError):
    """A bipartition does not fit the state it is applied to."""


class InvalidParameterError(InvalidArgumentError):
    """A measure parameter (alpha, q) is outside its admissible range."""


class NotMultipartiteError(InvalidArgumentError):
    """A genuine multipartite measure was requested for fewer than 3 parties."""


class InvalidStateError(InvalidArgumentError):
    """Amplitudes or a density matrix violate the state invariants."""
