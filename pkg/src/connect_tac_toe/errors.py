"""Exception types shared across the toolkit."""


class C2TError(Exception):
    """Base class for every error raised by this package."""


class InvalidCellError(C2TError, ValueError):
    """A coordinate tuple or flat index does not name a cell of the board."""


class PreconditionError(C2TError, ValueError):
    """An operation was called with inputs violating its documented contract."""


class ResourceLimitError(C2TError):
    """An enumeration or search exceeded its caller-supplied cap.

    ``partial`` carries whatever was counted before the cap tripped.
    """

    def __init__(self, message: str, partial: int | None = None):
        super().__init__(message)
        self.partial = partial


class IllegalMoveError(C2TError, ValueError):
    """A move is not in the availability set of the current position.

    ``reason`` is one of ``"occupied"``, ``"floating"`` or ``"out of range"``.
    """

    OCCUPIED = "occupied"
    FLOATING = "floating"
    OUT_OF_RANGE = "out of range"

    def __init__(self, reason: str, cell=None):
        self.reason = reason
        self.cell = cell
        super().__init__(f"{reason} move: {cell!r}")


class OverfullColumnError(C2TError, ValueError):
    """A column sequence picks some column more than n times."""
