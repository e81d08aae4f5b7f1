"""Exception hierarchy shared by every module."""


class ChpError(Exception):
    """Base class for all errors raised by this package."""


class NetError(ChpError, ValueError):
    """A net violates a structural invariant (unknown place, bad label, ...)."""


class FiringError(ChpError):
    """A transition was fired at a marking where it is not enabled."""


class ContactError(ChpError):
    """Firing would put a second token on an already marked place.

    ``marking`` and ``transition`` describe the offending step; ``path`` is
    the firing sequence (transition ids) that led to ``marking`` when known.
    """

    def __init__(self, message, marking=None, transition=None, path=None):
        super().__init__(message)
        self.marking = marking
        self.transition = transition
        self.path = path


class BoundRequired(ChpError):
    """Run enumeration needs an event bound because the net has infinite runs."""


class ResourceError(ChpError):
    """An enumeration exceeded its cap."""


class RelabelError(ChpError):
    """Relabeling would make two distinct actions collide."""


class ContractError(ChpError):
    """A precondition of an operation was violated by the caller."""


class ParseError(ChpError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)
