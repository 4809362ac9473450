"""Shared exception types."""


class OutOfWindowError(Exception):
    """An index needed by an evaluation lies outside the active window."""


class BoundaryError(Exception):
    """A derivation needs a cell or index beyond the window edge."""


class NotACocycleError(Exception):
    """Input fails the cocycle condition; carries the first violated tuple."""

    def __init__(self, tuple_, detail=""):
        self.tuple = tuple_
        super().__init__(f"cocycle condition violated at {tuple_}{': ' + detail if detail else ''}")


class ContradictionError(Exception):
    """Two derivations assign inconsistent values, or a system forces 0 = c != 0."""


class FormatError(Exception):
    """Malformed text document (structure constants, cochain, deformation)."""


class ConfigError(Exception):
    """Inconsistent run configuration (window/margin bounds and the like)."""
