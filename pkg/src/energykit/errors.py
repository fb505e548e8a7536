"""Exception types shared across the toolkit; the CLI maps them to exit codes."""


class EnergyKitError(Exception):
    """Base class for toolkit errors."""


class ParseError(EnergyKitError, ValueError):
    """Malformed polynomial text or configuration; carries the byte offset."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at byte {offset})")
        self.message = message
        self.offset = offset


class BudgetExceeded(EnergyKitError):
    """A configured time, memory or enumeration budget would be exceeded."""


class InvariantError(EnergyKitError):
    """An internal consistency check failed; indicates a bug, never bad input."""
