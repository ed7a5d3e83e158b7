"""Exception types shared across the package."""


class DigraphletsError(Exception):
    """Base class for data-level errors raised by this package."""


class GraphFormatError(DigraphletsError):
    """Malformed graph input (edge lists, trade tables, reaction tables)."""


class GenerationError(DigraphletsError):
    """A random-model generator could not satisfy its target."""
