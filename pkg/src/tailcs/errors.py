"""Exception hierarchy shared by every tailcs module."""


class TailCSError(Exception):
    """Base class for computational failures. ``tag`` is printed by the CLI."""

    tag = "Error"


class RankDeficient(TailCSError):
    tag = "RankDeficient"


class SizeLimit(TailCSError):
    tag = "SizeLimit"


class Infeasible(TailCSError):
    tag = "Infeasible"


class Unbounded(TailCSError):
    tag = "Unbounded"


class FieldError(TailCSError, ValueError):
    """Raised when an operation restricted to real matrices receives complex data."""

    tag = "FieldError"
