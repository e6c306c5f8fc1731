"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI:
    UsageError -> 2, PreconditionError -> 3, PrecisionError -> 4, BudgetError -> 5.
"""


class OrbitlabError(Exception):
    """Base class for all package errors."""

    code = 1


class UsageError(OrbitlabError):
    """Malformed input: bad flags, bad polynomial strings, bad matrices."""

    code = 2


class PreconditionError(OrbitlabError):
    """A documented precondition of an operation is violated."""

    code = 3


class PrecisionError(OrbitlabError):
    """A p-adic computation cannot be certified at the tracked precision."""

    code = 4


class BudgetError(OrbitlabError):
    """A brute-force or sampling budget would be exceeded."""

    code = 5
