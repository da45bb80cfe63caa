"""Exception hierarchy shared by the library and the command-line driver."""


class FamfibError(Exception):
    """Base class for all errors raised by famfib."""


class BaseMismatchError(FamfibError, ValueError):
    """An operand is defined over a different indexed set than required."""


class WellFormednessError(FamfibError, ValueError):
    """A value violates a structural invariant (unknown label, non-total table, ...)."""


class ContainerError(WellFormednessError):
    pass


class FoldError(FamfibError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InductionError(FamfibError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SpecError(FamfibError):
    """A spec document failed to parse or validate.

    ``line`` and ``column`` are 1-based when the location is known.
    """

    def __init__(self, message, line=None, column=None, category="schema"):
        self.message = message
        self.line = line
        self.column = column
        self.category = category
        super().__init__(str(self))

    def __str__(self):
        where = ""
        if self.line is not None:
            where = f"{self.line}:{self.column}: "
        return f"{where}{self.category} error: {self.message}"
