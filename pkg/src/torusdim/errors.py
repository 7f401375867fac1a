"""Exception hierarchy shared across the package."""


class TorusDimError(Exception):
    """Base class for all errors raised by torusdim."""


class FieldError(TorusDimError):
    """Invalid field context or illegal field operation."""


class NotPisotError(FieldError):
    pass


class SpecError(TorusDimError):
    """A measure specification failed validation or parsing.

    ``line`` and ``column`` are set when the error came from a spec file.
    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column or 1}: {message}"
        super().__init__(message)


class UndecidedAtCap(TorusDimError):
    """A search hit its configured cap before deciding the question."""


class MatrixError(TorusDimError):
    pass


class PathError(TorusDimError):
    """A node path is not admissible in the transition diagram."""


class NotInSupport(TorusDimError):
    pass
