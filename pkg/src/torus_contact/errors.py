"""Exception hierarchy shared by all modules."""


class ContactHomologyError(Exception):
    """Base class for computation-level errors (CLI exit status 1)."""


class InvalidCoordinateError(ContactHomologyError, ValueError):
    pass


class NotALoopError(ContactHomologyError, ValueError):
    pass


class UnsupportedGluingError(ContactHomologyError, ValueError):
    pass


class InvalidFamilyError(ContactHomologyError, ValueError):
    pass


class DegenerateDerivativeError(ContactHomologyError, ArithmeticError):
    pass


class RangeError(ContactHomologyError, ValueError):
    """Inverse of a sampled h requested outside the tabulated range."""


class UndefinedDirectionError(ContactHomologyError, ValueError):
    pass


class InsufficientResolutionError(ContactHomologyError, ValueError):
    pass


class InvalidConfigError(ContactHomologyError, ValueError):
    pass


class InvalidWindowError(ContactHomologyError, ValueError):
    pass


class NotAComplexError(ContactHomologyError, ValueError):
    pass


class NotEquivariantError(ContactHomologyError, ValueError):
    pass
