"""Exception hierarchy shared by all cubitab modules."""


class CubitabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CubitabError):
    """An input violates a mathematical precondition."""


class CapacityError(CubitabError):
    """A request exceeds configured enumeration capacity."""


class UnsupportedModulusError(CubitabError):
    """Density requested at a prime or exponent with no known local data."""


class ZeroDensityError(CubitabError):
    """A lower-bound computation hit a vanishing local density."""

    def __init__(self, prime, message):
        super().__init__(message)
        self.prime = prime


class InternalInconsistencyError(CubitabError):
    """Two theorem-backed evaluations that must agree disagreed."""


class TableParseError(CubitabError):
    """A field-table file failed to parse."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number
