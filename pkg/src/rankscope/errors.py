"""Exception hierarchy shared by every rankscope module."""


class RankscopeError(Exception):
    """Base class for all rankscope failures."""


class UnsupportedField(RankscopeError, ValueError):
    pass


class NotSquare(RankscopeError, ValueError):
    pass


class BudgetExceeded(RankscopeError):
    """A size limit (code space, element count, induction cap, ...) was hit."""

    def __init__(self, limit: str, value, cap):
        self.limit = limit
        self.value = value
        self.cap = cap
        super().__init__(f"{limit}: {value} exceeds cap {cap}")


class NumericalGuard(RankscopeError, ArithmeticError):
    """A value that must be an exact integer (or real) was not, within tolerance."""


class ConsistencyFailure(RankscopeError):
    """A mathematical identity that must hold exactly was violated."""


class NotInDomain(RankscopeError, ValueError):
    pass


class InvalidClass(RankscopeError, ValueError):
    pass
