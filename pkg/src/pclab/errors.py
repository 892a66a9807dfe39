"""Exception hierarchy shared by every pclab module."""


class PclabError(Exception):
    pass


class DimensionMismatch(PclabError, ValueError):
    pass


class NonSquare(DimensionMismatch):
    pass


class Singular(PclabError, ArithmeticError):
    pass


class SingularBlock(Singular):
    pass


class BadPartition(PclabError, ValueError):
    pass


class DegenerateData(PclabError, ValueError):
    """Initial data violates the valuation side condition on det(beta_m)."""


class RankMismatch(DegenerateData):
    pass


class SizeMismatch(DimensionMismatch):
    pass


class WindowGrow(PclabError, ValueError):
    pass


class InsufficientTruncation(PclabError, ArithmeticError):
    """The known coefficients do not determine the requested quantity.

    ``lower_bound`` is set when the failure still certifies something: the
    quantity (typically a determinant) vanishes to at least that order.
    """

    def __init__(self, message, lower_bound=None):
        super().__init__(message)
        self.lower_bound = lower_bound


class SingularToWindow(InsufficientTruncation):
    """Every candidate pivot vanishes inside its certified window."""


class SingularD(PclabError, ArithmeticError):
    """det D_{m,0} = 0: the certificate formulas are not defined."""


class ConfigError(PclabError, ValueError):
    pass
