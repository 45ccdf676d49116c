"""Exception hierarchy shared by every module."""


class MinUncertError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MinUncertError, ValueError):
    """An argument is malformed or outside its admissible range."""


class DimensionError(InputError):
    """Operands have incompatible shapes."""


class NumericalError(MinUncertError, ArithmeticError):
    """A quantity that must be real, finite or non-negative is not, beyond tolerance."""


class TruncationError(NumericalError):
    """A Fock truncation is too small for the requested state."""
