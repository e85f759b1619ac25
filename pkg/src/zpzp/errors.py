"""Exception types raised across the package."""


class ZpzpError(Exception):
    """Base class for all package errors."""


class ParameterError(ZpzpError, ValueError):
    """Invalid or mismatched parameters (prime, precision, level, ...)."""


class NonUnitError(ZpzpError, ArithmeticError):
    """Attempt to invert a residue divisible by p."""


class PrecisionError(ZpzpError, ArithmeticError):
    """Input known to too few p-adic digits for the requested output."""


class DomainError(ZpzpError, ValueError):
    """Operation applied outside its domain (e.g. sigma on a T-dependent element)."""


class TruncationError(ZpzpError, ValueError):
    """A quantity that must be stored exactly does not fit the truncation box."""


class BoxMismatchError(ParameterError):
    """Operands live in different truncation boxes."""


class DisagreementError(ZpzpError, AssertionError):
    """Independent determinant routes disagree."""
