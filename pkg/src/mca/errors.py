"""Exception hierarchy shared by every module."""


class MCAError(Exception):
    """Base class for all library errors."""


class Underflow(MCAError, ArithmeticError):
    """Natural subtraction would go negative."""


class DivisionByZero(MCAError, ZeroDivisionError):
    pass


class InvalidDigit(MCAError, ValueError):
    pass


class InvalidBase(MCAError, ValueError):
    pass


class BadLength(MCAError, ValueError):
    """Transform length is not a supported power of two."""


class SizeUnsupported(MCAError, ValueError):
    """Operands too large for the NTT plan's maximum transform length."""


class NotDivisible(MCAError, ArithmeticError):
    pass


class NotInvertible(MCAError, ArithmeticError):
    pass


class NotCoprime(MCAError, ArithmeticError):
    pass


class BadResidue(MCAError, ValueError):
    pass


class EvenModulus(MCAError, ValueError):
    pass


class ModulusTooSmall(MCAError, ValueError):
    pass


class InputTooLarge(MCAError, ValueError):
    pass


class ParseError(MCAError, ValueError):
    pass


class ZeroDenominator(MCAError, ZeroDivisionError):
    pass


class CannotDecide(MCAError, ArithmeticError):
    """Ziv loop hit its precision cap without isolating the rounding.

    ``interval`` holds the last (low, high) enclosure and ``precision`` the
    working precision at which the loop gave up.
    """

    def __init__(self, message, interval=None, precision=None):
        super().__init__(message)
        self.interval = interval
        self.precision = precision
