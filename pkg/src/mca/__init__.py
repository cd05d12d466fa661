"""Arbitrary-precision integers, modular arithmetic and correctly rounded floats."""

from . import limbcore, fastmul, divgcd  # noqa: F401  (registers the fast paths)
from . import modring, mpfloat, elemfun  # noqa: F401
from .limbcore import Integer, Natural
from .mpfloat import Float, InexactFlag, RoundingMode

__all__ = ["Integer", "Natural", "Float", "InexactFlag", "RoundingMode"]
