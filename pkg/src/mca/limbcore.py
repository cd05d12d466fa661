"""Limb representation of naturals and signed integers, plus the schoolbook
algorithms that every faster routine in the package is checked against.

A :class:`Natural` is an immutable little-endian array of 64-bit limbs with
no zero top limb; zero is the empty array.  Python ints only appear at the
edges (``from_int``/``int()``), never inside the arithmetic.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .errors import DivisionByZero, InvalidBase, InvalidDigit, Underflow

W = 64
BETA = 1 << W
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"
_DIGIT_VALUE = {c: i for i, c in enumerate(_DIGITS)}

# The operator sugar on Natural routes through the fast paths once fastmul
# and divgcd have been imported (the package __init__ does that).
_mul_impl = None
_sqr_impl = None
_divrem_impl = None


def _freeze(arr: np.ndarray) -> np.ndarray:
    n = K.normlen(arr)
    if n != arr.shape[0]:
        arr = arr[:n]
    arr.flags.writeable = False
    return arr


_EMPTY = _freeze(np.zeros(0, np.uint64))


class Natural:
    """Unsigned arbitrary-precision integer."""

    __slots__ = ("_a",)

    def __init__(self, limbs=()):
        vals = list(limbs)
        for v in vals:
            if not 0 <= v < BETA:
                raise ValueError(f"limb out of range: {v!r}")
        self._a = _freeze(np.array(vals, dtype=np.uint64))

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "Natural":
        obj = object.__new__(cls)
        obj._a = _freeze(arr)
        assert obj._a.shape[0] == 0 or obj._a[-1] != 0
        return obj

    @classmethod
    def from_int(cls, value: int) -> "Natural":
        if value < 0:
            raise Underflow("Natural cannot hold a negative value")
        if value == 0:
            return ZERO
        nbytes = ((value.bit_length() + 63) // 64) * 8
        arr = np.frombuffer(value.to_bytes(nbytes, "little"), dtype=np.uint64).copy()
        return cls._wrap(arr)

    # -- views ---------------------------------------------------------------

    @property
    def limbs(self) -> tuple:
        return tuple(int(x) for x in self._a)

    @property
    def nlimbs(self) -> int:
        return self._a.shape[0]

    def bit_length(self) -> int:
        n = self._a.shape[0]
        if n == 0:
            return 0
        return 64 * (n - 1) + int(self._a[n - 1]).bit_length()

    def is_odd(self) -> bool:
        return self._a.shape[0] > 0 and bool(self._a[0] & 1)

    def bit(self, i: int) -> int:
        q, r = divmod(i, 64)
        if q >= self._a.shape[0]:
            return 0
        return (int(self._a[q]) >> r) & 1

    def low_bits_nonzero(self, bits: int) -> bool:
        """True when self mod 2^bits != 0."""
        return bits > 0 and K.low_bits_nonzero(self._a, bits)

    def trailing_zeros(self) -> int:
        return K.trailing_zeros(self._a)

    def low_limbs(self, k: int) -> "Natural":
        return Natural._wrap(self._a[:k])

    def high_limbs(self, k: int) -> "Natural":
        return Natural._wrap(self._a[k:])

    def __int__(self) -> int:
        return int.from_bytes(self._a.tobytes(), "little")

    def __index__(self) -> int:
        return int(self)

    def __bool__(self) -> bool:
        return self._a.shape[0] != 0

    def __repr__(self) -> str:
        return f"Natural({format_hex(self)})"

    # -- comparisons -----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Natural):
            return NotImplemented
        return K.cmp_n(self._a, other._a) == 0

    def __hash__(self):
        return hash(self._a.tobytes())

    def __lt__(self, other):
        return nat_cmp(self, other) < 0

    def __le__(self, other):
        return nat_cmp(self, other) <= 0

    def __gt__(self, other):
        return nat_cmp(self, other) > 0

    def __ge__(self, other):
        return nat_cmp(self, other) >= 0

    # -- arithmetic sugar ------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Natural):
            return NotImplemented
        return nat_add(self, other)

    def __sub__(self, other):
        if not isinstance(other, Natural):
            return NotImplemented
        return nat_sub(self, other)

    def __mul__(self, other):
        if not isinstance(other, Natural):
            return NotImplemented
        if other is self and _sqr_impl is not None:
            return _sqr_impl(self)
        return (_mul_impl or mul_schoolbook)(self, other)

    def __divmod__(self, other):
        if not isinstance(other, Natural):
            return NotImplemented
        return (_divrem_impl or divrem_schoolbook)(self, other)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __lshift__(self, k: int):
        return nat_shift(self, k)

    def __rshift__(self, k: int):
        return nat_shift(self, -k)


ZERO = Natural._wrap(np.zeros(0, np.uint64))
ONE = Natural._wrap(np.ones(1, np.uint64))


def nat(value) -> Natural:
    """Coerce a Python int (or Natural) to Natural."""
    if isinstance(value, Natural):
        return value
    return Natural.from_int(value)


# ---------------------------------------------------------------------------
# natural operations


def nat_cmp(a: Natural, b: Natural) -> int:
    """-1, 0 or 1 as a <, =, > b."""
    return K.cmp_n(a._a, b._a)


def nat_add(a: Natural, b: Natural) -> Natural:
    if not b:
        return a
    if not a:
        return b
    return Natural._wrap(K.add_n(a._a, b._a))


def nat_sub(a: Natural, b: Natural) -> Natural:
    if not b:
        return a
    if K.cmp_n(a._a, b._a) < 0:
        raise Underflow("a - b with a < b")
    out, borrow = K.sub_n(a._a, b._a)
    assert borrow == 0
    return Natural._wrap(out)


def nat_shift(a: Natural, k: int) -> Natural:
    """floor(a * 2^k); exact for k >= 0."""
    if k == 0 or not a:
        return a
    if k > 0:
        return Natural._wrap(K.lshift(a._a, k))
    return Natural._wrap(K.rshift(a._a, -k))


def mul_schoolbook(a: Natural, b: Natural) -> Natural:
    if not a or not b:
        return ZERO
    return Natural._wrap(K.mul_basecase(a._a, b._a))


def sqr_schoolbook(a: Natural) -> Natural:
    if not a:
        return ZERO
    return Natural._wrap(K.sqr_basecase(a._a))


def divrem_schoolbook(a: Natural, b: Natural):
    """Normalized long division with two-limb quotient estimates.

    Returns (q, r) with a = q*b + r and r < b.
    """
    if not b:
        raise DivisionByZero("division by zero")
    if K.cmp_n(a._a, b._a) < 0:
        return ZERO, a
    nb = b._a.shape[0]
    if nb == 1:
        q, r = K.divrem_1(a._a, b._a[0])
        rem = np.array([r], dtype=np.uint64)
        return Natural._wrap(q), Natural._wrap(rem)
    s = 64 - int(b._a[nb - 1]).bit_length()
    v = K.lshift(b._a, s)[:nb].copy()
    u = K.lshift(a._a, s)
    q, u = K.divrem_knuth(u, v)
    r = K.rshift(u[:nb].copy(), s)
    return Natural._wrap(q), Natural._wrap(r)


# ---------------------------------------------------------------------------
# base conversion

def _chunk_params(base: int):
    k, big = 1, base
    while big * base < BETA:
        big *= base
        k += 1
    return k, big


_CHUNKS = {b: _chunk_params(b) for b in range(2, 37)}


def _check_base(base) -> None:
    if not isinstance(base, int) or not 2 <= base <= 36:
        raise InvalidBase(f"base must be an int in 2..36, got {base!r}")


def nat_to_string(a: Natural, base: int = 10) -> str:
    """Digits of ``a`` in ``base``, lowercase, no leading zeros."""
    _check_base(base)
    if not a:
        return "0"
    k, big = _CHUNKS[base]
    hint = a.bit_length() // 58 + 2
    chunks = K.chunks_base(a._a, np.uint64(big), hint)
    parts = [np.base_repr(int(chunks[-1]), base).lower()]
    for c in chunks[-2::-1]:
        parts.append(np.base_repr(int(c), base).lower().rjust(k, "0"))
    return "".join(parts)


def nat_from_string(s: str, base: int = 10) -> Natural:
    _check_base(base)
    if not s:
        raise InvalidDigit("empty digit string")
    s = s.lower()
    for ch in s:
        v = _DIGIT_VALUE.get(ch)
        if v is None or v >= base:
            raise InvalidDigit(f"invalid digit {ch!r} for base {base}")
    k, big = _CHUNKS[base]
    nbits = len(s) * base.bit_length()
    acc = np.zeros(nbits // 64 + 2, np.uint64)
    size = 0
    first = len(s) % k or k
    pos = 0
    step = first
    while pos < len(s):
        group = s[pos:pos + step]
        mult = base ** len(group)
        size = K.muladd_1_inplace(acc, size, np.uint64(mult), np.uint64(int(group, base)))
        pos += step
        step = k
    return Natural._wrap(acc[:size])


# ---------------------------------------------------------------------------
# signed integers


class Integer:
    """Sign-magnitude signed integer over :class:`Natural`."""

    __slots__ = ("sign", "mag")

    def __init__(self, sign: int, mag: Natural):
        if sign not in (-1, 0, 1):
            raise ValueError(f"bad sign {sign!r}")
        if (sign == 0) != (not mag):
            raise ValueError("sign must be 0 exactly when the magnitude is 0")
        self.sign = sign
        self.mag = mag

    @classmethod
    def from_int(cls, value: int) -> "Integer":
        if value == 0:
            return IZERO
        return cls(1 if value > 0 else -1, Natural.from_int(abs(value)))

    @classmethod
    def from_natural(cls, n: Natural, sign: int = 1) -> "Integer":
        if not n:
            return IZERO
        return cls(1 if sign >= 0 else -1, n)

    def __int__(self) -> int:
        return self.sign * int(self.mag)

    def __bool__(self) -> bool:
        return self.sign != 0

    def __neg__(self) -> "Integer":
        return Integer(-self.sign, self.mag)

    def __abs__(self) -> "Integer":
        return Integer(abs(self.sign), self.mag)

    def __add__(self, other):
        return int_add(self, _as_integer(other))

    def __sub__(self, other):
        return int_sub(self, _as_integer(other))

    def __mul__(self, other):
        return int_mul(self, _as_integer(other))

    def __lshift__(self, k: int):
        return Integer.from_natural(self.mag << k, self.sign)

    def __rshift__(self, k: int):
        """Floor division by 2^k, like Python ints."""
        q = self.mag >> k
        if self.sign < 0 and self.mag.low_bits_nonzero(k):
            q = q + ONE
        return Integer.from_natural(q, self.sign)

    def __eq__(self, other):
        if not isinstance(other, Integer):
            return NotImplemented
        return self.sign == other.sign and self.mag == other.mag

    def __hash__(self):
        return hash((self.sign, self.mag))

    def __lt__(self, other):
        return int_cmp(self, other) < 0

    def __le__(self, other):
        return int_cmp(self, other) <= 0

    def __gt__(self, other):
        return int_cmp(self, other) > 0

    def __ge__(self, other):
        return int_cmp(self, other) >= 0

    def __repr__(self) -> str:
        return f"Integer({format_hex(self)})"


IZERO = Integer(0, ZERO)
IONE = Integer(1, ONE)


def _as_integer(x) -> Integer:
    if isinstance(x, Integer):
        return x
    if isinstance(x, Natural):
        return Integer.from_natural(x)
    raise TypeError(f"expected Integer or Natural, got {type(x).__name__}")


def int_cmp(a: Integer, b: Integer) -> int:
    if a.sign != b.sign:
        return 1 if a.sign > b.sign else -1
    return a.sign * nat_cmp(a.mag, b.mag)


def int_add(a: Integer, b: Integer) -> Integer:
    if a.sign == 0:
        return b
    if b.sign == 0:
        return a
    if a.sign == b.sign:
        return Integer(a.sign, nat_add(a.mag, b.mag))
    c = nat_cmp(a.mag, b.mag)
    if c == 0:
        return IZERO
    if c > 0:
        return Integer(a.sign, nat_sub(a.mag, b.mag))
    return Integer(b.sign, nat_sub(b.mag, a.mag))


def int_sub(a: Integer, b: Integer) -> Integer:
    return int_add(a, -b)


def int_mul(a: Integer, b: Integer) -> Integer:
    if a.sign == 0 or b.sign == 0:
        return IZERO
    return Integer(a.sign * b.sign, a.mag * b.mag)


def int_divrem(a: Integer, b: Integer):
    """Quotient truncated toward zero; remainder takes the dividend's sign."""
    if b.sign == 0:
        raise DivisionByZero("division by zero")
    q, r = divmod(a.mag, b.mag)
    return Integer.from_natural(q, a.sign * b.sign), Integer.from_natural(r, a.sign)


def int_mod(a: Integer, n: Natural) -> Natural:
    """Least nonnegative residue of a modulo n."""
    r = a.mag % n
    if a.sign < 0 and r:
        return nat_sub(n, r)
    return r


# ---------------------------------------------------------------------------
# canonical hex form: optional "-", "0x", lowercase digits, "0x0" for zero


def format_hex(x) -> str:
    if isinstance(x, Integer):
        body = "0x" + nat_to_string(x.mag, 16)
        return "-" + body if x.sign < 0 else body
    return "0x" + nat_to_string(x, 16)


def parse_hex(s: str) -> Integer:
    neg = s.startswith("-")
    body = s[1:] if neg else s
    if not body.lower().startswith("0x"):
        raise InvalidDigit(f"expected 0x prefix in {s!r}")
    mag = nat_from_string(body[2:], 16)
    return Integer.from_natural(mag, -1 if neg else 1)


def parse_natural(s: str) -> Natural:
    """Decimal digits or 0x-prefixed hex."""
    s = s.strip()
    if s.lower().startswith("0x"):
        return nat_from_string(s[2:], 16)
    return nat_from_string(s, 10)
