"""Binary floating point of any precision with correct rounding.

A finite :class:`Float` is ``(-1)^s * m * 2^(E - p + 1)`` with a p-bit
significand ``m`` (top bit set) and ``E`` the exponent of its leading bit.
Every operation computes an exact integer (plus, at most, a sticky bit that
says "something nonzero was dropped below") and hands it to ``_round``, the
single place where rounding decisions are made.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

from .divgcd import isqrt
from .errors import ParseError
from .limbcore import ONE, ZERO, Natural, nat_cmp, nat_from_string, nat_to_string


class RoundingMode(enum.Enum):
    NEAREST_EVEN = "nearest"
    TOWARD_ZERO = "zero"
    TOWARD_POSITIVE = "up"
    TOWARD_NEGATIVE = "down"


class InexactFlag(enum.IntEnum):
    """Where the returned value lies relative to the exact result."""

    ROUNDED_DOWN = -1
    EXACT = 0
    ROUNDED_UP = 1


class Kind(enum.Enum):
    FINITE = "finite"
    ZERO = "zero"
    POS_INF = "+inf"
    NEG_INF = "-inf"
    NAN = "nan"


NE = RoundingMode.NEAREST_EVEN
EXACT = InexactFlag.EXACT


@dataclass(frozen=True)
class ExponentBounds:
    emin: int = -(1 << 40)
    emax: int = 1 << 40


DEFAULT_BOUNDS = ExponentBounds()


@dataclass(frozen=True)
class Float:
    kind: Kind
    sign: int            # +1 or -1; meaningful for FINITE and ZERO
    prec: int
    exp: int = 0         # exponent of the leading bit
    man: Natural = ZERO  # exactly prec bits when FINITE

    def __post_init__(self):
        if self.prec < 2:
            raise ValueError("precision must be at least 2 bits")
        if self.kind is Kind.FINITE and self.man.bit_length() != self.prec:
            raise ValueError("significand must have exactly prec bits")

    # constructors for the special values
    @classmethod
    def nan(cls, prec: int) -> "Float":
        return cls(Kind.NAN, 1, prec)

    @classmethod
    def inf(cls, sign: int, prec: int) -> "Float":
        return cls(Kind.POS_INF if sign > 0 else Kind.NEG_INF, 1 if sign > 0 else -1, prec)

    @classmethod
    def zero(cls, sign: int, prec: int) -> "Float":
        return cls(Kind.ZERO, 1 if sign > 0 else -1, prec)

    @property
    def is_nan(self) -> bool:
        return self.kind is Kind.NAN

    @property
    def is_inf(self) -> bool:
        return self.kind in (Kind.POS_INF, Kind.NEG_INF)

    @property
    def is_zero(self) -> bool:
        return self.kind is Kind.ZERO

    @property
    def is_finite(self) -> bool:
        return self.kind is Kind.FINITE

    @property
    def lowexp(self) -> int:
        """Exponent of the significand's last bit."""
        return self.exp - self.prec + 1

    def __neg__(self) -> "Float":
        if self.kind is Kind.NAN:
            return self
        if self.is_inf:
            return Float.inf(-self.sign, self.prec)
        return Float(self.kind, -self.sign, self.prec, self.exp, self.man)

    def __repr__(self) -> str:
        return f"Float({to_hex(self)})"


def negate(x: Float) -> Float:
    return -x


def _check_prec(p: int) -> None:
    if p < 2:
        raise ValueError("precision must be at least 2 bits")


def _max_finite(sign: int, p: int, bounds: ExponentBounds) -> Float:
    return Float(Kind.FINITE, sign, p, bounds.emax, (ONE << p) - ONE)


def _flag(sign: int, magnitude_up: bool) -> InexactFlag:
    up = magnitude_up if sign > 0 else not magnitude_up
    return InexactFlag.ROUNDED_UP if up else InexactFlag.ROUNDED_DOWN


def _away(mode: RoundingMode, sign: int) -> bool:
    """Does a directed mode round this sign's magnitude up?"""
    return (mode is RoundingMode.TOWARD_POSITIVE and sign > 0) or \
        (mode is RoundingMode.TOWARD_NEGATIVE and sign < 0)


def _round(sign: int, n: Natural, e: int, p: int, mode: RoundingMode,
           sticky: bool = False, bounds: ExponentBounds = DEFAULT_BOUNDS):
    """Round sign * (n + d) * 2^e to p bits, with d in (0, 1) if sticky else 0.

    With ``sticky`` set, n must carry at least two bits beyond p so the tail
    can never reach the rounding position.
    """
    length = n.bit_length()
    if length == 0:
        assert not sticky
        return Float.zero(sign, p), EXACT
    if length <= p:
        assert not sticky, "sticky rounding needs guard bits"
        m, inexact, up = n << (p - length), False, False
    else:
        shift = length - p
        assert not sticky or shift >= 2
        m = n >> shift
        half = n.bit(shift - 1)
        rest = sticky or n.low_bits_nonzero(shift - 1)
        inexact = bool(half or rest)
        if mode is RoundingMode.NEAREST_EVEN:
            up = bool(half and (rest or m.is_odd()))
        elif mode is RoundingMode.TOWARD_ZERO:
            up = False
        else:
            up = inexact and _away(mode, sign)
        if up:
            m = m + ONE
            if m.bit_length() > p:
                m = m >> 1
                length += 1
    E = e + length - 1
    if E > bounds.emax:
        if mode is RoundingMode.TOWARD_ZERO or (mode is not NE and not _away(mode, sign)):
            return _max_finite(sign, p, bounds), _flag(sign, False)
        return Float.inf(sign, p), _flag(sign, True)
    if E < bounds.emin:
        # no subnormals: flush to a signed zero
        return Float.zero(sign, p), _flag(sign, False)
    result = Float(Kind.FINITE, sign, p, E, m)
    return result, (_flag(sign, up) if inexact else EXACT)


def round_to_precision(x: Float, p: int, mode: RoundingMode = NE,
                       bounds: ExponentBounds = DEFAULT_BOUNDS):
    _check_prec(p)
    if x.kind is Kind.NAN:
        return Float.nan(p), EXACT
    if x.is_inf:
        return Float.inf(x.sign, p), EXACT
    if x.is_zero:
        return Float.zero(x.sign, p), EXACT
    return _round(x.sign, x.man, x.lowexp, p, mode, bounds=bounds)


def _zero_sum_sign(mode: RoundingMode) -> int:
    return -1 if mode is RoundingMode.TOWARD_NEGATIVE else 1


def fadd(a: Float, b: Float, p: int, mode: RoundingMode = NE,
         bounds: ExponentBounds = DEFAULT_BOUNDS):
    _check_prec(p)
    if a.is_nan or b.is_nan:
        return Float.nan(p), EXACT
    if a.is_inf or b.is_inf:
        if a.is_inf and b.is_inf and a.sign != b.sign:
            return Float.nan(p), EXACT
        return Float.inf(a.sign if a.is_inf else b.sign, p), EXACT
    if a.is_zero and b.is_zero:
        sign = a.sign if a.sign == b.sign else _zero_sum_sign(mode)
        return Float.zero(sign, p), EXACT
    if b.is_zero:
        return round_to_precision(a, p, mode, bounds)
    if a.is_zero:
        return round_to_precision(b, p, mode, bounds)
    if b.exp > a.exp:
        a, b = b, a
    # b lies entirely below the guard bits of a: only its sign matters
    k = max(0, p + 3 - a.prec)
    lo = a.lowexp - k
    if b.exp + 1 <= lo:
        n = a.man << k
        if a.sign == b.sign:
            return _round(a.sign, n, lo, p, mode, True, bounds)
        return _round(a.sign, n - ONE, lo, p, mode, True, bounds)
    lo = min(a.lowexp, b.lowexp)
    x = a.man << (a.lowexp - lo)
    y = b.man << (b.lowexp - lo)
    if a.sign == b.sign:
        return _round(a.sign, x + y, lo, p, mode, bounds=bounds)
    c = nat_cmp(x, y)
    if c == 0:
        return Float.zero(_zero_sum_sign(mode), p), EXACT
    if c > 0:
        return _round(a.sign, x - y, lo, p, mode, bounds=bounds)
    return _round(b.sign, y - x, lo, p, mode, bounds=bounds)


def fsub(a: Float, b: Float, p: int, mode: RoundingMode = NE,
         bounds: ExponentBounds = DEFAULT_BOUNDS):
    return fadd(a, -b, p, mode, bounds)


def fmul(a: Float, b: Float, p: int, mode: RoundingMode = NE,
         bounds: ExponentBounds = DEFAULT_BOUNDS):
    _check_prec(p)
    if a.is_nan or b.is_nan:
        return Float.nan(p), EXACT
    sign = a.sign * b.sign
    if a.is_inf or b.is_inf:
        if a.is_zero or b.is_zero:
            return Float.nan(p), EXACT
        return Float.inf(sign, p), EXACT
    if a.is_zero or b.is_zero:
        return Float.zero(sign, p), EXACT
    return _round(sign, a.man * b.man, a.lowexp + b.lowexp, p, mode, bounds=bounds)


def fdiv(a: Float, b: Float, p: int, mode: RoundingMode = NE,
         bounds: ExponentBounds = DEFAULT_BOUNDS):
    _check_prec(p)
    if a.is_nan or b.is_nan:
        return Float.nan(p), EXACT
    sign = a.sign * b.sign
    if a.is_inf:
        return (Float.nan(p) if b.is_inf else Float.inf(sign, p)), EXACT
    if b.is_inf:
        return Float.zero(sign, p), EXACT
    if b.is_zero:
        return (Float.nan(p) if a.is_zero else Float.inf(sign, p)), EXACT
    if a.is_zero:
        return Float.zero(sign, p), EXACT
    s = max(0, p + 2 + b.prec - a.prec)
    q, r = divmod(a.man << s, b.man)
    return _round(sign, q, a.lowexp - b.lowexp - s, p, mode, bool(r), bounds)


def fsqrt(a: Float, p: int, mode: RoundingMode = NE,
          bounds: ExponentBounds = DEFAULT_BOUNDS):
    _check_prec(p)
    if a.is_nan:
        return Float.nan(p), EXACT
    if a.is_zero:
        return Float.zero(a.sign, p), EXACT
    if a.sign < 0:
        return Float.nan(p), EXACT
    if a.is_inf:
        return Float.inf(1, p), EXACT
    s = max(0, 2 * (p + 2) - a.prec + 1)
    if (a.lowexp - s) % 2:
        s += 1
    n = a.man << s
    root = isqrt(n)
    exact = root * root == n
    return _round(1, root, (a.lowexp - s) // 2, p, mode, not exact, bounds)


def fcmp(a: Float, b: Float):
    """-1, 0 or 1; None when either side is NaN."""
    if a.is_nan or b.is_nan:
        return None
    ka, kb = _key(a), _key(b)
    if ka[0] != kb[0]:
        return 1 if ka[0] > kb[0] else -1
    sa = ka[0]
    if sa == 0 or a.is_inf:
        return 0
    # same sign, both finite: compare magnitudes
    if a.exp != b.exp:
        c = 1 if a.exp > b.exp else -1
    else:
        lo = min(a.lowexp, b.lowexp)
        c = nat_cmp(a.man << (a.lowexp - lo), b.man << (b.lowexp - lo))
    return c * sa


def _key(x: Float):
    # coarse class: -2 (-inf), -1 (negative), 0 (zero), 1 (positive), 2 (+inf)
    if x.kind is Kind.POS_INF:
        return (2,)
    if x.kind is Kind.NEG_INF:
        return (-2,)
    if x.is_zero:
        return (0,)
    return (x.sign,)


# ---------------------------------------------------------------------------
# conversions


def from_scaled(sign: int, n: Natural, e: int, p: int, mode: RoundingMode = NE,
                bounds: ExponentBounds = DEFAULT_BOUNDS):
    """Correctly rounded sign * n * 2^e."""
    _check_prec(p)
    return _round(sign, n, e, p, mode, bounds=bounds)


def from_int(v: int, p: int, mode: RoundingMode = NE):
    return from_scaled(-1 if v < 0 else 1, Natural.from_int(abs(v)), 0, p, mode)


def from_float(f: float, p: int = 53, mode: RoundingMode = NE):
    if math.isnan(f):
        return Float.nan(p), EXACT
    if math.isinf(f):
        return Float.inf(1 if f > 0 else -1, p), EXACT
    sign = -1 if math.copysign(1.0, f) < 0 else 1
    if f == 0:
        return Float.zero(sign, p), EXACT
    num, den = abs(f).as_integer_ratio()
    return from_scaled(sign, Natural.from_int(num), -(den.bit_length() - 1), p, mode)


def to_float(x: Float) -> float:
    """Nearest double (ties to even); saturates to +-inf beyond the double range."""
    if x.is_nan:
        return math.nan
    if x.is_inf:
        return math.inf * x.sign
    if x.is_zero:
        return math.copysign(0.0, x.sign)
    y, _ = round_to_precision(x, 53, NE)
    if y.is_inf:
        return math.inf * x.sign
    if y.exp > 1023:
        return math.inf * x.sign
    return math.ldexp(float(int(y.man)), y.lowexp) * y.sign


_DEC_RE = re.compile(r"^\s*([+-]?)(\d+\.?\d*|\.\d+)(?:[eE]([+-]?\d+))?\s*$")
_LOG2_10 = math.log2(10)


def _pow_nat(base: int, e: int) -> Natural:
    result, b = ONE, Natural.from_int(base)
    while e:
        if e & 1:
            result = result * b
        e >>= 1
        if e:
            b = b * b
    return result


def from_decimal(s: str, p: int, mode: RoundingMode = NE,
                 bounds: ExponentBounds = DEFAULT_BOUNDS):
    """Correctly rounded value of a decimal literal such as ``-12.5e-3``."""
    _check_prec(p)
    text = s.strip().lower()
    body = text.lstrip("+-")
    sign = -1 if text.startswith("-") else 1
    if body in ("inf", "infinity") and len(text) - len(body) <= 1:
        return Float.inf(sign, p), EXACT
    if body == "nan" and len(text) - len(body) <= 1:
        return Float.nan(p), EXACT
    match = _DEC_RE.match(s)
    if not match:
        raise ParseError(f"not a decimal number: {s!r}")
    sgn, mant, exp = match.groups()
    sign = -1 if sgn == "-" else 1
    whole, _, frac = mant.partition(".")
    digits = (whole + frac).lstrip("0")
    k = int(exp or 0) - len(frac)
    if not digits:
        return Float.zero(sign, p), EXACT
    # value = digits * 10^k; settle absurd exponents without building 10^k
    top = (k + len(digits)) * _LOG2_10
    if top > bounds.emax + 2:
        return _round(sign, ONE, bounds.emax + 1, p, mode, bounds=bounds)
    if top < bounds.emin - 2:
        return Float.zero(sign, p), _flag(sign, False)
    d = nat_from_string(digits, 10)
    if k >= 0:
        return _round(sign, d * _pow_nat(10, k), 0, p, mode, bounds=bounds)
    den = _pow_nat(10, -k)
    s2 = max(0, p + 2 + den.bit_length() - d.bit_length())
    q, r = divmod(d << s2, den)
    return _round(sign, q, -s2, p, mode, bool(r), bounds)


def _div_round(num: Natural, den: Natural, up_if_inexact: bool, nearest: bool) -> Natural:
    q, r = divmod(num, den)
    if not r:
        return q
    if nearest:
        c = nat_cmp(r + r, den)
        if c > 0 or (c == 0 and q.is_odd()):
            return q + ONE
        return q
    return q + ONE if up_if_inexact else q


def to_decimal(x: Float, ndigits: int, mode: RoundingMode = NE) -> str:
    """``ndigits`` significant digits, rounded per ``mode``: ``-1.250e-3``."""
    if ndigits < 1:
        raise ValueError("ndigits must be positive")
    if x.is_nan:
        return "nan"
    if x.is_inf:
        return "inf" if x.sign > 0 else "-inf"
    sgn = "-" if x.sign < 0 else ""
    if x.is_zero:
        return sgn + "0" + ("." + "0" * (ndigits - 1) if ndigits > 1 else "") + "e0"
    nearest = mode is NE
    up = _away(mode, x.sign)
    lo = x.lowexp
    K = math.floor(x.exp * math.log10(2))
    lower = _pow_nat(10, ndigits - 1)
    upper = lower * Natural.from_int(10)
    for _ in range(8):
        t = ndigits - 1 - K  # scale by 10^t
        num = x.man << max(lo, 0)
        den = ONE << max(-lo, 0)
        if t >= 0:
            num = num * _pow_nat(10, t)
        else:
            den = den * _pow_nat(10, -t)
        d = _div_round(num, den, up, nearest)
        if d >= upper:
            # either K was low or rounding carried into a new digit
            if (num // den) >= upper:
                K += 1
                continue
            d = lower
            K += 1
        elif num < lower * den:
            K -= 1
            continue
        break
    ds = nat_to_string(d, 10)
    frac = "." + ds[1:] if ndigits > 1 else ""
    return f"{sgn}{ds[0]}{frac}e{K}"


_HEX_RE = re.compile(r"^([+-])0x([0-9a-f]+)p(-?\d+):(\d+)$")


def to_hex(x: Float) -> str:
    """Lossless text form ``+0x<m>p<e>:<prec>`` (value m * 2^e)."""
    if x.is_nan:
        return f"nan:{x.prec}"
    if x.is_inf:
        return f"{'+' if x.sign > 0 else '-'}inf:{x.prec}"
    sgn = "+" if x.sign > 0 else "-"
    if x.is_zero:
        return f"{sgn}0x0p0:{x.prec}"
    tz = x.man.trailing_zeros()
    return f"{sgn}0x{nat_to_string(x.man >> tz, 16)}p{x.lowexp + tz}:{x.prec}"


def from_hex(s: str) -> Float:
    s = s.strip().lower()
    if s.startswith("nan:"):
        return Float.nan(int(s[4:]))
    if s[1:].startswith("inf:") and s[0] in "+-":
        return Float.inf(1 if s[0] == "+" else -1, int(s[5:]))
    match = _HEX_RE.match(s)
    if not match:
        raise ParseError(f"bad hex float: {s!r}")
    sgn, digits, exp, prec = match.groups()
    sign, prec = (1 if sgn == "+" else -1), int(prec)
    m = nat_from_string(digits, 16)
    if not m:
        return Float.zero(sign, prec)
    if m.bit_length() > prec:
        raise ParseError(f"significand of {s!r} needs more than {prec} bits")
    shift = prec - m.bit_length()
    return Float(Kind.FINITE, sign, prec, int(exp) + m.bit_length() - 1, m << shift)
