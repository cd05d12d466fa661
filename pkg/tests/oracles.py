"""Slow reference implementations used by the tests.

The rounding oracle works on exact rationals built from limbcore Naturals
only; it shares no code with mpfloat's rounding path.
"""

from __future__ import annotations

import random
import re

from mca.limbcore import ONE, ZERO, Natural, divrem_schoolbook, mul_schoolbook, nat_cmp
from mca.mpfloat import Float, InexactFlag, Kind, RoundingMode

NE = RoundingMode.NEAREST_EVEN


def nat_isqrt(n: Natural) -> Natural:
    """Bit-by-bit integer square root (deliberately not Newton)."""
    if not n:
        return ZERO
    root = ZERO
    for i in range((n.bit_length() + 1) // 2, -1, -1):
        cand = root + (ONE << i)
        if nat_cmp(mul_schoolbook(cand, cand), n) <= 0:
            root = cand
    return root


class Rational:
    """sign * num / den with den > 0; not necessarily in lowest terms."""

    __slots__ = ("sign", "num", "den")

    def __init__(self, sign, num, den=ONE):
        self.sign = 0 if not num else sign
        self.num = num
        self.den = den

    @classmethod
    def of_float(cls, x: Float) -> "Rational":
        assert x.kind in (Kind.FINITE, Kind.ZERO)
        if x.is_zero:
            return cls(0, ZERO)
        lo = x.lowexp
        return cls(x.sign, x.man << max(lo, 0), ONE << max(-lo, 0))

    def __neg__(self):
        return Rational(-self.sign, self.num, self.den)

    def __add__(self, other):
        a = mul_schoolbook(self.num, other.den)
        b = mul_schoolbook(other.num, self.den)
        den = mul_schoolbook(self.den, other.den)
        if self.sign == 0:
            return Rational(other.sign, b, den)
        if other.sign == 0 or self.sign == other.sign:
            return Rational(self.sign, a + b, den)
        c = nat_cmp(a, b)
        if c >= 0:
            return Rational(self.sign, a - b, den)
        return Rational(other.sign, b - a, den)

    def __mul__(self, other):
        return Rational(self.sign * other.sign, mul_schoolbook(self.num, other.num),
                        mul_schoolbook(self.den, other.den))

    def __truediv__(self, other):
        assert other.sign
        return Rational(self.sign * other.sign, mul_schoolbook(self.num, other.den),
                        mul_schoolbook(self.den, other.num))

    def cmp(self, other) -> int:
        d = self + (-other)
        return d.sign


def _floor_log2(num: Natural, den: Natural) -> int:
    e = num.bit_length() - den.bit_length()
    if e >= 0:
        below = nat_cmp(num, den << e) < 0
    else:
        below = nat_cmp(num << -e, den) < 0
    return e - 1 if below else e


def _finish(sign, q, e, p, mode, exact, cmp_half):
    """q = floor(|v| * 2^(p-1-e)) with |v| in [2^e, 2^(e+1)); cmp_half compares
    the dropped fraction with 1/2."""
    up = False
    if not exact:
        if mode is NE:
            up = cmp_half > 0 or (cmp_half == 0 and q.is_odd())
        elif mode is RoundingMode.TOWARD_ZERO:
            up = False
        elif mode is RoundingMode.TOWARD_POSITIVE:
            up = sign > 0
        else:
            up = sign < 0
    if up:
        q = q + ONE
        if q.bit_length() > p:
            q = q >> 1
            e += 1
    if exact:
        flag = InexactFlag.EXACT
    else:
        above = up if sign > 0 else not up
        flag = InexactFlag.ROUNDED_UP if above else InexactFlag.ROUNDED_DOWN
    return sign, q, e, flag


def round_rational(r: Rational, p: int, mode: RoundingMode):
    """(sign, significand, leading exponent, flag) of r rounded to p bits."""
    if r.sign == 0:
        return 0, ZERO, 0, InexactFlag.EXACT
    e = _floor_log2(r.num, r.den)
    s = p - 1 - e
    num = r.num << max(s, 0)
    den = r.den << max(-s, 0)
    q, rem = divrem_schoolbook(num, den)
    return _finish(r.sign, q, e, p, mode, not rem, nat_cmp(rem + rem, den))


def round_sqrt(r: Rational, p: int, mode: RoundingMode):
    """sqrt(r) for r > 0 rounded to p bits."""
    assert r.sign > 0
    e = _floor_log2(r.num, r.den) // 2
    s = p - 1 - e
    # floor(sqrt(num/den) * 2^s) = isqrt(floor(num * 4^s / den))
    num = r.num << max(2 * s, 0)
    den = r.den << max(-2 * s, 0)
    fl, rem = divrem_schoolbook(num, den)
    q = nat_isqrt(fl)
    exact = not rem and mul_schoolbook(q, q) == fl
    # compare sqrt(num/den) with q + 1/2: 4 num vs (2q+1)^2 den
    t = (q << 1) + ONE
    c = nat_cmp(num << 2, mul_schoolbook(mul_schoolbook(t, t), den))
    return _finish(1, q, e, p, mode, exact, c)


_DEC = re.compile(r"^([+-]?)(\d*)\.?(\d*)(?:[eE]([+-]?\d+))?$")


def decimal_rational(s: str) -> Rational:
    sgn, whole, frac, exp = _DEC.match(s).groups()
    digits = Natural.from_int(int((whole + frac) or "0"))
    k = int(exp or 0) - len(frac)
    ten = Natural.from_int(10 ** abs(k))
    if k >= 0:
        return Rational(-1 if sgn == "-" else 1, mul_schoolbook(digits, ten))
    return Rational(-1 if sgn == "-" else 1, digits, ten)


def float_matches(x: Float, want) -> bool:
    sign, m, e, _ = want
    if sign == 0:
        return x.is_zero
    return x.is_finite and x.sign == sign and x.exp == e and x.man == m


def random_float(rng: random.Random, prec: int, exp_range: int = 64) -> Float:
    """Random finite Float; significands lean on runs of equal bits."""
    style = rng.random()
    if style < 0.15:
        m = (1 << prec) - 1
    elif style < 0.3:
        m = (1 << (prec - 1)) | rng.getrandbits(max(prec // 4, 1))
    else:
        m = (1 << (prec - 1)) | rng.getrandbits(prec - 1)
    return Float(Kind.FINITE, rng.choice((1, -1)), prec, rng.randint(-exp_range, exp_range),
                 Natural.from_int(m))


def naive_powmod(a: int, e: int, n: int) -> int:
    result = 1 % n
    for bit in bin(e)[2:]:
        result = result * result % n
        if bit == "1":
            result = result * a % n
    return result


# ---------------------------------------------------------------------------
# constants from plain Python integers, sharing nothing with elemfun


def _bs_py(a, b, p, q, t):
    # (P, Q, T) over [a, b) with T/Q = sum of t(k) * prod_{j<k} p(j)/q(j) relative to a
    if b - a == 1:
        return p(a), q(a), t(a) * q(a)
    m = (a + b) // 2
    p1, q1, t1 = _bs_py(a, m, p, q, t)
    p2, q2, t2 = _bs_py(m, b, p, q, t)
    return p1 * p2, q1 * q2, t1 * q2 + p1 * t2


def pi_chudnovsky_int(bits: int) -> int:
    """floor-ish pi * 2^bits (error below 2) by the Chudnovsky series."""
    c3 = 640320 ** 3 // 24
    n = bits // 47 + 2
    P, Q, T = _bs_py(0, n,
                     lambda k: -(6 * k + 1) * (2 * k + 1) * (6 * k + 5),
                     lambda k: (k + 1) ** 3 * c3,
                     lambda k: 13591409 + 545140134 * k)
    # pi = 426880 sqrt(10005) Q / T
    w = bits + 32
    root = _isqrt_py(10005 << (2 * w))
    return (426880 * root * Q // T) >> 32


def _isqrt_py(n: int) -> int:
    x = 1 << ((n.bit_length() + 1) // 2)
    while True:
        y = (x + n // x) // 2
        if y >= x:
            return x
        x = y


def e_digits(n: int) -> str:
    """First n significant digits of e, correctly rounded, from sum 1/k!."""
    k = 1
    while _lgamma_digits(k) < n + 10:
        k += 1
    # sum_{j<=k} k!/j!
    num, term = 0, 1
    for j in range(k, -1, -1):
        num += term
        term *= j if j else 1
    fact = term
    scaled = num * 10 ** (n - 1) * 2 // fact
    return _fmt_digits((scaled + 1) // 2, n)


def _lgamma_digits(k: int) -> float:
    import math
    return math.lgamma(k + 1) / math.log(10)


def _fmt_digits(v: int, n: int) -> str:
    s = str(v)
    return s[0] + ("." + s[1:] if n > 1 else "")
