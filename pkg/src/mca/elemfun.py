"""Correctly rounded exp, ln, sin, cos and the constants pi and ln 2.

Everything below ``ziv_round`` works in fixed point: an Integer ``X``
standing for ``X * 2^-f`` together with an explicit bound on its error in
units of ``2^-f``.  ``ziv_round`` turns such an enclosure into a correctly
rounded Float, asking for more bits until the enclosure stops straddling a
rounding boundary.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable

from .errors import CannotDecide, ZeroDenominator
from .limbcore import IONE, IZERO, ONE, Integer, Natural, int_divrem
from .mpfloat import (DEFAULT_BOUNDS, EXACT, ExponentBounds, Float, InexactFlag,
                      RoundingMode, _check_prec, _round, fcmp, from_scaled, fsqrt,
                      round_to_precision)

NE = RoundingMode.NEAREST_EVEN
_WIDE = ExponentBounds(-(1 << 62), 1 << 62)


def _I(v) -> Integer:
    if isinstance(v, Integer):
        return v
    if isinstance(v, Natural):
        return Integer.from_natural(v)
    return Integer.from_int(v)


def _floor_div(a: Integer, b: Natural) -> Integer:
    q, r = int_divrem(a, Integer.from_natural(b))
    if r.sign < 0:
        q = q - IONE
    return q


def _log2_factorial_lb(k: int) -> int:
    """A lower bound for log2(k!)."""
    return sum(j.bit_length() - 1 for j in range(2, k + 1))


# ---------------------------------------------------------------------------
# series and continued fractions


@dataclass(frozen=True)
class SeriesSpec:
    """Hypergeometric-style series: term_{k+1} = term_k * p(k) / q(k).

    ``first`` is term_0 as (numerator, denominator); q(k) must be positive.
    ``tail_bound(K)`` returns an integer e with |sum_{k >= K} term_k| <= 2^e.
    """

    first: tuple
    p: Callable
    q: Callable
    tail_bound: Callable

    def terms_for(self, bits: int) -> int:
        """Smallest K whose tail is at most 2^-bits."""
        k = 1
        while self.tail_bound(k) > -bits:
            k *= 2
        lo, hi = k // 2, k
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if self.tail_bound(mid) > -bits:
                lo = mid
            else:
                hi = mid
        return hi


def _bs(spec: SeriesSpec, a: int, b: int):
    # returns (P, Q, T) with T/Q = sum_{k=a}^{b-1} prod_{j=a}^{k-1} p(j)/q(j)
    if b - a == 1:
        q = _I(spec.q(a))
        return _I(spec.p(a)), q, q
    m = (a + b) // 2
    p1, q1, t1 = _bs(spec, a, m)
    p2, q2, t2 = _bs(spec, m, b)
    return p1 * p2, q1 * q2, t1 * q2 + p1 * t2


def _prod(spec: SeriesSpec, a: int, b: int):
    if b <= a:
        return IONE, IONE
    if b - a == 1:
        return _I(spec.p(a)), _I(spec.q(a))
    m = (a + b) // 2
    p1, q1 = _prod(spec, a, m)
    p2, q2 = _prod(spec, m, b)
    return p1 * p2, q1 * q2


def binary_split(spec: SeriesSpec, k0: int, k1: int):
    """Exact (P, Q) with P/Q = sum of term_k for k0 <= k < k1."""
    if k1 <= k0:
        raise ValueError("empty range")
    pp, qq, t = _bs(spec, k0, k1)
    p0, q0 = _prod(spec, 0, k0)
    num, den = _I(spec.first[0]), _I(spec.first[1])
    P, Q = num * p0 * t, den * q0 * qq
    if Q.sign < 0:
        P, Q = -P, -Q
    return P, Q


def series_fixed(spec: SeriesSpec, bits: int) -> Integer:
    """floor-ish value of the full sum times 2^bits, off by at most 2."""
    K = spec.terms_for(bits + 2)
    P, Q = binary_split(spec, 0, K)
    return _floor_div(P << bits, Q.mag)


@dataclass(frozen=True)
class CFSpec:
    """Continued fraction b0 + a1/(b1 + a2/(b2 + ...)); term(k) -> (a_k, b_k).

    a_0 is ignored.
    """

    term: Callable


def cf_eval(spec: CFSpec, depth: int):
    """The depth-th convergent as (numerator, denominator), denominator > 0."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    h_prev, k_prev = IONE, IZERO
    _, b0 = spec.term(0)
    h, k = _I(b0), IONE
    for i in range(1, depth):
        a, b = spec.term(i)
        a, b = _I(a), _I(b)
        h, h_prev = b * h + a * h_prev, h
        k, k_prev = b * k + a * k_prev, k
    if not k:
        raise ZeroDenominator(f"convergent {depth} has a zero denominator")
    if k.sign < 0:
        h, k = -h, -k
    return h, k


# ---------------------------------------------------------------------------
# Ziv loop


@dataclass(frozen=True)
class WorkingPrecisionSchedule:
    """Working precisions p + g for g = 32, then g + max(32, g/2), up to ``cap``."""

    p: int
    guard0: int = 32
    cap: int | None = None

    def __post_init__(self):
        if self.cap is None:
            object.__setattr__(self, "cap", 64 * self.p)
        if self.cap < self.p + self.guard0:
            object.__setattr__(self, "cap", self.p + self.guard0)

    def __iter__(self):
        g = self.guard0
        while self.p + g <= self.cap:
            yield self.p + g
            g += max(32, g // 2)


def _schedule(x: Float, p: int) -> WorkingPrecisionSchedule:
    # cancellation against the argument can cost up to about prec(x) bits
    return WorkingPrecisionSchedule(p, cap=64 * max(p, x.prec))


def _exact_float(v: Integer, e: int) -> Float:
    """The Float equal to v * 2^e, with just enough precision."""
    if not v:
        return Float.zero(1, 2)
    bl = max(v.mag.bit_length(), 2)
    return from_scaled(v.sign, v.mag, e, bl, NE, _WIDE)[0]


def _enclosure(y: Float, err: int):
    m = Integer.from_natural(y.man, y.sign)
    return m - Integer.from_int(err), m + Integer.from_int(err), y.lowexp


def ziv_round(approx, p: int, mode: RoundingMode = NE, schedule=None,
              bounds: ExponentBounds = DEFAULT_BOUNDS):
    """Correctly round a quantity known through ``approx(wp) -> (y, err)``.

    ``y`` is a finite Float and the true value lies within ``err`` units in
    the last place of ``y``.  Raises CannotDecide once the schedule is spent.
    """
    sched = WorkingPrecisionSchedule(p) if schedule is None else schedule
    last = None
    for wp in sched:
        y, err = approx(wp)
        if err == 0:
            return round_to_precision(y, p, mode, bounds)
        lo, hi, e = _enclosure(y, err)
        last = (_exact_float(lo, e), _exact_float(hi, e))
        if lo.sign != hi.sign or not lo or not hi:
            continue
        r1, _ = from_scaled(lo.sign, lo.mag, e, p, mode, bounds)
        r2, _ = from_scaled(hi.sign, hi.mag, e, p, mode, bounds)
        if r1 != r2:
            continue
        if fcmp(r1, last[0]) < 0:
            return r1, InexactFlag.ROUNDED_DOWN
        if fcmp(r1, last[1]) > 0:
            return r1, InexactFlag.ROUNDED_UP
    raise CannotDecide(f"no decision at {p} bits within the precision cap",
                       interval=last, precision=sched.cap)


# ---------------------------------------------------------------------------
# constants


def _atan_inv_spec(m: int) -> SeriesSpec:
    lg = m.bit_length() - 1
    return SeriesSpec(
        first=(1, m),
        p=lambda k: -(2 * k + 1),
        q=lambda k: (2 * k + 3) * m * m,
        # alternating with shrinking terms: the tail is below its first term
        tail_bound=lambda K: -(2 * K + 1) * lg,
    )


def _pi_machin(bits: int) -> Integer:
    # pi = 16 atan(1/5) - 4 atan(1/239); each part is off by <= 2 units
    w = bits + 6
    a = series_fixed(_atan_inv_spec(5), w)
    b = series_fixed(_atan_inv_spec(239), w)
    return (a * Integer.from_int(16) - b * Integer.from_int(4)) >> 6


LN2_SPEC = SeriesSpec(
    first=(1, 2),
    p=lambda k: k + 1,
    q=lambda k: 2 * (k + 2),
    tail_bound=lambda K: -K,
)


def _ln2_series(bits: int) -> Integer:
    # ln 2 = sum_{k >= 1} 1 / (k 2^k)
    return series_fixed(LN2_SPEC, bits + 2) >> 2


class _ConstCache:
    """Fixed-point approximations (error <= 2 units) grown on demand.

    Readers take a snapshot of an immutable (bits, value) pair, so they see
    either the old or the new approximation, never a partial one.
    """

    def __init__(self, compute):
        self._compute = compute
        self._lock = threading.Lock()
        self._state = (0, IZERO)

    def fixed(self, bits: int) -> Integer:
        have, value = self._state
        if have < bits:
            with self._lock:
                have, value = self._state
                if have < bits:
                    target = max(bits, have + have // 2) + 32
                    value = self._compute(target)
                    self._state = (target, value)
                    have = target
        return value >> (have - bits)

    @property
    def bits(self) -> int:
        return self._state[0]


_PI = _ConstCache(_pi_machin)
_LN2 = _ConstCache(_ln2_series)


def pi_fixed(bits: int) -> Integer:
    return _PI.fixed(bits)


def ln2_fixed(bits: int) -> Integer:
    return _LN2.fixed(bits)




def _const(cache: _ConstCache, p: int, mode: RoundingMode) -> Float:
    _check_prec(p)
    return ziv_round(lambda wp: (_exact_float(cache.fixed(wp), -wp), 2), p, mode)[0]


def const_pi(p: int, mode: RoundingMode = NE) -> Float:
    """pi rounded to p bits; served from a cache that only ever grows."""
    return _const(_PI, p, mode)


def const_ln2(p: int, mode: RoundingMode = NE) -> Float:
    return _const(_LN2, p, mode)


# ---------------------------------------------------------------------------
# fixed-point kernels


def _to_fixed(x: Float, f: int):
    """(X, e): x * 2^f lies within e units of X, and e is 0 when exact."""
    s = x.lowexp + f
    if s >= 0:
        return Integer.from_natural(x.man << s, x.sign), 0
    return Integer.from_natural(x.man >> -s, x.sign), int(x.man.low_bits_nonzero(-s))


def _ceil_shift(e: int, k: int) -> int:
    return -(-e >> k)


def _exp_spec(z: Integer, f: int, s: int) -> SeriesSpec:
    # sum of z^k / k! for z * 2^-f below 2^-s in magnitude
    return SeriesSpec(
        first=(1, 1),
        p=lambda k: z,
        q=lambda k: Integer.from_int(k + 1) << f,
        tail_bound=lambda K: 1 - s * K - _log2_factorial_lb(K),
    )


def _exp_fixed(X: Integer, eX: int, f: int):
    """e^x for x = X 2^-f known to within eX units.

    Returns (S, m, err) with e^x = (S + d) 2^(m - f), |d| <= err and S about
    2^f.  The reduced argument is halved r times and the result squared back.
    """
    r = math.isqrt(f) // 2
    g = f + 2 * r + 8
    Xg = X << (g - f)
    L = ln2_fixed(g)
    m = _floor_div((Xg << 1) + L, (L << 1).mag)
    mb = abs(int(m)).bit_length() + 2
    R = Xg - ((m * ln2_fixed(g + mb)) >> mb)
    # |R| 2^-g <= ln2/2 + tiny, off by 1.5 units; halving adds 1
    S = series_fixed(_exp_spec(R >> r, g, r + 1), g)
    e = 6
    for _ in range(r):
        S = (S * S) >> g
        e = 3 * e + 1
    S = S >> (g - f)
    return S, int(m), _ceil_shift(e, g - f) + 1 + 2 * eX


def _sin_spec(R: Integer, f: int, s: int) -> SeriesSpec:
    r2 = R * R
    return SeriesSpec(
        first=(R, IONE << f),
        p=lambda k: -r2,
        q=lambda k: Integer.from_int((2 * k + 2) * (2 * k + 3)) << (2 * f),
        tail_bound=lambda K: -(2 * K + 1) * s - _log2_factorial_lb(2 * K + 1),
    )


def _cos_spec(R: Integer, f: int, s: int) -> SeriesSpec:
    r2 = R * R
    return SeriesSpec(
        first=(1, 1),
        p=lambda k: -r2,
        q=lambda k: Integer.from_int((2 * k + 1) * (2 * k + 2)) << (2 * f),
        tail_bound=lambda K: -2 * K * s - _log2_factorial_lb(2 * K),
    )


def _reduce_half_pi(x: Float, f: int):
    """(R, q): x = R 2^-f + k pi/2 with q = k mod 4, R within 2 units."""
    h = f + max(0, x.exp) + 4
    X, eX = _to_fixed(x, h)
    hp = pi_fixed(h - 1)
    k = _floor_div((X << 1) + hp, (hp << 1).mag)
    # error before the shift: eX + 2|k| units at h, below 2^(h-f-2)
    R = (X - k * hp) >> (h - f)
    q = int(k.mag.low_limbs(1)) % 4 if k else 0
    if k.sign < 0:
        q = -q % 4
    return R, q


# ---------------------------------------------------------------------------
# the functions


def _one(p, mode, bounds):
    return from_scaled(1, ONE, 0, p, mode, bounds)


def f_exp(x: Float, p: int, mode: RoundingMode = NE, bounds: ExponentBounds = DEFAULT_BOUNDS):
    _check_prec(p)
    if x.is_nan:
        return Float.nan(p), EXACT
    if x.is_inf:
        return (Float.inf(1, p) if x.sign > 0 else Float.zero(1, p)), EXACT
    if x.is_zero:
        return _one(p, mode, bounds)
    huge = max(50, max(bounds.emax, -bounds.emin).bit_length() + 2)
    if x.exp >= huge:
        e = bounds.emax + 1 if x.sign > 0 else bounds.emin - 2
        return _round(1, ONE, e, p, mode, False, bounds)
    if x.exp <= -p - 4:
        # 1 + x + t with 0 < t < x^2, all within 2^-(p+2) of 1
        c = p + 2
        n = ONE << c if x.sign > 0 else (ONE << c) - ONE
        return _round(1, n, -c, p, mode, True, bounds)

    def approx(wp):
        f = wp + 8
        X, eX = _to_fixed(x, f)
        S, m, err = _exp_fixed(X, eX, f)
        return _exact_float(S, m - f), err

    return ziv_round(approx, p, mode, _schedule(x, p), bounds)


def _ln_step(Z: Integer, Y: Integer, eY: int, g: int):
    """One Newton step z + y e^-z - 1 at g bits: (Z', U, error of U)."""
    S, m, eS = _exp_fixed(-Z, 0, g)
    if m >= 0:
        S, eS = S << m, eS << m
    else:
        S, eS = S >> -m, _ceil_shift(eS, -m) + 1
    U = ((Y * S) >> g) - (IONE << g)
    return Z + U, U, 2 * eS + 2 * eY + 1


def f_ln(x: Float, p: int, mode: RoundingMode = NE, bounds: ExponentBounds = DEFAULT_BOUNDS):
    _check_prec(p)
    if x.is_nan or (x.sign < 0 and not x.is_zero):
        return Float.nan(p), EXACT
    if x.is_zero:
        return Float.inf(-1, p), EXACT
    if x.is_inf:
        return Float.inf(1, p), EXACT
    # x = y 2^E with y in [0.75, 1.5)
    E = x.exp + x.man.bit(x.prec - 2)
    ylow = x.lowexp - E
    D = Integer.from_natural(x.man) - (IONE << -ylow)
    if not D and E == 0:
        return Float.zero(1, p), EXACT
    Ed = D.mag.bit_length() - 1 + ylow if D else 0
    extra = max(0, -Ed) if E == 0 else 0
    if E == 0:
        P = max(D.mag.bit_length(), p + 3)
        if Ed <= -P - 1:
            # ln(1 + d) = d - t with 0 < t < d^2, below the last kept unit
            s0 = P - D.mag.bit_length()
            if D.sign > 0:
                return _round(1, (D.mag << s0) - ONE, ylow - s0, p, mode, True, bounds)
            return _round(-1, D.mag << s0, ylow - s0, p, mode, True, bounds)

    # seed: about 50 good bits from the host log, or d itself near 1
    if D and Ed < -30:
        seed_bits = -2 * Ed - 2

        def seed(g):
            return D << (g + ylow) if g + ylow >= 0 else D >> -(g + ylow)
    else:
        seed_bits = 50
        cut = max(0, x.prec - 60)
        z0 = Integer.from_int(int(math.ldexp(math.log(math.ldexp(int(x.man >> cut), ylow + cut)),
                                             60)))

        def seed(g):
            return z0 << (g - 60) if g >= 60 else z0 >> (60 - g)

    def approx(wp):
        f = wp + extra + 8
        levels = [f]
        while levels[-1] // 2 + 2 > seed_bits:
            levels.append(levels[-1] // 2 + 6)
        levels.reverse()
        Z = seed(levels[0])
        prev = levels[0]
        for g in levels:
            Z = Z << (g - prev)
            prev = g
            Y, eY = _to_fixed(Float(x.kind, 1, x.prec, x.exp - E, x.man), g)
            Z, U, eU = _ln_step(Z, Y, eY, g)
        # rigorous bound for the last step: the Newton error is below 4 t^2
        # where |t| <= 2 |U| as long as |U| <= 1/2
        um = U.mag + Natural.from_int(eU)
        if um.bit_length() >= f - 1:
            err = 1 << f
        else:
            err = eU + int((um * um) >> (f - 2)) + 1
        if E:
            eb = abs(E).bit_length() + 2
            Z = Z + ((Integer.from_int(E) * ln2_fixed(f + eb)) >> eb)
            err += 2
        return _exact_float(Z, -f), err

    return ziv_round(approx, p, mode, _schedule(x, p), bounds)


def _trig(x: Float, p: int, mode: RoundingMode, bounds: ExponentBounds, cosine: bool):
    _check_prec(p)
    if x.is_nan or x.is_inf:
        return Float.nan(p), EXACT
    if x.is_zero:
        return _one(p, mode, bounds) if cosine else (Float.zero(x.sign, p), EXACT)
    E = x.exp
    if cosine and 2 * E <= -p - 3:
        # 1 - t with 0 < t < x^2/2 < 2^-(p+2)
        c = p + 2
        return _round(1, (ONE << c) - ONE, -c, p, mode, True, bounds)
    if not cosine:
        P = max(x.prec, p + 3)
        if 2 * E <= -P:
            # |x| - t with 0 < t < |x|^3/6, below the last kept unit
            s0 = P - x.prec
            return _round(x.sign, (x.man << s0) - ONE, x.lowexp - s0, p, mode, True, bounds)

    def approx(wp):
        f = wp + 8 + max(0, -E)
        while True:
            R, q = _reduce_half_pi(x, f)
            use_sin = (q % 2 == 1) == cosine
            short = wp + 8 - R.mag.bit_length()
            if not use_sin or short <= 0:
                break
            # cancellation near a multiple of pi/2: widen and redo
            f += short + 8
        s = max(0, f - R.mag.bit_length())
        spec = _sin_spec(R, f, s) if use_sin else _cos_spec(R, f, s)
        V = series_fixed(spec, f)
        negate = q >= 2 if not cosine else q in (1, 2)
        return _exact_float(-V if negate else V, -f), 4

    return ziv_round(approx, p, mode, _schedule(x, p), bounds)


def f_sin(x: Float, p: int, mode: RoundingMode = NE, bounds: ExponentBounds = DEFAULT_BOUNDS):
    return _trig(x, p, mode, bounds, cosine=False)


def f_cos(x: Float, p: int, mode: RoundingMode = NE, bounds: ExponentBounds = DEFAULT_BOUNDS):
    return _trig(x, p, mode, bounds, cosine=True)


def f_sqrt(x: Float, p: int, mode: RoundingMode = NE, bounds: ExponentBounds = DEFAULT_BOUNDS):
    """Square root; the integer root underneath is refined by Newton's method."""
    return fsqrt(x, p, mode, bounds)
