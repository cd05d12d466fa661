"""Newton-reciprocal division, exact division and the GCD family."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from . import limbcore
from .errors import DivisionByZero, ModulusTooSmall, NotDivisible, NotInvertible
from .fastmul import DEFAULT_CONFIG, read_config
from .limbcore import (IONE, IZERO, ONE, ZERO, Integer, Natural, W, divrem_schoolbook,
                       int_mod, nat_cmp)

NEWTON_DIV_FROM = read_config(DEFAULT_CONFIG).get("newton_div_from", 50)
_RECIP_BASE = 4  # below this many limbs the reciprocal comes from long division


def set_newton_div_from(limbs: int) -> None:
    global NEWTON_DIV_FROM
    if limbs < 2:
        raise ValueError("newton_div_from must be at least 2")
    NEWTON_DIV_FROM = int(limbs)


@dataclass(frozen=True)
class Reciprocal:
    """``value`` approximates floor(beta^(2n) / b) from below."""

    value: Natural
    n: int


def _pow_beta(k: int) -> Natural:
    return ONE << (W * k)


def _recip(b: Natural, n: int, trace) -> Natural:
    """Exact floor(beta^(2n) / b) for a normalized n-limb b."""
    if n <= _RECIP_BASE:
        return divrem_schoolbook(_pow_beta(2 * n), b)[0]
    h = (n + 1) // 2
    xh = _recip(b.high_limbs(n - h), h, trace)
    x0 = xh << (W * (n - h))
    # one Newton step: x1 = x0 + x0 * (beta^2n - x0*b) / beta^2n
    target = _pow_beta(2 * n)
    prod = x0 * b
    if prod <= target:
        x1 = x0 + ((x0 * (target - prod)) >> (2 * W * n))
    else:
        x1 = x0 - (((x0 * (prod - target)) >> (2 * W * n)) + ONE)
    if trace is not None:
        trace.append((n, x0, x1))
    # a couple of corrections make the result exact
    prod = x1 * b
    while prod > target:
        x1 = x1 - ONE
        prod = prod - b
    rem = target - prod
    while rem >= b:
        x1 = x1 + ONE
        rem = rem - b
    return x1


def newton_reciprocal(b: Natural, n: int | None = None, trace: list | None = None) -> Reciprocal:
    """Reciprocal of a normalized divisor by precision-doubling Newton steps.

    ``trace``, when given, collects ``(limbs, x_before, x_after)`` for every
    Newton step so the convergence rate can be inspected.
    """
    if not b:
        raise DivisionByZero("reciprocal of zero")
    n = b.nlimbs if n is None else n
    if b.nlimbs != n or b.bit_length() != W * n:
        raise ValueError("divisor must have exactly n limbs with the top bit set")
    return Reciprocal(_recip(b, n, trace), n)


def _div_2n_by_n(cur: Natural, b: Natural, x: Natural, n: int):
    # cur < b * beta^n, so the estimate below is at most two short
    q = (cur * x) >> (2 * W * n)
    r = cur - q * b
    while r >= b:
        q = q + ONE
        r = r - b
    return q, r


def divrem_fast(a: Natural, b: Natural):
    """Same result as ``divrem_schoolbook``; large divisors go through Newton."""
    if not b:
        raise DivisionByZero("division by zero")
    n = b.nlimbs
    if n < NEWTON_DIV_FROM or nat_cmp(a, b) < 0:
        return divrem_schoolbook(a, b)
    shift = W * n - b.bit_length()
    bn = b << shift
    an = a << shift
    x = _recip(bn, n, None)
    chunks = -(-an.nlimbs // n)
    r = ZERO
    qparts = []
    for j in range(chunks - 1, -1, -1):
        cur = (r << (W * n)) + Natural._wrap(an._a[j * n:(j + 1) * n].copy())
        qj, r = _div_2n_by_n(cur, bn, x, n)
        qparts.append(qj)
    qarr = np.zeros(chunks * n, np.uint64)
    for j, qj in enumerate(reversed(qparts)):
        qarr[j * n:j * n + qj.nlimbs] = qj._a
    return Natural._wrap(qarr), r >> shift


def exact_div(a: Natural, b: Natural) -> Natural:
    q, r = divmod(a, b)
    if r:
        raise NotDivisible("divisor does not divide the dividend")
    return q


def isqrt(a: Natural) -> Natural:
    """floor(sqrt(a)) by Newton iteration from above."""
    if not a:
        return ZERO
    x = ONE << ((a.bit_length() + 1) // 2)
    while True:
        y = (x + a // x) >> 1
        if y >= x:
            return x
        x = y


def gcd(a: Natural, b: Natural) -> Natural:
    if not a:
        return b
    if not b:
        return a
    return Natural._wrap(K.gcd_binary(a._a, b._a))


def _signed(sign: int, mag: Natural) -> Integer:
    return Integer.from_natural(mag, sign)


def extgcd(a: Integer, b: Integer):
    """(g, u, v) with u*a + v*b = g = gcd(|a|, |b|) and minimal cofactors.

    u is taken in the symmetric range |u| <= |b|/(2g); when both ends of the
    range qualify the one giving the smaller |v| wins (then positive u).
    """
    if isinstance(a, Natural):
        a = Integer.from_natural(a)
    if isinstance(b, Natural):
        b = Integer.from_natural(b)
    if not b:
        return a.mag, Integer.from_natural(ONE, a.sign) if a else IZERO, IZERO
    if not a:
        return b.mag, IZERO, Integer.from_natural(ONE, b.sign)
    # Euclid on magnitudes, tracking the coefficient of |a|
    r0, r1 = a.mag, b.mag
    s0, s1 = IONE, IZERO
    while r1:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - Integer.from_natural(q) * s1
    g = r0
    m = b.mag // g
    # canonical representative of s0 modulo |b|/g
    u = int_mod(s0, m)
    twice = u + u
    if twice < m:
        cands = [Integer.from_natural(u)]
    elif twice > m:
        cands = [Integer.from_natural(m - u, -1)]
    else:
        cands = [Integer.from_natural(u), Integer.from_natural(u, -1)]
    best = None
    for s in cands:
        # v from s*|a| + t*|b| = g
        num = Integer.from_natural(g) - s * Integer.from_natural(a.mag)
        t = Integer.from_natural(num.mag // b.mag, num.sign)
        key = (t.mag, -s.sign)
        if best is None or key < best[0]:
            best = (key, s, t)
    _, s, t = best
    u = _signed(s.sign * a.sign, s.mag)
    v = _signed(t.sign * b.sign, t.mag)
    return g, u, v


def mod_inverse(a: Natural, n: Natural) -> Natural:
    """x in [1, n) with a*x = 1 (mod n)."""
    if n < Natural.from_int(2):
        raise ModulusTooSmall("modulus must be at least 2")
    g, u, _ = extgcd(Integer.from_natural(a % n), Integer.from_natural(n))
    if g != ONE:
        raise NotInvertible(f"gcd(a, n) = {int(g)}")
    return int_mod(u, n)


limbcore._divrem_impl = divrem_fast
