"""Arithmetic modulo n: Montgomery and Barrett reduction, modexp, CRT."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .divgcd import gcd, mod_inverse
from .errors import (BadResidue, EvenModulus, InputTooLarge, ModulusTooSmall, NotCoprime,
                     NotInvertible)
from .limbcore import ONE, ZERO, Natural, W, divrem_schoolbook, nat

_TWO = Natural.from_int(2)


@dataclass(frozen=True)
class MontgomeryContext:
    n: Natural
    k: int
    n_prime: int
    r2: Natural

    def __post_init__(self):
        assert self.n.is_odd()
        assert (int(self.n._a[0]) * self.n_prime + 1) % (1 << W) == 0
        assert self.r2 < self.n


@dataclass(frozen=True)
class BarrettContext:
    n: Natural
    mu: Natural

    @property
    def k(self) -> int:
        return self.n.nlimbs


@dataclass(frozen=True)
class Residue:
    """A value below the modulus, either plain or in Montgomery form."""

    value: Natural
    mont: bool = False


def mont_setup(n: Natural) -> MontgomeryContext:
    n = nat(n)
    if not n.is_odd():
        raise EvenModulus("Montgomery reduction needs an odd modulus")
    if n < Natural.from_int(3):
        raise ModulusTooSmall("modulus must be at least 3")
    k = n.nlimbs
    n_prime = int(K.word_inverse_neg(n._a[0]))
    r2 = (ONE << (2 * W * k)) % n
    return MontgomeryContext(n, k, n_prime, r2)


def redc(ctx: MontgomeryContext, t: Natural) -> Natural:
    """t * beta^-k mod n, for t < n * beta^k."""
    if t.nlimbs > 2 * ctx.k or t >= ctx.n << (W * ctx.k):
        raise InputTooLarge("redc input must be below n * beta^k")
    out = K.redc(t._a, ctx.n._a, np.uint64(ctx.n_prime), ctx.k)
    return Natural._wrap(out)


def to_mont(ctx: MontgomeryContext, x: Natural) -> Residue:
    x = nat(x)
    if x >= ctx.n:
        x = x % ctx.n
    return Residue(redc(ctx, x * ctx.r2), mont=True)


def from_mont(ctx: MontgomeryContext, a: Residue) -> Natural:
    return redc(ctx, a.value)


def mont_mul(ctx: MontgomeryContext, a: Residue, b: Residue) -> Residue:
    if a.value >= ctx.n or b.value >= ctx.n:
        raise InputTooLarge("Montgomery operands must be reduced")
    return Residue(redc(ctx, a.value * b.value), mont=True)


def barrett_setup(n: Natural) -> BarrettContext:
    n = nat(n)
    if n < _TWO:
        raise ModulusTooSmall("modulus must be at least 2")
    return BarrettContext(n, divrem_schoolbook(ONE << (2 * W * n.nlimbs), n)[0])


def barrett_reduce(ctx: BarrettContext, t: Natural) -> Natural:
    """t mod n for t < beta^(2k); the mu estimate is at most two short."""
    k = ctx.k
    if t.nlimbs > 2 * k:
        raise InputTooLarge("Barrett input must be below beta^(2k)")
    if t < ctx.n:
        return t
    q = ((t >> (W * (k - 1))) * ctx.mu) >> (W * (k + 1))
    r = t - q * ctx.n
    for _ in range(2):
        if r < ctx.n:
            break
        r = r - ctx.n
    assert r < ctx.n
    return r


def window_width(bits: int) -> int:
    if bits < 32:
        return 1
    w = 1
    while (w + 1) << w < bits and w < 6:
        w += 1
    return w


def _sliding_pow(x, e: Natural, mul, one):
    """Left-to-right sliding-window power over an abstract multiplication."""
    bits = e.bit_length()
    w = window_width(bits)
    sq = mul(x, x)
    table = [x]
    for _ in range((1 << (w - 1)) - 1):
        table.append(mul(table[-1], sq))
    acc = one
    i = bits - 1
    while i >= 0:
        if not e.bit(i):
            acc = mul(acc, acc)
            i -= 1
            continue
        # longest window e[i..j] of length <= w ending in a set bit
        j = max(i - w + 1, 0)
        while not e.bit(j):
            j += 1
        val = 0
        for b in range(i, j - 1, -1):
            acc = mul(acc, acc)
            val = (val << 1) | e.bit(b)
        acc = mul(acc, table[val >> 1])
        i = j - 1
    return acc


def mod_pow(base: Natural, exp: Natural, n: Natural) -> Natural:
    """base^exp mod n; Montgomery form for odd n, Barrett for even n."""
    base, exp, n = nat(base), nat(exp), nat(n)
    if n < _TWO:
        raise ModulusTooSmall("modulus must be at least 2")
    if not exp:
        return ONE
    if n.is_odd():
        ctx = mont_setup(n)
        r = _sliding_pow(to_mont(ctx, base), exp, lambda a, b: mont_mul(ctx, a, b),
                         to_mont(ctx, ONE))
        return from_mont(ctx, r)
    bctx = barrett_setup(n)
    return _sliding_pow(barrett_reduce(bctx, base % n), exp,
                        lambda a, b: barrett_reduce(bctx, a * b), ONE)


def crt_reconstruct(residues) -> tuple[Natural, Natural]:
    """Smallest x with x = r_i (mod n_i), and N = prod n_i.

    Pairs are merged smallest-modulus-first (Huffman order), which keeps the
    combination tree balanced by bit-length.
    """
    heap = []
    tie = itertools.count()
    for r, m in residues:
        r, m = nat(r), nat(m)
        if m < _TWO:
            raise BadResidue(f"modulus {int(m)} is below 2")
        if r >= m:
            raise BadResidue(f"residue {int(r)} not reduced modulo {int(m)}")
        heapq.heappush(heap, (m.bit_length(), next(tie), r, m))
    if not heap:
        return ZERO, ONE
    while len(heap) > 1:
        _, _, r1, m1 = heapq.heappop(heap)
        _, _, r2, m2 = heapq.heappop(heap)
        try:
            inv = mod_inverse(m1 % m2, m2)
        except NotInvertible:
            raise NotCoprime(f"moduli share the factor {int(gcd(m1, m2))}") from None
        # x = r1 + m1 * ((r2 - r1) * inv mod m2)
        d = (r2 + m2 - r1 % m2) % m2
        x = r1 + m1 * ((d * inv) % m2)
        m = m1 * m2
        heapq.heappush(heap, (m.bit_length(), next(tie), x, m))
    _, _, x, m = heap[0]
    return x, m
