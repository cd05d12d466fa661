"""Subquadratic multiplication: Karatsuba, Toom-3 and a three-prime NTT.

All routines here must agree bit-for-bit with ``limbcore.mul_schoolbook``.
The recursion itself runs inside a compiled kernel (``_kernels.mul_tree``);
this module holds the configuration and the Natural-level entry points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels as K
from . import limbcore
from .errors import BadLength, SizeUnsupported
from .limbcore import ZERO, Natural

DEFAULT_CONFIG = Path(__file__).with_name("thresholds.conf")


@dataclass(frozen=True)
class MulThresholds:
    """Limb counts at which the dispatcher switches algorithm."""

    karatsuba_from: float = 32
    toom3_from: float = 128
    ntt_from: float = 4096

    def __post_init__(self):
        if not 2 <= self.karatsuba_from <= self.toom3_from <= self.ntt_from:
            raise ValueError(
                "thresholds must satisfy 2 <= karatsuba_from <= toom3_from <= ntt_from"
            )


NEVER = MulThresholds(math.inf, math.inf, math.inf)


def read_config(path) -> dict:
    """Parse ``key = integer`` lines; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'key = integer'")
        values[key.strip()] = int(val.strip())
    return values


def write_config(path, values: dict) -> None:
    lines = ["# Crossover points in limbs (64-bit words). Regenerate with `mca tune`."]
    lines += [f"{k} = {v}" for k, v in values.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_thresholds(path=DEFAULT_CONFIG, **overrides) -> MulThresholds:
    cfg = read_config(path)
    fields = ("karatsuba_from", "toom3_from", "ntt_from")
    kw = {k: cfg[k] for k in fields if k in cfg}
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return MulThresholds(**kw)


DEFAULT_THRESHOLDS = load_thresholds()
_active = DEFAULT_THRESHOLDS


def set_thresholds(t: MulThresholds) -> None:
    """Change the thresholds used by ``Natural.__mul__`` and ``mul(a, b)``."""
    global _active
    _active = t


def get_thresholds() -> MulThresholds:
    return _active


# ---------------------------------------------------------------------------
# NTT


@dataclass(frozen=True)
class NttPlan:
    """Three primes c*2^m + 1 below 2^62 with primitive 2^m-th roots."""

    primes: tuple
    roots: tuple
    log_orders: tuple
    chunk_bits: int = 64
    max_log_len: int | None = None

    def __post_init__(self):
        if len(self.primes) != 3 or len(self.roots) != 3 or len(self.log_orders) != 3:
            raise ValueError("an NTT plan needs exactly three primes")
        if self.chunk_bits != 64:
            raise ValueError("coefficients are whole limbs (chunk_bits = 64)")
        for p, w, m in zip(self.primes, self.roots, self.log_orders):
            if not p < 1 << 62:
                raise ValueError(f"prime {p} too large for lazy Shoup reduction")
            if (p - 1) % (1 << m):
                raise ValueError(f"{p} is not 1 mod 2^{m}")
            if pow(w, 1 << (m - 1), p) != p - 1:
                raise ValueError(f"{w} is not a primitive 2^{m}-th root mod {p}")
        cap = min(self.log_orders)
        if self.max_log_len is None:
            object.__setattr__(self, "max_log_len", cap)
        elif not 0 <= self.max_log_len <= cap:
            raise ValueError("max_log_len exceeds the primes' 2-adic order")
        p1, p2, p3 = self.primes
        # no-overflow certificate: every convolution coefficient is < p1*p2*p3
        bound = ((1 << self.chunk_bits) - 1) ** 2 * (1 << 32)
        if not bound < p1 * p2 * p3:
            raise ValueError("prime product too small for 2^32-point transforms")

    def root_for(self, index: int, log_n: int) -> int:
        """Primitive 2^log_n-th root of unity modulo prime ``index``."""
        if not 0 <= log_n <= self.max_log_len:
            raise BadLength(f"transform length 2^{log_n} not supported")
        p, w, m = self.primes[index], self.roots[index], self.log_orders[index]
        return pow(w, 1 << (m - log_n), p)


# primes 29*2^57+1, 27*2^56+1, 69*2^55+1; roots are g^c for a generator g
DEFAULT_PLAN = NttPlan(
    primes=(4179340454199820289, 1945555039024054273, 2485986994308513793),
    roots=(68630377364883, 1613915479851665306, 1700750308946223057),
    log_orders=(57, 56, 55),
)


def _check_length(n: int, plan: NttPlan) -> int:
    if n < 1 or n & (n - 1):
        raise BadLength(f"length {n} is not a power of two")
    log_n = n.bit_length() - 1
    if log_n > plan.max_log_len:
        raise BadLength(f"length 2^{log_n} exceeds plan maximum 2^{plan.max_log_len}")
    return log_n


def ntt_forward(coeffs, plan: NttPlan = DEFAULT_PLAN, index: int = 0) -> list:
    """Evaluate the polynomial at successive powers of the length-n root."""
    x = np.array([int(c) for c in coeffs], dtype=np.uint64)
    log_n = _check_length(x.shape[0], plan)
    p = np.uint64(plan.primes[index])
    root = np.uint64(plan.root_for(index, log_n))
    if np.any(x >= p):
        raise ValueError("coefficients must be reduced modulo the prime")
    w, wq = K.ntt_tables(p, root, log_n, False)
    K.ntt_dif(x, p, w, wq)
    K.bit_reverse(x)
    return [int(v) for v in x]


def ntt_inverse(values, plan: NttPlan = DEFAULT_PLAN, index: int = 0) -> list:
    """Inverse of :func:`ntt_forward`, including the 1/n scaling."""
    x = np.array([int(c) for c in values], dtype=np.uint64)
    log_n = _check_length(x.shape[0], plan)
    p = np.uint64(plan.primes[index])
    root = np.uint64(plan.root_for(index, log_n))
    w, wq = K.ntt_tables(p, root, log_n, True)
    K.bit_reverse(x)
    K.ntt_dit(x, p, w, wq)
    K.scale(x, np.uint64(pow(x.shape[0], -1, int(p))), p)
    return [int(v) for v in x]


def _plan_array(plan: NttPlan) -> np.ndarray:
    p1, p2, p3 = plan.primes
    p1p2 = p1 * p2
    vals = [*plan.primes, *plan.roots, *plan.log_orders,
            pow(p1, -1, p2), pow(p1p2 % p3, -1, p3),
            p1p2 >> 64, p1p2 & ((1 << 64) - 1), plan.max_log_len]
    return np.array(vals, dtype=np.uint64)


_DEFAULT_PLAN_ARR = _plan_array(DEFAULT_PLAN)
_INF = 1 << 62


def _lim(x) -> int:
    return _INF if x == math.inf else int(x)


def mul_ntt(a: Natural, b: Natural, plan: NttPlan = DEFAULT_PLAN) -> Natural:
    """Three-prime NTT convolution of the limb vectors, CRT-lifted and carried."""
    if not a or not b:
        return ZERO
    total = a.nlimbs + b.nlimbs
    log_n = max(total - 1, 1).bit_length()
    if log_n > plan.max_log_len:
        raise SizeUnsupported(
            f"product of {total} limbs needs 2^{log_n} points; plan allows 2^{plan.max_log_len}")
    arr = _DEFAULT_PLAN_ARR if plan is DEFAULT_PLAN else _plan_array(plan)
    return Natural._wrap(K.ntt_mul(a._a, b._a, arr, a is b))


# ---------------------------------------------------------------------------
# Karatsuba, Toom-3 and the dispatcher


def _run(a, b, kf, tf, nf, force):
    if not a or not b:
        return ZERO
    out = K.mul_tree(a._a, b._a, a is b, kf, tf, nf, _DEFAULT_PLAN_ARR, force)
    return Natural._wrap(out)


def mul_karatsuba(a: Natural, b: Natural, base: int | None = None) -> Natural:
    """Karatsuba recursion bottoming out in schoolbook below ``base`` limbs."""
    base = _lim(_active.karatsuba_from) if base is None else max(int(base), 2)
    return _run(a, b, base, _INF, _INF, 0)


def mul_toom3(a: Natural, b: Natural, t: MulThresholds | None = None) -> Natural:
    """Toom-3 at the top level; sub-products follow ``t`` with the NTT disabled.

    Pieces at or above ``toom3_from`` limbs recurse through Toom-3 again, then
    Karatsuba takes over down to ``karatsuba_from`` and schoolbook below that.
    """
    t = _active if t is None else t
    return _run(a, b, _lim(t.karatsuba_from), _lim(t.toom3_from), _INF, 2)


def mul(a: Natural, b: Natural, t: MulThresholds | None = None) -> Natural:
    """Size-dispatched product; identical to schoolbook for every input."""
    t = _active if t is None else t
    return _run(a, b, _lim(t.karatsuba_from), _lim(t.toom3_from), _lim(t.ntt_from), 0)


def square(a: Natural, t: MulThresholds | None = None) -> Natural:
    return mul(a, a, t)


limbcore._mul_impl = mul
limbcore._sqr_impl = square
