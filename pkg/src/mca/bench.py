"""Timing harness behind ``mca bench`` and ``mca tune``."""

from __future__ import annotations

import gc
import math
import random
import statistics
import time
from dataclasses import dataclass

import numpy as np

from . import divgcd, fastmul
from .limbcore import Natural, W, divrem_schoolbook, mul_schoolbook
from .mpfloat import Float, Kind


@dataclass(frozen=True)
class BenchConfig:
    reps: int = 9
    warmup: int = 2
    seed: int = 1


@dataclass(frozen=True)
class BenchRow:
    algorithm: str
    size: int
    median_ns: float
    ratio_vs_prev: float | None = None

    @property
    def log2_ratio(self) -> float | None:
        return None if self.ratio_vs_prev is None else math.log2(self.ratio_vs_prev)


def _full(rng: random.Random, limbs: int) -> Natural:
    return Natural.from_int(rng.getrandbits(W * limbs) | 1 << (W * limbs - 1))


def _mul_cases(rng, n):
    a, b = _full(rng, n), _full(rng, n)
    return {
        "schoolbook": lambda: mul_schoolbook(a, b),
        "karatsuba": lambda: fastmul.mul_karatsuba(a, b),
        "toom3": lambda: fastmul.mul_toom3(a, b),
        "ntt": lambda: fastmul.mul_ntt(a, b),
    }


def _div_cases(rng, n):
    a, b = _full(rng, 2 * n), _full(rng, n)
    return {
        "schoolbook": lambda: divrem_schoolbook(a, b),
        "newton": lambda: divgcd.divrem_fast(a, b),
    }


def _gcd_cases(rng, n):
    a, b = _full(rng, n), _full(rng, n)
    return {"binary": lambda: divgcd.gcd(a, b)}


def _exp_cases(rng, bits):
    from .elemfun import f_exp
    m = Natural.from_int(rng.getrandbits(bits - 1) | 1 << (bits - 1))
    x = Float(Kind.FINITE, 1, bits, -1, m)
    return {"exp": lambda: f_exp(x, bits)}


OPS = {"mul": _mul_cases, "div": _div_cases, "gcd": _gcd_cases, "exp": _exp_cases}


def time_call(fn, cfg: BenchConfig) -> float:
    for _ in range(cfg.warmup):
        fn()
    samples = []
    # like timeit: keep the cyclic collector out of the measurement
    gc.collect()
    enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(cfg.reps):
            t0 = time.perf_counter_ns()
            fn()
            samples.append(time.perf_counter_ns() - t0)
    finally:
        if enabled:
            gc.enable()
    return statistics.median(samples)


def run_bench(op: str, sizes, cfg: BenchConfig = BenchConfig(), algorithms=None) -> list[BenchRow]:
    """Median times for every variant of ``op`` at each size (limbs; bits for exp)."""
    if op not in OPS:
        raise ValueError(f"unknown bench op {op!r}; expected one of {sorted(OPS)}")
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    rng = random.Random(cfg.seed)
    times: dict[str, list] = {}
    for n in sizes:
        for name, fn in OPS[op](rng, n).items():
            if algorithms is None or name in algorithms:
                times.setdefault(name, []).append(time_call(fn, cfg))
    rows = []
    for name, ts in times.items():
        prev = None
        for n, t in zip(sizes, ts):
            rows.append(BenchRow(name, n, t, None if prev is None else t / prev))
            prev = t
    return rows


def format_csv(rows) -> str:
    out = ["algorithm,size,median_ns,ratio_vs_prev,log2_ratio"]
    for r in rows:
        ratio = "" if r.ratio_vs_prev is None else f"{r.ratio_vs_prev:.4f}"
        lg = "" if r.log2_ratio is None else f"{r.log2_ratio:.4f}"
        out.append(f"{r.algorithm},{r.size},{r.median_ns:.0f},{ratio},{lg}")
    return "\n".join(out)


def fit_exponent(sizes, times) -> float:
    """Least-squares slope of log2(time) against log2(size)."""
    return float(np.polyfit(np.log2(sizes), np.log2(times), 1)[0])


# ---------------------------------------------------------------------------
# threshold tuning


def _crossover(candidates, slow, fast, cfg) -> int:
    """First candidate size at which ``fast`` beats ``slow`` twice running."""
    wins = 0
    for n in candidates:
        if time_call(fast(n), cfg) < time_call(slow(n), cfg):
            wins += 1
            if wins == 2:
                return prev
        else:
            wins = 0
        prev = n
    return candidates[-1]


def tune(cfg: BenchConfig = BenchConfig(reps=5, warmup=1)) -> dict:
    """Measure the three multiplication crossovers on this machine."""
    rng = random.Random(cfg.seed)
    inf = math.inf

    def pair(n):
        return _full(rng, n), _full(rng, n)

    def timed(t):
        def make(n):
            a, b = pair(n)
            return lambda: fastmul.mul(a, b, t(n))
        return make

    kara = _crossover([8, 12, 16, 24, 32, 48, 64, 96, 128],
                      timed(lambda n: fastmul.NEVER),
                      timed(lambda n: fastmul.MulThresholds(n, inf, inf)), cfg)
    toom = _crossover([64, 96, 128, 192, 256, 384, 512],
                      timed(lambda n: fastmul.MulThresholds(kara, inf, inf)),
                      timed(lambda n: fastmul.MulThresholds(kara, max(n, kara), inf)), cfg)
    toom = max(toom, kara)
    ntt = _crossover([512, 768, 1024, 1536, 2048, 3072, 4096, 6144, 8192],
                     timed(lambda n: fastmul.MulThresholds(kara, toom, inf)),
                     timed(lambda n: fastmul.MulThresholds(kara, toom, max(n, toom))), cfg)
    return {"karatsuba_from": kara, "toom3_from": toom, "ntt_from": max(ntt, toom)}
