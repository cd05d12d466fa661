"""Compute pi to N decimal digits by the library's arctan formula and print them.

    python scripts/pi_cross_check.py 10000
"""
import sys
import time

from mca.cli import constant_digits

n = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
t0 = time.perf_counter()
digits = constant_digits("pi", n)
print(digits[:60] + ("..." if n > 59 else ""))
print(f"{n} digits in {time.perf_counter() - t0:.2f}s")
