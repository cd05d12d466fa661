"""Reproduce the multiplication complexity table: time doubling sizes, fit exponents.

    python scripts/complexity_table.py [--sizes 256,512,...] [--reps 9] [--csv out.csv]
"""
import argparse

from mca import bench

EXPECTED = {"schoolbook": 2.0, "karatsuba": 1.585, "toom3": 1.465}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="256,512,1024,2048,4096,8192")
    ap.add_argument("--reps", type=int, default=9)
    ap.add_argument("--csv")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    bench.run_bench("mul", sizes, bench.BenchConfig(reps=1, warmup=1))  # warm caches, untimed
    rows = bench.run_bench("mul", sizes, bench.BenchConfig(reps=args.reps))
    text = bench.format_csv(rows)
    print(text)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(text + "\n")
    by_alg = {}
    for r in rows:
        by_alg.setdefault(r.algorithm, []).append(r.median_ns)
    print()
    for name, ts in by_alg.items():
        slope = bench.fit_exponent(sizes, ts)
        ref = EXPECTED.get(name)
        print(f"{name:10s} fitted exponent {slope:.3f}" + (f"  (theory {ref})" if ref else ""))
    print(f"ntt speedup over schoolbook at {sizes[-1]} limbs: "
          f"{by_alg['schoolbook'][-1] / by_alg['ntt'][-1]:.1f}x")


if __name__ == "__main__":
    main()
