"""Measure multiplication crossovers on this machine and optionally save them.

    python scripts/tune_thresholds.py [--out src/mca/thresholds.conf]
"""
import argparse

from mca import bench, divgcd, fastmul


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out")
    args = ap.parse_args()
    values = bench.tune()
    values["newton_div_from"] = divgcd.NEWTON_DIV_FROM
    for k, v in values.items():
        print(f"{k} = {v}")
    if args.out:
        fastmul.write_config(args.out, values)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
