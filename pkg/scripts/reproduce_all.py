"""Recompute every reference table and figure series as CSV files.

    python3 scripts/reproduce_all.py --out results/ [--only t2 t5]
"""

import argparse
import os
import time

from angular_spectra.experiments import TABLES
from angular_spectra.records import csv_text


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="results")
    p.add_argument("--only", nargs="+", choices=sorted(TABLES), default=sorted(TABLES))
    args = p.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for name in args.only:
        t0 = time.perf_counter()
        rows = TABLES[name]()
        path = os.path.join(args.out, f"{name}.csv")
        with open(path, "w", newline="") as fh:
            fh.write(csv_text(rows))
        print(f"{name}: {len(rows)} rows -> {path} ({time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
