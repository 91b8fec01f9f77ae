#!/usr/bin/env python3
"""Measure solve times across signal lengths and fit the log-log slope.

Example:
    python scripts/run_timing.py --out results/timing.csv --trials 5
    python scripts/run_timing.py --n-values 255 511 1023 --method chtgd
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from htgd.experiments import TimingSpec, run_timing


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("timing.csv"),
                    help="output CSV path (a .gp gnuplot file is written next to it)")
    ap.add_argument("--n-values", type=int, nargs="+",
                    default=None, help="signal lengths (default 255..4095 doublings)")
    ap.add_argument("--L", type=int, default=3)
    ap.add_argument("--K", type=int, default=3)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--time-cap", type=float, default=100.0,
                    help="trials slower than this many seconds are excluded from medians")
    ap.add_argument("--method", choices=("mhtgd", "chtgd"), default="mhtgd")
    ap.add_argument("--seed", type=int, default=0)
    return ap.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    kwargs = dict(L=args.L, K=args.K, trials=args.trials,
                  time_cap=args.time_cap, method=args.method, seed=args.seed)
    if args.n_values is not None:
        kwargs["n_values"] = tuple(args.n_values)
    spec = TimingSpec(**kwargs)

    start = time.perf_counter()
    result = run_timing(spec, csv_path=args.out)
    elapsed = time.perf_counter() - start

    for row in result.rows:
        med = "excluded" if row.median_iter_seconds is None else f"{row.median_iter_seconds:.3e}s"
        print(f"N={row.N:5d} M={row.M:5d}  median iter {med}  "
              f"({row.successes}/{row.trials} ok, {row.excluded} over cap)")
    if result.slope is not None:
        print(f"log-log slope of median per-iteration time: {result.slope:.3f}")
    print(f"wrote {args.out} ({elapsed:.1f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
