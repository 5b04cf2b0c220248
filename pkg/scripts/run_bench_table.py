#!/usr/bin/env python3
"""Iteration-count benchmark over the full (n, m, accuracy) grid.

Solves 200 random channels per cell for n, m in {2, 5, 8} and certificate
gaps 1e-3, 1e-4, 1e-5, then prints the aligned statistics table and checks
every trial against the ln(n)/accuracy iteration budget.
"""

import argparse
import time

from cqcap.bench import (BenchSpec, check_iteration_budget, format_bench_table,
                         run_bench, write_bench_csv)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out", default="bench_table.csv")
    args = parser.parse_args()

    spec = BenchSpec(input_sizes=(2, 5, 8), output_dims=(2, 5, 8),
                     accuracies=(1e-3, 1e-4, 1e-5),
                     trials=args.trials, seed=args.seed)
    t0 = time.perf_counter()
    results, logs = run_bench(spec, jobs=args.jobs, return_logs=True)
    elapsed = time.perf_counter() - t0

    print(format_bench_table(results))
    print(f"completed in {elapsed:.0f} s")
    budget_ok = check_iteration_budget(results, logs)
    print(f"iteration budget ln(n)/accuracy respected: {'yes' if budget_ok else 'NO'}")
    failed = sum(r.trials_failed for r in results)
    if failed:
        print(f"WARNING: {failed} trial(s) did not converge")
    write_bench_csv(results, args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
