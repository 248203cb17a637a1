"""Time solve_unbounded on random instances of growing size."""
import argparse
import statistics
import time

from addgoods.oracle_gen import gen_random
from addgoods.unbounded import solve_unbounded


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="4,8,12,16,24")
    ap.add_argument("--pool", type=int, default=6)
    ap.add_argument("--max-value", type=int, default=10**6)
    ap.add_argument("--trials", type=int, default=20)
    args = ap.parse_args()
    print(f"{'agents':>6} {'feasible':>8} {'median ms':>10} {'max ms':>8}")
    for n in map(int, args.sizes.split(",")):
        times, feas = [], 0
        for seed in range(args.trials):
            inst = gen_random(n, args.pool, args.max_value, "inf", "inf", seed, proportional_group=n // 3)
            t = time.perf_counter()
            feas += solve_unbounded(inst).feasible
            times.append(time.perf_counter() - t)
        print(f"{n:>6} {feas:>8} {statistics.median(times) * 1e3:>10.2f} {max(times) * 1e3:>8.2f}")


if __name__ == "__main__":
    main()
