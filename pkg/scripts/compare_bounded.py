"""Cross-check branching, branch-and-bound and the exhaustive oracle on small finite instances."""
import argparse
import time

from addgoods.bounded import solve_branching, solve_ilp_bb
from addgoods.oracle_gen import gen_random, oracle_bounded


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    solvers = {"branch": solve_branching, "ilp": solve_ilp_bb, "oracle": oracle_bounded}
    spent = dict.fromkeys(solvers, 0.0)
    disagree = feasible = 0
    for i in range(args.n):
        seed = args.seed + i
        inst = gen_random(2 + seed % 3, 1 + seed % 3, 5, "finite", args.k, seed, max_supply=3)
        answers = set()
        for name, fn in solvers.items():
            t = time.perf_counter()
            answers.add(fn(inst, args.k).feasible)
            spent[name] += time.perf_counter() - t
        disagree += len(answers) > 1
        feasible += True in answers
    print(f"{args.n} instances, {feasible} feasible, {disagree} disagreements")
    for name, s in spent.items():
        print(f"  {name:<7} {s:.3f} s")


if __name__ == "__main__":
    main()
