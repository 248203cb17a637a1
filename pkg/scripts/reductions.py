"""Solve the hardness-reduction instances and compare with brute force on the source problem."""
import time

from addgoods.bounded import dispatch, solve_branching
from addgoods.oracle_gen import (
    BinPackingInput, bin_packing_feasible, complete_graph, cycle_graph, gen_binpacking,
    gen_clique, gen_indset, graph_has_clique, graph_has_independent_set, path_graph,
)

GRAPHS = {"K3": complete_graph(3), "K4": complete_graph(4), "C4": cycle_graph(4), "C5": cycle_graph(5), "P3": path_graph(3)}


def show(label, got, want, dt):
    print(f"{label:<28} solver={got!s:<5} brute={want!s:<5} {'ok' if got == want else 'MISMATCH'} {dt * 1e3:8.1f} ms")


def main():
    for name in ("K3", "K4", "C4", "C5"):
        g = GRAPHS[name]
        for l in (2, 3):
            t = time.perf_counter()
            got = dispatch(gen_clique(g, l)).feasible
            show(f"clique {name} l={l}", got, graph_has_clique(g, l), time.perf_counter() - t)
    for name in ("P3", "K3", "C5"):
        g = GRAPHS[name]
        for l in (1, 2, 3):
            t = time.perf_counter()
            got = solve_branching(gen_indset(g, l), l).feasible
            show(f"indset {name} l={l}", got, graph_has_independent_set(g, l), time.perf_counter() - t)
    for sizes, bins, size in [((1, 1, 2), 2, 2), ((3, 3, 2), 2, 4), ((2, 2, 2, 2), 2, 4)]:
        bp = BinPackingInput(sizes, bins, size)
        t = time.perf_counter()
        got = dispatch(gen_binpacking(bp)).feasible
        show(f"binpacking {sizes}", got, bin_packing_feasible(bp), time.perf_counter() - t)


if __name__ == "__main__":
    main()
