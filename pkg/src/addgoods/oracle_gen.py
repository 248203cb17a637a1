"""Brute-force ground truth and instance generators.

The generators build instances from Clique, Bin Packing and Independent Set
inputs such that the instance is feasible exactly when the source input is a
yes-instance. The graph helpers decide those source problems by enumeration.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, product
from math import comb

from .model import INF, Extension, Instance, PoolItem, Verdict, is_envy_free, is_inf

DEFAULT_CAP = 10**6


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class SimpleGraph:
    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        es = set()
        known = set(self.vertices)
        for e in self.edges:
            e = frozenset(e)
            if len(e) != 2:
                raise ValueError(f"bad edge {sorted(e)}: self-loops are not allowed")
            if not e <= known:
                raise ValueError(f"edge {sorted(e)} references an unknown vertex")
            es.add(e)
        object.__setattr__(self, "edges", frozenset(es))

    @classmethod
    def from_edges(cls, vertices, edges) -> "SimpleGraph":
        return cls(tuple(vertices), frozenset(frozenset(e) for e in edges))

    def sorted_edges(self) -> list[tuple[str, str]]:
        pos = {v: i for i, v in enumerate(self.vertices)}
        return sorted((tuple(sorted(e, key=pos.__getitem__)) for e in self.edges), key=lambda e: (pos[e[0]], pos[e[1]]))

    def adjacent(self, u, v) -> bool:
        return frozenset((u, v)) in self.edges

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_json(cls, doc: dict) -> "SimpleGraph":
        if set(doc) != {"vertices", "edges"}:
            raise ValueError("graph document needs exactly the keys 'vertices' and 'edges'")
        return cls.from_edges([str(v) for v in doc["vertices"]], [tuple(map(str, e)) for e in doc["edges"]])


def complete_graph(n: int) -> SimpleGraph:
    vs = [f"v{i}" for i in range(1, n + 1)]
    return SimpleGraph.from_edges(vs, combinations(vs, 2))


def cycle_graph(n: int) -> SimpleGraph:
    vs = [f"v{i}" for i in range(1, n + 1)]
    return SimpleGraph.from_edges(vs, [(vs[i], vs[(i + 1) % n]) for i in range(n)])


def path_graph(n: int) -> SimpleGraph:
    vs = [f"v{i}" for i in range(1, n + 1)]
    return SimpleGraph.from_edges(vs, [(vs[i], vs[i + 1]) for i in range(n - 1)])


@dataclass(frozen=True)
class BinPackingInput:
    sizes: tuple[int, ...]
    bins: int
    bin_size: int

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(self.sizes))
        if any(u <= 0 for u in self.sizes) or self.bins <= 0 or self.bin_size <= 0:
            raise ValueError("bin packing numbers must be positive")
        if sum(self.sizes) != self.bins * self.bin_size:
            raise ValueError(f"sum of sizes {sum(self.sizes)} != bins * bin_size = {self.bins * self.bin_size}")


# -- ground truth ----------------------------------------------------------


def _count_multisets(slots: int, k: int) -> int:
    return sum(comb(slots + s - 1, s) for s in range(k + 1)) if slots else 1


def oracle_bounded(inst: Instance, k, cap: int = DEFAULT_CAP) -> Verdict:
    """Enumerate every valid extension of size <= k, smallest first.

    Extensions are multisets of (agent, item) pairs visited in lexicographic
    order within each size, so a feasible answer is also a minimum-size witness.
    """
    if is_inf(k):
        raise ValueError("oracle needs a finite k")
    agents = inst.agents
    pairs = [(i, r) for i in range(len(agents)) for r in inst.pool]
    total = sum(p.supply for p in inst.pool_items.values())
    k_eff = int(min(k, total))
    if _count_multisets(len(pairs), k_eff) > cap:
        raise TooLarge("instance too large for oracle")
    n = len(agents)
    iv = inst.initial_values
    # worth[i][j]: agent i's value for agent j's current bundle
    worth = [[iv[a][b] for b in agents] for a in agents]
    val = {r: [inst.value(a, r) for a in agents] for r in inst.pool}
    used = {r: 0 for r in inst.pool}
    chosen: list[tuple[int, str]] = []

    def envy_free():
        return all(worth[i][j] <= worth[i][i] for i in range(n) for j in range(n))

    def extend(start, left):
        if left == 0:
            return envy_free()
        for idx in range(start, len(pairs)):
            j, r = pairs[idx]
            if used[r] >= inst.supply(r):
                continue
            used[r] += 1
            chosen.append((j, r))
            for i in range(n):
                worth[i][j] += val[r][i]
            if extend(idx, left - 1):
                return True
            for i in range(n):
                worth[i][j] -= val[r][i]
            chosen.pop()
            used[r] -= 1
        return False

    for size in range(k_eff + 1):
        if extend(0, size):
            ext = Extension.from_pairs((agents[j], r, 1) for j, r in chosen)
            if not is_envy_free(inst, ext):
                raise AssertionError("oracle bookkeeping disagrees with is_envy_free")
            return Verdict(True, ext, None, "oracle", True)
    return Verdict.no({"kind": "search exhausted", "solver": "oracle", "k": k_eff}, "oracle")


def graph_has_clique(g: SimpleGraph, l: int, cap: int = DEFAULT_CAP) -> bool:
    if comb(len(g.vertices), l) > cap:
        raise TooLarge("graph too large for clique enumeration")
    return any(all(g.adjacent(u, v) for u, v in combinations(s, 2)) for s in combinations(g.vertices, l))


def graph_has_independent_set(g: SimpleGraph, l: int, cap: int = DEFAULT_CAP) -> bool:
    if comb(len(g.vertices), l) > cap:
        raise TooLarge("graph too large for independent set enumeration")
    return any(not any(g.adjacent(u, v) for u, v in combinations(s, 2)) for s in combinations(g.vertices, l))


def bin_packing_feasible(bp: BinPackingInput, cap: int = DEFAULT_CAP) -> bool:
    """Exhaustive check that the sizes split into ``bins`` groups summing exactly to ``bin_size``."""
    if bp.bins ** len(bp.sizes) > cap:
        raise TooLarge("bin packing input too large for enumeration")
    for assign in product(range(bp.bins), repeat=len(bp.sizes)):
        loads = [0] * bp.bins
        for u, b in zip(bp.sizes, assign):
            loads[b] += u
        if all(x == bp.bin_size for x in loads):
            return True
    return False


# -- reductions ------------------------------------------------------------


def gen_clique(g: SimpleGraph, l: int) -> Instance:
    """Binary-valued instance with three pool items; feasible iff ``g`` has an l-clique."""
    m = len(g.edges)
    if l < 2 or comb(l, 2) > m:
        raise ValueError("need l >= 2 and C(l, 2) <= |E|")
    edges = g.sorted_edges()
    va = {v: f"vertex:{v}" for v in g.vertices}
    ea = {e: f"edge:{e[0]}-{e[1]}" for e in edges}
    agents = [*va.values(), *ea.values(), "b"]
    initial = {"p_b": {"b": 1, **{ea[e]: 1 for e in edges}}}
    alloc = {"b": ["p_b"]}
    for v in g.vertices:
        initial[f"p_{v}"] = {va[v]: 1}
        alloc[va[v]] = [f"p_{v}"]
    for e in edges:
        item = f"p_{e[0]}-{e[1]}"
        initial[item] = {va[e[0]]: 1, va[e[1]]: 1}
        alloc[ea[e]] = [item]
    vertex_and_edge = {a: 1 for a in (*va.values(), *ea.values())}
    pool = {
        "r": PoolItem(comb(l, 2), vertex_and_edge),
        "r'": PoolItem(m - comb(l, 2), {a: 1 for a in ea.values()}),
        "r*": PoolItem(l, {a: 1 for a in va.values()}),
    }
    return Instance(agents, initial, pool, alloc, INF)


def gen_binpacking(bp: BinPackingInput) -> Instance:
    """Identical valuations; agent b holds value B and each bin agent must collect exactly B."""
    agents = [f"a{i}" for i in range(1, bp.bins + 1)] + ["b"]
    same = lambda x: {a: x for a in agents}  # noqa: E731
    pool = {f"r{j}": PoolItem(1, same(u)) for j, u in enumerate(bp.sizes, 1)}
    return Instance(agents, {"p": same(bp.bin_size)}, pool, {"b": ["p"]}, INF)


def gen_indset(g: SimpleGraph, l: int) -> Instance:
    """Budget-l instance; feasible iff ``g`` has an independent set of size l.

    Rejects isolated vertices: ``b`` could take l copies of such a vertex's
    item without any edge agent noticing, which breaks the equivalence.
    """
    if l < 1:
        raise ValueError("need l >= 1")
    if not g.edges:
        raise ValueError("graph has no edges; the construction needs edge agents")
    touched = {v for e in g.edges for v in e}
    isolated = [v for v in g.vertices if v not in touched]
    if isolated:
        raise ValueError(f"isolated vertices {isolated} are not supported")
    edges = g.sorted_edges()
    ea = {e: f"edge:{e[0]}-{e[1]}" for e in edges}
    agents = [*ea.values(), "b"]
    initial, alloc = {}, {}
    for e, a in ea.items():
        tag = f"{e[0]}-{e[1]}"
        bundle = []
        for i in range(l - 1):
            initial[f"t1_{tag}_{i}"] = {"b": 1}
            bundle.append(f"t1_{tag}_{i}")
        initial[f"t2_{tag}"] = {"b": 1, **{x: 1 for x in ea.values()}}
        bundle.append(f"t2_{tag}")
        alloc[a] = bundle
    pool = {}
    for v in g.vertices:
        vals = {"b": 1}
        vals.update({ea[e]: 1 for e in edges if v in e})
        pool[f"r_{v}"] = PoolItem(l, vals)
    return Instance(agents, initial, pool, alloc, l)


# -- random instances ------------------------------------------------------


def gen_random(
    agents: int,
    pool: int,
    max_value: int,
    supply_profile: str = "inf",
    budget_profile="inf",
    seed: int = 0,
    *,
    initial_items: int | None = None,
    proportional_group: int = 0,
    binary: bool = False,
    max_supply: int = 3,
) -> Instance:
    """Seeded random instance.

    ``supply_profile`` is ``"inf"``, ``"finite"`` (1..max_supply) or
    ``"mixed"`` (at least one of each kind when pool >= 2). ``budget_profile``
    is ``"inf"`` or a nonnegative integer. The first ``proportional_group``
    agents get pool valuations that are integer multiples of one base vector.
    """
    if agents <= 0 or pool < 0 or max_value <= 0:
        raise ValueError("sizes must be positive")
    rng = random.Random(seed)
    ids = [f"a{i}" for i in range(1, agents + 1)]
    top = 1 if binary else max_value
    n_init = agents if initial_items is None else initial_items
    init = {}
    for j in range(1, n_init + 1):
        init[f"p{j}"] = {a: rng.randint(0, max_value) for a in ids}
    owners = [rng.choice(ids + [None]) for _ in range(n_init)]
    alloc = {a: [f"p{j}" for j, o in enumerate(owners, 1) if o == a] for a in ids}
    vecs = {a: [rng.randint(0, top) for _ in range(pool)] for a in ids}
    if proportional_group and pool:
        base = [rng.randint(0 if binary else 1, top) for _ in range(pool)]
        if not any(base):
            base[0] = 1
        for a in ids[:proportional_group]:
            mult = 1 if binary else rng.randint(1, max(1, max_value // max(base)))
            vecs[a] = [mult * x for x in base]
    if supply_profile == "inf":
        supplies = [INF] * pool
    elif supply_profile == "finite":
        supplies = [rng.randint(1, max_supply) for _ in range(pool)]
    elif supply_profile == "mixed":
        supplies = [rng.choice([INF, rng.randint(1, max_supply)]) for _ in range(pool)]
        if pool >= 2:
            supplies[0] = INF
            if all(is_inf(s) for s in supplies):
                supplies[-1] = rng.randint(1, max_supply)
    else:
        raise ValueError(f"unknown supply profile {supply_profile!r}")
    items = {f"r{j}": PoolItem(supplies[j - 1], {a: vecs[a][j - 1] for a in ids}) for j in range(1, pool + 1)}
    budget = INF if budget_profile in ("inf", INF) else int(budget_profile)
    return Instance(ids, init, items, alloc, budget)
