"""Exact solvers for finite budgets and/or finite supplies, plus mode dispatch."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product

from .model import (
    INF,
    Extension,
    Instance,
    PoolItem,
    Verdict,
    is_inf,
    sum_finite_supplies,
)
from .unbounded import ModeMismatch, solve_unbounded

MODES = ("auto", "unbounded", "branch", "ilp", "hybrid")


class _Gaps:
    """Incrementally maintained bundle-value matrix ``m[i][j]`` (agent indices)."""

    def __init__(self, inst: Instance):
        self.agents = inst.agents
        iv = inst.initial_values
        self.m = [[iv[a][b] for b in inst.agents] for a in inst.agents]
        self.vals = {
            r: [inst.pool_items[r].values.get(a, 0) for a in inst.agents] for r in inst.pool
        }

    def add(self, holder: int, item: str, n: int = 1):
        col = self.vals[item]
        for i, row in enumerate(self.m):
            row[holder] += n * col[i]

    def envious(self) -> list[int]:
        out = []
        for i, row in enumerate(self.m):
            own = row[i]
            if any(v > own for v in row):
                out.append(i)
        return out

    def max_gap(self, i: int) -> int:
        row = self.m[i]
        return max(row) - row[i]


@dataclass
class SearchNode:
    remaining_budget: int
    remaining_supply: dict[str, int]
    partial_extension: dict[tuple[str, str], int] = field(default_factory=dict)

    def extension(self) -> Extension:
        return Extension.from_pairs((a, r, n) for (a, r), n in self.partial_extension.items())


def _capped_supplies(inst: Instance, k) -> dict[str, int]:
    return {r: (k if is_inf(p.supply) else min(p.supply, k)) for r, p in inst.pool_items.items()}


def solve_branching(inst: Instance, k: int, on_assign=None) -> Verdict:
    """Branch on the items given to the smallest envious agent, depth at most ``k``.

    ``on_assign(agent, item, envious_agents)`` is called before every branch;
    tests use it to confirm we only ever hand items to envious agents.
    """
    if is_inf(k):
        raise ModeMismatch("mode mismatch: branching needs a finite budget")
    order = sorted(range(len(inst.agents)), key=lambda i: inst.agents[i])
    gaps = _Gaps(inst)
    node = SearchNode(k, _capped_supplies(inst, k))
    pool = inst.pool

    def rec() -> bool:
        envious = set(gaps.envious())
        if not envious:
            return True
        if node.remaining_budget == 0:
            return False
        i = next(j for j in order if j in envious)
        a = inst.agents[i]
        for r in pool:
            if node.remaining_supply[r] <= 0:
                continue
            if on_assign is not None:
                on_assign(a, r, {inst.agents[j] for j in envious})
            node.remaining_supply[r] -= 1
            node.remaining_budget -= 1
            key = (a, r)
            node.partial_extension[key] = node.partial_extension.get(key, 0) + 1
            gaps.add(i, r, 1)
            if rec():
                return True
            gaps.add(i, r, -1)
            node.partial_extension[key] -= 1
            if not node.partial_extension[key]:
                del node.partial_extension[key]
            node.remaining_budget += 1
            node.remaining_supply[r] += 1
        return False

    if rec():
        return Verdict.yes(inst, node.extension(), "branch")
    return Verdict.no({"kind": "search exhausted", "solver": "branch", "k": k}, "branch")


@dataclass
class IlpModel:
    """x[a][r] in [0, upper[a, r]], per-item supply rows, a budget row, pairwise envy rows."""

    agents: tuple[str, ...]
    items: tuple[str, ...]
    upper: dict[tuple[str, str], int]
    supply: dict[str, int]
    budget: int | float

    @classmethod
    def build(cls, inst: Instance, k=None) -> "IlpModel":
        budget = inst.budget if k is None else k
        upper = {}
        for a in inst.agents:
            for r, p in inst.pool_items.items():
                ub = min(p.supply, budget)
                if is_inf(ub):
                    raise ModeMismatch(f"unbounded model: variable x[{a}][{r}] has no finite upper bound")
                upper[a, r] = int(ub)
        supply = {r: int(min(p.supply, budget)) for r, p in inst.pool_items.items()}
        return cls(inst.agents, inst.pool, upper, supply, budget)


def solve_ilp_bb(inst: Instance, k=None) -> Verdict:
    """Depth-first branch and bound over the x[a][r] in (agent, item) order.

    Prunes on supply/budget overflow and when some agent's remaining
    obtainable value cannot cover its current largest gap: later assignments
    to other agents can only widen that gap.
    """
    model = IlpModel.build(inst, k)
    agents = list(model.agents)
    items = list(model.items)
    variables = [(ai, r) for ai in range(len(agents)) for r in items]
    gaps = _Gaps(inst)
    supply_left = dict(model.supply)
    budget_left = [model.budget]
    assignment: dict[tuple[int, str], int] = {}

    def max_gain(ai: int, start: int) -> int:
        # best value agent ai can still give itself from its unfixed variables
        vals = gaps.vals
        free = sorted(
            ((vals[r][ai], min(model.upper[agents[ai], r], supply_left[r])) for (aj, r) in variables[start:] if aj == ai),
            reverse=True,
        )
        left = budget_left[0]
        gain = 0
        for v, cap in free:
            if v <= 0 or left <= 0:
                break
            take = min(cap, left)
            gain += v * take
            left -= take
        return gain

    def bounded_out(start: int) -> bool:
        for ai in range(len(agents)):
            g = gaps.max_gap(ai)
            if g > 0 and g > max_gain(ai, start):
                return True
        return False

    def rec(idx: int) -> bool:
        if bounded_out(idx):
            return False
        if idx == len(variables):
            return not gaps.envious()
        ai, r = variables[idx]
        hi = min(model.upper[agents[ai], r], supply_left[r], budget_left[0])
        for n in range(hi + 1):
            if n:
                gaps.add(ai, r, 1)
                supply_left[r] -= 1
                budget_left[0] -= 1
            assignment[ai, r] = n
            if rec(idx + 1):
                return True
        gaps.add(ai, r, -hi)
        supply_left[r] += hi
        budget_left[0] += hi
        assignment[ai, r] = 0
        return False

    if rec(0):
        ext = Extension.from_pairs((agents[ai], r, n) for (ai, r), n in assignment.items())
        return Verdict.yes(inst, ext, "ilp")
    return Verdict.no({"kind": "search exhausted", "solver": "ilp", "k": model.budget}, "ilp")


def _distributions(agents, copies):
    """Every way to split ``copies`` identical copies among agents or discard (None)."""
    slots = list(agents) + [None]
    return combinations_with_replacement(slots, copies)


def solve_hybrid(inst: Instance) -> Verdict:
    """Try every placement of the finite-supply copies, then run the unbounded solver on the rest.

    Exponential in the finite supply total; copies of one item are treated as
    interchangeable so each item contributes multisets rather than sequences.
    """
    if not is_inf(inst.budget):
        raise ModeMismatch("mode mismatch: hybrid mode needs budget inf")
    finite = {r: p for r, p in inst.pool_items.items() if not is_inf(p.supply)}
    infinite = {r: p for r, p in inst.pool_items.items() if is_inf(p.supply)}
    if not infinite:
        raise ModeMismatch("mode mismatch: hybrid mode needs at least one infinite-supply item")
    residual_pool = {r: PoolItem(INF, p.values) for r, p in infinite.items()}
    choices = [list(_distributions(inst.agents, p.supply)) for p in finite.values()]
    tried = 0
    for combo in product(*choices):
        tried += 1
        initial_items = dict(inst.initial_items)
        allocation = {a: set(b) for a, b in inst.initial_allocation.items()}
        placed = []
        for (r, p), holders in zip(finite.items(), combo):
            for idx, holder in enumerate(holders):
                if holder is None:
                    continue
                copy_id = f"{r}#copy{idx}"
                while copy_id in initial_items or copy_id in inst.pool_items:
                    copy_id += "_"
                initial_items[copy_id] = p.values
                allocation[holder].add(copy_id)
                placed.append((holder, r, 1))
        residual = Instance(inst.agents, initial_items, residual_pool, allocation, INF)
        v = solve_unbounded(residual)
        if v.feasible:
            ext = Extension.from_pairs(placed) + v.extension
            return Verdict.yes(inst, ext, "hybrid")
    return Verdict.no({"kind": "search exhausted", "solver": "hybrid", "placements": tried}, "hybrid")


def route(inst: Instance) -> str:
    """Solver that ``auto`` mode picks for ``inst``."""
    supplies = [p.supply for p in inst.pool_items.values()]
    if not is_inf(inst.budget):
        return "branch"
    if all(is_inf(s) for s in supplies):
        return "unbounded"
    if not any(is_inf(s) for s in supplies):
        return "branch"
    return "hybrid"


def dispatch(inst: Instance, mode: str = "auto") -> Verdict:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "auto":
        mode = route(inst)
    if mode == "unbounded":
        return solve_unbounded(inst)
    if mode == "hybrid":
        return solve_hybrid(inst)
    if mode == "branch":
        k = inst.budget
        if is_inf(k):
            p = sum_finite_supplies(inst)
            if is_inf(p):
                raise ModeMismatch("mode mismatch: branching needs a finite budget or all-finite supplies")
            k = p
        return solve_branching(inst, k)
    if mode == "ilp":
        return solve_ilp_bb(inst)
    raise AssertionError(mode)
