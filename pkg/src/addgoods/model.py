"""Instances, extensions, envy gaps and certification.

Agents hold a fixed initial allocation of items from ``initial_items``. An
extension hands out copies of ``pool_items`` on top of that allocation. All
arithmetic is exact Python integers; supplies and budgets may be ``INF``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

INF = float("inf")


class InstanceError(ValueError):
    """Raised when an instance violates its structural invariants."""


class UnknownAgentError(KeyError):
    def __str__(self):
        return f"unknown agent: {self.args[0]!r}"


def is_inf(x) -> bool:
    return x == INF


def _check_count(x, what):
    if is_inf(x):
        return
    if isinstance(x, bool) or not isinstance(x, int) or x < 0:
        raise InstanceError(f"{what} must be a nonnegative integer or inf, got {x!r}")


@dataclass(frozen=True)
class PoolItem:
    supply: int | float
    values: Mapping[str, int]


@dataclass(frozen=True)
class Instance:
    agents: tuple[str, ...]
    initial_items: Mapping[str, Mapping[str, int]]
    pool_items: Mapping[str, PoolItem]
    initial_allocation: Mapping[str, frozenset[str]]
    budget: int | float = INF

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        if not self.agents:
            raise InstanceError("no agents")
        if len(set(self.agents)) != len(self.agents):
            raise InstanceError("duplicate agent ids")
        known = set(self.agents)

        def check_values(item, values):
            for a, v in values.items():
                if a not in known:
                    raise InstanceError(f"unknown agent {a!r} in values of {item!r}")
                if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                    raise InstanceError(f"value of {item!r} for {a!r} must be a nonnegative integer")

        init = {str(k): dict(v) for k, v in self.initial_items.items()}
        for item, values in init.items():
            check_values(item, values)
        pool = {}
        for item, p in self.pool_items.items():
            if not isinstance(p, PoolItem):
                p = PoolItem(p["supply"], p.get("values", {}))
            p = PoolItem(p.supply, dict(p.values))
            _check_count(p.supply, f"supply of {item!r}")
            check_values(item, p.values)
            if item in init:
                raise InstanceError(f"item id {item!r} is both initial and pool item")
            pool[item] = p
        alloc = {}
        owner = {}
        for a, bundle in self.initial_allocation.items():
            if a not in known:
                raise InstanceError(f"unknown agent {a!r} in initial allocation")
            bundle = frozenset(bundle)
            for item in bundle:
                if item not in init:
                    raise InstanceError(f"unknown initial item {item!r}")
                if item in owner:
                    raise InstanceError(f"item {item!r} allocated to both {owner[item]!r} and {a!r}")
                owner[item] = a
            alloc[a] = bundle
        for a in self.agents:
            alloc.setdefault(a, frozenset())
        _check_count(self.budget, "budget")
        object.__setattr__(self, "initial_items", init)
        object.__setattr__(self, "pool_items", pool)
        object.__setattr__(self, "initial_allocation", alloc)

    @property
    def pool(self) -> tuple[str, ...]:
        return tuple(self.pool_items)

    def value(self, agent: str, item: str) -> int:
        """Value of one copy of ``item`` (initial or pool) to ``agent``; omitted entries are 0."""
        if item in self.pool_items:
            return self.pool_items[item].values.get(agent, 0)
        return self.initial_items[item].get(agent, 0)

    def supply(self, item: str):
        return self.pool_items[item].supply

    def pool_vector(self, agent: str) -> tuple[int, ...]:
        return tuple(p.values.get(agent, 0) for p in self.pool_items.values())

    @cached_property
    def initial_values(self) -> dict[str, dict[str, int]]:
        """``initial_values[a][b]`` is a's value for b's initial bundle."""
        out = {}
        for a in self.agents:
            out[a] = {
                b: sum(self.initial_items[i].get(a, 0) for i in self.initial_allocation[b])
                for b in self.agents
            }
        return out

    def initial_gap(self, a: str, b: str) -> int:
        iv = self.initial_values
        if a not in iv:
            raise UnknownAgentError(a)
        if b not in iv:
            raise UnknownAgentError(b)
        return iv[a][b] - iv[a][a]

    def replace(self, **changes) -> "Instance":
        kw = dict(
            agents=self.agents,
            initial_items=self.initial_items,
            pool_items=self.pool_items,
            initial_allocation=self.initial_allocation,
            budget=self.budget,
        )
        kw.update(changes)
        return Instance(**kw)


@dataclass(frozen=True)
class Extension:
    """Copy counts ``counts[agent][item]``; absent entries are 0."""

    counts: Mapping[str, Mapping[str, int]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for a, row in self.counts.items():
            r = {}
            for item, n in row.items():
                if isinstance(n, bool) or not isinstance(n, int) or n < 0:
                    raise ValueError(f"count for ({a!r}, {item!r}) must be a nonnegative integer")
                if n:
                    r[item] = n
            if r:
                clean[a] = r
        object.__setattr__(self, "counts", clean)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str, int]]) -> "Extension":
        counts: dict[str, dict[str, int]] = {}
        for a, item, n in pairs:
            row = counts.setdefault(a, {})
            row[item] = row.get(item, 0) + n
        return cls(counts)

    def get(self, agent: str, item: str) -> int:
        return self.counts.get(agent, {}).get(item, 0)

    def bundle(self, agent: str) -> Mapping[str, int]:
        return self.counts.get(agent, {})

    @property
    def size(self) -> int:
        return sum(n for row in self.counts.values() for n in row.values())

    def item_total(self, item: str) -> int:
        return sum(row.get(item, 0) for row in self.counts.values())

    def merge(self, other: "Extension") -> "Extension":
        return Extension.from_pairs(
            [(a, i, n) for ext in (self, other) for a, row in ext.counts.items() for i, n in row.items()]
        )

    def __add__(self, other):
        if not isinstance(other, Extension):
            return NotImplemented
        return self.merge(other)

    def __bool__(self):
        return bool(self.counts)


EMPTY = Extension()


def extension_value(inst: Instance, ext: Extension, viewer: str, holder: str) -> int:
    """v_viewer of the pool copies assigned to ``holder``."""
    return sum(n * inst.value(viewer, item) for item, n in ext.bundle(holder).items())


def envy_gap(inst: Instance, ext: Extension, a: str, b: str) -> int:
    """How much more ``a`` values b's extended bundle than its own (negative means no envy)."""
    base = inst.initial_gap(a, b)
    if a == b:
        return 0
    return base + extension_value(inst, ext, a, b) - extension_value(inst, ext, a, a)


@dataclass(frozen=True)
class EnvyGraph:
    agents: tuple[str, ...]
    edges: frozenset[tuple[str, str, int]]

    def __len__(self):
        return len(self.edges)

    def pairs(self) -> set[tuple[str, str]]:
        return {(a, b) for a, b, _ in self.edges}

    def sorted_edges(self) -> list[tuple[str, str, int]]:
        return sorted(self.edges)


def bundle_values(inst: Instance, ext: Extension) -> dict[str, dict[str, int]]:
    """Full matrix ``m[a][b]`` = a's value for b's extended bundle."""
    m = {}
    for a in inst.agents:
        row = dict(inst.initial_values[a])
        for b in inst.agents:
            row[b] += extension_value(inst, ext, a, b)
        m[a] = row
    return m


def envy_graph(inst: Instance, ext: Extension = EMPTY) -> EnvyGraph:
    m = bundle_values(inst, ext)
    edges = set()
    for a in inst.agents:
        own = m[a][a]
        for b in inst.agents:
            if b != a and m[a][b] > own:
                edges.add((a, b, m[a][b] - own))
    return EnvyGraph(inst.agents, frozenset(edges))


def is_envy_free(inst: Instance, ext: Extension = EMPTY) -> bool:
    # Deliberately separate from envy_graph so the two can be cross-checked.
    for a in inst.agents:
        for b in inst.agents:
            if a != b and envy_gap(inst, ext, a, b) > 0:
                return False
    return True


def envious_agents(inst: Instance, ext: Extension = EMPTY) -> list[str]:
    return sorted({a for a, _, _ in envy_graph(inst, ext).edges})


def validate_extension(inst: Instance, ext: Extension) -> list[str]:
    """Return a list of violations; an empty list means ``ext`` is valid for ``inst``."""
    problems = []
    known = set(inst.agents)
    for a, row in ext.counts.items():
        if a not in known:
            problems.append(f"unknown agent {a}")
        for item in row:
            if item not in inst.pool_items:
                problems.append(f"unknown pool item {item}")
    for item, p in inst.pool_items.items():
        total = ext.item_total(item)
        if total > p.supply:
            problems.append(f"supply exceeded for {item}: {total} > {p.supply}")
    if ext.size > inst.budget:
        problems.append(f"budget exceeded: {ext.size} > {inst.budget}")
    return problems


def sum_finite_supplies(inst: Instance):
    """Total supply over the pool, or ``INF`` as soon as one supply is infinite."""
    total = 0
    for p in inst.pool_items.values():
        if is_inf(p.supply):
            return INF
        total += p.supply
    return total


def finite_supply_total(inst: Instance) -> int:
    """Sum of supplies over the finite-supply pool items only."""
    return sum(p.supply for p in inst.pool_items.values() if not is_inf(p.supply))


@dataclass(frozen=True)
class Verdict:
    """Solver outcome.

    Feasible verdicts are certified on construction: the extension is rechecked
    for envy-freeness and validity, and construction fails if either check does.
    """

    feasible: bool
    extension: Extension | None = None
    witness: dict | None = None
    mode: str = ""
    certified: bool = False

    @classmethod
    def yes(cls, inst: Instance, ext: Extension, mode: str = "") -> "Verdict":
        problems = validate_extension(inst, ext)
        if problems:
            raise AssertionError(f"invalid extension from {mode or 'solver'}: {problems}")
        if not is_envy_free(inst, ext):
            raise AssertionError(f"extension from {mode or 'solver'} leaves envy")
        return cls(True, ext, None, mode, True)

    @classmethod
    def no(cls, witness: dict, mode: str = "") -> "Verdict":
        return cls(False, None, dict(witness), mode)

    def with_mode(self, mode: str) -> "Verdict":
        return Verdict(self.feasible, self.extension, self.witness, mode, self.certified)
