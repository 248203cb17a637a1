"""Envy elimination when every pool item has infinite supply and the budget is unbounded.

Agents are grouped by proportionality of their pool valuations. Inside a
class, envy can only be fixed if a system of difference constraints on
per-agent utility offsets is feasible; between classes, two items with
differing value ratios always let us push a gap down without creating new envy.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import bezout_list, ceil_div, gcd_list
from .model import (
    EMPTY,
    Extension,
    Instance,
    Verdict,
    envy_gap,
    envy_graph,
    is_inf,
)


class ModeMismatch(ValueError):
    pass


# -- proportionality -------------------------------------------------------


def is_zero(vec: Sequence[int]) -> bool:
    return not any(vec)


def proportional(u: Sequence[int], v: Sequence[int]) -> bool:
    """Nonzero vectors u, v with u = alpha * v for some alpha > 0 (cross products only)."""
    if is_zero(u) or is_zero(v):
        return False
    i0 = next(i for i, x in enumerate(u) if x)
    return all(u[i0] * v[j] == u[j] * v[i0] for j in range(len(u)))


def ratio(u: Sequence[int], v: Sequence[int]) -> Fraction:
    """alpha with u = alpha * v; caller guarantees proportionality."""
    i = next(i for i, x in enumerate(v) if x)
    return Fraction(u[i], v[i])


@dataclass(frozen=True)
class EquivalenceClass:
    members: tuple[str, ...]
    factor_to_representative: dict[str, Fraction]
    is_zero_class: bool = False

    @property
    def representative(self) -> str:
        return self.members[0]


def proportional_classes(inst: Instance) -> list[EquivalenceClass]:
    """Partition agents by proportional pool valuations.

    Agents valuing every pool item at 0 form one separate class, listed last.
    """
    reps: list[tuple[str, tuple[int, ...]]] = []
    groups: dict[str, list[str]] = {}
    zero = []
    for a in inst.agents:
        vec = inst.pool_vector(a)
        if is_zero(vec):
            zero.append(a)
            continue
        for rep, rvec in reps:
            if proportional(vec, rvec):
                groups[rep].append(a)
                break
        else:
            reps.append((a, vec))
            groups[a] = [a]
    classes = []
    for rep, rvec in reps:
        members = groups[rep]
        factors = {a: ratio(inst.pool_vector(a), rvec) for a in members}
        classes.append(EquivalenceClass(tuple(members), factors))
    if zero:
        classes.append(EquivalenceClass(tuple(zero), {a: Fraction(0) for a in zero}, True))
    return classes


def class_of(classes: Sequence[EquivalenceClass]) -> dict[str, int]:
    return {a: i for i, c in enumerate(classes) for a in c.members}


def _require_unbounded(inst: Instance):
    if not all(is_inf(p.supply) for p in inst.pool_items.values()):
        raise ModeMismatch("mode mismatch: unbounded mode needs every pool supply to be inf")


# -- two-agent resolutions -------------------------------------------------


@dataclass(frozen=True)
class PairResolution:
    """Copies handed to the envier and to the envied agent for one envy edge.

    For non-proportional pairs ``details`` holds the two items and the four
    values (x, c, y, d); for proportional pairs it holds T, q and the
    Bezout coefficients.
    """

    kind: str
    envier: str
    envied: str
    to_envier: dict[str, int]
    to_envied: dict[str, int]
    details: dict = field(default_factory=dict)

    def extension(self) -> Extension:
        return Extension({self.envier: self.to_envier, self.envied: self.to_envied})


def resolve_pair_nonproportional(inst: Instance, ext: Extension, a: str, b: str) -> PairResolution:
    """Items and counts that close a's envy toward b without moving b's view of the pair.

    Picks items r1, r2 with v_a(r1) * v_b(r2) > v_a(r2) * v_b(r1) and gives
    ``gap * v_b(r2)`` copies of r1 to ``a`` and ``gap * v_b(r1)`` copies of r2
    to ``b``. If ``b`` values the whole pool at 0, ``a`` just receives enough
    copies of its favourite item.
    """
    _require_unbounded(inst)
    gap = envy_gap(inst, ext, a, b)
    if gap <= 0:
        raise ValueError(f"{a} does not envy {b}")
    u, v = inst.pool_vector(a), inst.pool_vector(b)
    pool = inst.pool
    if is_zero(u):
        raise ValueError(f"{a} values every pool item at 0; its envy cannot be resolved")
    if is_zero(v):
        best = max(range(len(u)), key=lambda i: (u[i], -i))
        n = ceil_div(gap, u[best])
        return PairResolution("zero-envied", a, b, {pool[best]: n}, {}, {"r1": pool[best], "x": u[best], "gap": gap})
    if proportional(u, v):
        raise ValueError("pair is proportional")
    i0 = next(i for i, x in enumerate(u) if x)
    j = next(j for j in range(len(u)) if u[i0] * v[j] != u[j] * v[i0])
    r1, r2 = (i0, j) if u[i0] * v[j] > u[j] * v[i0] else (j, i0)
    x, c, y, d = u[r1], u[r2], v[r1], v[r2]
    to_a = {pool[r1]: gap * d}
    to_b = {pool[r2]: gap * y} if y else {}
    details = {"r1": pool[r1], "r2": pool[r2], "x": x, "c": c, "y": y, "d": d, "gap": gap}
    return PairResolution("nonproportional", a, b, to_a, to_b, details)


@dataclass(frozen=True)
class PairFeasibility:
    feasible: bool
    lo: int
    hi: Fraction
    d: int
    T: int | None = None


def pair_proportional_feasible(inst: Instance, a: str, b: str) -> PairFeasibility:
    """Is there a multiple T of gcd(v_a over the pool) in [gap(a,b), -alpha * gap(b,a)]?

    The returned T is the smallest such multiple.
    """
    _require_unbounded(inst)
    u, v = inst.pool_vector(a), inst.pool_vector(b)
    if is_zero(u) or is_zero(v):
        raise ValueError("zero pool valuation; handled by the zero class")
    if not proportional(u, v):
        raise ValueError("pair is not proportional")
    lo = inst.initial_gap(a, b)
    if lo <= 0:
        raise ValueError(f"{a} does not envy {b}")
    alpha = ratio(u, v)
    hi = -alpha * inst.initial_gap(b, a)
    d = gcd_list(u)
    T = ceil_div(lo, d) * d
    if T <= hi:
        return PairFeasibility(True, lo, hi, d, T)
    return PairFeasibility(False, lo, hi, d)


def pair_proportional_construct(inst: Instance, a: str, b: str, T: int) -> PairResolution:
    _require_unbounded(inst)
    u = inst.pool_vector(a)
    cert = bezout_list(u)
    if T % cert.d:
        raise ValueError(f"T={T} is not divisible by gcd {cert.d}")
    q = T // cert.d
    pool = inst.pool
    to_a, to_b = {}, {}
    for item, c in zip(pool, cert.coefficients):
        if q * c > 0:
            to_a[item] = q * c
        elif q * c < 0:
            to_b[item] = -q * c
    res = PairResolution(
        "proportional", a, b, to_a, to_b, {"T": T, "q": q, "d": cert.d, "coefficients": cert.coefficients}
    )
    ext = res.extension()
    if envy_gap(inst, ext, a, b) > 0 or envy_gap(inst, ext, b, a) > 0:
        raise ValueError(f"T={T} lies outside the feasible interval for ({a}, {b})")
    return res


# -- phase 1: proportional classes -----------------------------------------


@dataclass(frozen=True)
class NormalizedClass:
    cls: EquivalenceClass
    d_per_agent: dict[str, int]
    normalized_values: tuple[int, ...]
    gap_matrix: dict[tuple[str, str], int]


def normalize_class(inst: Instance, cls: EquivalenceClass) -> NormalizedClass:
    if cls.is_zero_class:
        raise ValueError("the zero class has no normalized valuation")
    d = {a: gcd_list(inst.pool_vector(a)) for a in cls.members}
    rep = cls.representative
    norm = tuple(x // d[rep] for x in inst.pool_vector(rep))
    for a in cls.members:
        # sanity: every member normalizes to the same vector
        if tuple(x // d[a] for x in inst.pool_vector(a)) != norm:
            raise AssertionError(f"class member {a} does not normalize like {rep}")
    gaps = {
        (a, b): ceil_div(inst.initial_gap(a, b), d[a])
        for a in cls.members
        for b in cls.members
        if a != b
    }
    return NormalizedClass(cls, d, norm, gaps)


@dataclass(frozen=True)
class UnitBundlePair:
    X: dict[str, int]
    Y: dict[str, int]


def unit_bundle_pair(inst: Instance, normalized_values: Sequence[int]) -> UnitBundlePair:
    """Multisets X, Y with v'(X) = v'(Y) + 1 (requires gcd(v') = 1)."""
    cert = bezout_list(normalized_values)
    if cert.d != 1:
        raise ValueError("normalized values must have gcd 1")
    X, Y = {}, {}
    for item, c in zip(inst.pool, cert.coefficients):
        if c > 0:
            X[item] = c
        elif c < 0:
            Y[item] = -c
    return UnitBundlePair(X, Y)


@dataclass
class DifferenceConstraintSystem:
    """Constraints ``x[a] - x[b] >= g`` for triples ``(a, b, g)``."""

    variables: tuple[str, ...]
    constraints: list[tuple[str, str, int]]
    solution: dict[str, int] | None = None
    cycle: list[str] | None = None

    def satisfied_by(self, z: dict[str, int]) -> bool:
        return all(z[a] - z[b] >= g for a, b, g in self.constraints)

    def solve(self) -> bool:
        """Bellman-Ford from a virtual source; fills ``solution`` or ``cycle``.

        Constraint ``x_a - x_b >= g`` becomes edge a -> b of weight -g so that
        shortest-path distances satisfy ``dist[b] <= dist[a] - g``.
        """
        n = len(self.variables)
        dist = {v: 0 for v in self.variables}
        pred: dict[str, str | None] = {v: None for v in self.variables}
        edges = [(a, b, -g) for a, b, g in self.constraints]
        last = None
        for _ in range(n):
            last = None
            for a, b, w in edges:
                if dist[a] + w < dist[b]:
                    dist[b] = dist[a] + w
                    pred[b] = a
                    last = b
            if last is None:
                break
        if last is not None:
            # walk back n steps to land on the cycle, then collect it
            v = last
            for _ in range(n):
                v = pred[v]
            cycle = [v]
            u = pred[v]
            while u != v:
                cycle.append(u)
                u = pred[u]
            cycle.reverse()
            self.cycle = cycle
            self.solution = None
            return False
        low = min(dist.values(), default=0)
        self.solution = {v: dist[v] - low for v in self.variables}
        self.cycle = None
        return True

    def cycle_bound(self, cycle: Sequence[str]) -> int:
        """Sum of the bounds along ``cycle``; positive means the system is infeasible."""
        bound = {(a, b): g for a, b, g in self.constraints}
        return sum(bound[cycle[i], cycle[(i + 1) % len(cycle)]] for i in range(len(cycle)))


@dataclass
class ClassResult:
    normalized: NormalizedClass
    system: DifferenceConstraintSystem
    extension: Extension | None = None
    bundles: UnitBundlePair | None = None

    @property
    def feasible(self) -> bool:
        return self.extension is not None

    def witness(self) -> dict:
        cyc = self.system.cycle
        return {
            "kind": "negative-cycle",
            "class": list(self.normalized.cls.members),
            "cycle": list(cyc),
            "bounds": [self.normalized.gap_matrix[cyc[i], cyc[(i + 1) % len(cyc)]] for i in range(len(cyc))],
        }


def phase1_class(inst: Instance, ncls: NormalizedClass) -> ClassResult:
    """Resolve envy inside one proportional class, or report a negative cycle."""
    members = ncls.cls.members
    constraints = [(a, b, g) for (a, b), g in ncls.gap_matrix.items()]
    system = DifferenceConstraintSystem(members, constraints)
    if not system.solve():
        return ClassResult(ncls, system)
    z = system.solution
    if not any(z.values()):
        return ClassResult(ncls, system, EMPTY)
    pair = unit_bundle_pair(inst, ncls.normalized_values)
    total = sum(z.values())
    pairs = []
    for a in members:
        for item, n in pair.X.items():
            pairs.append((a, item, z[a] * n))
        for item, n in pair.Y.items():
            pairs.append((a, item, (total - z[a]) * n))
    return ClassResult(ncls, system, Extension.from_pairs(pairs), pair)


# -- phase 2: cross-class edges --------------------------------------------


def _bundle_value(inst, agent, bundle):
    return sum(n * inst.value(agent, item) for item, n in bundle.items())


def phase2(inst: Instance, ext: Extension, classes=None, trace: list | None = None) -> Extension:
    """Remove remaining envy edges between agents of different classes.

    Each step resolves the smallest edge (a, b): ``a`` takes its pair-resolution
    bundle X, ``b`` takes Y, and every other agent takes whichever of X, Y it
    values more (X on ties). ``trace`` receives the edge count before each step.
    """
    _require_unbounded(inst)
    if classes is None:
        classes = proportional_classes(inst)
    cid = class_of(classes)
    n = len(inst.agents)
    steps = 0
    while True:
        edges = envy_graph(inst, ext).sorted_edges()
        if trace is not None:
            trace.append(len(edges))
        if not edges:
            return ext
        same = [(a, b) for a, b, _ in edges if cid[a] == cid[b]]
        if same:
            raise ValueError(f"envy inside a proportional class remains: {same[0]}")
        if steps > n * n:
            raise AssertionError("phase 2 did not terminate within |A|^2 steps")
        a, b, _ = edges[0]
        res = resolve_pair_nonproportional(inst, ext, a, b)
        X, Y = res.to_envier, res.to_envied
        pairs = []
        for c in inst.agents:
            if c == a:
                bundle = X
            elif c == b:
                bundle = Y
            else:
                bundle = X if _bundle_value(inst, c, X) >= _bundle_value(inst, c, Y) else Y
            pairs.extend((c, item, k) for item, k in bundle.items())
        ext = ext + Extension.from_pairs(pairs)
        steps += 1


# -- driver ----------------------------------------------------------------


def solve_unbounded(inst: Instance, trace: list | None = None) -> Verdict:
    _require_unbounded(inst)
    if not is_inf(inst.budget):
        raise ModeMismatch("mode mismatch: unbounded mode needs budget inf")
    if not envy_graph(inst).edges:
        return Verdict.yes(inst, EMPTY, "unbounded")
    classes = proportional_classes(inst)
    for cls in classes:
        if not cls.is_zero_class:
            continue
        for a in cls.members:
            for b in inst.agents:
                if a != b and inst.initial_gap(a, b) > 0:
                    return Verdict.no(
                        {"kind": "zero-class-envy", "agent": a, "envies": b, "gap": inst.initial_gap(a, b)},
                        "unbounded",
                    )
    ext = EMPTY
    for cls in classes:
        if cls.is_zero_class or len(cls.members) < 2:
            continue
        res = phase1_class(inst, normalize_class(inst, cls))
        if not res.feasible:
            return Verdict.no(res.witness(), "unbounded")
        ext = ext + res.extension
    ext = phase2(inst, ext, classes, trace)
    return Verdict.yes(inst, ext, "unbounded")


def verify_witness(inst: Instance, witness: dict) -> bool:
    """Independently confirm an unbounded-mode infeasibility witness."""
    kind = witness.get("kind")
    if kind == "zero-class-envy":
        a, b = witness["agent"], witness["envies"]
        return is_zero(inst.pool_vector(a)) and inst.initial_gap(a, b) > 0
    if kind == "negative-cycle":
        cyc = witness["cycle"]
        if len(cyc) < 2:
            return False
        vecs = [inst.pool_vector(a) for a in cyc]
        if not all(proportional(vecs[0], v) for v in vecs):
            return False
        total = 0
        for i, a in enumerate(cyc):
            b = cyc[(i + 1) % len(cyc)]
            total += ceil_div(inst.initial_gap(a, b), gcd_list(inst.pool_vector(a)))
        return total > 0
    return False
