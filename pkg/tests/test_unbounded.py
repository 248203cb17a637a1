from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from addgoods.model import EMPTY, INF, Extension, envy_gap, envy_graph, is_envy_free, validate_extension
from addgoods.oracle_gen import oracle_bounded
from addgoods.unbounded import (
    ModeMismatch,
    normalize_class,
    pair_proportional_construct,
    pair_proportional_feasible,
    phase1_class,
    phase2,
    proportional,
    proportional_classes,
    resolve_pair_nonproportional,
    solve_unbounded,
    unit_bundle_pair,
    verify_witness,
)

from conftest import instances, make


def pool_only(vectors, alloc=None, initial=None):
    """Infinite-supply pool with one item per coordinate of the agents' vectors."""
    m = len(next(iter(vectors.values())))
    pool = {f"r{j + 1}": (INF, {a: v[j] for a, v in vectors.items()}) for j in range(m)}
    return make(initial or {}, pool, alloc, agents=list(vectors))


# -- classes ---------------------------------------------------------------


def test_classes_mixed():
    inst = pool_only({"a1": (2, 4), "a2": (1, 2), "a3": (1, 3)})
    classes = proportional_classes(inst)
    assert [c.members for c in classes] == [("a1", "a2"), ("a3",)]
    f = classes[0].factor_to_representative
    assert f["a1"] / f["a2"] == 2


def test_classes_identical():
    inst = pool_only({"a1": (1, 2), "a2": (1, 2), "a3": (1, 2)})
    (cls,) = proportional_classes(inst)
    assert set(cls.factor_to_representative.values()) == {Fraction(1)}


def test_classes_zero_vector():
    inst = pool_only({"a1": (0, 0), "a2": (1, 2)})
    classes = proportional_classes(inst)
    assert [(c.members, c.is_zero_class) for c in classes] == [(("a2",), False), (("a1",), True)]


@given(instances(max_agents=5))
def test_classes_partition(inst):
    classes = proportional_classes(inst)
    members = [a for c in classes for a in c.members]
    assert sorted(members) == sorted(inst.agents)
    assert sum(c.is_zero_class for c in classes) <= 1
    for c in classes:
        if c.is_zero_class:
            continue
        rep = inst.pool_vector(c.representative)
        for a in c.members:
            assert [x for x in inst.pool_vector(a)] == [c.factor_to_representative[a] * x for x in rep]


# -- two-agent pairs -------------------------------------------------------


def test_nonproportional_example():
    # a envies b by 2; v_a = (3, 1), v_b = (1, 1)
    inst = pool_only({"a": (3, 1), "b": (1, 1)}, {"b": ["p"]}, {"p": {"a": 2}})
    res = resolve_pair_nonproportional(inst, EMPTY, "a", "b")
    assert (res.details["x"], res.details["c"], res.details["y"], res.details["d"]) == (3, 1, 1, 1)
    assert res.to_envier == {"r1": 2} and res.to_envied == {"r2": 2}
    ext = res.extension()
    assert envy_gap(inst, ext, "a", "b") == 2 + 1 * 2 - 3 * 2
    assert envy_gap(inst, ext, "b", "a") == envy_gap(inst, EMPTY, "b", "a")


def test_nonproportional_unit_step():
    # x*d - c*y = 2*1 - 1*1 = 1, gap 1
    inst = pool_only({"a": (2, 1), "b": (1, 1)}, {"b": ["p"]}, {"p": {"a": 1}})
    res = resolve_pair_nonproportional(inst, EMPTY, "a", "b")
    assert res.to_envier == {"r1": 1} and res.to_envied == {"r2": 1}
    assert envy_gap(inst, res.extension(), "a", "b") == 0


def test_nonproportional_requires_envy():
    inst = pool_only({"a": (2, 1), "b": (1, 1)})
    with pytest.raises(ValueError):
        resolve_pair_nonproportional(inst, EMPTY, "a", "b")


def test_nonproportional_rejects_proportional_pair(intro):
    with pytest.raises(ValueError, match="pair is proportional"):
        resolve_pair_nonproportional(intro, EMPTY, "a1", "a2")


def test_envied_zero_agent():
    inst = pool_only({"a": (3, 1), "b": (0, 0)}, {"b": ["p"]}, {"p": {"a": 7}})
    res = resolve_pair_nonproportional(inst, EMPTY, "a", "b")
    assert res.to_envier == {"r1": 3} and res.to_envied == {}
    assert envy_gap(inst, res.extension(), "a", "b") <= 0


@given(st.lists(st.integers(0, 9), min_size=2, max_size=4), st.lists(st.integers(0, 9), min_size=4, max_size=4), st.integers(1, 30), st.integers(0, 30))
def test_nonproportional_pair_closes_gap(u, v, gap, bview):
    v = v[: len(u)]
    assume(any(u) and any(v) and not proportional(u, v))
    inst = pool_only({"a": tuple(u), "b": tuple(v)}, {"b": ["p"]}, {"p": {"a": gap, "b": bview}})
    res = resolve_pair_nonproportional(inst, EMPTY, "a", "b")
    ext = res.extension()
    assert envy_gap(inst, ext, "a", "b") <= 0
    assert envy_gap(inst, ext, "b", "a") == envy_gap(inst, EMPTY, "b", "a")


def test_pair_feasible_intro(intro):
    f = pair_proportional_feasible(intro, "a1", "a2")
    assert (f.lo, f.hi, f.d, f.feasible) == (1, 1, 2, False)


def test_pair_feasible_gcd_one():
    inst = pool_only({"a1": (2, 3), "a2": (2, 3)}, {"a2": ["p"]}, {"p": {"a1": 1, "a2": 1}})
    f = pair_proportional_feasible(inst, "a1", "a2")
    assert (f.lo, f.hi, f.d, f.feasible, f.T) == (1, 1, 1, True, 1)


def test_pair_feasible_divisible():
    inst = pool_only({"a1": (2,), "a2": (2,)}, {"a2": ["p"]}, {"p": {"a1": 2, "a2": 2}})
    f = pair_proportional_feasible(inst, "a1", "a2")
    assert (f.lo, f.hi, f.d, f.feasible, f.T) == (2, 2, 2, True, 2)


def test_pair_construct_bezout():
    inst = pool_only({"a1": (2, 3), "a2": (2, 3)}, {"a2": ["p"]}, {"p": {"a1": 1, "a2": 1}})
    res = pair_proportional_construct(inst, "a1", "a2", 1)
    assert res.details["q"] == 1 and res.details["coefficients"] == (-1, 1)
    assert res.to_envier == {"r2": 1} and res.to_envied == {"r1": 1}
    ext = res.extension()
    assert envy_gap(inst, ext, "a1", "a2") == 0 and envy_gap(inst, ext, "a2", "a1") == 0


def test_pair_construct_single_item():
    inst = pool_only({"a1": (2,), "a2": (2,)}, {"a2": ["p"]}, {"p": {"a1": 2, "a2": 2}})
    res = pair_proportional_construct(inst, "a1", "a2", 2)
    assert res.to_envier == {"r1": 1} and res.to_envied == {}
    ext = res.extension()
    assert envy_gap(inst, ext, "a1", "a2") == 0 and envy_gap(inst, ext, "a2", "a1") == 0


def test_pair_construct_zero_and_indivisible(intro):
    calm = pool_only({"a1": (2,), "a2": (2,)})
    res = pair_proportional_construct(calm, "a1", "a2", 0)
    assert not res.extension()
    with pytest.raises(ValueError, match="not divisible"):
        pair_proportional_construct(intro, "a1", "a2", 1)


# -- phase 1 ---------------------------------------------------------------


def test_phase1_intro_cycle(intro):
    (cls,) = proportional_classes(intro)
    ncls = normalize_class(intro, cls)
    assert ncls.d_per_agent == {"a1": 2, "a2": 2}
    assert ncls.gap_matrix == {("a1", "a2"): 1, ("a2", "a1"): 0}
    res = phase1_class(intro, ncls)
    assert not res.feasible
    w = res.witness()
    assert sorted(w["cycle"]) == ["a1", "a2"] and sum(w["bounds"]) > 0
    assert verify_witness(intro, w)


def test_phase1_bezout_bundles():
    inst = pool_only({"a1": (2, 3), "a2": (2, 3)}, {"a2": ["p"]}, {"p": {"a1": 1, "a2": 5}})
    (cls,) = proportional_classes(inst)
    ncls = normalize_class(inst, cls)
    assert ncls.gap_matrix == {("a1", "a2"): 1, ("a2", "a1"): -5}
    res = phase1_class(inst, ncls)
    assert res.system.solution == {"a1": 1, "a2": 0}
    assert (res.bundles.X, res.bundles.Y) == ({"r2": 1}, {"r1": 1})
    assert res.extension == Extension({"a1": {"r2": 1}, "a2": {"r1": 1}})
    assert envy_gap(inst, res.extension, "a1", "a2") == 0
    assert envy_gap(inst, res.extension, "a2", "a1") == -4


def test_phase1_no_internal_envy():
    inst = pool_only({"a1": (2, 3), "a2": (4, 6)}, {"a1": ["p"]}, {"p": {"a1": 4}})
    (cls,) = proportional_classes(inst)
    res = phase1_class(inst, normalize_class(inst, cls))
    assert res.system.solution == {"a1": 0, "a2": 0}
    assert not res.extension


def test_unit_bundle_pair():
    inst = pool_only({"a": (6, 10, 15)})
    pair = unit_bundle_pair(inst, (6, 10, 15))
    worth = {"r1": 6, "r2": 10, "r3": 15}
    vx = sum(n * worth[r] for r, n in pair.X.items())
    vy = sum(n * worth[r] for r, n in pair.Y.items())
    assert vx == vy + 1


@given(instances(max_agents=5, max_pool=3, max_value=8))
def test_phase1_solutions_satisfy_constraints(inst):
    for cls in proportional_classes(inst):
        if cls.is_zero_class or len(cls.members) < 2:
            continue
        res = phase1_class(inst, normalize_class(inst, cls))
        if res.feasible:
            z = res.system.solution
            assert min(z.values()) == 0
            assert all(z[a] - z[b] >= g for a, b, g in res.system.constraints)
            # and the class really is envy-free under the built extension
            for a in cls.members:
                for b in cls.members:
                    assert envy_gap(inst, res.extension, a, b) <= 0 or a == b
        else:
            assert res.system.cycle_bound(res.system.cycle) > 0


# -- phase 2 ---------------------------------------------------------------


def test_phase2_nothing_to_do():
    inst = pool_only({"a1": (1, 2), "a2": (2, 1)})
    assert phase2(inst, EMPTY) == EMPTY


def test_phase2_two_agents_matches_pair_resolution():
    inst = pool_only({"a": (3, 1), "b": (1, 1)}, {"b": ["p"]}, {"p": {"a": 2}})
    pair = resolve_pair_nonproportional(inst, EMPTY, "a", "b").extension()
    assert phase2(inst, EMPTY) == pair


def test_phase2_third_party_stays_calm():
    # c prefers the r2 bundle (2 copies of r2 at 5 each vs 2 copies of r1 at 1)
    inst = pool_only({"a": (3, 1), "b": (1, 1), "c": (1, 5)}, {"b": ["p"]}, {"p": {"a": 2}})
    assert not [e for e in envy_graph(inst).edges if e[0] == "c"]
    ext = phase2(inst, EMPTY)
    assert ext.bundle("c") == {"r2": 2}
    assert all(envy_gap(inst, ext, "c", x) <= 0 for x in ("a", "b"))
    assert is_envy_free(inst, ext)


@given(instances(max_agents=5, max_pool=3, max_value=8))
def test_phase2_edges_strictly_decrease(inst):
    trace = []
    v = solve_unbounded(inst, trace=trace)
    if v.feasible:
        assert is_envy_free(inst, v.extension) and not validate_extension(inst, v.extension)
        assert all(x > y for x, y in zip(trace, trace[1:]))
        assert len(trace) - 1 <= len(inst.agents) ** 2


# -- end to end ------------------------------------------------------------


def test_solve_intro(intro):
    v = solve_unbounded(intro)
    assert not v.feasible and v.witness["kind"] == "negative-cycle"


def test_solve_no_envy():
    inst = pool_only({"a1": (1, 2), "a2": (2, 1)})
    v = solve_unbounded(inst)
    assert v.feasible and v.extension == EMPTY


def test_solve_three_agents_mixed():
    inst = make(
        {"p": {"a1": 1, "a2": 5}, "q": {"a3": 1}},
        {"r1": (INF, {"a1": 2, "a2": 2, "a3": 1}), "r2": (INF, {"a1": 3, "a2": 3, "a3": 5})},
        {"a2": ["p"], "a1": ["q"]},
    )
    assert envy_gap(inst, EMPTY, "a3", "a1") == 1
    v = solve_unbounded(inst)
    assert v.feasible and is_envy_free(inst, v.extension)


def test_zero_class_envy_is_infeasible():
    inst = pool_only({"a1": (0, 0), "a2": (1, 2)}, {"a2": ["p"]}, {"p": {"a1": 1}})
    v = solve_unbounded(inst)
    assert not v.feasible and v.witness["kind"] == "zero-class-envy"
    assert verify_witness(inst, v.witness)


def test_mode_mismatch():
    inst = make({}, {"r": (3, {"a1": 1, "a2": 1})})
    with pytest.raises(ModeMismatch, match="mode mismatch"):
        solve_unbounded(inst)
    with pytest.raises(ModeMismatch):
        solve_unbounded(pool_only({"a1": (1,), "a2": (1,)}).replace(budget=4))


def test_counts_beyond_64_bits():
    # consecutive Fibonacci numbers: Bezout coefficients are as large as the inputs
    f, g = 1, 1
    while g < 10**17:
        f, g = g, f + g
    inst = pool_only(
        {"a1": (f, g), "a2": (f, g)},
        {"a2": ["p"]},
        {"p": {"a1": 10**18, "a2": 4 * 10**18}},
    )
    v = solve_unbounded(inst)
    assert v.feasible
    assert max(n for row in v.extension.counts.values() for n in row.values()) > 2**64


@given(instances(max_agents=3, max_pool=2, max_value=4))
def test_agrees_with_bounded_oracle(inst):
    """Oracle feasibility at small k implies our verdict is feasible; our infeasible verdicts must stay infeasible."""
    v = solve_unbounded(inst)
    o = oracle_bounded(inst, 5)
    if o.feasible:
        assert v.feasible
    if not v.feasible:
        assert verify_witness(inst, v.witness)


def _scale_all(inst, agent, c):
    from addgoods.model import PoolItem

    return inst.replace(
        initial_items={i: {a: (x * c if a == agent else x) for a, x in vs.items()} for i, vs in inst.initial_items.items()},
        pool_items={
            r: PoolItem(p.supply, {a: (x * c if a == agent else x) for a, x in p.values.items()})
            for r, p in inst.pool_items.items()
        },
    )


@given(instances(max_agents=4, max_pool=3, max_value=8), st.sampled_from([2, 3, 5]), st.integers(0, 3))
def test_scaling_one_agents_whole_valuation(inst, c, idx):
    agent = inst.agents[idx % len(inst.agents)]
    assert solve_unbounded(_scale_all(inst, agent, c)).feasible == solve_unbounded(inst).feasible


def test_scaling_pool_values_alone_can_change_the_verdict():
    # a1 needs net >= 2 copies of r; after doubling a2's pool values a2 tolerates at most 1.
    inst = pool_only({"a1": (2,), "a2": (2,)}, {"a2": ["p"]}, {"p": {"a1": 3, "a2": 4}})
    scaled = pool_only({"a1": (2,), "a2": (4,)}, {"a2": ["p"]}, {"p": {"a1": 3, "a2": 4}})
    assert solve_unbounded(inst).feasible
    assert not solve_unbounded(scaled).feasible
    assert not oracle_bounded(scaled, 8).feasible
