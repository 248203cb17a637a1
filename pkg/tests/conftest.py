import pytest
from hypothesis import settings, strategies as st

from addgoods.model import INF, Instance, PoolItem

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# criterion number -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")


def make(values, pool, alloc=None, budget=INF, agents=None):
    """Shorthand: ``values`` is item -> {agent: v}; ``pool`` is item -> (supply, {agent: v})."""
    if agents is None:
        seen = []
        for vs in list(values.values()) + [v for _, v in pool.values()]:
            seen += [a for a in vs if a not in seen]
        for a in (alloc or {}):
            if a not in seen:
                seen.append(a)
        agents = sorted(seen)
    return Instance(
        tuple(agents),
        values,
        {r: PoolItem(s, v) for r, (s, v) in pool.items()},
        alloc or {},
        budget,
    )


@pytest.fixture
def intro():
    """Two identical agents; a2 holds an item of value one; unlimited copies of a value-two item."""
    return make({"p": {"a1": 1, "a2": 1}}, {"r": (INF, {"a1": 2, "a2": 2})}, {"a2": ["p"]})


@st.composite
def instances(draw, max_agents=4, max_pool=3, max_value=6, supplies=("inf",), budget=INF, min_pool=1):
    n = draw(st.integers(2, max_agents))
    m = draw(st.integers(min_pool, max_pool))
    agents = [f"a{i}" for i in range(1, n + 1)]
    n_init = draw(st.integers(0, n + 1))
    initial = {
        f"p{j}": {a: draw(st.integers(0, max_value)) for a in agents} for j in range(n_init)
    }
    owners = [draw(st.sampled_from(agents + [None])) for _ in range(n_init)]
    alloc = {a: [f"p{j}" for j, o in enumerate(owners) if o == a] for a in agents}
    pool = {}
    for j in range(m):
        kind = draw(st.sampled_from(supplies))
        supply = INF if kind == "inf" else draw(st.integers(0, 3))
        pool[f"r{j}"] = PoolItem(supply, {a: draw(st.integers(0, max_value)) for a in agents})
    return Instance(tuple(agents), initial, pool, alloc, budget)
