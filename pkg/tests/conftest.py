from __future__ import annotations

import random

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from transversal.model import BipartiteCollection, Digraph, DigraphCollection

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_collection(n: int, m: int, p: float, seed: int) -> DigraphCollection:
    rng = random.Random(seed)
    digraphs = []
    for _ in range(m):
        edges = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]
        digraphs.append(Digraph.from_edges(n, edges))
    return DigraphCollection(n, tuple(digraphs))


def random_bipartite(n: int, m: int, p: float, seed: int) -> BipartiteCollection:
    rng = random.Random(seed)
    return BipartiteCollection.from_edge_lists(
        n, [[(u, v) for u in range(n) for v in range(n) if rng.random() < p] for _ in range(m)]
    )


@st.composite
def collections(draw, min_n: int = 2, max_n: int = 6, square: bool = True) -> DigraphCollection:
    n = draw(st.integers(min_n, max_n))
    m = n if square else draw(st.integers(1, n + 1))
    p = draw(st.sampled_from([0.2, 0.4, 0.6, 0.8]))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_collection(n, m, p, seed)


@st.composite
def bipartite_collections(draw, min_n: int = 1, max_n: int = 5) -> BipartiteCollection:
    n = draw(st.integers(min_n, max_n))
    p = draw(st.sampled_from([0.3, 0.5, 0.7]))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_bipartite(n, n, p, seed)


ACCEPTANCE: list[str] = []


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
