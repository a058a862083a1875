import itertools
import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import bipartite_collections, collections, random_collection
from transversal.errors import InvalidArgumentError, ShapeError
from transversal.model import (
    BipartiteCollection,
    CertKind,
    Digraph,
    DigraphCollection,
    characteristic_bipartite,
    validate_certificate,
    validate_matching,
)
from transversal.oracle import oracle_transversal_hamilton_cycle
from transversal.solvers import (
    SearchConfig,
    Status,
    find_transversal_hamilton_cycle,
    find_transversal_hamilton_path,
    find_transversal_perfect_matching,
    max_rainbow_matching,
    rainbow_cycle_cover,
)

TWO_DIGONS = Digraph.from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)])


def _bipartite_complete(a: int, b: int) -> Digraph:
    left, right = range(a), range(a, a + b)
    return Digraph.from_edges(a + b, [e for x in left for y in right for e in ((x, y), (y, x))])


def _stripped(outcome) -> str:
    d = outcome.to_dict()
    del d["stats"]["wall_time_s"]
    return json.dumps(d, sort_keys=True)


def test_digon_found():
    dc = DigraphCollection.uniform(Digraph.complete(2), 2)
    out = find_transversal_hamilton_cycle(dc)
    assert out.status is Status.FOUND
    assert out.certificate.vertex_order() == [0, 1]
    assert sorted(out.certificate.colors) == [0, 1]


def test_disconnected_none():
    out = find_transversal_hamilton_cycle(DigraphCollection.uniform(TWO_DIGONS, 4))
    assert out.status is Status.NONE and out.exhausted


def test_unbalanced_bipartite_none():
    out = find_transversal_hamilton_cycle(DigraphCollection.uniform(_bipartite_complete(3, 2), 5))
    assert out.status is Status.NONE


def test_hamilton_cycle_errors():
    with pytest.raises(ShapeError):
        find_transversal_hamilton_cycle(DigraphCollection.uniform(Digraph.complete(3), 2))
    with pytest.raises(InvalidArgumentError):
        find_transversal_hamilton_cycle(DigraphCollection.uniform(Digraph.empty(1), 1))


def test_hamilton_path_examples():
    one = DigraphCollection(2, (Digraph.from_edges(2, [(0, 1)]),))
    assert find_transversal_hamilton_path(one).status is Status.FOUND
    empty = DigraphCollection.uniform(Digraph.empty(3), 2)
    assert find_transversal_hamilton_path(empty).status is Status.NONE
    full = DigraphCollection.uniform(Digraph.complete(3), 2)
    out = find_transversal_hamilton_path(full)
    assert out.found and validate_certificate(full, out.certificate).ok
    with pytest.raises(ShapeError):
        find_transversal_hamilton_path(DigraphCollection.uniform(Digraph.complete(3), 3))


def test_perfect_matching_examples():
    full = BipartiteCollection.from_edge_lists(2, [[(0, 0), (0, 1), (1, 0), (1, 1)]] * 2)
    out = find_transversal_perfect_matching(full)
    assert out.found and validate_matching(full, out.certificate).ok
    starved = BipartiteCollection.from_edge_lists(2, [[(0, 0)], [(0, 1)]])
    assert find_transversal_perfect_matching(starved).status is Status.NONE
    with pytest.raises(ShapeError):
        find_transversal_perfect_matching(BipartiteCollection.from_edge_lists(2, [[(0, 0)]]))


def test_cycle_cover_examples():
    dc = DigraphCollection.uniform(TWO_DIGONS, 4)
    out = rainbow_cycle_cover(dc)
    assert out.found and out.certificate.kind is CertKind.CYCLE_COVER
    assert validate_certificate(dc, out.certificate).ok
    assert rainbow_cycle_cover(DigraphCollection.uniform(Digraph.empty(3), 3)).status is Status.NONE


def test_max_rainbow_matching_examples():
    one = BipartiteCollection.from_edge_lists(1, [[(0, 0)]])
    assert max_rainbow_matching(one)[0] == 1
    full = BipartiteCollection.from_edge_lists(3, [[(u, v) for u in range(3) for v in range(3)]] * 3)
    assert max_rainbow_matching(full)[0] == 3
    shared = BipartiteCollection.from_edge_lists(3, [[(1, 2)]] * 3)
    size, cert = max_rainbow_matching(shared)
    assert size == 1 and cert.edges == ((1, 2),)


def _brute_max_matching(bc: BipartiteCollection) -> int:
    edges = [(u, v, c) for c in range(bc.m) for u, v in bc.edges(c)]
    best = 0
    for k in range(1, min(bc.n, bc.m) + 1):
        for combo in itertools.combinations(edges, k):
            us, vs, cs = zip(*combo)
            if len(set(us)) == len(set(vs)) == len(set(cs)) == k:
                best = k
                break
        if best < k:
            break
    return best


@given(bipartite_collections(1, 4))
def test_max_rainbow_matching_brute_force(bc):
    size, cert = max_rainbow_matching(bc)
    assert size == _brute_max_matching(bc)
    assert validate_matching(bc, cert).ok


@given(collections(2, 6))
def test_oracle_equivalence(dc):
    out = find_transversal_hamilton_cycle(dc)
    assert out.status is not Status.TIMEOUT
    assert out.found == oracle_transversal_hamilton_cycle(dc).exists
    if out.found:
        assert validate_certificate(dc, out.certificate).ok
    else:
        assert out.exhausted


@given(collections(2, 6))
def test_cycle_cover_iff_transversal_matching(dc):
    cover = rainbow_cycle_cover(dc)
    pm = find_transversal_perfect_matching(characteristic_bipartite(dc))
    assert cover.found == pm.found


@given(collections(2, 5), st.integers(0, 2**31))
def test_adding_an_edge_keeps_found(dc, seed):
    rng = random.Random(seed)
    c = rng.randrange(dc.m)
    u, v = rng.sample(range(dc.n), 2)
    graphs = list(dc.digraphs)
    graphs[c] = Digraph.from_edges(dc.n, set(graphs[c].edges()) | {(u, v)})
    bigger = DigraphCollection(dc.n, tuple(graphs))
    before = oracle_transversal_hamilton_cycle(dc).exists
    after_oracle = oracle_transversal_hamilton_cycle(bigger).exists
    after = find_transversal_hamilton_cycle(bigger).found
    assert after == after_oracle
    assert not before or after


def test_found_implies_path_after_dropping_an_edge():
    for seed in range(30):
        dc = random_collection(6, 6, 0.5, seed)
        out = find_transversal_hamilton_cycle(dc)
        if not out.found:
            continue
        cert = out.certificate
        drop = cert.colors[-1]
        keep = tuple(d for c, d in enumerate(dc.digraphs) if c != drop)
        sub = DigraphCollection(dc.n, keep)
        assert find_transversal_hamilton_path(sub).found


def test_determinism_with_fixed_seed():
    for seed in range(10):
        dc = random_collection(8, 8, 0.45, seed)
        cfg = SearchConfig(seed=7)
        assert _stripped(find_transversal_hamilton_cycle(dc, cfg)) == _stripped(find_transversal_hamilton_cycle(dc, cfg))


def test_parallel_agrees_on_existence():
    for seed in range(6):
        dc = random_collection(8, 8, 0.4, seed)
        serial = find_transversal_hamilton_cycle(dc)
        par = find_transversal_hamilton_cycle(dc, SearchConfig(parallel=True, workers=2))
        assert serial.found == par.found
        if par.found:
            assert validate_certificate(dc, par.certificate).ok


def test_node_budget_gives_timeout_not_none():
    dc = DigraphCollection.uniform(_bipartite_complete(5, 4), 9)
    out = find_transversal_hamilton_cycle(dc, SearchConfig(node_budget=5))
    assert out.status is Status.TIMEOUT and not out.exhausted


def test_budgets_must_be_positive():
    with pytest.raises(InvalidArgumentError):
        SearchConfig(time_budget=0)
