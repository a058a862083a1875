import itertools

import pytest
from hypothesis import given

from conftest import collections
from transversal.errors import BudgetExceededError, ShapeError
from transversal.model import Digraph, DigraphCollection, validate_certificate
from transversal.oracle import oracle_transversal_hamilton_cycle


def naive_count(dc: DigraphCollection) -> int:
    """Every vertex order starting at 0 times every color permutation."""
    n = dc.n
    total = 0
    for rest in itertools.permutations(range(1, n)):
        cyc = (0,) + rest
        edges = [(cyc[k], cyc[(k + 1) % n]) for k in range(n)]
        for perm in itertools.permutations(range(n)):
            if all(dc.digraphs[c].has_edge(u, v) for (u, v), c in zip(edges, perm)):
                total += 1
    return total


def test_triangle_count_is_twelve():
    dc = DigraphCollection.uniform(Digraph.complete(3), 3)
    assert oracle_transversal_hamilton_cycle(dc).count == 12


def test_digon_count_is_two():
    dc = DigraphCollection.uniform(Digraph.complete(2), 2)
    res = oracle_transversal_hamilton_cycle(dc)
    assert res.exists and res.count == 2 and res.hamilton_cycles == 1


def test_disconnected_union_has_no_cycle():
    d = Digraph.from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)])
    res = oracle_transversal_hamilton_cycle(DigraphCollection.uniform(d, 4))
    assert not res.exists and res.count == 0 and res.certificate is None


def test_refuses_above_bound():
    with pytest.raises(BudgetExceededError):
        oracle_transversal_hamilton_cycle(DigraphCollection.uniform(Digraph.complete(10), 10))


def test_shape_error():
    with pytest.raises(ShapeError):
        oracle_transversal_hamilton_cycle(DigraphCollection.uniform(Digraph.complete(3), 2))


def test_complete_collection_count_formula():
    # (n-1)! directed Hamilton cycles, each colorable in n! ways
    dc = DigraphCollection.uniform(Digraph.complete(5), 5)
    assert oracle_transversal_hamilton_cycle(dc).count == 24 * 120


@given(collections(2, 5))
def test_count_matches_naive_enumeration(dc):
    res = oracle_transversal_hamilton_cycle(dc)
    assert res.count == naive_count(dc)
    assert res.exists == (res.count > 0)
    if res.exists:
        assert validate_certificate(dc, res.certificate).ok
