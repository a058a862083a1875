import pytest
from hypothesis import given

from conftest import collections
from transversal.errors import InvalidArgumentError
from transversal.model import (
    BipartiteCollection,
    CertKind,
    Digraph,
    DigraphCollection,
    RainbowCertificate,
    characteristic_bipartite,
    collection_semi_degree,
    color_list,
    restricted_collection,
    semi_degree,
    validate_certificate,
)

TWO_DIGONS = Digraph.from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)])


def test_semi_degree_examples():
    assert semi_degree(Digraph.complete(5)) == 4
    assert semi_degree(Digraph.from_edges(3, [(0, 1), (1, 0)])) == 0
    assert semi_degree(TWO_DIGONS) == 1
    assert semi_degree(Digraph.empty(1)) == 0


def test_collection_semi_degree_examples():
    assert collection_semi_degree(DigraphCollection.uniform(Digraph.complete(3), 3)) == 2
    source = Digraph.from_edges(3, [(0, 1), (0, 2), (1, 2), (2, 1)])
    assert collection_semi_degree(DigraphCollection((3), (Digraph.complete(3), source))) == 0
    assert collection_semi_degree(DigraphCollection.uniform(TWO_DIGONS, 4)) == 1


def test_color_list_examples():
    d = Digraph.from_edges(3, [(0, 1)])
    dc = DigraphCollection(3, (d, Digraph.empty(3), d))
    assert color_list(dc, 0, 1).colors == {0, 2}
    assert color_list(dc, 1, 0).colors == frozenset()
    full = DigraphCollection.uniform(Digraph.complete(3), 4)
    assert color_list(full, 2, 0).colors == {0, 1, 2, 3}
    with pytest.raises(InvalidArgumentError):
        color_list(dc, 1, 1)


def test_loops_and_bad_neighbours_rejected():
    with pytest.raises(InvalidArgumentError):
        Digraph.from_edges(2, [(0, 0)])
    with pytest.raises(InvalidArgumentError):
        Digraph(2, (0b100, 0))
    with pytest.raises(InvalidArgumentError):
        DigraphCollection(3, ())


def test_validate_certificate_examples():
    dc = DigraphCollection.uniform(Digraph.complete(2), 2)
    good = RainbowCertificate.from_cycle([0, 1], [0, 1])
    assert validate_certificate(dc, good).ok
    rep = validate_certificate(dc, RainbowCertificate.from_cycle([0, 1], [0, 0]))
    assert not rep.ok and any(v.startswith("injectivity") for v in rep.violations)
    dc3 = DigraphCollection.uniform(Digraph.complete(3), 3)
    skip = RainbowCertificate.from_cycle([0, 1], [0, 1])
    rep = validate_certificate(dc3, skip)
    assert any(v.startswith("shape") for v in rep.violations)


def test_validate_reports_membership_and_bijection():
    d = Digraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    dc = DigraphCollection(3, (d, d, Digraph.empty(3)))
    rep = validate_certificate(dc, RainbowCertificate.from_cycle([0, 1, 2], [0, 1, 2]))
    assert any(v.startswith("membership") for v in rep.violations)
    dc4 = DigraphCollection.uniform(d, 4)
    rep = validate_certificate(dc4, RainbowCertificate.from_cycle([0, 1, 2], [0, 1, 2]))
    assert any(v.startswith("bijection") for v in rep.violations)
    assert validate_certificate(dc4, RainbowCertificate.from_cycle([0, 1, 2], [0, 1, 2], CertKind.CYCLE)).ok


def test_cycle_cover_shape():
    dc = DigraphCollection.uniform(TWO_DIGONS, 4)
    cover = RainbowCertificate(((0, 1), (1, 0), (2, 3), (3, 2)), (0, 1, 2, 3), CertKind.CYCLE_COVER)
    assert validate_certificate(dc, cover).ok
    broken = RainbowCertificate(((0, 1), (1, 0), (2, 3)), (0, 1, 2), CertKind.CYCLE_COVER)
    assert not validate_certificate(dc, broken).ok


def test_restricted_collection_examples():
    dc = DigraphCollection.uniform(Digraph.complete(4), 3)
    sub, vmap, cmap = restricted_collection(dc, range(4), range(3))
    assert sub.digraphs == dc.digraphs and vmap == {v: v for v in range(4)}
    single, _, _ = restricted_collection(dc, [2], range(3))
    assert all(d.num_edges() == 0 for d in single.digraphs)
    fewer, _, cm = restricted_collection(dc, range(4), [0, 2])
    assert fewer.m == 2 and cm == {0: 0, 2: 1}
    with pytest.raises(InvalidArgumentError):
        restricted_collection(dc, [], [0])


def test_characteristic_bipartite_examples():
    digon = DigraphCollection.uniform(Digraph.complete(2), 1)
    assert set(characteristic_bipartite(digon).edges(0)) == {(0, 1), (1, 0)}
    assert not list(characteristic_bipartite(DigraphCollection.uniform(Digraph.empty(3), 1)).edges(0))
    kb = characteristic_bipartite(DigraphCollection.uniform(Digraph.complete(4), 1))
    assert set(kb.edges(0)) == {(u, v) for u in range(4) for v in range(4) if u != v}


@given(collections(1, 7, square=False))
def test_transpose_consistency(dc):
    for d in dc.digraphs:
        rebuilt = Digraph.from_edges(d.n, d.edges())
        assert rebuilt.in_adj == d.in_adj
        for u, v in d.edges():
            assert d.in_adj[v] >> u & 1


@given(collections(1, 7, square=False))
def test_characteristic_bipartite_preserves_degrees(dc):
    bc = characteristic_bipartite(dc)
    for c, d in enumerate(dc.digraphs):
        for v in range(dc.n):
            assert bc.left_degree(c, v) == d.out_degree(v)
            assert bc.right_degree(c, v) == d.in_degree(v)


def test_bipartite_collection_rejects_out_of_range():
    with pytest.raises(InvalidArgumentError):
        BipartiteCollection.from_edge_lists(2, [[(0, 2)]])
