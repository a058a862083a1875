import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from transversal.absorption import (
    AbsorberKind,
    AbsorberWitness,
    AbsorbingCycleParams,
    absorb,
    absorb_edge,
    enumerate_absorbers,
    is_absorbing_edge,
    is_absorbing_path,
    max_disjoint_windows,
    verify_absorbing_cycle,
    verify_absorbing_matching,
)
from transversal.errors import InvalidArgumentError, InvalidWitnessError
from transversal.model import (
    BipartiteCollection,
    CertKind,
    Digraph,
    DigraphCollection,
    RainbowCertificate,
    validate_certificate,
    validate_matching,
)

F = Fraction
SEG, SEG_COLS = (0, 1, 2, 3), (0, 1, 2)


def collection(n: int, m: int, edges: dict[int, set]) -> DigraphCollection:
    return DigraphCollection(n, tuple(Digraph.from_edges(n, edges.get(c, ())) for c in range(m)))


def segment_edges() -> dict[int, set]:
    return {0: {(0, 1)}, 1: {(1, 2)}, 2: {(2, 3)}}


def type_one(drop: bool = False) -> DigraphCollection:
    e = segment_edges()
    e[3] = {(1, 4)}
    if not drop:
        e[1].add((5, 2))
    return collection(6, 4, e)


def test_type_one_by_construction():
    assert is_absorbing_path(type_one(), "type-I", SEG, SEG_COLS, 3, 4, 5)
    assert not is_absorbing_path(type_one(drop=True), "type-I", SEG, SEG_COLS, 3, 4, 5)
    assert not is_absorbing_path(type_one(), "type-II", SEG, SEG_COLS, 3, 4, 5)


def test_type_two_by_construction():
    e = segment_edges()
    e[3] = {(4, 2)}
    e[1].add((1, 5))
    dc = collection(6, 4, e)
    assert is_absorbing_path(dc, "type-II", SEG, SEG_COLS, 3, 4, 5)
    assert not is_absorbing_path(dc, "type-I", SEG, SEG_COLS, 3, 4, 5)


def test_precondition_violations_raise():
    dc = type_one()
    with pytest.raises(InvalidWitnessError):
        is_absorbing_path(dc, "type-I", SEG, (0, 0, 2), 3, 4, 5)
    with pytest.raises(InvalidWitnessError):
        is_absorbing_path(dc, "type-I", SEG, SEG_COLS, 3, 2, 5)
    with pytest.raises(InvalidWitnessError):
        is_absorbing_path(dc, "type-I", SEG, SEG_COLS, 1, 4, 5)
    with pytest.raises(InvalidWitnessError):
        is_absorbing_path(dc, "type-I", (0, 2, 1, 3), SEG_COLS, 3, 4, 5)


def cycle_cert(order, cols) -> RainbowCertificate:
    return RainbowCertificate.from_cycle(list(order), list(cols), CertKind.CYCLE)


def engineered_eight():
    e = {i: {(i, (i + 1) % 8)} for i in range(8)}
    e[8] = {(1, 8), (5, 8)}
    e[1].add((9, 2))
    e[5].add((9, 6))
    return collection(10, 9, e), cycle_cert(range(8), range(8))


def test_engineered_cycle_has_two_disjoint_absorbers():
    dc, cyc = engineered_eight()
    scan = enumerate_absorbers(dc, cyc, 8, 8, 9, "type-I")
    assert [w.position for w in scan.witnesses] == [0, 4]
    assert scan.disjoint_count == 2


def test_no_absorbers():
    dc, cyc = engineered_eight()
    scan = enumerate_absorbers(dc, cyc, 8, 9, 8, "type-I")
    assert scan.witnesses == () and scan.disjoint_count == 0


@pytest.mark.parametrize("t", range(4, 14))
def test_complete_collection_disjoint_count(t):
    n = t + 2
    dc = DigraphCollection.uniform(Digraph.complete(n), n)
    scan = enumerate_absorbers(dc, cycle_cert(range(t), range(t)), t, t, t + 1, "type-I")
    assert len(scan.witnesses) == t
    assert scan.disjoint_count == t // 4


def brute_disjoint(starts, t) -> int:
    for k in range(len(starts), 0, -1):
        for combo in itertools.combinations(starts, k):
            cells = [(s + j) % t for s in combo for j in range(4)]
            if len(cells) == len(set(cells)):
                return k
    return 0


@given(st.integers(4, 10), st.lists(st.integers(0, 9), max_size=10))
def test_max_disjoint_windows_exact(t, starts):
    starts = sorted({s % t for s in starts})
    chosen = max_disjoint_windows(starts, t)
    assert len(chosen) == brute_disjoint(starts, t)
    cells = [(s + j) % t for s in chosen for j in range(4)]
    assert len(cells) == len(set(cells))


def planted_cycle(n: int, t: int, p: float, seed: int):
    rng = random.Random(seed)
    order = rng.sample(range(n), t)
    cols = rng.sample(range(n), t)
    edges = {c: {(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p} for c in range(n)}
    for k in range(t):
        edges[cols[k]].add((order[k], order[(k + 1) % t]))
    return collection(n, n, edges), cycle_cert(order, cols), rng


@given(st.integers(6, 12), st.sampled_from([0.3, 0.6]), st.integers(0, 10**6),
       st.sampled_from(["type-I", "type-II"]))
def test_enumeration_matches_brute_force(n, p, seed, kind):
    t = n - 2
    dc, cyc, rng = planted_cycle(n, t, p, seed)
    order = cyc.vertex_order()
    off = [x for x in range(n) if x not in order]
    c = rng.choice([x for x in range(n) if x not in cyc.colors])
    v, u = off[0], off[-1]
    scan = enumerate_absorbers(dc, cyc, c, v, u, kind)
    cols = list(cyc.colors)
    expected = [i for i in range(t)
                if is_absorbing_path(dc, kind, [order[(i + k) % t] for k in range(4)],
                                     [cols[(i + k) % t] for k in range(3)], c, v, u)]
    assert [w.position for w in scan.witnesses] == expected
    assert scan.disjoint_count == brute_disjoint(expected, t)


def _complete(n: int) -> DigraphCollection:
    return DigraphCollection.uniform(Digraph.complete(n), n)


@pytest.mark.parametrize("kind", ["type-I", "type-II"])
def test_absorb_pair_grows_cycle_locally(kind):
    n = 12
    dc = _complete(n)
    cyc = cycle_cert(range(6), range(6))
    v, u = 6, 9
    payload_vs = [v, 7, 8, u] if kind == "type-I" else [u, 8, 7, v]
    payload = RainbowCertificate.from_path(payload_vs, [6, 7, 8], CertKind.PATH)
    w = enumerate_absorbers(dc, cyc, 9, v, u, kind).witnesses[2]
    out = absorb(dc, cyc, w, payload)
    assert validate_certificate(dc, out).ok
    assert len(out.vertex_order()) == 6 + 2 + 2
    assert set(out.colors) == set(range(6)) | {6, 7, 8, 9}
    old = dict(zip(cyc.edges, cyc.colors))
    new = dict(zip(out.edges, out.colors))
    removed = (w.segment[1], w.segment[2])
    assert all(new[e] == col for e, col in old.items() if e != removed)
    assert removed not in new


def test_absorb_single_vertex():
    dc = _complete(8)
    cyc = cycle_cert(range(5), range(5))
    w = enumerate_absorbers(dc, cyc, 5, 6, 6, "type-I").witnesses[0]
    out = absorb(dc, cyc, w)
    assert sorted(out.vertex_order()) == [0, 1, 2, 3, 4, 6]
    assert validate_certificate(dc, out).ok


def test_absorb_rejects_bad_payload():
    dc = _complete(10)
    cyc = cycle_cert(range(5), range(5))
    w = enumerate_absorbers(dc, cyc, 9, 5, 7, "type-I").witnesses[0]
    backwards = RainbowCertificate.from_path([7, 6, 5], [6, 7], CertKind.PATH)
    with pytest.raises(InvalidArgumentError):
        absorb(dc, cyc, w, backwards)
    clash = RainbowCertificate.from_path([5, 6, 7], [0, 7], CertKind.PATH)
    with pytest.raises(InvalidArgumentError):
        absorb(dc, cyc, w, clash)
    with pytest.raises(InvalidArgumentError):
        absorb(dc, cyc, w)


def test_successive_absorptions():
    n = 16
    dc = _complete(n)
    cyc = cycle_cert(range(6), range(6))
    free_v, free_c = list(range(6, n)), list(range(6, n))
    for _ in range(5):
        x, c = free_v.pop(0), free_c.pop(0)
        w = enumerate_absorbers(dc, cyc, c, x, x, "type-II").witnesses[0]
        cyc = absorb(dc, cyc, w)
        assert validate_certificate(dc, cyc).ok
    assert len(cyc.vertex_order()) == 11


def test_witness_not_on_cycle_rejected():
    dc = _complete(8)
    cyc = cycle_cert(range(5), range(5))
    fake = AbsorberWitness("type-I", (4, 3, 2, 1), (3, 2, 1), 5, 6, 6)
    with pytest.raises(InvalidWitnessError):
        absorb(dc, cyc, fake)


def test_verify_absorbing_cycle_on_complete_collection():
    n = 16
    dc = _complete(n)
    cyc = cycle_cert(range(8), range(8))
    params = AbsorbingCycleParams(F(1, 4), F(0), F(1, 2), F(1, 8))
    rep = verify_absorbing_cycle(dc, cyc, range(8, 16), params, workers=2)
    assert rep.ok and all(x == 0 for x in rep.pair_failures.values())
    strict = AbsorbingCycleParams(F(1, 4), F(0), F(1, 2), F(1))
    assert not verify_absorbing_cycle(dc, cyc, range(8, 16), strict).ok
    with pytest.raises(InvalidArgumentError):
        verify_absorbing_cycle(dc, cyc, [0], params)


def test_verify_absorbing_cycle_size_and_length_clauses():
    dc = _complete(12)
    cyc = cycle_cert(range(8), range(8))
    rep = verify_absorbing_cycle(dc, cyc, [8], AbsorbingCycleParams(F(1, 2), F(1), F(1, 2), F(0)))
    assert not rep.size_ok and not rep.length_ok


def test_params_range():
    with pytest.raises(InvalidArgumentError):
        AbsorbingCycleParams(F(2), F(0), F(0), F(0))


def complete_bipartite(n: int, m: int) -> BipartiteCollection:
    return BipartiteCollection.from_edge_lists(n, [[(u, v) for u in range(n) for v in range(n)]] * m)


def test_absorbing_edge_examples():
    bc = BipartiteCollection.from_edge_lists(3, [[(0, 0), (1, 0)], [(0, 1)]])
    assert is_absorbing_edge(bc, (0, 0), 0, 1, 1, 1)
    assert not is_absorbing_edge(bc, (0, 0), 0, 1, 2, 1)
    with pytest.raises(InvalidWitnessError):
        is_absorbing_edge(bc, (0, 0), 0, 0, 1, 1)
    out = absorb_edge(bc, RainbowCertificate(((0, 0),), (0,), CertKind.MATCHING), (0, 0), 1, 1, 1)
    assert out.edges == ((0, 1), (1, 0)) and out.colors == (1, 0)
    assert validate_matching(bc, out).ok


@given(st.integers(4, 8), st.integers(0, 10**6))
def test_bipartite_absorptions_stay_valid(n, seed):
    rng = random.Random(seed)
    bc = BipartiteCollection.from_edge_lists(
        n, [[(u, v) for u in range(n) for v in range(n) if rng.random() < 0.7] for _ in range(n)])
    k = n // 2
    matching = None
    for _ in range(50):
        ls, rs, cs = rng.sample(range(n), k), rng.sample(range(n), k), rng.sample(range(n), k)
        if all(bc.has_edge(c, u, v) for u, v, c in zip(ls, rs, cs)):
            matching = RainbowCertificate(tuple(zip(ls, rs)), tuple(cs), CertKind.MATCHING)
            break
    if matching is None:
        return
    u = next(x for x in range(n) if x not in {a for a, _ in matching.edges})
    v = next(x for x in range(n) if x not in {b for _, b in matching.edges})
    c = next(x for x in range(n) if x not in matching.colors)
    for edge, col in zip(matching.edges, matching.colors):
        if is_absorbing_edge(bc, edge, col, c, u, v):
            out = absorb_edge(bc, matching, edge, c, u, v)
            assert validate_matching(bc, out).ok and len(out.edges) == k + 1


def test_verify_absorbing_matching():
    n = 8
    bc = complete_bipartite(n, n)
    matching = RainbowCertificate(tuple((i, i) for i in range(4)), tuple(range(4)), CertKind.MATCHING)
    ok = verify_absorbing_matching(bc, matching, range(4, 8), AbsorbingCycleParams(F(1, 2), F(0), F(1, 2), F(1, 2)))
    assert ok.ok
    bad = verify_absorbing_matching(bc, matching, range(4, 8), AbsorbingCycleParams(F(1, 2), F(0), F(1, 2), F(1)))
    assert not bad.ok and bad.examples
