"""End-to-end acceptance gates, one PASS/FAIL line per criterion."""

import itertools
import json
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_collection, record_acceptance
from transversal.absorption import (
    absorb,
    absorb_edge,
    enumerate_absorbers,
    is_absorbing_edge,
    is_absorbing_path,
)
from transversal.experiments import strip_timing, sweep_bradshaw, sweep_threshold
from transversal.extremal import (
    DEFAULT_ZETA_GRID,
    classify_extremal,
    gen_extremal,
    gen_tight_witness,
    is_eps_nice,
    niceness_set_size,
    partition_agreement,
    verify_partition,
)
from transversal.model import (
    BipartiteCollection,
    CertKind,
    Digraph,
    DigraphCollection,
    RainbowCertificate,
    collection_semi_degree,
    validate_certificate,
    validate_matching,
)
from transversal.oracle import oracle_transversal_hamilton_cycle
from transversal.regularity import CollectionSlice, build_auxiliary_4graph, check_regular_slice, slice_density
from transversal.solvers import SearchConfig, Status, find_transversal_hamilton_cycle

F = Fraction
SEED = 20240611


# ---------------------------------------------------------------------------
# corpus shared by criteria 1, 2 and 10


def structured_corpus() -> list[DigraphCollection]:
    out = []
    for n in range(2, 7):
        out.append(DigraphCollection.uniform(Digraph.complete(n), n))
        out.append(DigraphCollection.uniform(Digraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)]), n))
    for n in range(4, 7):
        out.append(gen_tight_witness(n))
    out.append(DigraphCollection.uniform(Digraph.empty(3), 3))
    out.append(DigraphCollection.uniform(Digraph.from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)]), 4))
    h = Digraph.from_edges(5, [(x, y) for x in range(3) for y in range(3, 5)] +
                           [(y, x) for x in range(3) for y in range(3, 5)])
    out.append(DigraphCollection.uniform(h, 5))
    # one cycle per color on a rotating vertex order
    for n in (4, 5, 6):
        out.append(DigraphCollection(n, tuple(Digraph.from_edges(n, [((i + c) % n, (i + c + 1) % n) for i in range(n)])
                                              for c in range(n))))
    # one color empty, others complete
    for n in (3, 5):
        out.append(DigraphCollection(n, (Digraph.empty(n),) + (Digraph.complete(n),) * (n - 1)))
    return out


def _rand(rng: random.Random) -> DigraphCollection:
    n = rng.randint(2, 6)
    return random_collection(n, n, rng.choice([0.2, 0.35, 0.5, 0.65, 0.8]), rng.getrandbits(32))


def _corpus_record(dc: DigraphCollection) -> dict:
    out = find_transversal_hamilton_cycle(dc)
    d = out.to_dict()
    d["oracle"] = oracle_transversal_hamilton_cycle(dc).exists
    return d


def corpus_report(corpus: list[DigraphCollection], workers: int) -> str:
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            recs = list(pool.map(_corpus_record, corpus, chunksize=8))
    else:
        recs = [_corpus_record(dc) for dc in corpus]
    return json.dumps(strip_timing(recs), sort_keys=True)


def test_c01_oracle_equivalence():
    t0 = time.perf_counter()
    corpus = [_rand(random.Random(SEED + i)) for i in range(200)] + structured_corpus()
    mismatches = 0
    for dc in corpus:
        out = find_transversal_hamilton_cycle(dc)
        if out.status is Status.TIMEOUT or out.found != oracle_transversal_hamilton_cycle(dc).exists:
            mismatches += 1
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and dt < 60 and len(corpus) >= 220
    record_acceptance(1, ok, f"{len(corpus)} instances, {mismatches} mismatches, {dt:.1f}s")
    assert ok


def test_c02_certificate_soundness():
    rng = random.Random(SEED)
    failures = found = 0
    for _ in range(10_000):
        n = rng.randint(2, 9)
        dc = random_collection(n, n, rng.choice([0.3, 0.5, 0.7, 0.9]), rng.getrandbits(32))
        out = find_transversal_hamilton_cycle(dc, SearchConfig(time_budget=5, seed=rng.randint(0, 3)))
        if out.found:
            found += 1
            if not validate_certificate(dc, out.certificate).ok:
                failures += 1
    ok = failures == 0
    record_acceptance(2, ok, f"10000 runs, {found} certificates, {failures} invalid")
    assert ok


def test_c03_threshold_tightness():
    t0 = time.perf_counter()
    bad = []
    for n in range(4, 9):
        dc = gen_tight_witness(n)
        out = find_transversal_hamilton_cycle(dc)
        if collection_semi_degree(dc) != math.ceil(n / 2) - 1 or out.status is not Status.NONE or not out.exhausted:
            bad.append(n)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30
    record_acceptance(3, ok, f"n=4..8 tight witnesses, failures at {bad}, {dt:.1f}s")
    assert ok


def test_c04_threshold_sweep(tmp_path):
    t0 = time.perf_counter()
    rep = sweep_threshold([4, 5, 6], 1000, SEED, out_dir=tmp_path)
    dt = time.perf_counter() - t0
    per = rep.summary["per_n"]
    found = {n: per[n]["found"] for n in per}
    cx = rep.summary["counterexamples"]
    timeouts = sum(per[n]["timeout"] for n in per)
    ok = dt < 600 and all(p["tight_witness_none"] for p in per.values())
    record_acceptance(4, ok, f"found {found}, {len(cx)} confirmed counterexamples, {timeouts} timeouts, {dt:.1f}s")
    assert ok


def test_c05_transversal_matching_gate():
    t0 = time.perf_counter()
    rep = sweep_bradshaw([3, 4, 5], 200, SEED)
    dt = time.perf_counter() - t0
    ok = rep.summary["misses"] == 0 and rep.summary["timeouts"] == 0 and dt < 120
    record_acceptance(5, ok, f"600 trials, {rep.summary['misses']} misses, {dt:.1f}s")
    assert ok


def _brute_niceness_minimum(d: Digraph, k: int) -> int:
    n = d.n
    adj = np.array([[1 if d.has_edge(u, v) else 0 for v in range(n)] for u in range(n)], dtype=np.int64)
    sets = [s for r in range(k, n + 1) for s in itertools.combinations(range(n), r)]
    ind = np.zeros((len(sets), n), dtype=np.int64)
    for i, s in enumerate(sets):
        ind[i, list(s)] = 1
    return int((ind @ adj @ ind.T).min())


def niceness_corpus() -> list[Digraph]:
    rng = random.Random(SEED)
    out = []
    for n in range(4, 13):
        for p in (0.2, 0.5, 0.8):
            out.append(random_collection(n, 1, p, rng.getrandbits(32)).digraphs[0])
        out.append(Digraph.complete(n))
    for kind, n in (("EC1", 10), ("EC2", 12), ("EC1", 12)):
        out.append(gen_extremal(kind, n, F(1, 10), seed=n).digraph)
    return out


def test_c06_niceness_oracle():
    mismatches = total = 0
    for d in niceness_corpus():
        for eps in (F(1, 10), F(1, 5)):
            total += 1
            v = is_eps_nice(d, eps, "exact")
            brute = _brute_niceness_minimum(d, niceness_set_size(d.n, eps))
            if v.minimum != brute or v.nice != (brute >= eps * d.n * d.n):
                mismatches += 1
    ok = mismatches == 0
    record_acceptance(6, ok, f"{total} (digraph, eps) cases up to n=12, {mismatches} mismatches")
    assert ok


def test_c07_generator_classifier_closure():
    generated = verified = recovered = 0
    for kind in ("EC1", "EC2", "EC3"):
        for n in range(8, 25):
            for eps in (F(1, 20), F(1, 10), F(3, 20)):
                for zeta in ([None] if kind != "EC3" else DEFAULT_ZETA_GRID):
                    try:
                        inst = gen_extremal(kind, n, eps, zeta, seed=n)
                    except ValueError:
                        continue
                    generated += 1
                    verified += verify_partition(inst.digraph, inst.partition).ok
                    r = classify_extremal(inst.digraph, eps, seed=1)
                    if r.partition is not None and r.partition.kind.value == kind:
                        recovered += partition_agreement(r.partition, inst.partition, n) >= 0.9
    rate = recovered / generated
    ok = generated > 0 and verified == generated and rate >= 0.95
    record_acceptance(7, ok, f"{generated} planted instances, {verified} verify, {recovered} recovered ({rate:.1%})")
    assert ok


def _engineered_absorption(rng: random.Random) -> tuple[bool, str]:
    """Random dense collection with a planted cycle, absorber and payload; absorb and check growth."""
    n = rng.randint(8, 12)
    kind = rng.choice(["type-I", "type-II"])
    single = rng.random() < 0.4
    interior = 0 if single else rng.randint(0, n - 8)
    t = n - (1 if single else interior + 2)
    verts = list(range(n))
    rng.shuffle(verts)
    order, off = verts[:t], verts[t:]
    colors = list(range(n))
    rng.shuffle(colors)
    cyc_cols, c, pay_cols = colors[:t], colors[t], colors[t + 1:]
    edges = {col: {(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.3} for col in range(n)}
    for k in range(t):
        edges[cyc_cols[k]].add((order[k], order[(k + 1) % t]))
    v = off[0]
    u = v if single else off[-1]
    i = rng.randrange(t)
    v2, v3 = order[(i + 1) % t], order[(i + 2) % t]
    col23 = cyc_cols[(i + 1) % t]
    if kind == "type-I":
        edges[c].add((v2, v))
        edges[col23].add((u, v3))
    else:
        edges[c].add((v, v3))
        edges[col23].add((v2, u))
    payload = None
    if not single:
        path = [v] + off[1:-1] + [u] if kind == "type-I" else [u] + off[1:-1][::-1] + [v]
        pcols = pay_cols[: len(path) - 1]
        for k, col in enumerate(pcols):
            edges[col].add((path[k], path[k + 1]))
        payload = RainbowCertificate.from_path(path, pcols, CertKind.PATH)
    dc = DigraphCollection(n, tuple(Digraph.from_edges(n, edges[col]) for col in range(n)))
    cycle = RainbowCertificate.from_cycle(order, cyc_cols, CertKind.CYCLE)
    scan = enumerate_absorbers(dc, cycle, c, v, u, kind)
    if i not in {w.position for w in scan.witnesses}:
        return False, "planted absorber not enumerated"
    w = rng.choice(scan.witnesses)
    out = absorb(dc, cycle, w, payload)
    grow_v = 1 if single else interior + 2
    grow_c = 1 if single else len(payload.colors) + 1
    ok = (validate_certificate(dc, out).ok
          and set(out.vertex_order()) == set(order) | ({v} if single else set(payload.vertex_order()))
          and len(out.vertex_order()) == t + grow_v
          and set(out.colors) == set(cyc_cols) | {c} | (set() if single else set(payload.colors))
          and len(out.colors) == t + grow_c)
    return ok, kind


def _bipartite_absorption(rng: random.Random) -> bool:
    n = rng.randint(4, 10)
    k = rng.randint(1, n - 1)
    ls, rs, cs = rng.sample(range(n), k + 1), rng.sample(range(n), k + 1), rng.sample(range(n), k + 1)
    edges = [{(a, b) for a in range(n) for b in range(n) if rng.random() < 0.3} for _ in range(n)]
    for a, b, col in zip(ls[:k], rs[:k], cs[:k]):
        edges[col].add((a, b))
    u, v, c = ls[k], rs[k], cs[k]
    j = rng.randrange(k)
    w1, w2, old = ls[j], rs[j], cs[j]
    edges[c].add((w1, v))
    edges[old].add((u, w2))
    bc = BipartiteCollection.from_edge_lists(n, [sorted(e) for e in edges])
    matching = RainbowCertificate(tuple(zip(ls[:k], rs[:k])), tuple(cs[:k]), CertKind.MATCHING)
    if not is_absorbing_edge(bc, (w1, w2), old, c, u, v):
        return False
    out = absorb_edge(bc, matching, (w1, w2), c, u, v)
    return (validate_matching(bc, out).ok and len(out.edges) == k + 1
            and set(out.colors) == set(cs[:k]) | {c})


def _enumeration_agrees(rng: random.Random) -> bool:
    n = rng.randint(6, 12)
    t = rng.randint(4, n - 2)
    dc = random_collection(n, n, rng.choice([0.3, 0.6]), rng.getrandbits(32))
    order = rng.sample(range(n), t)
    cols = rng.sample(range(n), t)
    edges = [set(d.edges()) for d in dc.digraphs]
    for k in range(t):
        edges[cols[k]].add((order[k], order[(k + 1) % t]))
    dc = DigraphCollection(n, tuple(Digraph.from_edges(n, e) for e in edges))
    cycle = RainbowCertificate.from_cycle(order, cols, CertKind.CYCLE)
    off = [x for x in range(n) if x not in order]
    c = rng.choice([x for x in range(n) if x not in cols])
    v, u = rng.choice(off), rng.choice(off)
    for kind in ("type-I", "type-II"):
        scan = enumerate_absorbers(dc, cycle, c, v, u, kind)
        brute = [i for i in range(t)
                 if is_absorbing_path(dc, kind, [order[(i + j) % t] for j in range(4)],
                                      [cols[(i + j) % t] for j in range(3)], c, v, u)]
        if [w.position for w in scan.witnesses] != brute:
            return False
    return True


def test_c08_absorption_suite():
    rng = random.Random(SEED)
    path_ok = sum(_engineered_absorption(rng)[0] for _ in range(1000))
    bip_ok = sum(_bipartite_absorption(rng) for _ in range(200))
    enum_ok = sum(_enumeration_agrees(rng) for _ in range(200))
    ok = path_ok == 1000 and bip_ok == 200 and enum_ok == 200
    record_acceptance(8, ok, f"{path_ok}/1000 cycle absorptions, {bip_ok}/200 edge absorptions, "
                             f"{enum_ok}/200 enumeration re-scans")
    assert ok


def test_c09_regularity_tools():
    rng = random.Random(SEED)
    density_bad = witness_bad = witnesses = 0
    for _ in range(200):
        n = rng.randint(2, 10)
        m = rng.randint(1, 5)
        dc = random_collection(n, m, rng.random(), rng.getrandbits(32))
        k = rng.randint(1, n - 1)
        verts = rng.sample(range(n), n)
        a, b = verts[:k], verts[k:]
        cs = rng.sample(range(m), rng.randint(1, m))
        naive = sum(1 for col in cs for x in a for y in b if dc.digraphs[col].has_edge(x, y))
        s = CollectionSlice(dc, a, b, cs)
        density_bad += slice_density(s) != F(naive, len(a) * len(b) * len(cs))
        v = check_regular_slice(s, F(1, 4), 0, "sampled", trials=200, seed=rng.getrandbits(16))
        if not v.regular:
            witnesses += 1
            w = v.witness
            exact = F(sum(1 for col in w.colors for x in w.V1 for y in w.V2 if dc.digraphs[col].has_edge(x, y)),
                      len(w.V1) * len(w.V2) * len(w.colors))
            witness_bad += exact != w.density or abs(exact - v.density) < F(1, 4)
    identity_bad = 0
    for _ in range(100):
        n = rng.randint(2, 8)
        dc = random_collection(n, rng.randint(1, 5), rng.random(), rng.getrandbits(32))
        deg = build_auxiliary_4graph(dc).degrees()
        for c, d in enumerate(dc.digraphs):
            identity_bad += deg[("c", c)] != n * d.num_edges()
        for x in range(n):
            identity_bad += deg[("v", x)] != n * sum(d.out_degree(x) + d.in_degree(x) for d in dc.digraphs)
    ok = density_bad == 0 and witness_bad == 0 and identity_bad == 0 and witnesses > 0
    record_acceptance(9, ok, f"density mismatches {density_bad}, {witnesses} sampled witnesses "
                             f"({witness_bad} bad), degree-identity failures {identity_bad}")
    assert ok


def test_c10_determinism_across_workers():
    corpus = [_rand(random.Random(SEED + i)) for i in range(200)] + structured_corpus()
    same1 = corpus_report(corpus, 1) == corpus_report(corpus, 8)
    a = strip_timing(sweep_threshold([4, 5, 6], 1000, SEED, workers=1))
    b = strip_timing(sweep_threshold([4, 5, 6], 1000, SEED, workers=8))
    same4 = json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    c = strip_timing(sweep_bradshaw([3, 4, 5], 200, SEED, workers=1))
    d = strip_timing(sweep_bradshaw([3, 4, 5], 200, SEED, workers=8))
    same5 = json.dumps(c, sort_keys=True) == json.dumps(d, sort_keys=True)
    ok = same1 and same4 and same5
    record_acceptance(10, ok, f"identical at 1 and 8 workers: corpus {same1}, threshold {same4}, matching {same5}")
    assert ok
