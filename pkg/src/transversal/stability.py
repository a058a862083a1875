"""Crossing predicates, cross graphs and stability verdicts.

Digraph collections use template partitions (:class:`CharacteristicPartition`);
bipartite collections use the six-block :class:`BipartitePartition`. Both are
supplied by the caller or, if omitted, found by the partition searches.

Partition labels are arbitrary (``A``/``B`` may be swapped, an EC3 partition
may be rotated by two blocks), so crossing is evaluated under every
alignment of the two records: a disjunct holds only if each of its
symmetric-difference bounds holds for all relabelings. This makes crossing
symmetric in its two arguments and independent of labeling.
"""

from __future__ import annotations

import itertools
import math
import random
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError
from .extremal import (
    DEFAULT_NICE_BUDGET,
    CharacteristicPartition,
    ClauseCheck,
    ECKind,
    NicenessVerdict,
    _matrix,
    _niceness,
    classify_extremal,
    is_eps_extremal_bipartite,
    is_eps_nice,
    is_eps_nice_bipartite,
    niceness_set_size,
)
from .model import BipartiteCollection, DigraphCollection, bits, mask_of
from .rational import as_fraction

__all__ = [
    "BipartitePartition",
    "BipartiteStabilityReport",
    "CrossGraph",
    "CrossingResult",
    "ObservationReport",
    "StabilityReport",
    "bipartite_good_vertices",
    "bipartite_is_crossing",
    "build_bipartite_cross_graph",
    "build_cross_graph",
    "classify_bipartite_stability",
    "classify_stability",
    "collection_mu_nice",
    "find_bipartite_partition",
    "gen_bipartite_extremal",
    "good_vertices",
    "is_crossing",
    "observation_check",
    "verify_bipartite_partition",
]


def _far(x: frozenset[int], y: frozenset[int], bound: Fraction) -> bool:
    return len(x ^ y) >= bound


@dataclass(frozen=True)
class CrossingResult:
    crossing: bool
    clause: str | None            # "A1", "A2", "A3" or None when no clause applies
    disjuncts: tuple[int, ...] = ()   # 1-based disjuncts that fired (A2/A3)
    detail: str = ""

    def __bool__(self) -> bool:
        return self.crossing


def good_vertices(dc: DigraphCollection, color: int, record: CharacteristicPartition | None) -> frozenset[int]:
    """Vertices outside the exceptional set of ``color``'s partition (all of them if there is none)."""
    if not 0 <= color < dc.m:
        raise InvalidArgumentError(f"color {color + 1} outside 1..{dc.m}")
    full = frozenset(range(dc.n))
    return full if record is None else full - record.L


def _ab(rec: CharacteristicPartition) -> tuple[frozenset[int], frozenset[int]]:
    return rec.blocks[0], rec.blocks[1]


def is_crossing(rec_i: CharacteristicPartition, rec_j: CharacteristicPartition, delta: float | Fraction,
                n: int) -> CrossingResult:
    """Delta-crossing test for two template partitions.

    Two EC1/EC2 records cross (clause A1) when every ``A``/``B`` block of one
    is at least ``delta n`` away (symmetric difference) from every ``A``/``B``
    block of the other. Two EC3 records cross (A2) when ``W^1, W^3`` of one
    are far from ``W^1, W^3`` of the other, or likewise for ``W^2, W^4``. A
    mixed pair (A3) needs the ``A``/``B`` blocks far from ``W^1, W^3`` or far
    from ``W^2, W^4``.
    """
    bound = as_fraction(delta) * n
    ec3_i = rec_i.kind is ECKind.EC3
    ec3_j = rec_j.kind is ECKind.EC3
    if not ec3_i and not ec3_j:
        pairs = [(x, y) for x in _ab(rec_i) for y in _ab(rec_j)]
        ok = all(_far(x, y, bound) for x, y in pairs)
        sizes = [len(x ^ y) for x, y in pairs]
        return CrossingResult(ok, "A1", (1,) if ok else (), f"symmetric differences {sizes} vs {bound}")
    if ec3_i and ec3_j:
        fired = []
        for k, idx in enumerate(((1, 3), (2, 4)), start=1):
            if all(_far(rec_i.W(x), rec_j.W(y), bound) for x in idx for y in idx):
                fired.append(k)
        return CrossingResult(bool(fired), "A2", tuple(fired))
    ab, ec3 = (rec_i, rec_j) if ec3_j else (rec_j, rec_i)
    fired = []
    for k, idx in enumerate(((1, 3), (2, 4)), start=1):
        if all(_far(x, ec3.W(y), bound) for x in _ab(ab) for y in idx):
            fired.append(k)
    return CrossingResult(bool(fired), "A3", tuple(fired))


@dataclass(frozen=True)
class ObservationReport:
    ok: bool
    clause: str
    bound: Fraction
    intersections: tuple[tuple[str, int], ...]
    eps_ratio_ok: bool | None = None


def observation_check(rec_i: CharacteristicPartition, rec_j: CharacteristicPartition, delta: float | Fraction,
                      n: int, eps: float | Fraction | None = None) -> ObservationReport:
    """For a crossing pair, check that the blocks involved intersect in at least ``delta n / 4`` vertices.

    Only the disjuncts that fired are checked. ``eps`` (if given) is recorded
    together with whether ``eps <= delta / 8``, the regime in which the
    bound is guaranteed.
    """
    res = is_crossing(rec_i, rec_j, delta, n)
    if not res.crossing:
        raise InvalidArgumentError("observation_check needs a crossing pair")
    d = as_fraction(delta)
    bound = d * n / 4
    inter: list[tuple[str, int]] = []
    if res.clause == "A1":
        for (nx, x), (ny, y) in itertools.product(zip("AB", _ab(rec_i)), zip("AB", _ab(rec_j))):
            inter.append((f"{nx}i&{ny}j", len(x & y)))
    elif res.clause == "A2":
        for k in res.disjuncts:
            idx = (1, 3) if k == 1 else (2, 4)
            for x in idx:
                for y in idx:
                    inter.append((f"W{x}i&W{y}j", len(rec_i.W(x) & rec_j.W(y))))
    else:
        ab, ec3 = (rec_i, rec_j) if rec_j.kind is ECKind.EC3 else (rec_j, rec_i)
        for k in res.disjuncts:
            idx = (1, 3) if k == 1 else (2, 4)
            for nx, x in zip("AB", _ab(ab)):
                for y in idx:
                    inter.append((f"{nx}&W{y}", len(x & ec3.W(y))))
    ratio = None if eps is None else as_fraction(eps) <= d / 8
    return ObservationReport(all(v >= bound for _, v in inter), res.clause, bound, tuple(inter), ratio)


@dataclass(frozen=True)
class CrossGraph:
    """Cross graphs on colors, one edge list per clause ``k`` in ``1, 2, 3``."""

    edges: Mapping[int, tuple[tuple[int, int], ...]]
    disjunct_counts: Mapping[int, Mapping[int, int]]

    def edge_count(self, k: int) -> int:
        return len(self.edges[k])


_CLAUSE_INDEX = {"A1": 1, "A2": 2, "A3": 3}


def build_cross_graph(records: Mapping[int, CharacteristicPartition | None] | Sequence[CharacteristicPartition | None],
                      delta: float | Fraction, n: int, workers: int = 1) -> CrossGraph:
    """Cross graphs over the colors that carry a partition record.

    ``disjunct_counts[k][1|2]`` counts edges of clause ``k`` whose first or
    second disjunct fired (an edge may count for both).
    """
    if not isinstance(records, Mapping):
        records = dict(enumerate(records))
    colors = sorted(c for c, r in records.items() if r is not None)
    pairs = list(itertools.combinations(colors, 2))

    def check(pair):
        i, j = pair
        return is_crossing(records[i], records[j], delta, n)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(check, pairs))
    else:
        results = [check(p) for p in pairs]
    edges: dict[int, list[tuple[int, int]]] = {1: [], 2: [], 3: []}
    counts: dict[int, dict[int, int]] = {k: {1: 0, 2: 0} for k in (1, 2, 3)}
    for pair, res in zip(pairs, results):
        if res.crossing:
            k = _CLAUSE_INDEX[res.clause]
            edges[k].append(pair)
            for dj in res.disjuncts:
                counts[k][dj] += 1
    return CrossGraph({k: tuple(v) for k, v in edges.items()}, counts)


@dataclass(frozen=True)
class StabilityReport:
    nice_colors: frozenset[int]
    uncertified_nice: frozenset[int]
    extremal_records: Mapping[int, CharacteristicPartition | None]
    cross: CrossGraph
    strongly_stable: bool
    weakly_stable_k: tuple[int, ...]
    flags: tuple[str, ...]
    thresholds: Mapping[str, str] = field(default_factory=dict)

    @property
    def weakly_stable(self) -> bool:
        return bool(self.weakly_stable_k)

    @property
    def stable(self) -> bool:
        return self.strongly_stable or self.weakly_stable

    @property
    def verdict(self) -> str:
        if self.strongly_stable:
            return "strongly-stable"
        if self.weakly_stable:
            return "weakly-stable"
        return "unstable"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "strongly_stable": self.strongly_stable,
            "weakly_stable_k": list(self.weakly_stable_k),
            "nice_colors": [c + 1 for c in sorted(self.nice_colors)],
            "uncertified_nice": [c + 1 for c in sorted(self.uncertified_nice)],
            "records": {str(c + 1): (None if r is None else r.to_dict())
                        for c, r in sorted(self.extremal_records.items())},
            "cross_edges": {str(k): [[i + 1, j + 1] for i, j in self.cross.edges[k]] for k in (1, 2, 3)},
            "disjunct_counts": {str(k): {str(d): v for d, v in c.items()}
                                for k, c in self.cross.disjunct_counts.items()},
            "flags": list(self.flags),
            "thresholds": dict(self.thresholds),
        }


def classify_stability(dc: DigraphCollection, gamma: float | Fraction, alpha: float | Fraction,
                       eps: float | Fraction, delta: float | Fraction,
                       records: Mapping[int, CharacteristicPartition | None] | None = None, *,
                       niceness_mode: str = "auto", seed: int = 0, workers: int = 1) -> StabilityReport:
    """Strong/weak stability of a digraph collection.

    Strongly stable: at least ``gamma n`` colors are ``alpha``-nice. Weakly
    stable: some cross graph has at least ``delta n^2`` edges. ``records``
    maps colors to their fixed partitions; when omitted, every color that is
    not ``eps``-nice is classified with :func:`classify_extremal`.
    """
    n = dc.n
    g, a, e, dl = (as_fraction(x) for x in (gamma, alpha, eps, delta))
    flags: list[str] = []
    nice, unsure = set(), set()
    for c, d in enumerate(dc.digraphs):
        v = is_eps_nice(d, a, niceness_mode, seed=seed + c)
        if v.nice:
            nice.add(c)
            if not v.certified:
                unsure.add(c)
    if unsure:
        flags.append("niceness-uncertified")
    if records is None:
        flags.append("records-derived")
        derived: dict[int, CharacteristicPartition | None] = {}
        for c, d in enumerate(dc.digraphs):
            r = classify_extremal(d, e, seed=seed + c, niceness_mode=niceness_mode)
            derived[c] = r.partition
            if r.partition is None and not (r.niceness and r.niceness.nice):
                flags.append(f"color-{c + 1}-extremal-without-partition")
        records = derived
    cross = build_cross_graph(records, dl, n, workers)
    strongly = len(nice) >= g * n
    if strongly and not (len(nice - unsure) >= g * n):
        flags.append("strong-verdict-uncertified")
    weak = tuple(k for k in (1, 2, 3) if cross.edge_count(k) >= dl * n * n)
    thresholds = {"gamma_n": str(g * n), "delta_n2": str(dl * n * n)}
    return StabilityReport(frozenset(nice), frozenset(unsure), dict(records), cross, strongly, weak,
                           tuple(flags), thresholds)


# ---------------------------------------------------------------------------
# collection niceness (bipartite)


def collection_mu_nice(bc: BipartiteCollection, mu: float | Fraction, mode: str = "auto", *, seed: int = 0,
                       budget: int = DEFAULT_NICE_BUDGET) -> NicenessVerdict:
    """Is ``sum_c e_{G_c}(A, B) >= mu n^3`` for all ``A`` (left), ``B`` (right) of size ``floor(n/2)``?"""
    m_ = as_fraction(mu)
    if m_ <= 0:
        raise InvalidArgumentError(f"mu must be positive, got {mu}")
    n = bc.n
    weights = sum(_matrix(n, g) for g in bc.graphs)
    return _niceness(weights, n // 2, m_ * n ** 3, mode, seed, budget, 64, None)


# ---------------------------------------------------------------------------
# bipartite partitions


@dataclass(frozen=True)
class BipartitePartition:
    """Six-block partition: ``A1, B1, C1`` split the left part, ``A2, B2, C2`` the right part."""

    A1: frozenset[int]
    B1: frozenset[int]
    C1: frozenset[int]
    A2: frozenset[int]
    B2: frozenset[int]
    C2: frozenset[int]
    eps: Fraction

    def __post_init__(self) -> None:
        for name in ("A1", "B1", "C1", "A2", "B2", "C2"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        object.__setattr__(self, "eps", as_fraction(self.eps))

    def to_dict(self) -> dict:
        return {k: sorted(getattr(self, k)) for k in ("A1", "B1", "C1", "A2", "B2", "C2")} | {"eps": str(self.eps)}


def _check_side(n: int, parts: Sequence[frozenset[int]], side: str) -> None:
    seen: set[int] = set()
    for p in parts:
        if seen & p or any(not 0 <= v < n for v in p):
            raise InvalidArgumentError(f"{side} blocks overlap or leave 0..{n - 1}")
        seen |= p
    if len(seen) != n:
        raise InvalidArgumentError(f"{side} blocks do not cover the part")


def verify_bipartite_partition(bc: BipartiteCollection, color: int, rec: BipartitePartition,
                               eps: float | Fraction | None = None) -> tuple[bool, tuple[ClauseCheck, ...]]:
    """Check a six-block partition of one color.

    Sizes: ``|A_i| = |B_i| = ceil((1/2 - eps) n)``, ``C_i`` the rest. Degrees:
    every ``v`` in ``X`` on one side has at least ``(1/2 - 2 eps) n``
    neighbours in ``X`` on the other side, for ``X`` in ``{A, B}``. Sparsity:
    ``e(A1, B2) <= eps n^2`` or ``e(B1, A2) <= eps n^2``.
    """
    n = bc.n
    e = rec.eps if eps is None else as_fraction(eps)
    _check_side(n, (rec.A1, rec.B1, rec.C1), "left")
    _check_side(n, (rec.A2, rec.B2, rec.C2), "right")
    g = bc.graphs[color]
    right = bc.right_adj[color]
    k = niceness_set_size(n, e)
    out: list[ClauseCheck] = []
    sizes = [len(rec.A1), len(rec.B1), len(rec.A2), len(rec.B2)]
    out.append(ClauseCheck("sizes", all(s == k for s in sizes), f"sizes {sizes}, rule gives {k}"))
    lo = (Fraction(1, 2) - 2 * e) * n
    for name, left_set, right_set in (("A", rec.A1, rec.A2), ("B", rec.B1, rec.B2)):
        lm, rm = mask_of(left_set), mask_of(right_set)
        bad = [v for v in sorted(left_set) if (g[v] & rm).bit_count() < lo]
        bad_r = [v for v in sorted(right_set) if (right[v] & lm).bit_count() < lo]
        detail = "" if not (bad or bad_r) else f"left {bad} right {bad_r} below {lo}"
        out.append(ClauseCheck(f"{name}1-{name}2-degree", not bad and not bad_r, detail))
    e1 = bc.edges_between(color, rec.A1, rec.B2)
    e2 = bc.edges_between(color, rec.B1, rec.A2)
    cap = e * n * n
    out.append(ClauseCheck("cross-sparse", e1 <= cap or e2 <= cap, f"e(A1,B2)={e1}, e(B1,A2)={e2}, cap {cap}"))
    return all(c.ok for c in out), tuple(out)


def gen_bipartite_extremal(n: int, eps: float | Fraction, seed: int = 0,
                           both_sparse: bool = False) -> tuple[BipartiteCollection, BipartitePartition]:
    """Single-color planted six-block structure: ``A1 - A2`` and ``B1 - B2`` complete,
    ``A1 - B2`` empty, ``B1 - A2`` complete unless ``both_sparse``; ``C`` vertices isolated."""
    e = as_fraction(eps)
    k = niceness_set_size(n, e)
    if k < 1 or 2 * k > n:
        raise InvalidArgumentError(f"blocks of size {k} do not fit n={n}")
    rng = random.Random(seed)
    left, right = list(range(n)), list(range(n))
    rng.shuffle(left)
    rng.shuffle(right)
    a1, b1, c1 = left[:k], left[k:2 * k], left[2 * k:]
    a2, b2, c2 = right[:k], right[k:2 * k], right[2 * k:]
    rows = [0] * n
    for u in a1:
        rows[u] |= mask_of(a2)
    for u in b1:
        rows[u] |= mask_of(b2) | (0 if both_sparse else mask_of(a2))
    bc = BipartiteCollection(n, (tuple(rows),))
    rec = BipartitePartition(frozenset(a1), frozenset(b1), frozenset(c1), frozenset(a2), frozenset(b2),
                             frozenset(c2), e)
    ok, clauses = verify_bipartite_partition(bc, 0, rec)
    if not ok:
        raise InvalidArgumentError(f"planted structure fails at n={n}, eps={e}: "
                                   f"{[c.name for c in clauses if not c.ok]}")
    return bc, rec


def find_bipartite_partition(bc: BipartiteCollection, color: int, eps: float | Fraction, *,
                             seed: int = 0, rounds: int = 6) -> BipartitePartition | None:
    """Seed ``A1``/``B2`` from a sparse pair, then alternate: pick ``A2``/``B1`` as the
    best-connected vertices to ``A1``/``B2``, and ``A1``/``B2`` as the best-connected
    vertices to ``A2``/``B1``. Returns the first round that verifies."""
    n = bc.n
    e = as_fraction(eps)
    k = niceness_set_size(n, e)
    if k < 1 or 2 * k > n:
        return None
    verdict = is_eps_nice_bipartite(bc, color, e, seed=seed)
    if verdict.witness is None:
        return None
    g = bc.graphs[color]
    right = bc.right_adj[color]
    full = frozenset(range(n))

    def top(pool, adj, target):
        tm = mask_of(target)
        return frozenset(sorted(pool, key=lambda v: (-(adj[v] & tm).bit_count(), v))[:k])

    a1, b2 = verdict.witness[0], verdict.witness[1]
    for _ in range(max(1, rounds)):
        a2 = top(full - b2, right, a1)
        b1 = top(full - a1, g, b2)
        rec = BipartitePartition(a1, b1, full - a1 - b1, a2, b2, full - a2 - b2, e)
        if verify_bipartite_partition(bc, color, rec)[0]:
            return rec
        a1 = top(full - b1, g, a2)
        b2 = top(full - a2, right, b1)
    return None


def bipartite_is_crossing(rec_i: BipartitePartition, rec_j: BipartitePartition, delta: float | Fraction,
                          n: int) -> bool:
    """Left blocks ``A1``/``B1`` of one record are ``delta n``-far from both left blocks of the other."""
    bound = as_fraction(delta) * n
    return all(_far(x, y, bound) for x in (rec_i.A1, rec_i.B1) for y in (rec_j.A1, rec_j.B1))


def build_bipartite_cross_graph(records: Mapping[int, BipartitePartition | None], delta: float | Fraction,
                                n: int) -> tuple[tuple[int, int], ...]:
    colors = sorted(c for c, r in records.items() if r is not None)
    return tuple((i, j) for i, j in itertools.combinations(colors, 2)
                 if bipartite_is_crossing(records[i], records[j], delta, n))


def bipartite_good_vertices(bc: BipartiteCollection, color: int, eps: float | Fraction,
                            record: BipartitePartition | None = None,
                            extremal: bool | None = None) -> tuple[frozenset[int], frozenset[int]]:
    """Good vertices of one color as ``(left, right)``.

    If the color is extremal, every vertex outside ``C1 | C2`` is good;
    otherwise a vertex is good when its degree is at least
    ``(1/2 - eps^3) n``. ``extremal`` defaults to "a record was given".
    """
    n = bc.n
    e = as_fraction(eps)
    if extremal is None:
        extremal = record is not None
    if extremal:
        if record is None:
            raise InvalidArgumentError("an extremal color needs its partition record")
        return frozenset(range(n)) - record.C1, frozenset(range(n)) - record.C2
    lo = (Fraction(1, 2) - e ** 3) * n
    left = frozenset(u for u in range(n) if bc.left_degree(color, u) >= lo)
    right = frozenset(v for v in range(n) if bc.right_degree(color, v) >= lo)
    return left, right


@dataclass(frozen=True)
class BipartiteStabilityReport:
    nice_colors: frozenset[int]
    uncertified_nice: frozenset[int]
    extremal_colors: frozenset[int]
    records: Mapping[int, BipartitePartition | None]
    cross_edges: tuple[tuple[int, int], ...]
    strongly_stable: bool
    weakly_stable: bool
    flags: tuple[str, ...]

    @property
    def stable(self) -> bool:
        return self.strongly_stable or self.weakly_stable

    @property
    def verdict(self) -> str:
        if self.strongly_stable:
            return "strongly-stable"
        return "weakly-stable" if self.weakly_stable else "unstable"


def classify_bipartite_stability(bc: BipartiteCollection, gamma: float | Fraction, alpha: float | Fraction,
                                 eps: float | Fraction, delta: float | Fraction,
                                 records: Mapping[int, BipartitePartition | None] | None = None, *,
                                 extremal_exponent: int = 5, niceness_mode: str = "auto",
                                 seed: int = 0) -> BipartiteStabilityReport:
    """Bipartite analogue of :func:`classify_stability`.

    A color is extremal when it is not ``eps**extremal_exponent``-nice; only
    extremal colors with a record enter the cross graph.
    """
    n = bc.n
    g, dl = as_fraction(gamma), as_fraction(delta)
    flags: list[str] = []
    nice, unsure, extremal = set(), set(), set()
    for c in range(bc.m):
        v = is_eps_nice_bipartite(bc, c, alpha, niceness_mode, seed=seed + c)
        if v.nice:
            nice.add(c)
            if not v.certified:
                unsure.add(c)
        x = is_eps_extremal_bipartite(bc, c, eps, extremal_exponent, mode=niceness_mode, seed=seed + c)
        if not x.nice:
            extremal.add(c)
    if unsure:
        flags.append("niceness-uncertified")
    if records is None:
        flags.append("records-derived")
        records = {c: (find_bipartite_partition(bc, c, eps, seed=seed + c) if c in extremal else None)
                   for c in range(bc.m)}
    usable = {c: r for c, r in records.items() if c in extremal}
    cross = build_bipartite_cross_graph(usable, dl, n)
    return BipartiteStabilityReport(frozenset(nice), frozenset(unsure), frozenset(extremal), dict(records),
                                    cross, len(nice) >= g * n, len(cross) >= dl * n * n, tuple(flags))
