"""Density and regularity tests for bipartite slices of a digraph collection,
reduced collections over vertex/color clusters, and the auxiliary 4-graph.

A slice ``(V1, V2, C)`` looks at the edges from ``V1`` to ``V2`` in the
colors of ``C``. Its density is
``sum_{c in C} e_{D_c}(V1, V2) / (|C| |V1| |V2|)``, kept as a ``Fraction``.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetExceededError, InvalidArgumentError
from .model import Digraph, DigraphCollection, mask_of
from .rational import as_fraction

__all__ = [
    "AuxiliaryHypergraph",
    "CollectionSlice",
    "DegreeInheritanceReport",
    "ReducedCollection",
    "RegularityVerdict",
    "SliceWitness",
    "build_auxiliary_4graph",
    "build_reduced",
    "check_regular_slice",
    "degree_inheritance_report",
    "slice_density",
]

DEFAULT_REGULARITY_BUDGET = 2 * 10**8
DEFAULT_SAMPLED_TRIALS = 10**4


@dataclass(frozen=True)
class CollectionSlice:
    dc: DigraphCollection
    V1: frozenset[int]
    V2: frozenset[int]
    colors: frozenset[int]

    def __post_init__(self) -> None:
        for name in ("V1", "V2", "colors"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if not self.V1 or not self.V2 or not self.colors:
            raise InvalidArgumentError("slice vertex sets and color set must be nonempty")
        if self.V1 & self.V2:
            raise InvalidArgumentError(f"V1 and V2 overlap in {sorted(self.V1 & self.V2)}")
        if any(not 0 <= v < self.dc.n for v in self.V1 | self.V2):
            raise InvalidArgumentError(f"slice vertices leave 0..{self.dc.n - 1}")
        if any(not 0 <= c < self.dc.m for c in self.colors):
            raise InvalidArgumentError(f"slice colors leave 1..{self.dc.m}")


def _edge_count(s: CollectionSlice, a: Iterable[int], b: Iterable[int], cs: Iterable[int]) -> int:
    bm = mask_of(b)
    return sum((s.dc.digraphs[c].out_adj[u] & bm).bit_count() for c in cs for u in a)


def slice_density(s: CollectionSlice, V1p: Iterable[int] | None = None, V2p: Iterable[int] | None = None,
                  colors_p: Iterable[int] | None = None) -> Fraction:
    """Exact density of the sub-slice ``(V1', V2', C')`` (defaults: the whole slice)."""
    a = s.V1 if V1p is None else frozenset(V1p)
    b = s.V2 if V2p is None else frozenset(V2p)
    cs = s.colors if colors_p is None else frozenset(colors_p)
    if not a or not b or not cs:
        raise InvalidArgumentError("sub-slice sets must be nonempty")
    if not (a <= s.V1 and b <= s.V2 and cs <= s.colors):
        raise InvalidArgumentError("sub-slice sets must lie inside the slice")
    return Fraction(_edge_count(s, a, b, cs), len(cs) * len(a) * len(b))


@dataclass(frozen=True)
class SliceWitness:
    V1: frozenset[int]
    V2: frozenset[int]
    colors: frozenset[int]
    density: Fraction
    reason: str        # "deviation" or "density"


@dataclass(frozen=True)
class RegularityVerdict:
    regular: bool
    density_ok: bool
    density: Fraction
    witness: SliceWitness | None
    mode: str
    checked: int
    certified: bool      # sampled "regular" verdicts are not certified
    seed: int | None = None


def _sizes(total: int, eps: Fraction) -> range:
    return range(max(1, math.ceil(eps * total)), total + 1)


def _subsets(items: Sequence[int], sizes: range) -> list[tuple[int, ...]]:
    return [c for k in sizes for c in itertools.combinations(items, k)]


def _triple_count(s: CollectionSlice, eps: Fraction) -> int:
    def count(total: int) -> int:
        return sum(math.comb(total, k) for k in _sizes(total, eps))
    return count(len(s.V1)) * count(len(s.V2)) * count(len(s.colors))


def _deviates(dens: Fraction, base: Fraction, eps: Fraction) -> bool:
    return abs(dens - base) >= eps


def check_regular_slice(s: CollectionSlice, eps: float | Fraction, d: float | Fraction, mode: str = "exact", *,
                        trials: int = DEFAULT_SAMPLED_TRIALS, seed: int = 0,
                        budget: int = DEFAULT_REGULARITY_BUDGET) -> RegularityVerdict:
    """``(eps, d)``-regularity of a slice.

    Every sub-slice with ``|V_i'| >= eps |V_i|`` and ``|C'| >= eps |C|`` must
    have density within (strictly) ``eps`` of the whole slice, and the whole
    slice must have density at least ``d``. ``exact`` enumerates every such
    triple (refused above ``budget``); ``sampled`` draws ``trials`` random
    ones, sizes uniform over the admissible range. An irregular verdict
    always carries a witness.
    """
    e, dd = as_fraction(eps), as_fraction(d)
    if not 0 < e <= 1:
        raise InvalidArgumentError(f"eps must lie in (0, 1], got {eps}")
    base = slice_density(s)
    density_ok = base >= dd
    if not density_ok:
        w = SliceWitness(s.V1, s.V2, s.colors, base, "density")
        return RegularityVerdict(False, False, base, w, mode, 0, True, None if mode == "exact" else seed)
    v1, v2, cs = sorted(s.V1), sorted(s.V2), sorted(s.colors)
    if mode == "exact":
        total = _triple_count(s, e)
        if total > budget:
            raise BudgetExceededError(f"exact regularity check needs {total} triples > {budget}")
        w = _exact_scan(s, v1, v2, cs, e, base)
        return RegularityVerdict(w is None, True, base, w, "exact", total, True)
    if mode != "sampled":
        raise InvalidArgumentError(f"mode must be exact or sampled, got {mode!r}")
    rng = random.Random(seed)
    s1, s2, s3 = _sizes(len(v1), e), _sizes(len(v2), e), _sizes(len(cs), e)
    for k in range(trials):
        a = rng.sample(v1, rng.choice(s1))
        b = rng.sample(v2, rng.choice(s2))
        c = rng.sample(cs, rng.choice(s3))
        dens = Fraction(_edge_count(s, a, b, c), len(a) * len(b) * len(c))
        if _deviates(dens, base, e):
            w = SliceWitness(frozenset(a), frozenset(b), frozenset(c), dens, "deviation")
            return RegularityVerdict(False, True, base, w, "sampled", k + 1, True, seed)
    return RegularityVerdict(True, True, base, None, "sampled", trials, False, seed)


def _exact_scan(s: CollectionSlice, v1: list[int], v2: list[int], cs: list[int], e: Fraction,
                base: Fraction) -> SliceWitness | None:
    adj = np.array([[[1 if s.dc.digraphs[c].has_edge(a, b) else 0 for b in v2] for a in v1] for c in cs],
                   dtype=np.int64)
    sub1 = _subsets(range(len(v1)), _sizes(len(v1), e))
    sub2 = _subsets(range(len(v2)), _sizes(len(v2), e))
    ind1 = np.zeros((len(sub1), len(v1)), dtype=np.int64)
    for r, t in enumerate(sub1):
        ind1[r, list(t)] = 1
    ind2 = np.zeros((len(sub2), len(v2)), dtype=np.int64)
    for r, t in enumerate(sub2):
        ind2[r, list(t)] = 1
    size1 = ind1.sum(axis=1)[:, None]
    size2 = ind2.sum(axis=1)[None, :]
    p, q = base.numerator, base.denominator
    ep, eq = e.numerator, e.denominator
    for csub in _subsets(range(len(cs)), _sizes(len(cs), e)):
        w = adj[list(csub)].sum(axis=0)
        counts = ind1 @ w @ ind2.T
        t = len(csub) * size1 * size2
        # |counts / t - p / q| >= ep / eq  <=>  eq |q counts - p t| >= ep q t
        bad = eq * np.abs(q * counts - p * t) >= ep * q * t
        if bad.any():
            r, c = np.argwhere(bad)[0]
            a = frozenset(v1[x] for x in sub1[r])
            b = frozenset(v2[x] for x in sub2[c])
            col = frozenset(cs[x] for x in csub)
            return SliceWitness(a, b, col, Fraction(int(counts[r, c]), int(t[r, c])), "deviation")
    return None


@dataclass(frozen=True)
class ReducedCollection:
    """Digraphs ``R_1..R_M`` on cluster indices ``0..L-1`` (clusters ``V_1..V_L``)."""

    L: int
    M: int
    members: tuple[Digraph, ...]
    provenance: dict = field(default_factory=dict)
    warnings: tuple[str, ...] = ()


def _check_parts(parts: Sequence[Iterable[int]], universe: int, what: str) -> list[frozenset[int]]:
    out = [frozenset(p) for p in parts]
    if len(out) < 2:
        raise InvalidArgumentError(f"{what} partition needs an exceptional part and at least one cluster")
    seen: set[int] = set()
    for i, p in enumerate(out):
        if seen & p:
            raise InvalidArgumentError(f"{what} part {i} overlaps an earlier part")
        if any(not 0 <= x < universe for x in p):
            raise InvalidArgumentError(f"{what} part {i} leaves 0..{universe - 1}")
        if i > 0 and not p:
            raise InvalidArgumentError(f"{what} cluster {i} is empty")
        seen |= p
    if len(seen) != universe:
        raise InvalidArgumentError(f"{what} partition misses {sorted(set(range(universe)) - seen)}")
    return out


def build_reduced(dc: DigraphCollection, vertex_parts: Sequence[Iterable[int]],
                  color_parts: Sequence[Iterable[int]], eps: float | Fraction, d: float | Fraction,
                  mode: str = "exact", *, trials: int = DEFAULT_SAMPLED_TRIALS, seed: int = 0,
                  budget: int = DEFAULT_REGULARITY_BUDGET, workers: int = 1) -> ReducedCollection:
    """Reduced collection: ``h -> i`` is in ``R_j`` iff the slice ``(V_h, V_i, C_j)`` is ``(eps, d)``-regular.

    Part 0 of each partition is the exceptional part and is ignored.
    Clusters of unequal size produce a warning. Slices are taken from
    ``dc`` itself (no cleaning step).
    """
    vp = _check_parts(vertex_parts, dc.n, "vertex")
    cp = _check_parts(color_parts, dc.m, "color")
    warnings = []
    if len({len(p) for p in vp[1:]}) > 1:
        warnings.append("vertex clusters have unequal sizes")
    if len({len(p) for p in cp[1:]}) > 1:
        warnings.append("color clusters have unequal sizes")
    L, M = len(vp) - 1, len(cp) - 1
    jobs = [(h, i, j) for j in range(M) for h in range(L) for i in range(L) if h != i]

    def run(job):
        h, i, j = job
        s = CollectionSlice(dc, vp[h + 1], vp[i + 1], cp[j + 1])
        sub_seed = seed + (j * L + h) * L + i
        return check_regular_slice(s, eps, d, mode, trials=trials, seed=sub_seed, budget=budget).regular

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    rows = [[0] * L for _ in range(M)]
    for (h, i, j), ok in zip(jobs, results):
        if ok:
            rows[j][h] |= 1 << i
    members = tuple(Digraph(L, tuple(r)) for r in rows)
    provenance = {
        "eps": str(as_fraction(eps)),
        "d": str(as_fraction(d)),
        "mode": mode,
        "seed": seed if mode == "sampled" else None,
        "vertex_parts": [sorted(p) for p in vp],
        "color_parts": [sorted(p) for p in cp],
        "source": "raw collection (no cleaning step)",
    }
    return ReducedCollection(L, M, members, provenance, tuple(warnings))


@dataclass(frozen=True)
class DegreeInheritanceReport:
    threshold: Fraction
    target: float
    vertex_fractions: tuple[float, ...]   # per cluster: share of colors where it keeps both degrees
    color_fractions: tuple[float, ...]    # per color cluster: share of clusters keeping both degrees

    def to_dict(self) -> dict:
        return {"threshold": str(self.threshold), "target": self.target,
                "vertex_fractions": list(self.vertex_fractions), "color_fractions": list(self.color_fractions)}


def degree_inheritance_report(rc: ReducedCollection, p: float | Fraction, gamma: float | Fraction,
                              d: float | Fraction | None = None) -> DegreeInheritanceReport:
    """Diagnostic: how often clusters keep semi-degree at least ``(p + gamma/2) L`` in the reduced digraphs.

    ``target`` is ``1 - d^(1/4)``; ``d`` defaults to the one recorded in the provenance.
    """
    thr = (as_fraction(p) + as_fraction(gamma) / 2) * rc.L
    dd = as_fraction(d if d is not None else rc.provenance.get("d", "0"))
    ok = [[r.out_degree(i) >= thr and r.in_degree(i) >= thr for r in rc.members] for i in range(rc.L)]
    vf = tuple(sum(row) / rc.M for row in ok)
    cf = tuple(sum(ok[i][j] for i in range(rc.L)) / rc.L for j in range(rc.M))
    return DegreeInheritanceReport(thr, 1 - float(dd) ** 0.25, vf, cf)


@dataclass(frozen=True)
class AuxiliaryHypergraph:
    """4-uniform hypergraph on ``V | C | S1 | S2``.

    Nodes are tagged pairs ``("v", i)``, ``("c", c)``, ``("s1", x)``, ``("s2", x)``.
    Each edge ``i -> j`` of color ``c`` yields ``{i, j, c, x}`` for every ``x``
    in ``S1`` if ``i < j`` and in ``S2`` otherwise.
    """

    n: int
    m: int
    edges: tuple[tuple[tuple[str, int], ...], ...]

    def nodes(self) -> list[tuple[str, int]]:
        return ([("v", i) for i in range(self.n)] + [("c", c) for c in range(self.m)]
                + [("s1", x) for x in range(self.n)] + [("s2", x) for x in range(self.n)])

    def degrees(self) -> Counter:
        deg: Counter = Counter()
        for e in self.edges:
            deg.update(e)
        return deg


def build_auxiliary_4graph(dc: DigraphCollection) -> AuxiliaryHypergraph:
    n = dc.n
    edges = []
    for c, dg in enumerate(dc.digraphs):
        for i, j in dg.edges():
            side = "s1" if i < j else "s2"
            for x in range(n):
                edges.append((("v", i), ("v", j), ("c", c), (side, x)))
    return AuxiliaryHypergraph(n, dc.m, tuple(edges))
