"""Rainbow matchings in collections of directed k-graphs.

A directed k-edge is a tuple of ``k`` distinct vertices. A rainbow matching
picks at most one edge from each hypergraph ``H_i`` so that the picked edges
are vertex-disjoint; it is stored as ``{i: edge}``. A coverage target
``Z_j`` is a set of labelled edges ``(i, edge)``; a matching edge counts for
``Z_j`` when its labelled pair lies in ``Z_j``.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidArgumentError, ShapeError
from .rational import as_fraction

__all__ = [
    "KMatchingReport",
    "greedy_rainbow_kgraph_matching",
    "max_hypothesis_eps",
    "verify_rainbow_kgraph_matching",
]

Edge = tuple[int, ...]
Labelled = tuple[int, Edge]


def _normalize(n: int, k: int, hypergraphs: Sequence[Iterable[Sequence[int]]],
               Z: Sequence[Iterable[tuple[int, Sequence[int]]]]) -> tuple[list[frozenset[Edge]], list[frozenset[Labelled]]]:
    hs: list[frozenset[Edge]] = []
    for i, h in enumerate(hypergraphs):
        edges = set()
        for e in h:
            e = tuple(int(x) for x in e)
            if len(e) != k or len(set(e)) != k or any(not 0 <= x < n for x in e):
                raise ShapeError(f"hypergraph {i}: {e} is not a {k}-edge on 0..{n - 1}")
            edges.add(e)
        hs.append(frozenset(edges))
    zs: list[frozenset[Labelled]] = []
    for j, z in enumerate(Z):
        pairs = set()
        for i, e in z:
            e = tuple(int(x) for x in e)
            if not 0 <= i < len(hs) or len(e) != k:
                raise ShapeError(f"Z[{j}]: ({i}, {e}) does not name a {k}-edge of a hypergraph")
            pairs.add((int(i), e))
        zs.append(frozenset(pairs))
    return hs, zs


@dataclass(frozen=True)
class KMatchingReport:
    hypotheses_ok: bool
    conclusions_ok: bool
    matching_valid: bool
    size: int
    size_bound: Fraction
    coverage: tuple[int, ...]
    coverage_bound: Fraction
    edge_bound: Fraction
    small_hypergraphs: tuple[int, ...]
    weak_targets: tuple[int, ...]
    problems: tuple[str, ...] = field(default_factory=tuple)

    @property
    def failing_side(self) -> str | None:
        """``"hypotheses"``, ``"conclusions"`` or ``None`` when both hold."""
        if not self.hypotheses_ok:
            return "hypotheses"
        return None if self.conclusions_ok else "conclusions"


def verify_rainbow_kgraph_matching(n: int, k: int, hypergraphs: Sequence[Iterable[Sequence[int]]],
                                   Z: Sequence[Iterable[tuple[int, Sequence[int]]]],
                                   matching: Mapping[int, Sequence[int]], eps: float | Fraction,
                                   t: int | None = None) -> KMatchingReport:
    """Check the hypotheses and conclusions of the large-rainbow-matching statement.

    Hypotheses: every ``|E(H_i)| >= eps n^k``, and each ``Z_j`` shares at least
    ``eps n^k`` edges with at least ``eps t`` of the hypergraphs.
    Conclusions: the matching is a valid rainbow matching with
    ``|M| >= (1 - eps^2/4) t`` and ``|Z_j & M| >= eps^2 t / 4`` for every ``j``.
    """
    hs, zs = _normalize(n, k, hypergraphs, Z)
    t = len(hs) if t is None else t
    if t != len(hs):
        raise ShapeError(f"t={t} but {len(hs)} hypergraphs were given")
    e = as_fraction(eps)
    if not 0 < e <= 1:
        raise InvalidArgumentError(f"eps must lie in (0, 1], got {eps}")
    edge_bound = e * n ** k
    small = tuple(i for i, h in enumerate(hs) if len(h) < edge_bound)
    weak = []
    for j, z in enumerate(zs):
        per = [0] * t
        for i, _ in z:
            per[i] += 1
        if sum(1 for c in per if c >= edge_bound) < e * t:
            weak.append(j)
    problems: list[str] = []
    used: set[int] = set()
    pairs: set[Labelled] = set()
    for i, edge in sorted(matching.items()):
        edge = tuple(int(x) for x in edge)
        if not 0 <= i < t:
            problems.append(f"matching index {i} outside 0..{t - 1}")
            continue
        if edge not in hs[i]:
            problems.append(f"{edge} is not an edge of hypergraph {i}")
        if used & set(edge):
            problems.append(f"{edge} shares vertices with another matching edge")
        used |= set(edge)
        pairs.add((i, edge))
    size_bound = (1 - e * e / 4) * t
    cov_bound = e * e * t / 4
    coverage = tuple(len(z & pairs) for z in zs)
    conclusions = not problems and len(pairs) >= size_bound and all(c >= cov_bound for c in coverage)
    return KMatchingReport(not small and not weak, conclusions, not problems, len(pairs), size_bound, coverage,
                           cov_bound, edge_bound, small, tuple(weak), tuple(problems))


def max_hypothesis_eps(n: int, k: int, hypergraphs: Sequence[Iterable[Sequence[int]]],
                       Z: Sequence[Iterable[tuple[int, Sequence[int]]]]) -> Fraction:
    """Largest ``eps`` in ``(0, 1]`` satisfying the hypotheses (0 if none does)."""
    hs, zs = _normalize(n, k, hypergraphs, Z)
    t = len(hs)
    if t == 0:
        return Fraction(1)
    nk = n ** k
    best = min(Fraction(len(h), nk) for h in hs)
    for z in zs:
        per = [0] * t
        for i, _ in z:
            per[i] += 1
        per.sort(reverse=True)
        best = min(best, max(min(Fraction(per[r - 1], nk), Fraction(r, t)) for r in range(1, t + 1)))
    return min(best, Fraction(1))


def greedy_rainbow_kgraph_matching(n: int, k: int, hypergraphs: Sequence[Iterable[Sequence[int]]],
                                   Z: Sequence[Iterable[tuple[int, Sequence[int]]]], seed: int = 0,
                                   restarts: int = 8) -> dict[int, Edge]:
    """Randomized greedy: visit hypergraphs in random order and take a free edge,
    preferring one that serves the currently least-covered target.

    Keeps the best of ``restarts`` passes (larger matching, then larger
    minimum coverage). Deterministic under ``seed``.
    """
    hs, zs = _normalize(n, k, hypergraphs, Z)
    member: dict[Labelled, list[int]] = {}
    for j, z in enumerate(zs):
        for p in z:
            member.setdefault(p, []).append(j)
    rng = random.Random(seed)
    best: dict[int, Edge] = {}
    best_key = (-1, -1)
    for _ in range(max(1, restarts)):
        order = list(range(len(hs)))
        rng.shuffle(order)
        cov = [0] * len(zs)
        used: set[int] = set()
        out: dict[int, Edge] = {}
        for i in order:
            cands = sorted(e for e in hs[i] if not used.intersection(e))
            if not cands:
                continue
            rng.shuffle(cands)

            def score(e: Edge) -> tuple[int, int]:
                js = member.get((i, e), [])
                low = min((cov[j] for j in js), default=1 << 30)
                return (-low, len(js))

            pick = max(cands, key=score)
            out[i] = pick
            used.update(pick)
            for j in member.get((i, pick), []):
                cov[j] += 1
        key = (len(out), min(cov, default=0))
        if key > best_key:
            best, best_key = out, key
    return best
