"""Absorbing gadgets inside rainbow cycles and rainbow matchings.

A Type-I ``c``-absorbing path of ``(v, u)`` is a rainbow segment
``v1 v2 v3 v4`` with ``c`` in ``L(v2 v)`` and ``col(v2 v3)`` in ``L(u v3)``:
the edge ``v2 v3`` can be replaced by ``v2 -> v`` (color ``c``), a rainbow
path from ``v`` to ``u``, and ``u -> v3`` (the old color). Type-II mirrors
this: ``c`` in ``L(v v3)`` and ``col(v2 v3)`` in ``L(v2 u)``, so the route is
``v2 -> u`` (old color), a path from ``u`` to ``v``, ``v -> v3`` (color
``c``). With ``u = v`` a single vertex is inserted.

The bipartite analogue is a ``c``-absorbing edge ``w1 w2`` of ``(u, v)``:
``c`` in ``L(w1 v)`` and ``col(w1 w2)`` in ``L(u w2)``.
"""

from __future__ import annotations

import enum
from collections.abc import Callable, Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidArgumentError, InvalidWitnessError
from .model import (
    BipartiteCollection,
    CertKind,
    DigraphCollection,
    RainbowCertificate,
    validate_certificate,
    validate_matching,
)
from .rational import as_fraction

__all__ = [
    "AbsorberKind",
    "AbsorberScan",
    "AbsorberWitness",
    "AbsorbingCycleParams",
    "AbsorptionReport",
    "absorb",
    "absorb_edge",
    "enumerate_absorbers",
    "is_absorbing_edge",
    "is_absorbing_path",
    "max_disjoint_windows",
    "verify_absorbing_cycle",
    "verify_absorbing_matching",
]


class AbsorberKind(str, enum.Enum):
    TYPE_I = "type-I"
    TYPE_II = "type-II"
    BIP_EDGE = "bip-edge"


@dataclass(frozen=True)
class AbsorberWitness:
    """``segment`` is ``(v1, v2, v3, v4)`` with its three edge colors, or ``(w1, w2)`` with one color.

    ``position`` is the cycle index of ``v1`` when the witness came from a scan.
    """

    kind: AbsorberKind
    segment: tuple[int, ...]
    segment_colors: tuple[int, ...]
    c: int
    v: int
    u: int
    position: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", AbsorberKind(self.kind))
        object.__setattr__(self, "segment", tuple(self.segment))
        object.__setattr__(self, "segment_colors", tuple(self.segment_colors))


@dataclass(frozen=True)
class AbsorbingCycleParams:
    delta: Fraction
    delta_prime: Fraction
    gamma: Fraction
    gamma_prime: Fraction

    def __post_init__(self) -> None:
        for name in ("delta", "delta_prime", "gamma", "gamma_prime"):
            x = as_fraction(getattr(self, name))
            if not 0 <= x <= 1:
                raise InvalidArgumentError(f"{name} must lie in [0, 1], got {x}")
            object.__setattr__(self, name, x)


def _check_path_segment(dc: DigraphCollection, seg: tuple[int, ...], cols: tuple[int, ...], c: int,
                        v: int, u: int) -> None:
    n, m = dc.n, dc.m
    if len(seg) != 4 or len(cols) != 3:
        raise InvalidWitnessError("a segment needs 4 vertices and 3 colors")
    if len(set(seg)) != 4 or any(not 0 <= x < n for x in seg):
        raise InvalidWitnessError(f"segment {seg} is not 4 distinct vertices of 0..{n - 1}")
    if len(set(cols)) != 3 or any(not 0 <= x < m for x in cols):
        raise InvalidWitnessError(f"segment colors {[x + 1 for x in cols]} are not 3 distinct colors")
    for k in range(3):
        if not dc.digraphs[cols[k]].has_edge(seg[k], seg[k + 1]):
            raise InvalidWitnessError(f"edge ({seg[k]}, {seg[k + 1]}) is not in color {cols[k] + 1}")
    if not (0 <= v < n and 0 <= u < n):
        raise InvalidWitnessError(f"target ({v}, {u}) outside 0..{n - 1}")
    if {v, u} & set(seg):
        raise InvalidWitnessError(f"target ({v}, {u}) meets the segment {seg}")
    if not 0 <= c < m or c in cols:
        raise InvalidWitnessError(f"color {c + 1} is out of range or already on the segment")


def _conditions(dc: DigraphCollection, kind: AbsorberKind, seg: tuple[int, ...], col23: int, c: int,
                v: int, u: int) -> bool:
    _, v2, v3, _ = seg
    if kind is AbsorberKind.TYPE_I:
        return dc.digraphs[c].has_edge(v2, v) and dc.digraphs[col23].has_edge(u, v3)
    if kind is AbsorberKind.TYPE_II:
        return dc.digraphs[c].has_edge(v, v3) and dc.digraphs[col23].has_edge(v2, u)
    raise InvalidArgumentError(f"{kind.value} is not a path absorber kind")


def is_absorbing_path(dc: DigraphCollection, kind: AbsorberKind | str, segment: Iterable[int],
                      segment_colors: Iterable[int], c: int, v: int, u: int) -> bool:
    """Membership test for a Type-I/II ``c``-absorbing path of ``(v, u)``.

    Raises ``InvalidWitnessError`` if the segment is not a rainbow path, if
    ``v`` or ``u`` lies on it, or if ``c`` already colors it.
    """
    seg, cols = tuple(segment), tuple(segment_colors)
    _check_path_segment(dc, seg, cols, c, v, u)
    return _conditions(dc, AbsorberKind(kind), seg, cols[1], c, v, u)


def max_disjoint_windows(starts: Iterable[int], length: int, window: int = 4) -> tuple[int, ...]:
    """Maximum set of pairwise disjoint windows ``[s, s + window)`` on a cycle of ``length`` positions.

    Fixing one window of an optimum leaves an interval problem on the rest
    of the circle, which the earliest-start greedy solves (equal widths), so
    trying every first window is exact.
    """
    ss = sorted(set(s % length for s in starts))
    if window > length:
        return ()
    best: tuple[int, ...] = ()
    for i, s in enumerate(ss):
        chosen = [s]
        nxt = s + window
        for t in ss[i + 1:] + [x + length for x in ss[:i]]:
            if t >= nxt and t + window <= s + length:
                chosen.append(t % length)
                nxt = t + window
        if len(chosen) > len(best):
            best = tuple(chosen)
    return best


@dataclass(frozen=True)
class AbsorberScan:
    witnesses: tuple[AbsorberWitness, ...]
    disjoint: tuple[AbsorberWitness, ...]

    @property
    def disjoint_count(self) -> int:
        return len(self.disjoint)


def _cycle_parts(dc: DigraphCollection, cycle: RainbowCertificate) -> tuple[list[int], list[int]]:
    if cycle.kind not in (CertKind.CYCLE, CertKind.HAMILTON_CYCLE):
        raise InvalidArgumentError(f"expected a cycle certificate, got {cycle.kind.value}")
    rep = validate_certificate(dc, RainbowCertificate(cycle.edges, cycle.colors, CertKind.CYCLE))
    if not rep.ok:
        raise InvalidArgumentError(f"invalid cycle: {rep.violations[0]}")
    return cycle.vertex_order(), list(cycle.colors)


def _scan(dc: DigraphCollection, order: list[int], cols: list[int], kind: AbsorberKind, c: int, v: int,
          u: int) -> list[AbsorberWitness]:
    t = len(order)
    if t < 4:
        return []
    out = []
    for i in range(t):
        seg = tuple(order[(i + k) % t] for k in range(4))
        if _conditions(dc, kind, seg, cols[(i + 1) % t], c, v, u):
            out.append(AbsorberWitness(kind, seg, tuple(cols[(i + k) % t] for k in range(3)), c, v, u, i))
    return out


def enumerate_absorbers(dc: DigraphCollection, cycle: RainbowCertificate, c: int, v: int, u: int,
                        kind: AbsorberKind | str) -> AbsorberScan:
    """All 4-vertex segments of ``cycle`` that absorb ``(v, u)`` with ``c``, plus a maximum disjoint subset."""
    kind = AbsorberKind(kind)
    order, cols = _cycle_parts(dc, cycle)
    if v in order or u in order:
        raise InvalidWitnessError(f"target ({v}, {u}) lies on the cycle")
    if not 0 <= c < dc.m or c in cols:
        raise InvalidWitnessError(f"color {c + 1} is out of range or used by the cycle")
    if not (0 <= v < dc.n and 0 <= u < dc.n):
        raise InvalidWitnessError(f"target ({v}, {u}) outside 0..{dc.n - 1}")
    found = _scan(dc, order, cols, kind, c, v, u)
    keep = set(max_disjoint_windows([w.position for w in found], len(order)))
    return AbsorberScan(tuple(found), tuple(w for w in found if w.position in keep))


def _locate(order: list[int], cols: list[int], w: AbsorberWitness) -> int:
    t = len(order)
    for i in range(t):
        if (tuple(order[(i + k) % t] for k in range(4)) == w.segment
                and tuple(cols[(i + k) % t] for k in range(3)) == w.segment_colors):
            return i
    raise InvalidWitnessError(f"segment {w.segment} with its colors is not on the cycle")


def absorb(dc: DigraphCollection, cycle: RainbowCertificate, witness: AbsorberWitness,
           payload: RainbowCertificate | None = None) -> RainbowCertificate:
    """Insert ``v`` (and a path to ``u``) into ``cycle`` at the witness segment.

    ``payload`` is a rainbow path from ``v`` to ``u`` (Type-I) or from ``u``
    to ``v`` (Type-II); it is omitted for single-vertex absorption
    (``u == v``). The result is a ``cycle`` certificate.
    """
    order, cols = _cycle_parts(dc, cycle)
    kind, c, v, u = witness.kind, witness.c, witness.v, witness.u
    if kind is AbsorberKind.BIP_EDGE:
        raise InvalidArgumentError("bipartite edge witnesses are absorbed with absorb_edge")
    if not is_absorbing_path(dc, kind, witness.segment, witness.segment_colors, c, v, u):
        raise InvalidWitnessError("the witness conditions do not hold")
    on_cycle = set(order)
    for x in (v, u):
        if x in on_cycle:
            raise InvalidArgumentError(f"vertex {x} already lies on the cycle")
    if c in cols:
        raise InvalidArgumentError(f"color {c + 1} already lies on the cycle")
    i = _locate(order, cols, witness)
    t = len(order)
    col23 = cols[(i + 1) % t]
    if payload is None:
        if u != v:
            raise InvalidArgumentError("absorbing a pair needs a payload path")
        route, route_cols = [v], []
    else:
        if payload.kind not in (CertKind.PATH, CertKind.HAMILTON_PATH):
            raise InvalidArgumentError(f"payload must be a path, got {payload.kind.value}")
        rep = validate_certificate(dc, RainbowCertificate(payload.edges, payload.colors, CertKind.PATH))
        if not rep.ok:
            raise InvalidArgumentError(f"invalid payload: {rep.violations[0]}")
        route, route_cols = payload.vertex_order(), list(payload.colors)
        first, last = (v, u) if kind is AbsorberKind.TYPE_I else (u, v)
        if route[0] != first or route[-1] != last:
            raise InvalidArgumentError(f"payload must run from {first} to {last}, got {route[0]}..{route[-1]}")
        for x in route:
            if x in on_cycle:
                raise InvalidArgumentError(f"payload vertex {x} lies on the cycle")
        for x in route_cols:
            if x in cols or x == c:
                raise InvalidArgumentError(f"payload color {x + 1} clashes with the cycle or with color {c + 1}")
    if kind is AbsorberKind.TYPE_I:
        enter, leave = c, col23
    else:
        enter, leave = col23, c
    # rotate so the rewritten edge (v2, v3) is last, then splice the route in
    start = (i + 2) % t
    rot = order[start:] + order[:start]
    rot_cols = cols[start:] + cols[:start]
    new_order = rot + route
    new_cols = rot_cols[:-1] + [enter] + route_cols + [leave]
    out = RainbowCertificate.from_cycle(new_order, new_cols, CertKind.CYCLE)
    rep = validate_certificate(dc, out)
    if not rep.ok:
        raise InvalidArgumentError(f"absorption produced an invalid cycle: {rep.violations[0]}")
    return out


@dataclass(frozen=True)
class AbsorptionReport:
    ok: bool
    size_ok: bool
    length_ok: bool
    pair_failures: Mapping[int, int]      # color -> worst number of failing u over good v
    single_failures: Mapping[int, int]    # color -> number of good v failing the (v, v) bound
    bounds: Mapping[str, str] = field(default_factory=dict)
    examples: tuple[str, ...] = ()


def _good_sets(good: Callable[[int], Iterable[int]] | Mapping[int, Iterable[int]] | None, n: int):
    if good is None:
        return lambda c: frozenset(range(n))
    if isinstance(good, Mapping):
        return lambda c: frozenset(good[c])
    return lambda c: frozenset(good(c))


def verify_absorbing_cycle(dc: DigraphCollection, cycle: RainbowCertificate, colors: Iterable[int],
                           params: AbsorbingCycleParams, good=None, kind: AbsorberKind | str = AbsorberKind.TYPE_I,
                           workers: int = 1) -> AbsorptionReport:
    """Check the absorbing-cycle conditions for a color set.

    ``good`` maps a color to its good vertices (all vertices when omitted).
    For every color ``c`` and good ``v`` off the cycle, at most
    ``delta' n`` vertices ``u`` off the cycle may lack ``gamma' n`` disjoint
    absorbers of ``(v, u)``, and at most ``delta' n`` good ``v`` may lack
    them for ``(v, v)``.
    """
    kind = AbsorberKind(kind)
    n = dc.n
    order, cols = _cycle_parts(dc, cycle)
    cset = sorted(set(colors))
    clash = set(cset) & set(cols)
    if clash:
        raise InvalidArgumentError(f"colors {sorted(x + 1 for x in clash)} are used by the cycle")
    if any(not 0 <= c < dc.m for c in cset):
        raise InvalidArgumentError("color set leaves the collection")
    goods = _good_sets(good, n)
    p = params
    need = p.gamma_prime * n
    slack = p.delta_prime * n
    off = [x for x in range(n) if x not in set(order)]
    t = len(order)

    def per_color(c: int) -> tuple[int, int, list[str]]:
        worst, single, ex = 0, 0, []
        for v in sorted(goods(c) - set(order)):
            fails = 0
            for u in off:
                starts = [w.position for w in _scan(dc, order, cols, kind, c, v, u)]
                if len(max_disjoint_windows(starts, t)) < need:
                    if u == v:
                        single += 1
                    else:
                        fails += 1
            worst = max(worst, fails)
            if fails > slack and len(ex) < 3:
                ex.append(f"color {c + 1}, v={v}: {fails} vertices u lack {need} absorbers")
        return worst, single, ex

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(per_color, cset))
    else:
        results = [per_color(c) for c in cset]
    pair = {c: r[0] for c, r in zip(cset, results)}
    single = {c: r[1] for c, r in zip(cset, results)}
    examples = tuple(e for r in results for e in r[2])
    size_ok = len(cset) >= p.delta * n
    length_ok = t <= p.gamma * n
    ok = (size_ok and length_ok and all(x <= slack for x in pair.values())
          and all(x <= slack for x in single.values()))
    bounds = {"delta_n": str(p.delta * n), "gamma_n": str(p.gamma * n), "gamma_prime_n": str(need),
              "delta_prime_n": str(slack)}
    return AbsorptionReport(ok, size_ok, length_ok, pair, single, bounds, examples)


# ---------------------------------------------------------------------------
# bipartite


def is_absorbing_edge(bc: BipartiteCollection, edge: tuple[int, int], edge_color: int, c: int, u: int,
                      v: int) -> bool:
    """Is the edge ``w1 w2`` (left, right) of ``edge_color`` a ``c``-absorbing edge of ``(u, v)``?"""
    w1, w2 = edge
    n, m = bc.n, bc.m
    if not all(0 <= x < n for x in (w1, w2, u, v)):
        raise InvalidWitnessError(f"vertices outside 0..{n - 1}")
    if u == w1 or v == w2:
        raise InvalidWitnessError(f"({u}, {v}) meets the edge ({w1}, {w2})")
    if not (0 <= c < m and 0 <= edge_color < m) or c == edge_color:
        raise InvalidWitnessError(f"color {c + 1} is out of range or equals the edge color")
    if not bc.has_edge(edge_color, w1, w2):
        raise InvalidWitnessError(f"edge ({w1}, {w2}) is not in color {edge_color + 1}")
    return bc.has_edge(c, w1, v) and bc.has_edge(edge_color, u, w2)


def absorb_edge(bc: BipartiteCollection, matching: RainbowCertificate, edge: tuple[int, int], c: int, u: int,
                v: int) -> RainbowCertificate:
    """Replace ``w1 w2`` by ``w1 v`` (color ``c``) and ``u w2`` (its old color)."""
    rep = validate_matching(bc, matching)
    if not rep.ok:
        raise InvalidArgumentError(f"invalid matching: {rep.violations[0]}")
    edges = list(matching.edges)
    try:
        k = edges.index(tuple(edge))
    except ValueError:
        raise InvalidWitnessError(f"edge {tuple(edge)} is not in the matching") from None
    old = matching.colors[k]
    if c in matching.colors:
        raise InvalidArgumentError(f"color {c + 1} is already used by the matching")
    if u in {a for a, _ in edges}:
        raise InvalidArgumentError(f"left vertex {u} is already matched")
    if v in {b for _, b in edges}:
        raise InvalidArgumentError(f"right vertex {v} is already matched")
    if not is_absorbing_edge(bc, edge, old, c, u, v):
        raise InvalidWitnessError("the absorbing-edge conditions do not hold")
    w1, w2 = edge
    new_edges = edges[:k] + [(w1, v), (u, w2)] + edges[k + 1:]
    new_cols = list(matching.colors[:k]) + [c, old] + list(matching.colors[k + 1:])
    out = RainbowCertificate(tuple(new_edges), tuple(new_cols), CertKind.MATCHING)
    rep = validate_matching(bc, out)
    if not rep.ok:
        raise InvalidArgumentError(f"absorption produced an invalid matching: {rep.violations[0]}")
    return out


def verify_absorbing_matching(bc: BipartiteCollection, matching: RainbowCertificate, colors: Iterable[int],
                              params: AbsorbingCycleParams, good=None) -> AbsorptionReport:
    """Bipartite analogue of :func:`verify_absorbing_cycle`.

    ``good`` maps a color to its good right-side vertices. For every color
    ``c`` and good right vertex ``v`` off the matching, at most ``delta' n``
    left vertices ``u`` off the matching may have fewer than ``gamma' n``
    ``c``-absorbing edges of ``(u, v)`` in the matching.
    """
    rep = validate_matching(bc, matching)
    if not rep.ok:
        raise InvalidArgumentError(f"invalid matching: {rep.violations[0]}")
    n = bc.n
    cset = sorted(set(colors))
    clash = set(cset) & set(matching.colors)
    if clash:
        raise InvalidArgumentError(f"colors {sorted(x + 1 for x in clash)} are used by the matching")
    goods = _good_sets(good, n)
    p = params
    need = p.gamma_prime * n
    slack = p.delta_prime * n
    lefts = {a for a, _ in matching.edges}
    rights = {b for _, b in matching.edges}
    pair: dict[int, int] = {}
    examples: list[str] = []
    for c in cset:
        worst = 0
        for v in sorted(goods(c) - rights):
            fails = 0
            for u in range(n):
                if u in lefts:
                    continue
                cnt = sum(1 for (w1, w2), col in zip(matching.edges, matching.colors)
                          if col != c and bc.has_edge(c, w1, v) and bc.has_edge(col, u, w2))
                if cnt < need:
                    fails += 1
            worst = max(worst, fails)
            if fails > slack and len(examples) < 3:
                examples.append(f"color {c + 1}, v={v}: {fails} vertices u lack {need} absorbing edges")
        pair[c] = worst
    size_ok = len(cset) >= p.delta * n
    length_ok = len(matching.edges) <= p.gamma * n
    ok = size_ok and length_ok and all(x <= slack for x in pair.values())
    bounds = {"delta_n": str(p.delta * n), "gamma_n": str(p.gamma * n), "gamma_prime_n": str(need),
              "delta_prime_n": str(slack)}
    return AbsorptionReport(ok, size_ok, length_ok, pair, {}, bounds, tuple(examples))
