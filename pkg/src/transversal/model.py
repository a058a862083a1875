"""Digraphs, digraph collections, bipartite collections and rainbow certificates.

Vertex sets are stored as Python ``int`` bitsets: bit ``v`` is set iff vertex
``v`` belongs to the set. Colors are 0-based everywhere in the library and
shifted to 1-based only at the serialization boundary.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field

from .errors import InvalidArgumentError

__all__ = [
    "BipartiteCollection",
    "CertKind",
    "ColorList",
    "Digraph",
    "DigraphCollection",
    "RainbowCertificate",
    "ValidityReport",
    "bits",
    "characteristic_bipartite",
    "collection_semi_degree",
    "color_list",
    "mask_of",
    "restricted_collection",
    "semi_degree",
    "validate_certificate",
    "validate_matching",
]


def mask_of(vertices: Iterable[int] | int) -> int:
    """Bitset of an iterable of vertices (ints pass through unchanged)."""
    if isinstance(vertices, int):
        return vertices
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _transpose(n: int, rows: Sequence[int]) -> tuple[int, ...]:
    cols = [0] * n
    for u, row in enumerate(rows):
        for v in bits(row):
            cols[v] |= 1 << u
    return tuple(cols)


@dataclass(frozen=True, eq=False)
class Digraph:
    """Loop-free digraph on ``0..n-1`` with at most one edge per ordered pair."""

    n: int
    out_adj: tuple[int, ...]
    in_adj: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidArgumentError(f"vertex count must be >= 1, got {self.n}")
        out_adj = tuple(int(x) for x in self.out_adj)
        if len(out_adj) != self.n:
            raise InvalidArgumentError("out_adj must have one bitset per vertex")
        full = (1 << self.n) - 1
        for v, row in enumerate(out_adj):
            if row & ~full or row < 0:
                raise InvalidArgumentError(f"vertex {v} has a neighbour outside 0..{self.n - 1}")
            if row >> v & 1:
                raise InvalidArgumentError(f"loop at vertex {v}")
        object.__setattr__(self, "out_adj", out_adj)
        object.__setattr__(self, "in_adj", _transpose(self.n, out_adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Digraph:
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidArgumentError(f"edge ({u}, {v}) outside 0..{n - 1}")
            if u == v:
                raise InvalidArgumentError(f"loop at vertex {u}")
            rows[u] |= 1 << v
        return cls(n, tuple(rows))

    @classmethod
    def complete(cls, n: int) -> Digraph:
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << v) for v in range(n)))

    @classmethod
    def empty(cls, n: int) -> Digraph:
        return cls(n, (0,) * n)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.out_adj == other.out_adj

    def __hash__(self) -> int:
        return hash((self.n, self.out_adj))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.out_adj[u] >> v & 1)

    def out_degree(self, v: int, within: int | None = None) -> int:
        row = self.out_adj[v]
        return (row if within is None else row & within).bit_count()

    def in_degree(self, v: int, within: int | None = None) -> int:
        row = self.in_adj[v]
        return (row if within is None else row & within).bit_count()

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, row in enumerate(self.out_adj):
            for v in bits(row):
                yield (u, v)

    def num_edges(self) -> int:
        return sum(row.bit_count() for row in self.out_adj)

    def edges_between(self, a: Iterable[int] | int, b: Iterable[int] | int) -> int:
        """``e_D(A, B)``: edges with tail in ``A`` and head in ``B`` (sets may overlap)."""
        bmask = mask_of(b)
        return sum((self.out_adj[u] & bmask).bit_count() for u in bits(mask_of(a)))

    def with_edge(self, u: int, v: int) -> Digraph:
        rows = list(self.out_adj)
        rows[u] |= 1 << v
        return Digraph(self.n, tuple(rows))

    def induced(self, vertices: Sequence[int]) -> Digraph:
        index = {v: i for i, v in enumerate(vertices)}
        return Digraph.from_edges(
            len(vertices),
            ((index[u], index[v]) for u, v in self.edges() if u in index and v in index),
        )


@dataclass(frozen=True)
class ColorList:
    """``L(xy)``: colors whose digraph contains the directed edge ``x -> y``."""

    pair: tuple[int, int]
    colors: frozenset[int]


@dataclass(frozen=True)
class DigraphCollection:
    """An ordered family of digraphs on one vertex set; list index is the color."""

    n: int
    digraphs: tuple[Digraph, ...]

    def __post_init__(self) -> None:
        digraphs = tuple(self.digraphs)
        if not digraphs:
            raise InvalidArgumentError("a collection needs at least one digraph")
        for c, d in enumerate(digraphs):
            if d.n != self.n:
                raise InvalidArgumentError(f"color {c + 1} has {d.n} vertices, expected {self.n}")
        object.__setattr__(self, "digraphs", digraphs)

    @classmethod
    def from_edge_lists(cls, n: int, edge_lists: Iterable[Iterable[tuple[int, int]]]) -> DigraphCollection:
        return cls(n, tuple(Digraph.from_edges(n, es) for es in edge_lists))

    @classmethod
    def uniform(cls, digraph: Digraph, m: int) -> DigraphCollection:
        return cls(digraph.n, (digraph,) * m)

    @property
    def m(self) -> int:
        return len(self.digraphs)

    def __getitem__(self, color: int) -> Digraph:
        return self.digraphs[color]

    def __iter__(self) -> Iterator[Digraph]:
        return iter(self.digraphs)

    def color_mask(self, x: int, y: int) -> int:
        """Bitset over colors of ``L(xy)``."""
        m = 0
        for c, d in enumerate(self.digraphs):
            if d.out_adj[x] >> y & 1:
                m |= 1 << c
        return m

    def union(self) -> Digraph:
        rows = [0] * self.n
        for d in self.digraphs:
            for v in range(self.n):
                rows[v] |= d.out_adj[v]
        return Digraph(self.n, tuple(rows))

    def replace(self, color: int, digraph: Digraph) -> DigraphCollection:
        ds = list(self.digraphs)
        ds[color] = digraph
        return DigraphCollection(self.n, tuple(ds))


@dataclass(frozen=True)
class BipartiteCollection:
    """Bipartite graphs on parts ``V1 = V2 = 0..n-1``.

    ``graphs[c][u]`` is the bitset of right vertices adjacent to left vertex
    ``u`` in color ``c``.
    """

    n: int
    graphs: tuple[tuple[int, ...], ...]
    right_adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidArgumentError("part size must be >= 1")
        graphs = tuple(tuple(int(x) for x in g) for g in self.graphs)
        if not graphs:
            raise InvalidArgumentError("a collection needs at least one graph")
        full = (1 << self.n) - 1
        for c, g in enumerate(graphs):
            if len(g) != self.n or any(row & ~full or row < 0 for row in g):
                raise InvalidArgumentError(f"color {c + 1} is not a bipartite graph on parts of size {self.n}")
        object.__setattr__(self, "graphs", graphs)
        object.__setattr__(self, "right_adj", tuple(_transpose(self.n, g) for g in graphs))

    @classmethod
    def from_edge_lists(cls, n: int, edge_lists: Iterable[Iterable[tuple[int, int]]]) -> BipartiteCollection:
        graphs = []
        for es in edge_lists:
            rows = [0] * n
            for u, v in es:
                if not (0 <= u < n and 0 <= v < n):
                    raise InvalidArgumentError(f"edge ({u}, {v}) outside 0..{n - 1}")
                rows[u] |= 1 << v
            graphs.append(tuple(rows))
        return cls(n, tuple(graphs))

    @property
    def m(self) -> int:
        return len(self.graphs)

    def has_edge(self, color: int, u: int, v: int) -> bool:
        return bool(self.graphs[color][u] >> v & 1)

    def left_degree(self, color: int, u: int) -> int:
        return self.graphs[color][u].bit_count()

    def right_degree(self, color: int, v: int) -> int:
        return self.right_adj[color][v].bit_count()

    def edges(self, color: int) -> Iterator[tuple[int, int]]:
        for u, row in enumerate(self.graphs[color]):
            for v in bits(row):
                yield (u, v)

    def edges_between(self, color: int, a: Iterable[int] | int, b: Iterable[int] | int) -> int:
        bmask = mask_of(b)
        g = self.graphs[color]
        return sum((g[u] & bmask).bit_count() for u in bits(mask_of(a)))

    def color_mask(self, u: int, v: int) -> int:
        m = 0
        for c, g in enumerate(self.graphs):
            if g[u] >> v & 1:
                m |= 1 << c
        return m


class CertKind(str, enum.Enum):
    HAMILTON_CYCLE = "hamilton-cycle"
    HAMILTON_PATH = "hamilton-path"
    MATCHING = "matching"
    CYCLE_COVER = "cycle-cover"
    CYCLE = "cycle"
    PATH = "path"


_TRANSVERSAL_KINDS = (CertKind.HAMILTON_CYCLE, CertKind.HAMILTON_PATH, CertKind.CYCLE_COVER)


@dataclass(frozen=True)
class RainbowCertificate:
    """A subgraph with an injective edge coloring; ``colors[k]`` colors ``edges[k]``."""

    edges: tuple[tuple[int, int], ...]
    colors: tuple[int, ...]
    kind: CertKind

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        object.__setattr__(self, "kind", CertKind(self.kind))
        if len(self.edges) != len(self.colors):
            raise InvalidArgumentError("edges and colors must have the same length")

    @classmethod
    def from_cycle(cls, vertices: Sequence[int], colors: Sequence[int],
                   kind: CertKind = CertKind.HAMILTON_CYCLE) -> RainbowCertificate:
        t = len(vertices)
        edges = tuple((vertices[k], vertices[(k + 1) % t]) for k in range(t))
        return cls(edges, tuple(colors), kind)

    @classmethod
    def from_path(cls, vertices: Sequence[int], colors: Sequence[int],
                  kind: CertKind = CertKind.HAMILTON_PATH) -> RainbowCertificate:
        edges = tuple(zip(vertices[:-1], vertices[1:]))
        return cls(edges, tuple(colors), kind)

    def vertex_order(self) -> list[int]:
        """Vertices in traversal order for path/cycle kinds (edges must be consecutive)."""
        if not self.edges:
            return []
        order = [self.edges[0][0]]
        for u, v in self.edges:
            order.append(v)
        if self.kind in (CertKind.CYCLE, CertKind.HAMILTON_CYCLE):
            order.pop()
        return order

    def vertex_set(self) -> set[int]:
        return {x for e in self.edges for x in e}

    def color_set(self) -> set[int]:
        return set(self.colors)


@dataclass
class ValidityReport:
    ok: bool
    violations: list[str]

    def __bool__(self) -> bool:
        return self.ok


def semi_degree(d: Digraph) -> int:
    """Minimum over vertices of ``min(out-degree, in-degree)``."""
    return min(min(a.bit_count(), b.bit_count()) for a, b in zip(d.out_adj, d.in_adj))


def collection_semi_degree(dc: DigraphCollection) -> int:
    return min(semi_degree(d) for d in dc.digraphs)


def color_list(dc: DigraphCollection, x: int, y: int) -> ColorList:
    if x == y:
        raise InvalidArgumentError(f"color lists are defined for distinct vertices, got ({x}, {x})")
    if not (0 <= x < dc.n and 0 <= y < dc.n):
        raise InvalidArgumentError(f"pair ({x}, {y}) outside 0..{dc.n - 1}")
    return ColorList((x, y), frozenset(bits(dc.color_mask(x, y))))


def _single_cycle(edges: Sequence[tuple[int, int]]) -> bool:
    """True iff ``edges`` (in order) trace one directed cycle through distinct vertices."""
    t = len(edges)
    if t < 2:
        return False
    for k in range(t):
        if edges[k][1] != edges[(k + 1) % t][0]:
            return False
    return len({u for u, _ in edges}) == t


def _single_path(edges: Sequence[tuple[int, int]]) -> bool:
    if not edges:
        return False
    for k in range(len(edges) - 1):
        if edges[k][1] != edges[k + 1][0]:
            return False
    verts = [edges[0][0]] + [v for _, v in edges]
    return len(set(verts)) == len(verts)


def validate_certificate(dc: DigraphCollection, cert: RainbowCertificate) -> ValidityReport:
    """Check a certificate against a collection; every violated clause is reported.

    Path and cycle kinds expect ``edges`` in traversal order.
    """
    out: list[str] = []
    n, m = dc.n, dc.m
    in_range = True
    for (u, v), c in zip(cert.edges, cert.colors):
        if not (0 <= u < n and 0 <= v < n) or u == v:
            out.append(f"range: edge ({u}, {v}) is not a pair of distinct vertices in 0..{n - 1}")
            in_range = False
        if not 0 <= c < m:
            out.append(f"range: color {c + 1} outside 1..{m}")
            in_range = False
    if len(set(cert.colors)) != len(cert.colors):
        out.append("injectivity: a color is used on more than one edge")
    if in_range:
        for (u, v), c in zip(cert.edges, cert.colors):
            if not dc.digraphs[c].has_edge(u, v):
                out.append(f"membership: edge ({u}, {v}) is not in color {c + 1}")
    if len(set(cert.edges)) != len(cert.edges):
        out.append("shape: repeated edge")

    kind = cert.kind
    edges = cert.edges
    if kind in (CertKind.HAMILTON_CYCLE, CertKind.CYCLE):
        if not _single_cycle(edges):
            out.append("shape: edges do not form one directed cycle through distinct vertices")
        elif kind is CertKind.HAMILTON_CYCLE and len(edges) != n:
            out.append(f"shape: cycle visits {len(edges)} of {n} vertices")
    elif kind in (CertKind.HAMILTON_PATH, CertKind.PATH):
        if not _single_path(edges):
            out.append("shape: edges do not form one directed path through distinct vertices")
        elif kind is CertKind.HAMILTON_PATH and len(edges) != n - 1:
            out.append(f"shape: path visits {len(edges) + 1} of {n} vertices")
    elif kind is CertKind.MATCHING:
        ends = [x for e in edges for x in e]
        if len(set(ends)) != len(ends):
            out.append("shape: matching edges are not pairwise vertex-disjoint")
    elif kind is CertKind.CYCLE_COVER:
        tails = sorted(u for u, _ in edges)
        heads = sorted(v for _, v in edges)
        if tails != list(range(n)) or heads != list(range(n)):
            out.append("shape: edges do not partition the vertices into disjoint directed cycles")
    if kind in _TRANSVERSAL_KINDS and len(edges) != m:
        out.append(f"bijection: {len(edges)} edges for {m} colors")
    return ValidityReport(not out, out)


def validate_matching(bc: BipartiteCollection, cert: RainbowCertificate, perfect: bool = False) -> ValidityReport:
    """Validate a rainbow matching of a bipartite collection; edges are (left, right)."""
    out: list[str] = []
    n, m = bc.n, bc.m
    if cert.kind is not CertKind.MATCHING:
        out.append(f"shape: kind {cert.kind.value} is not a matching")
    ok_range = True
    for (u, v), c in zip(cert.edges, cert.colors):
        if not (0 <= u < n and 0 <= v < n and 0 <= c < m):
            out.append(f"range: edge ({u}, {v}) color {c + 1} out of range")
            ok_range = False
    if len(set(cert.colors)) != len(cert.colors):
        out.append("injectivity: a color is used on more than one edge")
    if ok_range:
        for (u, v), c in zip(cert.edges, cert.colors):
            if not bc.has_edge(c, u, v):
                out.append(f"membership: edge ({u}L, {v}R) is not in color {c + 1}")
    lefts = [u for u, _ in cert.edges]
    rights = [v for _, v in cert.edges]
    if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
        out.append("shape: matching edges are not pairwise vertex-disjoint")
    if perfect and (len(cert.edges) != n or m != n):
        out.append(f"bijection: {len(cert.edges)} edges, {m} colors, parts of size {n}")
    return ValidityReport(not out, out)


def restricted_collection(dc: DigraphCollection, vertices: Iterable[int],
                          colors: Iterable[int]) -> tuple[DigraphCollection, dict[int, int], dict[int, int]]:
    """Induced sub-collection ``D[X]`` on the given colors.

    Returns the relabeled collection together with the old->new vertex and
    color maps.
    """
    vs = sorted(set(vertices))
    cs = sorted(set(colors))
    if not vs or not cs:
        raise InvalidArgumentError("vertex and color subsets must be nonempty")
    if vs[0] < 0 or vs[-1] >= dc.n or cs[0] < 0 or cs[-1] >= dc.m:
        raise InvalidArgumentError("subset refers to a vertex or color outside the collection")
    sub = DigraphCollection(len(vs), tuple(dc.digraphs[c].induced(vs) for c in cs))
    return sub, {v: i for i, v in enumerate(vs)}, {c: i for i, c in enumerate(cs)}


def characteristic_bipartite(dc: DigraphCollection) -> BipartiteCollection:
    """``B_D`` per color: left ``u`` joined to right ``v`` iff ``u -> v``."""
    return BipartiteCollection(dc.n, tuple(d.out_adj for d in dc.digraphs))
