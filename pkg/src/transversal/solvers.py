"""Exact searches for transversal Hamilton cycles/paths, perfect matchings,
rainbow cycle covers and maximum rainbow matchings.

Every search reports one of three statuses. ``none`` is a claim that the whole
search tree was exhausted; a budget hit is always ``timeout``.
"""

from __future__ import annotations

import enum
import random
import time
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import kernels
from .errors import BudgetExceededError, InvalidArgumentError, InvariantViolation, ShapeError
from .model import (
    BipartiteCollection,
    CertKind,
    DigraphCollection,
    RainbowCertificate,
    bits,
    characteristic_bipartite,
    validate_certificate,
    validate_matching,
)

__all__ = [
    "SearchConfig",
    "SearchStats",
    "SolveOutcome",
    "Status",
    "find_transversal_hamilton_cycle",
    "find_transversal_hamilton_path",
    "find_transversal_perfect_matching",
    "max_rainbow_matching",
    "rainbow_cycle_cover",
]


class Status(str, enum.Enum):
    FOUND = "found"
    NONE = "none"
    TIMEOUT = "timeout"


_STATUS = {0: Status.NONE, 1: Status.FOUND, 2: Status.TIMEOUT}


@dataclass(frozen=True)
class SearchConfig:
    """Budgets and reproducibility knobs shared by all searches.

    ``seed`` fixes the tie-break order among colors; ``seed=0`` keeps the
    natural order. ``workers`` only matters when ``parallel`` is set.
    """

    time_budget: float = 60.0
    node_budget: int = 10**12
    parallel: bool = False
    seed: int = 0
    symmetry_break: bool = True
    workers: int | None = None

    def __post_init__(self) -> None:
        if self.time_budget <= 0 or self.node_budget <= 0:
            raise InvalidArgumentError("search budgets must be positive")

    def color_rank(self, m: int) -> list[int]:
        order = list(range(m))
        if self.seed:
            random.Random(self.seed).shuffle(order)
        rank = [0] * m
        for r, c in enumerate(order):
            rank[c] = r
        return rank


@dataclass(frozen=True)
class SearchStats:
    nodes: int
    prunes: int
    wall_time_s: float
    backend: str = "python"


@dataclass(frozen=True)
class SolveOutcome:
    status: Status
    certificate: RainbowCertificate | None
    stats: SearchStats
    exhausted: bool = field(default=False)

    @property
    def found(self) -> bool:
        return self.status is Status.FOUND

    def to_dict(self) -> dict:
        cert = self.certificate
        return {
            "status": self.status.value,
            "exhausted": self.exhausted,
            "certificate": None if cert is None else {
                "kind": cert.kind.value,
                "edges": [list(e) for e in cert.edges],
                "colors": [c + 1 for c in cert.colors],
            },
            "stats": {"nodes": self.stats.nodes, "prunes": self.stats.prunes,
                      "backend": self.stats.backend, "wall_time_s": self.stats.wall_time_s},
        }


def _rows(dc: DigraphCollection) -> list[tuple[int, ...]]:
    return [d.out_adj for d in dc.digraphs]


def _checked(outcome: SolveOutcome, dc: DigraphCollection) -> SolveOutcome:
    if outcome.certificate is not None:
        report = validate_certificate(dc, outcome.certificate)
        if not report.ok:
            raise InvariantViolation(f"solver produced an invalid certificate: {report.violations}")
    return outcome


def _root_children(n: int, rows: Sequence[Sequence[int]], s: int) -> int:
    """Number of (vertex, color) moves available from the anchor ``s``."""
    return sum(row[s].bit_count() for row in rows)


def _ham_worker(args):
    return kernels.hamilton_search(*args)


def _run_hamilton(dc: DigraphCollection, cfg: SearchConfig, cycle: bool) -> SolveOutcome:
    n = dc.n
    rows = _rows(dc)
    rank = cfg.color_rank(dc.m)
    hall_depth = n - (n + 1) // 2
    starts = [0] if (cycle and cfg.symmetry_break) else list(range(n))
    t0 = time.perf_counter()
    used = kernels.backend()
    if cfg.parallel and (cfg.workers or 0) != 1:
        if cycle and len(starts) == 1:
            jobs = [(n, rows, cycle, starts, rank, cfg.node_budget, cfg.time_budget, hall_depth, i)
                    for i in range(_root_children(n, rows, starts[0]))]
        else:
            jobs = [(n, rows, cycle, [s], rank, cfg.node_budget, cfg.time_budget, hall_depth, -1)
                    for s in starts]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_ham_worker, jobs))
        # first found in branching order; otherwise timeout dominates none
        nodes = sum(r[3] for r in results)
        prunes = sum(r[4] for r in results)
        pick = next((r for r in results if r[0] == 1), None)
        if pick is None:
            pick = next((r for r in results if r[0] == 2), (0, [], [], 0, 0))
        status, verts, cols = pick[0], pick[1], pick[2]
    else:
        status, verts, cols, nodes, prunes = kernels.hamilton_search(
            n, rows, cycle, starts, rank, cfg.node_budget, cfg.time_budget, hall_depth)
    stats = SearchStats(nodes, prunes, time.perf_counter() - t0, used)
    cert = None
    if status == 1:
        cert = (RainbowCertificate.from_cycle(verts, cols) if cycle
                else RainbowCertificate.from_path(verts, cols))
    return _checked(SolveOutcome(_STATUS[status], cert, stats, exhausted=status == 0), dc)


def find_transversal_hamilton_cycle(dc: DigraphCollection, cfg: SearchConfig | None = None) -> SolveOutcome:
    """Search for a directed Hamilton cycle whose ``n`` edges take all ``n`` colors.

    Depth-first from vertex 0, branching on (next vertex, unused color) with
    fail-first ordering. Prunes when a remaining vertex has lost all in- or
    out-edges over the unused colors, when an unused color has no usable edge
    left, and (in the lower half of the tree) when the unused colors cannot be
    matched to the remaining edge slots.
    """
    cfg = cfg or SearchConfig()
    if dc.n < 2:
        raise InvalidArgumentError("a Hamilton cycle needs at least 2 vertices")
    if dc.m != dc.n:
        raise ShapeError(f"a transversal Hamilton cycle needs m = n colors, got m={dc.m}, n={dc.n}")
    return _run_hamilton(dc, cfg, cycle=True)


def find_transversal_hamilton_path(dc: DigraphCollection, cfg: SearchConfig | None = None) -> SolveOutcome:
    """Search for a spanning directed path whose ``n - 1`` edges take all colors."""
    cfg = cfg or SearchConfig()
    if dc.n < 2:
        raise InvalidArgumentError("a Hamilton path needs at least 2 vertices")
    if dc.m != dc.n - 1:
        raise ShapeError(f"a transversal Hamilton path needs m = n - 1 colors, got m={dc.m}, n={dc.n}")
    return _run_hamilton(dc, cfg, cycle=False)


def find_transversal_perfect_matching(bc: BipartiteCollection,
                                      cfg: SearchConfig | None = None) -> SolveOutcome:
    """Search for ``n`` disjoint edges, one of each color, covering both parts."""
    cfg = cfg or SearchConfig()
    if bc.m != bc.n:
        raise ShapeError(f"a transversal perfect matching needs m = n colors, got m={bc.m}, n={bc.n}")
    t0 = time.perf_counter()
    used = kernels.backend()
    status, pairs, cols, nodes, prunes = kernels.pm_search(
        bc.n, list(bc.graphs), cfg.color_rank(bc.m), cfg.node_budget, cfg.time_budget)
    stats = SearchStats(nodes, prunes, time.perf_counter() - t0, used)
    cert = None
    if status == 1:
        order = sorted(range(len(pairs)), key=lambda k: pairs[k][0])
        cert = RainbowCertificate(tuple(pairs[k] for k in order), tuple(cols[k] for k in order),
                                  CertKind.MATCHING)
        report = validate_matching(bc, cert, perfect=True)
        if not report.ok:
            raise InvariantViolation(f"matching search produced an invalid certificate: {report.violations}")
    return SolveOutcome(_STATUS[status], cert, stats, exhausted=status == 0)


# ---------------------------------------------------------------------------
# rainbow cycle cover: grows the cover one directed cycle at a time


def _bip_match(adj: Sequence[int]) -> int:
    """Maximum bipartite matching size; ``adj[i]`` is the right bitset of left ``i``."""
    match_r: dict[int, int] = {}

    def augment(i: int, seen: list[int]) -> bool:
        avail = adj[i] & ~seen[0]
        while avail:
            low = avail & -avail
            avail ^= low
            seen[0] |= low
            j = low.bit_length() - 1
            if j not in match_r or augment(match_r[j], seen):
                match_r[j] = i
                return True
        return False

    return sum(augment(i, [0]) for i in range(len(adj)))


def rainbow_cycle_cover(dc: DigraphCollection, cfg: SearchConfig | None = None) -> SolveOutcome:
    """Cover all vertices by disjoint directed cycles using every color exactly once.

    Independent of the matching search: cycles are traced explicitly, each
    one starting at the smallest uncovered vertex.
    """
    cfg = cfg or SearchConfig()
    n, m = dc.n, dc.m
    if m != n:
        raise ShapeError(f"a rainbow cycle cover needs m = n colors, got m={m}, n={n}")
    rows = _rows(dc)
    in_rows = [d.in_adj for d in dc.digraphs]
    rank = cfg.color_rank(m)
    deadline = time.perf_counter() + cfg.time_budget
    t0 = time.perf_counter()
    counters = [0, 0]
    edges: list[tuple[int, int]] = []
    cols: list[int] = []

    class _Stop(Exception):
        pass

    def feasible(uncov: int, start: int, head: int, free: int) -> bool:
        # tails still to leave: head (if a cycle is open) and uncovered vertices
        tails = uncov | ((1 << head) if head >= 0 else 0)
        heads = uncov | ((1 << start) if start >= 0 else 0)
        for v in bits(tails):
            if not any(rows[c][v] & heads for c in bits(free)):
                return False
        for v in bits(heads):
            if not any(in_rows[c][v] & tails for c in bits(free)):
                return False
        adj = []
        tail_list = bits(tails)
        for c in bits(free):
            a = 0
            for j, v in enumerate(tail_list):
                if rows[c][v] & heads:
                    a |= 1 << j
            adj.append(a)
        return _bip_match(adj) == len(adj)

    def dfs(uncov: int, start: int, head: int, free: int, length: int) -> bool:
        counters[0] += 1
        if counters[0] > cfg.node_budget or (counters[0] % 256 == 0 and time.perf_counter() > deadline):
            raise _Stop
        if start < 0:
            if not uncov:
                return True
            s = (uncov & -uncov).bit_length() - 1
            return dfs(uncov & ~(1 << s), s, s, free, 0)
        cands = []
        for c in bits(free):
            targets = rows[c][head] & uncov
            for w in bits(targets):
                cands.append((rank[c], 1, w, c))
            if length >= 1 and rows[c][head] >> start & 1:
                cands.append((rank[c], 0, start, c))
        cands.sort()
        for _, _, w, c in cands:
            nfree = free & ~(1 << c)
            if w == start:
                nuncov, nstart, nhead = uncov, -1, -1
            else:
                nuncov, nstart, nhead = uncov & ~(1 << w), start, w
            if not feasible(nuncov, nstart, nhead, nfree):
                counters[1] += 1
                continue
            edges.append((head, w))
            cols.append(c)
            if dfs(nuncov, nstart, nhead, nfree, length + 1):
                return True
            edges.pop()
            cols.pop()
        return False

    try:
        ok = dfs((1 << n) - 1, -1, -1, (1 << m) - 1, 0)
        status = Status.FOUND if ok else Status.NONE
    except _Stop:
        status = Status.TIMEOUT
    cert = None
    if status is Status.FOUND:
        cert = RainbowCertificate(tuple(edges), tuple(cols), CertKind.CYCLE_COVER)
    stats = SearchStats(counters[0], counters[1], time.perf_counter() - t0, "python")
    return _checked(SolveOutcome(status, cert, stats, exhausted=status is Status.NONE), dc)


# ---------------------------------------------------------------------------
# maximum rainbow matching by branch and bound


def max_rainbow_matching(coll: BipartiteCollection | DigraphCollection,
                         cfg: SearchConfig | None = None) -> tuple[int, RainbowCertificate]:
    """Exact maximum rainbow matching (any number of colors, at most one edge each).

    A digraph collection is read through its characteristic bipartite
    collection. Raises ``BudgetExceededError`` if the budget runs out before
    optimality is proved.
    """
    cfg = cfg or SearchConfig()
    bc = characteristic_bipartite(coll) if isinstance(coll, DigraphCollection) else coll
    n, m = bc.n, bc.m
    graphs = bc.graphs
    order = sorted(range(m), key=lambda c: (sum(r.bit_count() for r in graphs[c]), c))
    deadline = time.perf_counter() + cfg.time_budget
    best: list = [0, [], []]
    cur_e: list[tuple[int, int]] = []
    cur_c: list[int] = []
    nodes = [0]

    def bound(k: int, free_l: int, free_r: int) -> int:
        union = [0] * n
        usable = 0
        for c in order[k:]:
            g = graphs[c]
            has = False
            for u in bits(free_l):
                row = g[u] & free_r
                if row:
                    union[u] |= row
                    has = True
            usable += has
        if not usable:
            return 0
        return min(usable, _bip_match([union[u] for u in bits(free_l)]))

    def dfs(k: int, free_l: int, free_r: int) -> None:
        nodes[0] += 1
        if nodes[0] > cfg.node_budget or (nodes[0] % 256 == 0 and time.perf_counter() > deadline):
            raise BudgetExceededError("rainbow matching search exceeded its budget")
        size = len(cur_e)
        if size > best[0]:
            best[:] = [size, list(cur_e), list(cur_c)]
        if k == m or size + bound(k, free_l, free_r) <= best[0]:
            return
        c = order[k]
        g = graphs[c]
        for u in bits(free_l):
            for v in bits(g[u] & free_r):
                cur_e.append((u, v))
                cur_c.append(c)
                dfs(k + 1, free_l & ~(1 << u), free_r & ~(1 << v))
                cur_e.pop()
                cur_c.pop()
                if best[0] == min(n, m):
                    return
        dfs(k + 1, free_l, free_r)

    full = (1 << n) - 1
    dfs(0, full, full)
    idx = sorted(range(best[0]), key=lambda i: best[1][i])
    cert = RainbowCertificate(tuple(best[1][i] for i in idx), tuple(best[2][i] for i in idx),
                              CertKind.MATCHING)
    report = validate_matching(bc, cert)
    if not report.ok:
        raise InvariantViolation(f"rainbow matching search produced an invalid certificate: {report.violations}")
    return best[0], cert
