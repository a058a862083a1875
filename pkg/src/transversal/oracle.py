"""Brute-force reference for transversal Hamilton cycles.

Enumerates every directed Hamilton cycle of the union digraph (anchored at
vertex 0) and counts, for each one, the bijections from its edges to the
colors with a subset dynamic program. Shares no code with the solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, InvalidArgumentError, ShapeError
from .model import DigraphCollection, RainbowCertificate

__all__ = ["DEFAULT_ORACLE_BOUND", "OracleOutcome", "oracle_transversal_hamilton_cycle"]

DEFAULT_ORACLE_BOUND = 9
_BATCH = 2048


@dataclass(frozen=True)
class OracleOutcome:
    exists: bool
    certificate: RainbowCertificate | None
    count: int               # (cycle, color bijection) pairs
    hamilton_cycles: int     # directed Hamilton cycles of the union digraph
    colorable_cycles: int


def _hamilton_cycles(n: int, adj: list[list[bool]]):
    path = [0]
    used = [False] * n
    used[0] = True

    def rec():
        if len(path) == n:
            if adj[path[-1]][0]:
                yield list(path)
            return
        h = path[-1]
        for w in range(1, n):
            if not used[w] and adj[h][w]:
                used[w] = True
                path.append(w)
                yield from rec()
                path.pop()
                used[w] = False

    yield from rec()


def _count_bijections(allowed: np.ndarray, n: int) -> np.ndarray:
    """Permanents of a batch of 0/1 matrices ``allowed[b, edge, color]``."""
    size = 1 << n
    idx = np.arange(size)
    dp = np.zeros((allowed.shape[0], size), dtype=np.int64)
    dp[:, 0] = 1
    for k in range(n):
        new = np.zeros_like(dp)
        for c in range(n):
            bit = 1 << c
            lacking = idx[(idx & bit) == 0]
            col = allowed[:, k, c].astype(np.int64)[:, None]
            new[:, lacking | bit] += dp[:, lacking] * col
        dp = new
    return dp[:, size - 1]


def _witness(n: int, cycle: list[int], allowed: np.ndarray) -> list[int]:
    """Recover one color bijection by simple augmenting-path matching."""
    match_c = [-1] * n

    def augment(k, seen):
        for c in range(n):
            if allowed[k, c] and not seen[c]:
                seen[c] = True
                if match_c[c] < 0 or augment(match_c[c], seen):
                    match_c[c] = k
                    return True
        return False

    for k in range(n):
        augment(k, [False] * n)
    colors = [0] * n
    for c, k in enumerate(match_c):
        colors[k] = c
    return colors


def oracle_transversal_hamilton_cycle(dc: DigraphCollection,
                                      bound: int = DEFAULT_ORACLE_BOUND) -> OracleOutcome:
    """Count all (Hamilton cycle, color bijection) pairs of ``dc``.

    Refuses with ``BudgetExceededError`` above ``bound`` vertices.
    """
    n = dc.n
    if dc.m != n:
        raise ShapeError(f"the oracle needs m = n colors, got m={dc.m}, n={n}")
    if n < 2:
        raise InvalidArgumentError("a Hamilton cycle needs at least 2 vertices")
    if n > bound:
        raise BudgetExceededError(f"oracle refuses n={n} above its bound {bound}")
    masks = [[dc.color_mask(x, y) if x != y else 0 for y in range(n)] for x in range(n)]
    adj = [[masks[x][y] != 0 for y in range(n)] for x in range(n)]
    cache: dict[tuple[int, ...], int] = {}
    total = 0
    cycles = 0
    colorable = 0
    witness = None
    pending: dict[tuple[int, ...], None] = {}
    batch: list[tuple[list[int], tuple[int, ...]]] = []

    def flush():
        nonlocal total, colorable, witness
        keys = [k for k in pending if k not in cache]
        for start in range(0, len(keys), _BATCH):
            chunk = keys[start:start + _BATCH]
            allowed = np.array([[[row >> c & 1 for c in range(n)] for row in key] for key in chunk],
                               dtype=bool)
            for key, cnt in zip(chunk, _count_bijections(allowed, n)):
                cache[key] = int(cnt)
        for cyc, key in batch:
            cnt = cache[key]
            total += cnt
            if cnt:
                colorable += 1
                if witness is None:
                    edge_masks = [masks[cyc[k]][cyc[(k + 1) % n]] for k in range(n)]
                    allowed = np.array([[m >> c & 1 for c in range(n)] for m in edge_masks], dtype=bool)
                    witness = (cyc, _witness(n, cyc, allowed))
        pending.clear()
        batch.clear()

    for cyc in _hamilton_cycles(n, adj):
        cycles += 1
        key = tuple(sorted(masks[cyc[k]][cyc[(k + 1) % n]] for k in range(n)))
        pending[key] = None
        batch.append((cyc, key))
        if len(batch) >= 16 * _BATCH:
            flush()
    flush()
    cert = None
    if witness is not None:
        cert = RainbowCertificate.from_cycle(witness[0], witness[1])
    return OracleOutcome(witness is not None, cert, total, cycles, colorable)
