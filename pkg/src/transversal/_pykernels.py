"""Pure-Python search kernels.

Reference implementation of the hot depth-first searches. ``_kernels.pyx``
mirrors this file step for step so both backends expand the same nodes in
the same order; any change here must be repeated there.

Status codes: 0 = exhausted without a solution, 1 = found, 2 = budget hit.
"""

from __future__ import annotations

import time

NONE, FOUND, TIMEOUT = 0, 1, 2
_CLOCK_EVERY = 256


def _bits(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _transpose(n, rows):
    cols = [0] * n
    for u in range(n):
        row = rows[u]
        while row:
            low = row & -row
            cols[low.bit_length() - 1] |= 1 << u
            row ^= low
    return cols


def _augment(i, adj, match_r, seen):
    avail = adj[i] & ~seen[0]
    while avail:
        low = avail & -avail
        avail ^= low
        seen[0] |= low
        j = low.bit_length() - 1
        if match_r[j] < 0 or _augment(match_r[j], adj, match_r, seen):
            match_r[j] = i
            return True
    return False


def _perfect_matching(adj, k):
    """True iff the bipartite graph ``adj`` (k left masks over k right slots) has a perfect matching."""
    match_r = [-1] * k
    for i in range(k):
        if not _augment(i, adj, match_r, [0]):
            return False
    return True


class _Budget(Exception):
    pass


def hamilton_search(n, out_rows, cycle, starts, color_rank, node_budget, time_budget,
                    hall_depth, root_index=-1):
    """Rainbow Hamilton cycle (``cycle``) or path search.

    ``out_rows[c][v]`` is the out-neighbour bitset of ``v`` in color ``c``.
    A cycle needs ``m == n`` colors, a path ``m == n - 1``. When
    ``root_index >= 0`` only that child of the root (in branching order) is
    explored. Returns ``(status, vertices, colors, nodes, prunes)``.
    """
    m = len(out_rows)
    in_rows = [_transpose(n, out_rows[c]) for c in range(m)]
    lists = [[0] * n for _ in range(n)]
    for c in range(m):
        bit = 1 << c
        for x in range(n):
            for y in _bits(out_rows[c][x]):
                lists[x][y] |= bit
    all_colors = (1 << m) - 1
    full = (1 << n) - 1
    deadline = time.perf_counter() + time_budget
    stats = [0, 0]  # nodes, prunes
    path = []
    cols = []

    def feasible(h, s, rem, free, depth):
        if not rem:
            return True
        sbit = (1 << s) if cycle else 0
        hbit = 1 << h
        for r in _bits(rem):
            uin = 0
            uout = 0
            for c in _bits(free):
                uin |= in_rows[c][r]
                uout |= out_rows[c][r]
            if not uin & (rem | hbit):
                return False
            if cycle and not uout & (rem | sbit):
                return False
        targets = rem | sbit
        for c in _bits(free):
            rows = out_rows[c]
            if rows[h] & rem:
                continue
            for r in _bits(rem):
                if rows[r] & targets:
                    break
            else:
                return False
        if depth >= hall_depth:
            free_list = _bits(free)
            rem_list = _bits(rem)
            k = len(free_list)
            if cycle:
                # every remaining tail {h} + rem leaves exactly once
                adj = []
                for c in free_list:
                    rows = out_rows[c]
                    a = 1 if rows[h] & rem else 0
                    for j, r in enumerate(rem_list):
                        if rows[r] & targets:
                            a |= 1 << (j + 1)
                    adj.append(a)
                if not _perfect_matching(adj, k):
                    return False
            # every remaining head rem (+ s for cycles) is entered exactly once
            adj = []
            for c in free_list:
                rows = in_rows[c]
                a = 0
                for j, r in enumerate(rem_list):
                    if rows[r] & (rem | hbit):
                        a |= 1 << j
                if cycle and rows[s] & rem:
                    a |= 1 << len(rem_list)
                adj.append(a)
            if not _perfect_matching(adj, k):
                return False
        return True

    def dfs(s, h, rem, free, depth, root):
        stats[0] += 1
        if stats[0] > node_budget:
            raise _Budget
        if stats[0] % _CLOCK_EVERY == 0 and time.perf_counter() > deadline:
            raise _Budget
        if not rem:
            if not cycle:
                return True
            last = lists[h][s] & free
            if last:
                cols.append((last & -last).bit_length() - 1)
                return True
            return False
        union_out = {}
        cands = []
        for w in _bits(rem):
            cm = lists[h][w] & free
            if not cm:
                continue
            uo = 0
            for c in _bits(free):
                uo |= out_rows[c][w]
            target = (rem & ~(1 << w)) | ((1 << s) if cycle else 0)
            onward = (uo & target).bit_count()
            for c in _bits(cm):
                cands.append((onward, color_rank[c], w, c))
        cands.sort()
        if root >= 0:
            cands = cands[root:root + 1]
        for _, _, w, c in cands:
            nrem = rem & ~(1 << w)
            nfree = free & ~(1 << c)
            if not feasible(w, s, nrem, nfree, depth + 1):
                stats[1] += 1
                continue
            path.append(w)
            cols.append(c)
            if dfs(s, w, nrem, nfree, depth + 1, -1):
                return True
            path.pop()
            cols.pop()
        return False

    try:
        for s in starts:
            path[:] = [s]
            cols[:] = []
            if dfs(s, s, full & ~(1 << s), all_colors, 0, root_index):
                return FOUND, list(path), list(cols), stats[0], stats[1]
    except _Budget:
        return TIMEOUT, [], [], stats[0], stats[1]
    return NONE, [], [], stats[0], stats[1]


def pm_search(n, left_rows, color_rank, node_budget, time_budget):
    """Transversal perfect matching search in a bipartite collection with ``m == n``.

    ``left_rows[c][u]`` is the right-neighbour bitset of left vertex ``u`` in
    color ``c``. Returns ``(status, pairs, colors, nodes, prunes)`` where
    ``pairs[k] = (u, v)`` carries ``colors[k]``.
    """
    m = len(left_rows)
    right_rows = [_transpose(n, left_rows[c]) for c in range(m)]
    full = (1 << n) - 1
    deadline = time.perf_counter() + time_budget
    stats = [0, 0]
    pairs = []
    cols = []

    def feasible(free_l, free_r, free):
        for v in _bits(free_r):
            for c in _bits(free):
                if right_rows[c][v] & free_l:
                    break
            else:
                return False
        free_list = _bits(free)
        k = len(free_list)
        left_list = _bits(free_l)
        right_list = _bits(free_r)
        adj = []
        for c in free_list:
            rows = left_rows[c]
            a = 0
            for j, u in enumerate(left_list):
                if rows[u] & free_r:
                    a |= 1 << j
            if not a:
                return False
            adj.append(a)
        if not _perfect_matching(adj, k):
            return False
        adj = []
        for c in free_list:
            rows = right_rows[c]
            a = 0
            for j, v in enumerate(right_list):
                if rows[v] & free_l:
                    a |= 1 << j
            adj.append(a)
        return _perfect_matching(adj, k)

    def dfs(free_l, free_r, free):
        stats[0] += 1
        if stats[0] > node_budget:
            raise _Budget
        if stats[0] % _CLOCK_EVERY == 0 and time.perf_counter() > deadline:
            raise _Budget
        if not free_l:
            return True
        best_u = -1
        best = -1
        for u in _bits(free_l):
            cnt = 0
            for c in _bits(free):
                cnt += (left_rows[c][u] & free_r).bit_count()
            if best < 0 or cnt < best:
                best, best_u = cnt, u
        u = best_u
        cands = []
        for c in _bits(free):
            for v in _bits(left_rows[c][u] & free_r):
                cands.append((color_rank[c], v, c))
        cands.sort()
        for _, v, c in cands:
            nl = free_l & ~(1 << u)
            nr = free_r & ~(1 << v)
            nf = free & ~(1 << c)
            if not feasible(nl, nr, nf):
                stats[1] += 1
                continue
            pairs.append((u, v))
            cols.append(c)
            if dfs(nl, nr, nf):
                return True
            pairs.pop()
            cols.pop()
        return False

    try:
        if feasible(full, full, (1 << m) - 1) and dfs(full, full, (1 << m) - 1):
            return FOUND, list(pairs), list(cols), stats[0], stats[1]
    except _Budget:
        return TIMEOUT, [], [], stats[0], stats[1]
    return NONE, [], [], stats[0], stats[1]
