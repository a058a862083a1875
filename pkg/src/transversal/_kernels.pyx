# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels (n <= 64, m <= 64).

Step-for-step port of ``_pykernels``: same candidate keys, same pruning order,
same node and prune counters. ``kernels.py`` picks this module when it imports.
"""

from libc.stdlib cimport malloc, free as cfree
from libc.string cimport memset
import time

ctypedef unsigned long long u64

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

cdef enum:
    CLOCK_EVERY = 256
    ST_NONE = 0
    ST_FOUND = 1
    ST_BUDGET = 2


cdef inline int popc(u64 x) nogil:
    return __builtin_popcountll(x)


cdef inline int lowbit(u64 x) nogil:
    return __builtin_ctzll(x)


cdef bint augment(int i, u64 *adj, int *match_r, u64 *seen):
    cdef u64 avail = adj[i] & ~seen[0]
    cdef u64 low
    cdef int j
    while avail:
        low = avail & (~avail + 1)
        avail ^= low
        seen[0] |= low
        j = lowbit(low)
        if match_r[j] < 0 or augment(match_r[j], adj, match_r, seen):
            match_r[j] = i
            return True
    return False


cdef bint perfect_matching(u64 *adj, int k):
    cdef int match_r[64]
    cdef int i
    cdef u64 seen
    for i in range(k):
        match_r[i] = -1
    for i in range(k):
        seen = 0
        if not augment(i, adj, match_r, &seen):
            return False
    return True


cdef struct HamCtx:
    int n
    int m
    bint cycle
    int hall_depth
    u64 *out_rows      # [c * n + v]
    u64 *in_rows
    u64 *lists         # [x * n + y], bitset over colors
    int *rank
    long long *keys    # per-depth candidate buffers of size n * m
    int *cand_w
    int *cand_c
    int *path
    int *cols
    int path_len
    int cols_len
    long long nodes
    long long prunes
    long long node_budget


cdef bint ham_feasible(HamCtx *ctx, int h, int s, u64 rem, u64 free, int depth):
    cdef int n = ctx.n
    cdef u64 sbit, hbit, uin, uout, targets, a, r_it, c_it, fr
    cdef int r, c, j, k, nrem
    cdef u64 adj[64]
    cdef int rem_list[64]
    cdef u64 *rows
    if not rem:
        return True
    sbit = (<u64>1 << s) if ctx.cycle else 0
    hbit = <u64>1 << h
    r_it = rem
    while r_it:
        r = lowbit(r_it)
        r_it &= r_it - 1
        uin = 0
        uout = 0
        c_it = free
        while c_it:
            c = lowbit(c_it)
            c_it &= c_it - 1
            uin |= ctx.in_rows[c * n + r]
            uout |= ctx.out_rows[c * n + r]
        if not (uin & (rem | hbit)):
            return False
        if ctx.cycle and not (uout & (rem | sbit)):
            return False
    targets = rem | sbit
    c_it = free
    while c_it:
        c = lowbit(c_it)
        c_it &= c_it - 1
        rows = ctx.out_rows + c * n
        if rows[h] & rem:
            continue
        r_it = rem
        fr = 0
        while r_it:
            r = lowbit(r_it)
            r_it &= r_it - 1
            if rows[r] & targets:
                fr = 1
                break
        if not fr:
            return False
    if depth >= ctx.hall_depth:
        nrem = 0
        r_it = rem
        while r_it:
            rem_list[nrem] = lowbit(r_it)
            nrem += 1
            r_it &= r_it - 1
        k = 0
        if ctx.cycle:
            c_it = free
            while c_it:
                c = lowbit(c_it)
                c_it &= c_it - 1
                rows = ctx.out_rows + c * n
                a = 1 if (rows[h] & rem) else 0
                for j in range(nrem):
                    if rows[rem_list[j]] & targets:
                        a |= <u64>1 << (j + 1)
                adj[k] = a
                k += 1
            if not perfect_matching(adj, k):
                return False
        k = 0
        c_it = free
        while c_it:
            c = lowbit(c_it)
            c_it &= c_it - 1
            rows = ctx.in_rows + c * n
            a = 0
            for j in range(nrem):
                if rows[rem_list[j]] & (rem | hbit):
                    a |= <u64>1 << j
            if ctx.cycle and (rows[s] & rem):
                a |= <u64>1 << nrem
            adj[k] = a
            k += 1
        if not perfect_matching(adj, k):
            return False
    return True


cdef int ham_dfs(HamCtx *ctx, int s, int h, u64 rem, u64 free, int depth, int root,
                 double deadline) except -1:
    cdef int n = ctx.n
    cdef int m = ctx.m
    cdef u64 last, cm, uo, target, w_it, c_it, nrem, nfree
    cdef int w, c, ncand, i, j, onward, lo, hi, res
    cdef long long key
    cdef long long *keys = ctx.keys + depth * n * m
    cdef int *cw = ctx.cand_w + depth * n * m
    cdef int *cc = ctx.cand_c + depth * n * m
    ctx.nodes += 1
    if ctx.nodes > ctx.node_budget:
        return ST_BUDGET
    if ctx.nodes % CLOCK_EVERY == 0 and time.perf_counter() > deadline:
        return ST_BUDGET
    if not rem:
        if not ctx.cycle:
            return ST_FOUND
        last = ctx.lists[h * n + s] & free
        if last:
            ctx.cols[ctx.cols_len] = lowbit(last)
            ctx.cols_len += 1
            return ST_FOUND
        return ST_NONE
    ncand = 0
    w_it = rem
    while w_it:
        w = lowbit(w_it)
        w_it &= w_it - 1
        cm = ctx.lists[h * n + w] & free
        if not cm:
            continue
        uo = 0
        c_it = free
        while c_it:
            c = lowbit(c_it)
            c_it &= c_it - 1
            uo |= ctx.out_rows[c * n + w]
        target = (rem & ~(<u64>1 << w)) | ((<u64>1 << s) if ctx.cycle else 0)
        onward = popc(uo & target)
        c_it = cm
        while c_it:
            c = lowbit(c_it)
            c_it &= c_it - 1
            keys[ncand] = ((<long long>onward * 128 + ctx.rank[c]) * 128 + w)
            cw[ncand] = w
            cc[ncand] = c
            ncand += 1
    # insertion sort; keys are unique per (w, c) because ranks are distinct
    for i in range(1, ncand):
        key = keys[i]
        w = cw[i]
        c = cc[i]
        j = i - 1
        while j >= 0 and keys[j] > key:
            keys[j + 1] = keys[j]
            cw[j + 1] = cw[j]
            cc[j + 1] = cc[j]
            j -= 1
        keys[j + 1] = key
        cw[j + 1] = w
        cc[j + 1] = c
    lo = 0
    hi = ncand
    if root >= 0:
        lo = root
        hi = root + 1 if root + 1 < ncand else ncand
    for i in range(lo, hi):
        w = cw[i]
        c = cc[i]
        nrem = rem & ~(<u64>1 << w)
        nfree = free & ~(<u64>1 << c)
        if not ham_feasible(ctx, w, s, nrem, nfree, depth + 1):
            ctx.prunes += 1
            continue
        ctx.path[ctx.path_len] = w
        ctx.path_len += 1
        ctx.cols[ctx.cols_len] = c
        ctx.cols_len += 1
        res = ham_dfs(ctx, s, w, nrem, nfree, depth + 1, -1, deadline)
        if res != ST_NONE:
            return res
        ctx.path_len -= 1
        ctx.cols_len -= 1
    return ST_NONE


def hamilton_search(int n, out_rows, bint cycle, starts, color_rank, long long node_budget,
                    double time_budget, int hall_depth, int root_index=-1):
    """See ``_pykernels.hamilton_search``."""
    cdef int m = len(out_rows)
    cdef HamCtx ctx
    cdef int c, v, y, res, s
    cdef u64 row, full, allc
    cdef double deadline
    if n > 64 or m > 64:
        raise ValueError("compiled kernel supports at most 64 vertices and 64 colors")
    ctx.n = n
    ctx.m = m
    ctx.cycle = cycle
    ctx.hall_depth = hall_depth
    ctx.node_budget = node_budget
    ctx.nodes = 0
    ctx.prunes = 0
    ctx.out_rows = <u64 *> malloc(m * n * sizeof(u64))
    ctx.in_rows = <u64 *> malloc(m * n * sizeof(u64))
    ctx.lists = <u64 *> malloc(n * n * sizeof(u64))
    ctx.rank = <int *> malloc(m * sizeof(int))
    ctx.keys = <long long *> malloc((n + 1) * n * m * sizeof(long long))
    ctx.cand_w = <int *> malloc((n + 1) * n * m * sizeof(int))
    ctx.cand_c = <int *> malloc((n + 1) * n * m * sizeof(int))
    ctx.path = <int *> malloc((n + 1) * sizeof(int))
    ctx.cols = <int *> malloc((n + 1) * sizeof(int))
    try:
        memset(ctx.in_rows, 0, m * n * sizeof(u64))
        memset(ctx.lists, 0, n * n * sizeof(u64))
        for c in range(m):
            ctx.rank[c] = color_rank[c]
            for v in range(n):
                row = out_rows[c][v]
                ctx.out_rows[c * n + v] = row
                while row:
                    y = lowbit(row)
                    row &= row - 1
                    ctx.in_rows[c * n + y] |= <u64>1 << v
                    ctx.lists[v * n + y] |= <u64>1 << c
        deadline = time.perf_counter() + time_budget
        full = (<u64>1 << n) - 1 if n < 64 else <u64>0xFFFFFFFFFFFFFFFF
        allc = (<u64>1 << m) - 1 if m < 64 else <u64>0xFFFFFFFFFFFFFFFF
        for s in starts:
            ctx.path[0] = s
            ctx.path_len = 1
            ctx.cols_len = 0
            res = ham_dfs(&ctx, s, s, full & ~(<u64>1 << s), allc, 0, root_index, deadline)
            if res == ST_FOUND:
                return (1, [ctx.path[i] for i in range(ctx.path_len)],
                        [ctx.cols[i] for i in range(ctx.cols_len)], ctx.nodes, ctx.prunes)
            if res == ST_BUDGET:
                return (2, [], [], ctx.nodes, ctx.prunes)
        return (0, [], [], ctx.nodes, ctx.prunes)
    finally:
        cfree(ctx.out_rows)
        cfree(ctx.in_rows)
        cfree(ctx.lists)
        cfree(ctx.rank)
        cfree(ctx.keys)
        cfree(ctx.cand_w)
        cfree(ctx.cand_c)
        cfree(ctx.path)
        cfree(ctx.cols)


cdef struct PmCtx:
    int n
    int m
    u64 *left_rows     # [c * n + u]
    u64 *right_rows    # [c * n + v]
    int *rank
    long long *keys
    int *cand_v
    int *cand_c
    int *pu
    int *pv
    int *cols
    int depth
    long long nodes
    long long prunes
    long long node_budget


cdef bint pm_feasible(PmCtx *ctx, u64 free_l, u64 free_r, u64 free):
    cdef int n = ctx.n
    cdef u64 v_it, c_it, a
    cdef int v, c, j, k, nl, nr, found
    cdef u64 adj[64]
    cdef int left_list[64]
    cdef int right_list[64]
    v_it = free_r
    while v_it:
        v = lowbit(v_it)
        v_it &= v_it - 1
        found = 0
        c_it = free
        while c_it:
            c = lowbit(c_it)
            c_it &= c_it - 1
            if ctx.right_rows[c * n + v] & free_l:
                found = 1
                break
        if not found:
            return False
    nl = 0
    v_it = free_l
    while v_it:
        left_list[nl] = lowbit(v_it)
        nl += 1
        v_it &= v_it - 1
    nr = 0
    v_it = free_r
    while v_it:
        right_list[nr] = lowbit(v_it)
        nr += 1
        v_it &= v_it - 1
    k = 0
    c_it = free
    while c_it:
        c = lowbit(c_it)
        c_it &= c_it - 1
        a = 0
        for j in range(nl):
            if ctx.left_rows[c * n + left_list[j]] & free_r:
                a |= <u64>1 << j
        if not a:
            return False
        adj[k] = a
        k += 1
    if not perfect_matching(adj, k):
        return False
    k = 0
    c_it = free
    while c_it:
        c = lowbit(c_it)
        c_it &= c_it - 1
        a = 0
        for j in range(nr):
            if ctx.right_rows[c * n + right_list[j]] & free_l:
                a |= <u64>1 << j
        adj[k] = a
        k += 1
    return perfect_matching(adj, k)


cdef int pm_dfs(PmCtx *ctx, u64 free_l, u64 free_r, u64 free, double deadline) except -1:
    cdef int n = ctx.n
    cdef int m = ctx.m
    cdef int depth = ctx.depth
    cdef long long *keys = ctx.keys + depth * n * m
    cdef int *cv = ctx.cand_v + depth * n * m
    cdef int *cc = ctx.cand_c + depth * n * m
    cdef u64 u_it, c_it, v_it, nl, nr, nf
    cdef int u, c, v, cnt, best, best_u, ncand, i, j, res
    cdef long long key
    ctx.nodes += 1
    if ctx.nodes > ctx.node_budget:
        return ST_BUDGET
    if ctx.nodes % CLOCK_EVERY == 0 and time.perf_counter() > deadline:
        return ST_BUDGET
    if not free_l:
        return ST_FOUND
    best = -1
    best_u = -1
    u_it = free_l
    while u_it:
        u = lowbit(u_it)
        u_it &= u_it - 1
        cnt = 0
        c_it = free
        while c_it:
            c = lowbit(c_it)
            c_it &= c_it - 1
            cnt += popc(ctx.left_rows[c * n + u] & free_r)
        if best < 0 or cnt < best:
            best = cnt
            best_u = u
    u = best_u
    ncand = 0
    c_it = free
    while c_it:
        c = lowbit(c_it)
        c_it &= c_it - 1
        v_it = ctx.left_rows[c * n + u] & free_r
        while v_it:
            v = lowbit(v_it)
            v_it &= v_it - 1
            keys[ncand] = <long long>ctx.rank[c] * 128 + v
            cv[ncand] = v
            cc[ncand] = c
            ncand += 1
    for i in range(1, ncand):
        key = keys[i]
        v = cv[i]
        c = cc[i]
        j = i - 1
        while j >= 0 and keys[j] > key:
            keys[j + 1] = keys[j]
            cv[j + 1] = cv[j]
            cc[j + 1] = cc[j]
            j -= 1
        keys[j + 1] = key
        cv[j + 1] = v
        cc[j + 1] = c
    for i in range(ncand):
        v = cv[i]
        c = cc[i]
        nl = free_l & ~(<u64>1 << u)
        nr = free_r & ~(<u64>1 << v)
        nf = free & ~(<u64>1 << c)
        if not pm_feasible(ctx, nl, nr, nf):
            ctx.prunes += 1
            continue
        ctx.pu[depth] = u
        ctx.pv[depth] = v
        ctx.cols[depth] = c
        ctx.depth += 1
        res = pm_dfs(ctx, nl, nr, nf, deadline)
        if res != ST_NONE:
            return res
        ctx.depth -= 1
    return ST_NONE


def pm_search(int n, left_rows, color_rank, long long node_budget, double time_budget):
    """See ``_pykernels.pm_search``."""
    cdef int m = len(left_rows)
    cdef PmCtx ctx
    cdef int c, u, y, res
    cdef u64 row, full, allc
    cdef double deadline
    if n > 64 or m > 64:
        raise ValueError("compiled kernel supports at most 64 vertices and 64 colors")
    ctx.n = n
    ctx.m = m
    ctx.node_budget = node_budget
    ctx.nodes = 0
    ctx.prunes = 0
    ctx.depth = 0
    ctx.left_rows = <u64 *> malloc(m * n * sizeof(u64))
    ctx.right_rows = <u64 *> malloc(m * n * sizeof(u64))
    ctx.rank = <int *> malloc(m * sizeof(int))
    ctx.keys = <long long *> malloc((n + 1) * n * m * sizeof(long long))
    ctx.cand_v = <int *> malloc((n + 1) * n * m * sizeof(int))
    ctx.cand_c = <int *> malloc((n + 1) * n * m * sizeof(int))
    ctx.pu = <int *> malloc((n + 1) * sizeof(int))
    ctx.pv = <int *> malloc((n + 1) * sizeof(int))
    ctx.cols = <int *> malloc((n + 1) * sizeof(int))
    try:
        memset(ctx.right_rows, 0, m * n * sizeof(u64))
        for c in range(m):
            ctx.rank[c] = color_rank[c]
            for u in range(n):
                row = left_rows[c][u]
                ctx.left_rows[c * n + u] = row
                while row:
                    y = lowbit(row)
                    row &= row - 1
                    ctx.right_rows[c * n + y] |= <u64>1 << u
        deadline = time.perf_counter() + time_budget
        full = (<u64>1 << n) - 1 if n < 64 else <u64>0xFFFFFFFFFFFFFFFF
        allc = (<u64>1 << m) - 1 if m < 64 else <u64>0xFFFFFFFFFFFFFFFF
        if not pm_feasible(&ctx, full, full, allc):
            return (0, [], [], ctx.nodes, ctx.prunes)
        res = pm_dfs(&ctx, full, full, allc, deadline)
        if res == ST_FOUND:
            return (1, [(ctx.pu[i], ctx.pv[i]) for i in range(ctx.depth)],
                    [ctx.cols[i] for i in range(ctx.depth)], ctx.nodes, ctx.prunes)
        if res == ST_BUDGET:
            return (2, [], [], ctx.nodes, ctx.prunes)
        return (0, [], [], ctx.nodes, ctx.prunes)
    finally:
        cfree(ctx.left_rows)
        cfree(ctx.right_rows)
        cfree(ctx.rank)
        cfree(ctx.keys)
        cfree(ctx.cand_v)
        cfree(ctx.cand_c)
        cfree(ctx.pu)
        cfree(ctx.pv)
        cfree(ctx.cols)
