import numba as nb
import numpy as np


@nb.njit(cache=True, nogil=True)
def _dense(vals):
    m = vals.size
    order = np.argsort(vals, kind="mergesort")
    out = np.empty(m, dtype=np.float64)
    g = 0.0
    prev = np.nan
    for t in range(m):
        v = vals[order[t]]
        if t == 0 or v != prev:
            g += 1.0
            prev = v
        out[order[t]] = g
    return out


@nb.njit(cache=True, nogil=True)
def bb_search(pa, pt, pb, incumbent, tol):
    """Depth-first branch and bound over weak orders in insertion order.

    Objects are inserted as 0, 1, ..., m-1. A node is dropped only when its
    accumulated penalty exceeds ``incumbent + tol``. Returns the bucket
    vectors of every leaf at the best penalty, that penalty and the number
    of nodes expanded.
    """
    m = pa.shape[0]
    bucket = np.zeros((m, m), dtype=np.int64)
    ngroups = np.zeros(m, dtype=np.int64)
    acc = np.zeros(m)
    deltas = np.zeros((m, 2 * m + 1))
    nopt = np.zeros(m, dtype=np.int64)
    nxt = np.zeros(m, dtype=np.int64)
    ahead = np.zeros(m)
    tied = np.zeros(m)
    behind = np.zeros(m)
    pool = np.zeros((16, m), dtype=np.int64)
    npool = 0
    nodes = 0
    if m == 1:
        pool[0, 0] = 0
        return pool[:1], 0.0, 0
    ngroups[0] = 1
    d = 0
    prepare = True
    while True:
        if prepare:
            x = d + 1
            g = ngroups[d]
            for k in range(g):
                ahead[k] = 0.0
                tied[k] = 0.0
                behind[k] = 0.0
            for y in range(d + 1):
                k = bucket[d, y]
                ahead[k] += pa[x, y]
                tied[k] += pt[x, y]
                behind[k] += pb[x, y]
            suffix = 0.0
            for k in range(g):
                suffix += ahead[k]
            prefix = 0.0
            # option 2k: new group before group k; option 2k+1: join group k
            for k in range(g):
                deltas[d, 2 * k] = prefix + suffix
                suffix -= ahead[k]
                deltas[d, 2 * k + 1] = prefix + tied[k] + suffix
                prefix += behind[k]
            deltas[d, 2 * g] = prefix
            nopt[d] = 2 * g + 1
            nxt[d] = 0
            prepare = False
        if nxt[d] >= nopt[d]:
            if d == 0:
                break
            d -= 1
            continue
        o = nxt[d]
        nxt[d] += 1
        val = acc[d] + deltas[d, o]
        if val > incumbent + tol:
            continue
        nodes += 1
        x = d + 1
        k = o // 2
        g = ngroups[d]
        if o % 2 == 0:
            for y in range(d + 1):
                b = bucket[d, y]
                bucket[d + 1, y] = b + 1 if b >= k else b
            ngroups[d + 1] = g + 1
        else:
            for y in range(d + 1):
                bucket[d + 1, y] = bucket[d, y]
            ngroups[d + 1] = g
        bucket[d + 1, x] = k
        if x == m - 1:
            if val < incumbent - tol:
                incumbent = val
                npool = 0
            if npool == pool.shape[0]:
                grown = np.zeros((2 * npool, m), dtype=np.int64)
                grown[:npool] = pool
                pool = grown
            pool[npool] = bucket[d + 1]
            npool += 1
        else:
            acc[d + 1] = val
            d += 1
            prepare = True
    return pool[:npool], incumbent, nodes


@nb.njit(cache=True, nogil=True)
def _quick_pass(pa, pt, pb, cur):
    m = cur.size
    order = np.argsort(cur, kind="mergesort")
    cand = cur.copy()
    fixed = np.zeros(m, dtype=np.bool_)
    fixed[order[0]] = True
    for t in range(1, m):
        x = order[t]
        vals = np.unique(cand[fixed])
        g = vals.size
        r = cand[x]
        best = np.inf
        bestv = r
        stay = np.inf
        for o in range(2 * g + 1):
            k = o // 2
            if o % 2 == 1:
                v = vals[k]
            else:
                lo = vals[k - 1] if k > 0 else -np.inf
                hi = vals[k] if k < g else np.inf
                if lo < r < hi:
                    v = r
                elif r <= lo:
                    v = lo + 0.5
                else:
                    v = hi - 0.5
            pen = 0.0
            for y in range(m):
                if y == x:
                    continue
                cy = cand[y]
                if v < cy:
                    pen += pa[x, y]
                elif v == cy:
                    pen += pt[x, y]
                else:
                    pen += pb[x, y]
            if v == r:
                stay = pen
            if pen < best:
                best = pen
                bestv = v
        # an equal-penalty move never displaces the current placement
        if stay <= best:
            bestv = r
        cand[x] = bestv
        cand = _dense(cand)
        fixed[x] = True
    return cand


@nb.njit(cache=True, nogil=True)
def quick_run(pa, pt, pb, start, max_passes):
    """Repeated insertion passes from ``start`` until a fixed point or the cap."""
    cur = _dense(start.astype(np.float64))
    passes = 0
    while True:
        cand = _quick_pass(pa, pt, pb, cur)
        passes += 1
        same = True
        for i in range(cur.size):
            if cand[i] != cur[i]:
                same = False
                break
        cur = cand
        if same or passes >= max_passes:
            break
    return cur.astype(np.int64), passes
