import numpy as np


def _dense(vals: np.ndarray) -> np.ndarray:
    _, inv = np.unique(vals, return_inverse=True)
    return (inv + 1).astype(np.float64)


def _option_deltas(pa, pt, pb, x, buckets, g):
    ahead = np.bincount(buckets, weights=pa[x, : buckets.size], minlength=g)
    tied = np.bincount(buckets, weights=pt[x, : buckets.size], minlength=g)
    behind = np.bincount(buckets, weights=pb[x, : buckets.size], minlength=g)
    before = np.concatenate(([0.0], np.cumsum(behind)))
    after = np.concatenate((np.cumsum(ahead[::-1])[::-1], [0.0]))
    out = np.empty(2 * g + 1)
    out[0::2] = before + after
    out[1::2] = before[:-1] + tied + after[1:]
    return out


def bb_search(pa, pt, pb, incumbent, tol):
    m = pa.shape[0]
    if m == 1:
        return np.zeros((1, 1), dtype=np.int64), 0.0, 0
    pool: list[np.ndarray] = []
    state = {"inc": float(incumbent), "nodes": 0}

    def expand(buckets: np.ndarray, g: int, acc: float) -> None:
        x = buckets.size
        deltas = _option_deltas(pa, pt, pb, x, buckets, g)
        for o, delta in enumerate(deltas):
            val = acc + delta
            if val > state["inc"] + tol:
                continue
            state["nodes"] += 1
            k = o // 2
            if o % 2 == 0:
                child = np.append(np.where(buckets >= k, buckets + 1, buckets), k)
                cg = g + 1
            else:
                child = np.append(buckets, k)
                cg = g
            if x == m - 1:
                if val < state["inc"] - tol:
                    state["inc"] = val
                    pool.clear()
                pool.append(child)
            else:
                expand(child, cg, val)

    expand(np.zeros(1, dtype=np.int64), 1, 0.0)
    out = np.array(pool, dtype=np.int64).reshape(len(pool), m)
    return out, state["inc"], state["nodes"]


def _quick_pass(pa, pt, pb, cur):
    m = cur.size
    order = np.argsort(cur, kind="mergesort")
    cand = cur.copy()
    fixed = np.zeros(m, dtype=bool)
    fixed[order[0]] = True
    others = np.ones(m, dtype=bool)
    for x in order[1:]:
        vals = np.unique(cand[fixed])
        g = vals.size
        r = cand[x]
        lo = np.concatenate(([-np.inf], vals))
        hi = np.concatenate((vals, [np.inf]))
        gaps = np.where((lo < r) & (r < hi), r, np.where(r <= lo, lo + 0.5, hi - 0.5))
        opts = np.empty(2 * g + 1)
        opts[0::2] = gaps
        opts[1::2] = vals
        others[:] = True
        others[x] = False
        cy = cand[others]
        v = opts[:, None]
        pen = np.where(v < cy, pa[x, others], np.where(v == cy, pt[x, others], pb[x, others])).sum(axis=1)
        k = int(np.argmin(pen))
        here = np.flatnonzero(opts == r)
        if here.size and pen[here[0]] <= pen[k]:
            k = here[0]
        cand[x] = opts[k]
        cand = _dense(cand)
        fixed[x] = True
    return cand


def quick_run(pa, pt, pb, start, max_passes):
    cur = _dense(np.asarray(start, dtype=np.float64))
    passes = 0
    while True:
        cand = _quick_pass(pa, pt, pb, cur)
        passes += 1
        same = np.array_equal(cand, cur)
        cur = cand
        if same or passes >= max_passes:
            break
    return cur.astype(np.int64), passes
