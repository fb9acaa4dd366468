"""Pure numpy versions of the compiled kernels in ``_core.pyx``.

Same inputs, same random stream, same node order; trees come out identical.
"""

import numpy as np

_M64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def build_tree(X, y, rows, mtry, min_leaf, max_depth, rng_state):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    idx = np.array(rows, dtype=np.int64)
    m = idx.shape[0]
    q = X.shape[1]
    cap = 2 * m + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap, dtype=np.float64)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros(cap, dtype=np.float64)
    state = int(rng_state) & _M64

    stack = [(0, 0, m, 0)]
    n_nodes = 1
    while stack:
        node, s, e, d = stack.pop()
        seg = idx[s:e]
        cnt = e - s
        ys = y[seg]
        value[node] = np.cumsum(ys)[-1] / cnt

        if cnt < 2 * min_leaf or (max_depth >= 0 and d >= max_depth):
            continue
        if np.all(ys == ys[0]):
            continue

        perm = list(range(q))
        if mtry < q:
            for j in range(mtry):
                state = (state + _GAMMA) & _M64
                r = j + _mix(state) % (q - j)
                perm[j], perm[r] = perm[r], perm[j]
            candidates = perm[:mtry]
        else:
            candidates = perm

        best_f, best_gain, best_thr = -1, 0.0, 0.0
        lo, hi = min_leaf - 1, cnt - min_leaf
        for f in candidates:
            vals = X[seg, f]
            order = np.argsort(vals, kind="stable")
            v = vals[order]
            cs = np.cumsum(ys[order])
            total = cs[-1]
            if hi <= lo:
                continue
            ok = v[lo:hi] < v[lo + 1:hi + 1]
            if not ok.any():
                continue
            sl = cs[lo:hi]
            sr = total - sl
            nl = np.arange(lo + 1, hi + 1, dtype=np.float64)
            gain = sl * sl / nl + sr * sr / (cnt - nl)
            gain = np.where(ok, gain, -np.inf)
            k = int(np.argmax(gain))
            if best_f < 0 or gain[k] > best_gain:
                i = lo + k
                best_f, best_gain = f, gain[k]
                thr = (v[i] + v[i + 1]) / 2.0
                if thr >= v[i + 1]:
                    thr = v[i]
                best_thr = thr
        if best_f < 0:
            continue

        go_left = X[seg, best_f] <= best_thr
        nleft = int(go_left.sum())
        idx[s:e] = np.concatenate([seg[go_left], seg[~go_left]])

        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack.append((n_nodes + 1, s + nleft, e, d + 1))
        stack.append((n_nodes, s, s + nleft, d + 1))
        n_nodes += 2

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(),
            left[:n_nodes].copy(), right[:n_nodes].copy(),
            value[:n_nodes].copy())


def predict_trees(X, feature, threshold, left, right, value, offsets):
    X = np.asarray(X, dtype=np.float64)
    m = X.shape[0]
    out = np.empty((len(offsets), m), dtype=np.float64)
    rows = np.arange(m)
    for t, base in enumerate(offsets):
        k = np.zeros(m, dtype=np.int64)
        active = feature[base + k] >= 0
        while active.any():
            node = base + k[active]
            f = feature[node]
            go_left = X[rows[active], f] <= threshold[node]
            k[active] = np.where(go_left, left[node], right[node])
            active = feature[base + k] >= 0
        out[t] = value[base + k]
    return out


def permuted_hsic_sums(Kc, L, perms):
    out = np.empty(perms.shape[0], dtype=np.float64)
    for b, p in enumerate(perms):
        out[b] = np.einsum("ij,ij->", Kc, L[np.ix_(p, p)])
    return out
