# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: regression-tree growth, tree prediction and permuted HSIC sums.

Every routine here has a numpy twin in ``_fallback.py`` that consumes the
same random stream and visits nodes in the same order, so both backends grow
identical trees.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef uint64_t _GAMMA = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t _next(uint64_t* state) nogil:
    state[0] += _GAMMA
    return _mix(state[0])


cdef void _merge_sort(int64_t* pos, int64_t* tmp, double* vals, Py_ssize_t n) nogil:
    # bottom-up stable merge sort of pos by vals[pos]
    cdef Py_ssize_t width = 1, lo, mid, hi, i, j, k
    cdef int64_t* src = pos
    cdef int64_t* dst = tmp
    cdef int64_t* swap
    while width < n:
        lo = 0
        while lo < n:
            mid = lo + width
            if mid > n:
                mid = n
            hi = lo + 2 * width
            if hi > n:
                hi = n
            i = lo
            j = mid
            k = lo
            while i < mid and j < hi:
                if vals[src[j]] < vals[src[i]]:
                    dst[k] = src[j]
                    j += 1
                else:
                    dst[k] = src[i]
                    i += 1
                k += 1
            while i < mid:
                dst[k] = src[i]
                i += 1
                k += 1
            while j < hi:
                dst[k] = src[j]
                j += 1
                k += 1
            lo += 2 * width
        swap = src
        src = dst
        dst = swap
        width *= 2
    if src != pos:
        for i in range(n):
            pos[i] = src[i]


def build_tree(const double[:, ::1] X, const double[::1] y, const int64_t[::1] rows,
               Py_ssize_t mtry, Py_ssize_t min_leaf, Py_ssize_t max_depth,
               uint64_t rng_state):
    """Grow one regression tree on ``rows`` (sorted ascending, may repeat).

    Returns ``(feature, threshold, left, right, value)`` arrays; leaves carry
    ``feature == -1``.
    """
    cdef Py_ssize_t m = rows.shape[0]
    cdef Py_ssize_t q = X.shape[1]
    cdef Py_ssize_t cap = 2 * m + 1
    feature_a = np.full(cap, -1, dtype=np.int64)
    threshold_a = np.zeros(cap, dtype=np.float64)
    left_a = np.full(cap, -1, dtype=np.int64)
    right_a = np.full(cap, -1, dtype=np.int64)
    value_a = np.zeros(cap, dtype=np.float64)
    cdef int64_t[::1] feature = feature_a
    cdef double[::1] threshold = threshold_a
    cdef int64_t[::1] left = left_a
    cdef int64_t[::1] right = right_a
    cdef double[::1] value = value_a

    cdef int64_t[::1] idx = np.array(rows, dtype=np.int64)
    cdef int64_t[::1] scratch = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] pos = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] tmp = np.empty(m, dtype=np.int64)
    cdef double[::1] vals = np.empty(m, dtype=np.float64)
    cdef double[::1] cs = np.empty(m, dtype=np.float64)
    cdef int64_t[::1] perm = np.empty(q, dtype=np.int64)

    # explicit DFS stack: node, start, end, depth
    cdef int64_t[:, ::1] stack = np.empty((cap, 4), dtype=np.int64)
    cdef Py_ssize_t top = 0
    cdef Py_ssize_t n_nodes = 1
    cdef uint64_t state = rng_state

    cdef Py_ssize_t node, s, e, d, cnt, i, j, r, f, c, best_f, nl, nleft
    cdef int64_t t
    cdef double acc, first, total, sl, sr, gain, best_gain, best_thr, thr
    cdef bint pure

    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = m
    stack[0, 3] = 0
    top = 1
    while top > 0:
        top -= 1
        node = stack[top, 0]
        s = stack[top, 1]
        e = stack[top, 2]
        d = stack[top, 3]
        cnt = e - s

        acc = 0.0
        for i in range(s, e):
            acc += y[idx[i]]
        value[node] = acc / cnt

        if cnt < 2 * min_leaf or (max_depth >= 0 and d >= max_depth):
            continue
        first = y[idx[s]]
        pure = True
        for i in range(s + 1, e):
            if y[idx[i]] != first:
                pure = False
                break
        if pure:
            continue

        for j in range(q):
            perm[j] = j
        if mtry < q:
            for j in range(mtry):
                r = j + <Py_ssize_t>(_next(&state) % <uint64_t>(q - j))
                t = perm[j]
                perm[j] = perm[r]
                perm[r] = t

        best_f = -1
        best_gain = 0.0
        best_thr = 0.0
        for c in range(mtry if mtry < q else q):
            f = perm[c]
            for i in range(cnt):
                pos[i] = i
                vals[i] = X[idx[s + i], f]
            _merge_sort(&pos[0], &tmp[0], &vals[0], cnt)
            acc = 0.0
            for i in range(cnt):
                acc += y[idx[s + pos[i]]]
                cs[i] = acc
            total = cs[cnt - 1]
            for i in range(min_leaf - 1, cnt - min_leaf):
                if not (vals[pos[i]] < vals[pos[i + 1]]):
                    continue
                nl = i + 1
                sl = cs[i]
                sr = total - sl
                gain = sl * sl / nl + sr * sr / (cnt - nl)
                if best_f < 0 or gain > best_gain:
                    best_f = f
                    best_gain = gain
                    thr = (vals[pos[i]] + vals[pos[i + 1]]) / 2.0
                    if thr >= vals[pos[i + 1]]:
                        thr = vals[pos[i]]
                    best_thr = thr
        if best_f < 0:
            continue

        # stable partition of idx[s:e]
        nleft = 0
        for i in range(s, e):
            if X[idx[i], best_f] <= best_thr:
                idx[s + nleft] = idx[i]
                nleft += 1
            else:
                scratch[i - s - nleft] = idx[i]
        for i in range(cnt - nleft):
            idx[s + nleft + i] = scratch[i]

        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack[top, 0] = n_nodes + 1
        stack[top, 1] = s + nleft
        stack[top, 2] = e
        stack[top, 3] = d + 1
        top += 1
        stack[top, 0] = n_nodes
        stack[top, 1] = s
        stack[top, 2] = s + nleft
        stack[top, 3] = d + 1
        top += 1
        n_nodes += 2

    return (feature_a[:n_nodes].copy(), threshold_a[:n_nodes].copy(),
            left_a[:n_nodes].copy(), right_a[:n_nodes].copy(),
            value_a[:n_nodes].copy())


def predict_trees(const double[:, ::1] X, const int64_t[::1] feature, const double[::1] threshold,
                  const int64_t[::1] left, const int64_t[::1] right, const double[::1] value,
                  const int64_t[::1] offsets):
    """Per-tree predictions, shape (n_trees, n_rows).

    Trees are stored back to back; ``offsets[t]`` is the root of tree ``t``
    and child indices are local to their tree.
    """
    cdef Py_ssize_t n_trees = offsets.shape[0]
    cdef Py_ssize_t m = X.shape[0]
    out_a = np.empty((n_trees, m), dtype=np.float64)
    cdef double[:, ::1] out = out_a
    cdef Py_ssize_t t, i
    cdef int64_t base, k
    with nogil:
        for t in range(n_trees):
            base = offsets[t]
            for i in range(m):
                k = 0
                while feature[base + k] >= 0:
                    if X[i, feature[base + k]] <= threshold[base + k]:
                        k = left[base + k]
                    else:
                        k = right[base + k]
                out[t, i] = value[base + k]
    return out_a


def permuted_hsic_sums(const double[:, ::1] Kc, const double[:, ::1] L, const int64_t[:, ::1] perms):
    """sum_ij Kc[i, j] * L[p_i, p_j] for each permutation row p."""
    cdef Py_ssize_t P = perms.shape[0]
    cdef Py_ssize_t n = Kc.shape[0]
    out_a = np.empty(P, dtype=np.float64)
    cdef double[::1] out = out_a
    cdef Py_ssize_t b, i, j
    cdef int64_t pi
    cdef double acc, row
    with nogil:
        for b in range(P):
            acc = 0.0
            for i in range(n):
                pi = perms[b, i]
                row = 0.0
                for j in range(n):
                    row = row + Kc[i, j] * L[pi, perms[b, j]]
                acc = acc + row
            out[b] = acc
    return out_a
