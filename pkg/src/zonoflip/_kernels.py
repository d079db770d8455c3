"""Numba kernels over packed sign vectors (rows of uint64 words)."""

from __future__ import annotations

import numba as nb
import numpy as np

# the bundled TBB is too old for numba; avoid the warning and use its own pool
nb.config.THREADING_LAYER = "workqueue"

_ONE = np.uint64(1)
_EMPTY = -1


def int_to_words(bits: int, words: int) -> np.ndarray:
    out = np.zeros(words, dtype=np.uint64)
    for w in range(words):
        out[w] = (bits >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    return out


def words_to_int(row: np.ndarray) -> int:
    value = 0
    for w in range(len(row) - 1, -1, -1):
        value = (value << 64) | int(row[w])
    return value


def ints_to_array(values, words: int) -> np.ndarray:
    out = np.zeros((len(values), words), dtype=np.uint64)
    for i, v in enumerate(values):
        out[i] = int_to_words(v, words)
    return out


def bits_to_indices(bits: int) -> list[int]:
    out = []
    k = 0
    while bits:
        if bits & 1:
            out.append(k)
        bits >>= 1
        k += 1
    return out


@nb.njit(cache=True, inline="always")
def _bit(row, k):
    return (row[k >> 6] >> np.uint64(k & 63)) & _ONE


@nb.njit(cache=True, inline="always")
def _lit(row, cut_idx, cut_val, t, j, v):
    u = cut_idx[t, j, v]
    if u < 0:
        return np.uint64(cut_val[t, j, v])
    return _bit(row, u) ^ np.uint64(cut_val[t, j, v])


@nb.njit(cache=True)
def is_minimal(row, t, cut_idx, cut_val):
    for j in range(cut_idx.shape[1]):
        a = _lit(row, cut_idx, cut_val, t, j, 0)
        if _lit(row, cut_idx, cut_val, t, j, 1) != a or _lit(row, cut_idx, cut_val, t, j, 2) != a:
            return False
    return True


@nb.njit(cache=True)
def min_mask(row, cut_idx, cut_val, out):
    for w in range(out.shape[0]):
        out[w] = 0
    for t in range(cut_idx.shape[0]):
        if is_minimal(row, t, cut_idx, cut_val):
            out[t >> 6] |= _ONE << np.uint64(t & 63)


@nb.njit(cache=True)
def min_masks(rows, cut_idx, cut_val, out):
    for i in range(rows.shape[0]):
        min_mask(rows[i], cut_idx, cut_val, out[i])


@nb.njit(cache=True)
def popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@nb.njit(cache=True)
def hamming(a, b):
    s = 0
    for w in range(a.shape[0]):
        s += popcount(a[w] ^ b[w])
    return s


# ---------------------------------------------------------------------------
# open-addressing set of rows; table slots hold row indices into ``store``


@nb.njit(cache=True)
def _hash(row):
    h = np.uint64(0x9E3779B97F4A7C15)
    for w in range(row.shape[0]):
        z = row[w] + h
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        h = z ^ (z >> np.uint64(31)) ^ (h * np.uint64(31))
    return h


@nb.njit(cache=True)
def _rows_equal(store, i, row):
    for w in range(row.shape[0]):
        if store[i, w] != row[w]:
            return False
    return True


@nb.njit(cache=True)
def lookup(store, table, row):
    mask = np.uint64(table.shape[0] - 1)
    slot = _hash(row) & mask
    while True:
        idx = table[slot]
        if idx == _EMPTY:
            return -1
        if _rows_equal(store, idx, row):
            return idx
        slot = (slot + _ONE) & mask


@nb.njit(cache=True)
def _insert(store, table, row, count):
    """Insert row as store[count] unless present; return its index."""
    mask = np.uint64(table.shape[0] - 1)
    slot = _hash(row) & mask
    while True:
        idx = table[slot]
        if idx == _EMPTY:
            for w in range(row.shape[0]):
                store[count, w] = row[w]
            table[slot] = count
            return count
        if _rows_equal(store, idx, row):
            return idx
        slot = (slot + _ONE) & mask


@nb.njit(cache=True)
def rebuild_table(store, count, table):
    table[:] = _EMPTY
    mask = np.uint64(table.shape[0] - 1)
    for i in range(count):
        slot = _hash(store[i]) & mask
        while table[slot] != _EMPTY:
            slot = (slot + _ONE) & mask
        table[slot] = i


@nb.njit(cache=True)
def bfs_run(store, table, state, cut_idx, cut_val, limit):
    """Breadth-first flip closure; the store doubles as the queue.

    state = [head, count].  Returns 0 when closed, 1 when the store needs
    to grow, 2 when ``limit`` tilings have been exceeded.
    """
    T = cut_idx.shape[0]
    W = store.shape[1]
    cap = store.shape[0]
    head = state[0]
    count = state[1]
    row = np.empty(W, dtype=np.uint64)
    status = 0
    while head < count:
        if count + T > cap:
            status = 1
            break
        cur = store[head]
        for t in range(T):
            if is_minimal(cur, t, cut_idx, cut_val):
                for w in range(W):
                    row[w] = cur[w]
                row[t >> 6] ^= _ONE << np.uint64(t & 63)
                idx = _insert(store, table, row, count)
                if idx == count:
                    count += 1
        head += 1
        if count > limit:
            status = 2
            break
    state[0] = head
    state[1] = count
    return status


@nb.njit(cache=True)
def degrees(store, count, cut_idx, cut_val, out):
    W = store.shape[1]
    tmp = np.empty(W, dtype=np.uint64)
    for i in range(count):
        min_mask(store[i], cut_idx, cut_val, tmp)
        d = 0
        for w in range(W):
            d += popcount(tmp[w])
        out[i] = d


@nb.njit(cache=True)
def adjacency(store, count, table, cut_idx, cut_val, indptr, indices, labels):
    """Fill CSR flip-graph arrays; labels[e] is the flipped triangle of edge e."""
    T = cut_idx.shape[0]
    W = store.shape[1]
    row = np.empty(W, dtype=np.uint64)
    for i in range(count):
        e = indptr[i]
        cur = store[i]
        for t in range(T):
            if is_minimal(cur, t, cut_idx, cut_val):
                for w in range(W):
                    row[w] = cur[w]
                row[t >> 6] ^= _ONE << np.uint64(t & 63)
                indices[e] = lookup(store, table, row)
                labels[e] = t
                e += 1


@nb.njit(cache=True)
def bfs_distances(indptr, indices, src, dist):
    dist[:] = -1
    queue = np.empty(dist.shape[0], dtype=np.int64)
    queue[0] = src
    dist[src] = 0
    head, tail = 0, 1
    while head < tail:
        u = queue[head]
        head += 1
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue[tail] = v
                tail += 1


@nb.njit(cache=True)
def deficient_from_source(store, indptr, indices, src, dist, out_idx, out_h, out_d):
    """BFS from src, then list targets with flip distance above Hamming distance."""
    bfs_distances(indptr, indices, src, dist)
    k = 0
    for j in range(store.shape[0]):
        h = hamming(store[src], store[j])
        if dist[j] != h:
            if k < out_idx.shape[0]:
                out_idx[k] = j
                out_h[k] = h
                out_d[k] = dist[j]
            k += 1
    return k


@nb.njit(cache=True)
def _uncertified_row(store, masks, i):
    K = store.shape[0]
    W = store.shape[1]
    c = 0
    if W == 1:
        m = masks[i, 0]
        key = store[i, 0] & m
        for j in range(K):
            if store[j, 0] & m == key:
                c += 1
        return c - 1
    for j in range(K):
        hit = False
        for w in range(W):
            if masks[i, w] & (store[i, w] ^ store[j, w]):
                hit = True
                break
        if not hit:
            c += 1
    return c - 1


@nb.njit(cache=True, parallel=True)
def uncertified_counts(store, masks, out):
    """out[i] = number of j != i such that i has no inverted minimal triangle w.r.t. j."""
    for i in nb.prange(store.shape[0]):
        out[i] = _uncertified_row(store, masks, i)


@nb.njit(cache=True)
def uncertified_targets(store, masks, i, out):
    K = store.shape[0]
    W = store.shape[1]
    k = 0
    for j in range(K):
        if j == i:
            continue
        hit = False
        for w in range(W):
            if masks[i, w] & (store[i, w] ^ store[j, w]):
                hit = True
                break
        if not hit and k < out.shape[0]:
            out[k] = j
            k += 1
    return k


@nb.njit(cache=True)
def greedy(a, b, cut_idx, cut_val, path):
    """Flip the lowest-index inverted minimal triangle of a until none is left.

    Works on a copy; returns (steps, reached).  ``path`` receives the flipped
    triangles (its length bounds the number of steps).
    """
    W = a.shape[0]
    cur = a.copy()
    steps = 0
    while True:
        found = -1
        done = True
        for w in range(W):
            diff = cur[w] ^ b[w]
            if diff:
                done = False
            while diff:
                low = diff & (~diff + _ONE)
                t = w * 64 + int(popcount(low - _ONE))
                if is_minimal(cur, t, cut_idx, cut_val):
                    found = t
                    break
                diff ^= low
            if found >= 0:
                break
        if done:
            return steps, True
        if found < 0 or steps >= path.shape[0]:
            return steps, False
        cur[found >> 6] ^= _ONE << np.uint64(found & 63)
        path[steps] = found
        steps += 1


@nb.njit(cache=True)
def greedy_pairs(store, left, right, cut_idx, cut_val, steps_out, ham_out, reached_out):
    T = cut_idx.shape[0]
    path = np.empty(T + 1, dtype=np.int64)
    for k in range(left.shape[0]):
        a = store[left[k]]
        b = store[right[k]]
        ham_out[k] = hamming(a, b)
        s, ok = greedy(a, b, cut_idx, cut_val, path)
        steps_out[k] = s
        reached_out[k] = ok
