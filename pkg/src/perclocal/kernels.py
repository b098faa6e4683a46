"""Hot inner loops.

Each public kernel has a numba path and a pure-numpy path with identical
results; ``perclocal._accel.USE_NUMBA`` picks one at import time. Loop-only
kernels (union-find sweep, single-root BFS) run the same source either
compiled or interpreted.
"""
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from ._accel import USE_NUMBA, njit


# ---------------------------------------------------------------- union-find

@njit
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit
def _union(parent, size, a, b):
    """Merge the sets of a and b; returns the merged root or -1 if already joined."""
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return -1
    # union by size, ties toward the smaller root id
    if size[ra] < size[rb] or (size[ra] == size[rb] and rb < ra):
        ra, rb = rb, ra
    parent[rb] = ra
    size[ra] += size[rb]
    return ra


@njit
def sweep_trajectory(n, eu, ev, order):
    """Largest cluster size after each edge of ``order`` is inserted."""
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    traj = np.empty(order.shape[0], dtype=np.int64)
    largest = 1 if n > 0 else 0
    for i in range(order.shape[0]):
        e = order[i]
        r = _union(parent, size, eu[e], ev[e])
        if r >= 0 and size[r] > largest:
            largest = size[r]
        traj[i] = largest
    return traj


@njit
def _uf_labels_numba(n, eu, ev, mask):
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    for e in range(eu.shape[0]):
        if mask[e]:
            _union(parent, size, eu[e], ev[e])
    # dense labels ordered by smallest member vertex
    labels = np.full(n, -1, dtype=np.int64)
    root_label = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for v in range(n):
        r = _find(parent, v)
        if root_label[r] < 0:
            root_label[r] = nxt
            nxt += 1
        labels[v] = root_label[r]
    return labels


def _uf_labels_numpy(n, eu, ev, mask):
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    sel = np.asarray(mask, dtype=bool)
    adj = sp.coo_matrix(
        (np.ones(int(sel.sum()), dtype=np.int8), (eu[sel], ev[sel])), shape=(n, n)
    ).tocsr()
    _, raw = connected_components(adj, directed=False)
    # relabel by first appearance so both paths agree exactly
    _, first = np.unique(raw, return_index=True)
    rank = np.empty(first.shape[0], dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.shape[0])
    return rank[raw].astype(np.int64)


def component_labels(n, eu, ev, mask):
    """Dense component labels; label order follows the smallest vertex of each part."""
    mask = np.ascontiguousarray(mask, dtype=np.bool_)
    if USE_NUMBA:
        return _uf_labels_numba(n, eu, ev, mask)
    return _uf_labels_numpy(n, eu, ev, mask)


# ----------------------------------------------------------------------- BFS

@njit
def bfs_ball(indptr, nbr, v, R, mark, stamp, order, dist):
    """Truncated BFS from v; fills ``order``/``dist`` and returns the ball size.

    ``mark`` holds per-vertex stamps so repeated calls need no clearing.
    """
    mark[v] = stamp
    order[0] = v
    dist[0] = 0
    head = 0
    tail = 1
    while head < tail:
        u = order[head]
        du = dist[head]
        head += 1
        if du == R:
            continue
        for j in range(indptr[u], indptr[u + 1]):
            w = nbr[j]
            if mark[w] != stamp:
                mark[w] = stamp
                order[tail] = w
                dist[tail] = du + 1
                tail += 1
    return tail


@njit
def _ball_sizes_numba(indptr, nbr, n, R):
    mark = np.full(n, -1, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    dist = np.empty(n, dtype=np.int64)
    sizes = np.empty(n, dtype=np.int64)
    for v in range(n):
        sizes[v] = bfs_ball(indptr, nbr, v, R, mark, v, order, dist)
    return sizes


def _ball_reach_matrix(indptr, nbr, n, R):
    adj = sp.csr_matrix(
        (np.ones(nbr.shape[0], dtype=np.int8), nbr, indptr), shape=(n, n)
    )
    adj.data[:] = 1
    reach = sp.identity(n, dtype=np.int8, format="csr")
    for _ in range(R):
        grown = (reach @ adj + reach).tocsr()
        grown.data[:] = 1
        if grown.nnz == reach.nnz:
            break
        reach = grown
    return reach


def ball_sizes(indptr, nbr, n, R):
    """|B_R(v)| for every vertex v."""
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if USE_NUMBA:
        return _ball_sizes_numba(indptr, nbr, n, R)
    reach = _ball_reach_matrix(indptr, nbr, n, R)
    return np.diff(reach.indptr).astype(np.int64)


@njit
def _reach_flags_numba(indptr, nbr, eid, n, open_mask, labels, comp_size, R):
    flags = np.zeros(n, dtype=np.bool_)
    mark = np.full(n, -1, dtype=np.int64)
    omark = np.full(n, -1, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    dist = np.empty(n, dtype=np.int64)
    for v in range(n):
        lv = labels[v]
        if comp_size[lv] == 1:
            continue
        # open BFS to depth R: open distance bounds host distance from above,
        # so a cluster exhausted before depth R stays inside B_{R-1}(v)
        omark[v] = v
        order[0] = v
        dist[0] = 0
        head = 0
        tail = 1
        deep = False
        while head < tail and not deep:
            u = order[head]
            du = dist[head]
            head += 1
            for j in range(indptr[u], indptr[u + 1]):
                if not open_mask[eid[j]]:
                    continue
                w = nbr[j]
                if omark[w] != v:
                    omark[w] = v
                    order[tail] = w
                    dist[tail] = du + 1
                    tail += 1
                    if du + 1 >= R:
                        deep = True
                        break
        if not deep:
            continue
        # the cluster reaches distance R iff it is not contained in B_{R-1}(v)
        size = bfs_ball(indptr, nbr, v, R - 1, mark, v, order, dist)
        inside = 0
        for i in range(size):
            if labels[order[i]] == lv:
                inside += 1
        flags[v] = comp_size[lv] > inside
    return flags


def _reach_flags_numpy(indptr, nbr, n, labels, comp_size, R):
    inner = _ball_reach_matrix(indptr, nbr, n, R - 1).tocoo()
    same = labels[inner.row] == labels[inner.col]
    inside = np.bincount(inner.row[same], minlength=n)
    return comp_size[labels] > inside


def reach_flags(indptr, nbr, eid, n, eu, ev, open_mask, R):
    """Per-vertex indicator that the open cluster of v meets the sphere of radius R."""
    open_mask = np.ascontiguousarray(open_mask, dtype=np.bool_)
    labels = component_labels(n, eu, ev, open_mask)
    comp_size = np.bincount(labels, minlength=int(labels.max()) + 1 if n else 0)
    if n == 0:
        return np.zeros(0, dtype=bool)
    if USE_NUMBA:
        return _reach_flags_numba(indptr, nbr, eid, n, open_mask, labels, comp_size, R)
    return _reach_flags_numpy(indptr, nbr, n, labels, comp_size, R)


# ------------------------------------------------------------ nonbacktracking

@njit
def _nb_apply_numba(x, tail, head, n):
    s = np.zeros(n)
    for a in range(x.shape[0]):
        s[tail[a]] += x[a]
    out = np.empty_like(x)
    for a in range(x.shape[0]):
        out[a] = s[head[a]] - x[a ^ 1]
    return out


def _nb_apply_numpy(x, tail, head, n):
    s = np.bincount(tail, weights=x, minlength=n)
    return s[head] - x[np.arange(x.shape[0]) ^ 1]


def nb_apply(x, tail, head, n):
    """Apply the nonbacktracking operator to a vector on directed edges.

    Directed edge 2e runs u->v and 2e+1 runs v->u for edge e=(u, v); the
    successors of a are all directed edges leaving head(a) except a^1.
    """
    if USE_NUMBA:
        return _nb_apply_numba(x, tail, head, n)
    return _nb_apply_numpy(x, tail, head, n)
