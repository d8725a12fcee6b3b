"""Compiled inner loops for dual contraction and breadth-first search."""

from __future__ import annotations

import numpy as np
from numba import njit

UNREACHABLE = -1


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def contract_labels(nf, seg_faces, segs):
    """Merge the two faces of every segment in ``segs``.

    Returns ``(label, ncls)`` with classes numbered by smallest face id.
    """
    parent = np.arange(nf)
    for i in range(segs.shape[0]):
        s = segs[i]
        a = _find(parent, seg_faces[s, 0])
        b = _find(parent, seg_faces[s, 1])
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
    label = np.empty(nf, dtype=np.int64)
    root_cls = np.full(nf, -1, dtype=np.int64)
    ncls = 0
    for f in range(nf):
        r = _find(parent, f)
        if root_cls[r] < 0:
            root_cls[r] = ncls
            ncls += 1
        label[f] = root_cls[r]
    return label, ncls


@njit(cache=True)
def class_csr(ncls, label, seg_faces, skip):
    """Adjacency of the contracted dual; segments with ``skip[s]`` set are ignored."""
    nseg = seg_faces.shape[0]
    deg = np.zeros(ncls + 1, dtype=np.int64)
    for s in range(nseg):
        if skip[s]:
            continue
        a = label[seg_faces[s, 0]]
        b = label[seg_faces[s, 1]]
        if a != b:
            deg[a + 1] += 1
            deg[b + 1] += 1
    for i in range(ncls):
        deg[i + 1] += deg[i]
    indptr = deg.copy()
    fill = deg[:ncls].copy()
    indices = np.empty(indptr[ncls], dtype=np.int64)
    for s in range(nseg):
        if skip[s]:
            continue
        a = label[seg_faces[s, 0]]
        b = label[seg_faces[s, 1]]
        if a != b:
            indices[fill[a]] = b
            fill[a] += 1
            indices[fill[b]] = a
            fill[b] += 1
    return indptr, indices


@njit(cache=True)
def bfs(indptr, indices, ncls, sources, dist, queue):
    """Multi-source BFS; ``dist`` is overwritten, unreached entries stay -1."""
    for i in range(ncls):
        dist[i] = -1
    head = 0
    tail = 0
    for i in range(sources.shape[0]):
        s = sources[i]
        if dist[s] < 0:
            dist[s] = 0
            queue[tail] = s
            tail += 1
    while head < tail:
        x = queue[head]
        head += 1
        dx = dist[x] + 1
        for j in range(indptr[x], indptr[x + 1]):
            y = indices[j]
            if dist[y] < 0:
                dist[y] = dx
                queue[tail] = y
                tail += 1
    return tail


@njit(cache=True)
def evaluate(nf, seg_faces, skip, segs, face_size, dec_faces, w_ptr, w_faces, mode, forced):
    """Contract ``segs``, then score every class as the new vertex's face.

    ``mode`` 0 solves the star insertion exactly: one multi-source BFS per
    neighbour (from the classes of its incident faces) and the class with the
    smallest distance sum wins, ties to the lowest class id.  ``mode`` 1 uses
    a single BFS from the class with the largest boundary (ties to the lowest
    id) unless ``forced >= 0`` names the source class.

    Returns ``(cost, best_class, ncls, label)``; ``cost`` is -1 if some
    neighbour cannot be reached.
    """
    label, ncls = contract_labels(nf, seg_faces, segs)
    indptr, indices = class_csr(ncls, label, seg_faces, skip)
    dist = np.empty(ncls, dtype=np.int64)
    queue = np.empty(ncls, dtype=np.int64)
    nw = w_ptr.shape[0] - 1
    if mode == 0:
        total = np.zeros(ncls, dtype=np.int64)
        for k in range(nw):
            lo = w_ptr[k]
            hi = w_ptr[k + 1]
            src = np.empty(hi - lo, dtype=np.int64)
            for i in range(lo, hi):
                src[i - lo] = label[w_faces[i]]
            reached = bfs(indptr, indices, ncls, src, dist, queue)
            if reached < ncls:
                return -1, -1, ncls, label
            for c in range(ncls):
                total[c] += dist[c]
        best = 0
        for c in range(1, ncls):
            if total[c] < total[best]:
                best = c
        return total[best], best, ncls, label

    if forced >= 0:
        best = forced
    else:
        size = np.zeros(ncls, dtype=np.int64)
        for f in range(nf):
            size[label[f]] += face_size[f]
        for i in range(dec_faces.shape[0]):
            size[label[dec_faces[i]]] -= 1
        best = 0
        for c in range(1, ncls):
            if size[c] > size[best]:
                best = c
    src = np.empty(1, dtype=np.int64)
    src[0] = best
    bfs(indptr, indices, ncls, src, dist, queue)
    cost = 0
    for k in range(nw):
        m = -1
        for i in range(w_ptr[k], w_ptr[k + 1]):
            d = dist[label[w_faces[i]]]
            if d >= 0 and (m < 0 or d < m):
                m = d
        if m < 0:
            return -1, best, ncls, label
        cost += m
    return cost, best, ncls, label


@njit(cache=True)
def trace_cycles(nxt, twin, alive):
    """Face cycles of ``d -> nxt[twin[d]]`` over live darts.

    Returns ``(face_of, order, ptr, bad)``: face ``f`` is
    ``order[ptr[f]:ptr[f+1]]``; ``bad`` is a dart whose walk does not close,
    or -1.
    """
    nd = nxt.shape[0]
    face_of = np.full(nd, -1, dtype=np.int64)
    order = np.empty(nd, dtype=np.int64)
    ptr = np.empty(nd + 1, dtype=np.int64)
    ptr[0] = 0
    nf = 0
    k = 0
    for d0 in range(nd):
        if not alive[d0] or face_of[d0] >= 0:
            continue
        d = d0
        while face_of[d] < 0:
            face_of[d] = nf
            order[k] = d
            k += 1
            d = nxt[twin[d]]
        if d != d0:
            return face_of, order[:k], ptr[: nf + 2], d0
        nf += 1
        ptr[nf] = k
    return face_of, order[:k], ptr[: nf + 1], -1


@njit(cache=True)
def component_labels(nv, a, b):
    """Union-find over vertex pairs; returns a root per vertex."""
    parent = np.arange(nv)
    for i in range(a.shape[0]):
        x = _find(parent, a[i])
        y = _find(parent, b[i])
        if x != y:
            parent[x] = y
    for x in range(nv):
        parent[x] = _find(parent, x)
    return parent


@njit(cache=True)
def bfs_parents(indptr, nbr, seg, dart, n, root):
    """BFS over a CSR whose rows are sorted by (neighbour, segment).

    Returns ``(dist, parent, parent_segment, parent_dart)`` where the dart
    lies in the parent's face.
    """
    dist = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    pseg = np.full(n, -1, dtype=np.int64)
    pdart = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    dist[root] = 0
    queue[0] = root
    head = 0
    tail = 1
    while head < tail:
        x = queue[head]
        head += 1
        for j in range(indptr[x], indptr[x + 1]):
            y = nbr[j]
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                parent[y] = x
                pseg[y] = seg[j]
                pdart[y] = dart[j]
                queue[tail] = y
                tail += 1
    return dist, parent, pseg, pdart
