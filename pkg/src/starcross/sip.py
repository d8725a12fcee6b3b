"""Vertex removal in the dual and the fixed-embedding star insertion solver."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .embedding import (
    DUMMY,
    DualGraph,
    EmbeddingError,
    EmbeddingState,
    FaceSet,
    Planarisation,
    build_dual,
    planarise,
    trace_faces,
)


class SipError(RuntimeError):
    """A neighbour is unreachable in the dual (disconnected embedding)."""


@dataclass
class SipResult:
    """Outcome of one star insertion.

    ``paths[i]`` lists the segments crossed by the edge to ``neighbours[i]``,
    from the new vertex outward; ``newface`` is a dual vertex (class) id.
    """

    new_cr: int
    newface: int
    neighbours: list[int]
    paths: list[list[int]] = field(default_factory=list)
    targets: list[int] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Dual helpers
# ---------------------------------------------------------------------------


def vertex_segments(dual: DualGraph, ctx: Planarisation, v: int) -> np.ndarray:
    """Segments (dual edge ids) that belong to edges incident to ``v``."""
    ends = ctx.ends
    edges = ctx.dart_edge
    return np.asarray(
        [s for s, d in enumerate(dual.seg_dart) if v in ends[edges[d]]], dtype=np.int64
    )


def remove_vertex_dual(dual: DualGraph, v: int, ctx: Planarisation) -> DualGraph:
    """Dual of the map without ``v``: contract the dual edges of ``v``'s segments."""
    if not 0 <= v < ctx.n_real:
        raise ValueError(f"vertex {v} out of range")
    segs = vertex_segments(dual, ctx, v)
    if len(segs) == 0:
        return dual
    seg_faces = dual.seg_faces
    # keep any earlier contraction by re-merging segments already inside a class
    inside = np.flatnonzero(dual.label[seg_faces[:, 0]] == dual.label[seg_faces[:, 1]])
    to_merge = np.unique(np.concatenate([segs, inside.astype(np.int64)]))
    label, ncls = _kernels.contract_labels(dual.num_faces, seg_faces, to_merge)
    dead = dual.dead.copy()
    dead[segs] = True
    size = np.zeros(ncls, dtype=np.int64)
    np.add.at(size, label, dual.face_size)
    return replace(dual, label=label, num_classes=int(ncls), dead=dead, class_size=size)


def class_adjacency(dual: DualGraph) -> list[list[tuple[int, int]]]:
    """Per class the sorted ``(neighbour class, segment)`` pairs."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(dual.num_classes)]
    for a, b, s in dual.edges():
        adj[a].append((b, s))
        adj[b].append((a, s))
    for lst in adj:
        lst.sort()
    return adj


def neighbour_faces(ctx: Planarisation, fs: FaceSet, w: int) -> list[int]:
    return sorted({fs.face_of[d] for d in ctx.rotation(w)})


def neighbours_of(ctx: Planarisation, v: int) -> list[int]:
    out = []
    for e, (a, b) in enumerate(ctx.ends):
        if a == v:
            out.append(b)
        elif b == v:
            out.append(a)
    return out


def bfs_tree(adj: Sequence[Sequence[tuple[int, int]]], root: int):
    """BFS with neighbours in ascending order; parents fixed at first discovery."""
    n = len(adj)
    dist = [-1] * n
    parent = [-1] * n
    pseg = [-1] * n
    dist[root] = 0
    q = deque([root])
    while q:
        x = q.popleft()
        for y, s in adj[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                parent[y] = x
                pseg[y] = s
                q.append(y)
    return dist, parent, pseg


def _flatten(groups: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(groups) + 1, dtype=np.int64)
    for i, g in enumerate(groups):
        ptr[i + 1] = ptr[i] + len(g)
    flat = np.asarray([x for g in groups for x in g], dtype=np.int64)
    return ptr, flat


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------


def _solve(dual: DualGraph, w_faces: list[list[int]], neighbours: list[int], mode: int,
           source: Optional[int] = None, dec_faces: Optional[np.ndarray] = None) -> SipResult:
    for w, fl in zip(neighbours, w_faces):
        if not fl:
            raise SipError(f"neighbour {w} has no incident face")
    # the contraction already sits in dual.label; feed it as the class structure
    segs = np.flatnonzero(dual.label[dual.seg_faces[:, 0]] == dual.label[dual.seg_faces[:, 1]]).astype(np.int64)
    ptr, flat = _flatten(w_faces)
    if dec_faces is None:
        dec_faces = np.zeros(0, dtype=np.int64)
    cost, best, ncls, label = _kernels.evaluate(
        dual.num_faces, dual.seg_faces, dual.dead.astype(np.uint8), segs, dual.face_size,
        dec_faces, ptr, flat, mode, -1 if source is None else int(source),
    )
    assert ncls == dual.num_classes
    if cost < 0:
        raise SipError("some neighbour is unreachable in the dual")
    adj = class_adjacency(dual)
    dist, parent, pseg = bfs_tree(adj, int(best))
    paths, targets = [], []
    total = 0
    for fl in w_faces:
        cls = sorted({int(dual.label[f]) for f in fl})
        t = min(cls, key=lambda c: (dist[c], c))
        path = []
        x = t
        while x != best:
            path.append(pseg[x])
            x = parent[x]
        path.reverse()
        paths.append(path)
        targets.append(t)
        total += len(path)
    if total != cost:
        raise EmbeddingError(f"path lengths {total} disagree with distance sum {cost}")
    return SipResult(int(cost), int(best), list(neighbours), paths, targets)


def sip_fixed(dual_minus_v: DualGraph, ctx: Planarisation, v: int, fs: Optional[FaceSet] = None) -> SipResult:
    """Optimal face and insertion paths for re-inserting ``v``."""
    fs = fs or dual_minus_v.faces
    nbrs = neighbours_of(ctx, v)
    return _solve(dual_minus_v, [neighbour_faces(ctx, fs, w) for w in nbrs], nbrs, 0)


def biggest_class(dual: DualGraph, ctx: Planarisation, v: int) -> int:
    """Class with the longest boundary in the map without ``v``; ties to the lowest id."""
    size = boundary_sizes(dual, ctx, v)
    return int(np.argmax(size))


def boundary_sizes(dual: DualGraph, ctx: Planarisation, v: int) -> np.ndarray:
    """Boundary length of every class once ``v`` and its edges are gone."""
    size = np.zeros(dual.num_classes, dtype=np.int64)
    np.add.at(size, dual.label, dual.face_size)
    np.subtract.at(size, dual.label[_decrement_faces(dual, ctx, v)], 1)
    return size


def _decrement_faces(dual: DualGraph, ctx: Planarisation, v: int) -> np.ndarray:
    """One entry per boundary dart that disappears when ``v`` is removed."""
    fo = dual.faces.face_of
    out = []
    ends, de = ctx.ends, ctx.dart_edge
    for d in range(len(ctx.tail)):
        if ctx.alive[d] and v in ends[de[d]]:
            out.append(fo[d])
    # a non-v strand through a dummy on a v-edge loses one dart per side
    for x in range(ctx.num_vertices):
        if ctx.kind[x] != DUMMY or ctx.first[x] < 0:
            continue
        rot = ctx.rotation(x)
        mine = [d for d in rot if v in ends[de[d]]]
        if len(mine) == 2:
            other = [d for d in rot if d not in mine]
            out.append(fo[other[0]])
            out.append(fo[ctx.twin[other[0]]])
    return np.asarray(out, dtype=np.int64)


def sip_biggest_face(dual_minus_v: DualGraph, ctx: Planarisation, v: int,
                     source: Optional[int] = None) -> SipResult:
    """Star insertion restricted to one source face (the biggest by default)."""
    fs = dual_minus_v.faces
    nbrs = neighbours_of(ctx, v)
    dec = _decrement_faces(dual_minus_v, ctx, v)
    return _solve(dual_minus_v, [neighbour_faces(ctx, fs, w) for w in nbrs], nbrs, 1,
                  source=source, dec_faces=dec)


def sip_reference_oracle(es: EmbeddingState, v: int) -> int:
    """Brute-force minimum: fresh BFS from every face of the drawing without ``v``.

    Works on the full map and merges the faces on both sides of ``v``'s
    edges, so the rest of the drawing keeps its placement even when ``v``
    is a cut vertex.  Shares nothing with the solvers beyond planarisation
    and face tracing.
    """
    p = planarise(es)
    fs = trace_faces(p)
    parent = list(range(len(fs.faces)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    live = [d for d in range(len(p.tail)) if p.alive[d]]
    gone = [v in es.ends[p.dart_edge[d]] for d in range(len(p.tail))]
    for d in live:
        if gone[d]:
            a, b = find(fs.face_of[d]), find(fs.face_of[p.twin[d]])
            if a != b:
                parent[max(a, b)] = min(a, b)
    adj: dict[int, set[int]] = {find(f): set() for f in range(len(fs.faces))}
    for d in live:
        if not gone[d]:
            a, b = find(fs.face_of[d]), find(fs.face_of[p.twin[d]])
            if a != b:
                adj[a].add(b)
    nbr_faces = [{find(fs.face_of[d]) for d in p.rotation(w)} for w in es.neighbours(v)]
    best = None
    for f in sorted(adj):
        total = 0
        for targets in nbr_faces:
            seen = {f: 0}
            q = deque([f])
            found = None
            while q:
                x = q.popleft()
                if x in targets:
                    found = seen[x]
                    break
                for y in adj[x]:
                    if y not in seen:
                        seen[y] = seen[x] + 1
                        q.append(y)
            if found is None:
                total = None
                break
            total += found
        if total is not None and (best is None or total < best):
            best = total
    if best is None:
        raise SipError("no face reaches every neighbour")
    return best


# ---------------------------------------------------------------------------
# Batched evaluation over one planarisation
# ---------------------------------------------------------------------------


class VertexEvaluator:
    """Scores every vertex of one embedding against a shared dual.

    Built once per iteration from the current planarisation; each call
    contracts the vertex's segments in a private label array, so the shared
    arrays are never mutated.
    """

    def __init__(self, state: EmbeddingState, p: Planarisation, fs: FaceSet):
        self.state = state
        self.p = p
        self.fs = fs
        self.nf = len(fs.faces)
        face_of = np.asarray(fs.face_of, dtype=np.int64)
        nseg = len(p.seg_edge)
        darts = np.arange(2 * nseg, dtype=np.int64)
        self.seg_faces = face_of[darts].reshape(nseg, 2) if nseg else np.zeros((0, 2), np.int64)
        self.face_size = np.asarray(fs.boundary_size, dtype=np.int64)
        self.face_of = face_of
        self.inc = state._incidence()
        self._vertex_faces: dict[int, list[int]] = {}
        self._skip = np.zeros(nseg, dtype=np.uint8)

    def faces_at(self, w: int) -> list[int]:
        fl = self._vertex_faces.get(w)
        if fl is None:
            fl = sorted({int(self.face_of[d]) for d in self.p.rotation(w)})
            self._vertex_faces[w] = fl
        return fl

    def vertex_segments(self, v: int) -> np.ndarray:
        segs = []
        for e in self.inc[v]:
            segs.extend(self.p.edge_segments[e])
        return np.asarray(segs, dtype=np.int64)

    def decrement_faces(self, v: int) -> np.ndarray:
        p, st = self.p, self.state
        mine = set(self.inc[v])
        fo = self.face_of
        out = []
        for e in mine:
            segs = p.edge_segments[e]
            for s in segs:
                out.append(fo[2 * s])
                out.append(fo[2 * s + 1])
            for j in range(len(segs) - 1):
                x = p.tail[2 * segs[j] + 1]
                e1, e2 = p.dummy_edges[x]
                c = e2 if e1 == e else e1
                if c in mine:
                    continue
                pos = p.dummy_position[x][0 if c == e1 else 1]
                s = p.edge_segments[c][pos]
                out.append(fo[2 * s])
                out.append(fo[2 * s + 1])
        return np.asarray(out, dtype=np.int64)

    def evaluate(self, v: int, mode: int = 0, forced: int = -1):
        """Return ``(cost, best_class, label)`` for re-inserting ``v``."""
        segs = self.vertex_segments(v)
        skip = self._skip
        skip[segs] = 1
        nbrs = [self.state.other(e, v) for e in self.inc[v]]
        ptr, flat = _flatten([self.faces_at(w) for w in nbrs])
        dec = self.decrement_faces(v) if mode == 1 and forced < 0 else np.zeros(0, np.int64)
        try:
            cost, best, _, label = _kernels.evaluate(
                self.nf, self.seg_faces, skip, segs, self.face_size, dec, ptr, flat, mode, forced
            )
        finally:
            skip[segs] = 0
        return int(cost), int(best), label

    def skip_map_dart(self, v: int, label: np.ndarray, cls: int) -> int:
        """A dart of the map without ``v`` lying in the face that class ``cls`` becomes.

        The dart is named by (edge, segment index, direction) and the segment
        index is shifted by the crossings with ``v``'s edges that vanish.
        """
        p, st = self.p, self.state
        mine = set(self.inc[v])
        for f in np.flatnonzero(label == cls):
            for d in self.fs.faces[int(f)]:
                e = p.dart_edge[d]
                if e in mine:
                    continue
                j = p.seg_index[d // 2]
                drop = sum(1 for c in st.crossing_order[e][:j] if c in mine)
                return 2 * (self._skip_segment_base(e, v) + j - drop) + (d & 1)
        raise EmbeddingError(f"class {cls} has no surviving boundary dart")

    def _skip_segment_base(self, e: int, v: int) -> int:
        # number of segments before edge e in the map built with skip=v
        mine = set(self.inc[v])
        base = getattr(self, "_skip_base", None)
        if base is None or base[0] != v:
            offs = []
            acc = 0
            for c in range(self.state.num_edges):
                offs.append(acc)
                if c in mine:
                    continue
                acc += 1 + sum(1 for x in self.state.crossing_order[c] if x not in mine)
            base = (v, offs)
            self._skip_base = base
        return base[1][e]
