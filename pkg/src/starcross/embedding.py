"""Combinatorial embeddings with crossing bookkeeping.

An :class:`EmbeddingState` is the compact form of a drawing: per edge the
clockwise/anticlockwise neighbours around both endpoints, per edge the
ordered list of edges crossing it (starting from the smaller endpoint), and
one orientation sign per crossing pair.  :func:`planarise` expands it into a
:class:`Planarisation`, a dart-based planar map in which every crossing is a
degree-4 dummy vertex.  Faces, duals and all insertions work on that map;
:func:`state_from_planarisation` folds a map back into an embedding state.

Orientation convention: for crossing edges ``e1 < e2`` with ends
``u1 < v1`` and ``u2 < v2`` the stored sign is ``+1`` iff the clockwise order
around the crossing is ``u1, u2, v1, v2`` and ``-1`` iff it is
``u1, v2, v1, u2``.  "Clockwise" is the rotation successor used throughout;
the face successor of a dart ``d`` is ``nxt[twin[d]]``.
"""

from __future__ import annotations

import json
from itertools import chain
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels

REAL, SUB, DUMMY, DEAD = 0, 1, 2, 3

FORMAT_NAME = "starcross-rotation"
FORMAT_VERSION = 1


class EmbeddingError(RuntimeError):
    """Inconsistent rotation or crossing data."""

    def __init__(self, message: str, vertex: Optional[int] = None):
        super().__init__(message)
        self.vertex = vertex


class GeometryError(ValueError):
    """Coordinates that cannot be turned into a drawing."""


@dataclass(frozen=True)
class EdgeRecord:
    u: int
    v: int
    cw_u: int
    ccw_u: int
    cw_v: int
    ccw_v: int


# ---------------------------------------------------------------------------
# Embedding state
# ---------------------------------------------------------------------------


@dataclass
class EmbeddingState:
    """Rotation system plus crossing order and orientation lists.

    Vertices ``>= base_vertices`` are subdivision vertices; ``origin[e]``
    names the input edge a working edge belongs to, and ``chains`` maps each
    subdivided input edge to its vertex chain (from its smaller endpoint).
    """

    num_vertices: int
    ends: list[tuple[int, int]]
    cw: list[list[int]]
    ccw: list[list[int]]
    crossing_order: list[list[int]]
    orientation: dict[tuple[int, int], int]
    base_vertices: int = -1
    origin: list[int] = field(default_factory=list)
    chains: dict[int, list[int]] = field(default_factory=dict)
    coords: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.base_vertices < 0:
            self.base_vertices = self.num_vertices
        if not self.origin:
            self.origin = list(range(len(self.ends)))

    # -- construction -------------------------------------------------------

    @classmethod
    def from_rotation(
        cls,
        num_vertices: int,
        ends: Sequence[tuple[int, int]],
        rotation: Sequence[Sequence[int]],
        crossing_order: Optional[Sequence[Sequence[int]]] = None,
        orientation: Optional[dict[tuple[int, int], int]] = None,
        **kw,
    ) -> "EmbeddingState":
        """Build from per-vertex clockwise edge lists."""
        m = len(ends)
        ends = [(u, v) if u < v else (v, u) for u, v in ends]
        cw = [[-1, -1] for _ in range(m)]
        ccw = [[-1, -1] for _ in range(m)]
        for x, order in enumerate(rotation):
            k = len(order)
            for i, e in enumerate(order):
                side = 0 if ends[e][0] == x else 1
                cw[e][side] = order[(i + 1) % k]
                ccw[e][side] = order[(i - 1) % k]
        cross = [list(c) for c in crossing_order] if crossing_order else [[] for _ in range(m)]
        return cls(num_vertices, list(ends), cw, ccw, cross, dict(orientation or {}), **kw)

    def copy(self) -> "EmbeddingState":
        return EmbeddingState(
            self.num_vertices,
            list(self.ends),
            [list(x) for x in self.cw],
            [list(x) for x in self.ccw],
            [list(x) for x in self.crossing_order],
            dict(self.orientation),
            self.base_vertices,
            list(self.origin),
            {k: list(v) for k, v in self.chains.items()},
            None if self.coords is None else self.coords.copy(),
        )

    # -- queries ------------------------------------------------------------

    @property
    def num_edges(self) -> int:
        return len(self.ends)

    def total_crossings(self) -> int:
        return sum(len(c) for c in self.crossing_order) // 2

    def incident(self, v: int) -> list[int]:
        inc = self._incidence()
        return inc[v]

    def neighbours(self, v: int) -> list[int]:
        return [self.other(e, v) for e in self.incident(v)]

    def other(self, e: int, v: int) -> int:
        a, b = self.ends[e]
        return b if a == v else a

    def _incidence(self) -> list[list[int]]:
        inc: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for e, (u, v) in enumerate(self.ends):
            inc[u].append(e)
            inc[v].append(e)
        return inc

    def vertex_crossings(self, v: int) -> int:
        """Crossings on the edges incident to ``v``, each counted once."""
        inc = set(self.incident(v))
        total = 0
        for e in inc:
            for c in self.crossing_order[e]:
                total += 1 if c not in inc else 0
                if c in inc and e < c:
                    total += 1
        return total

    def records(self) -> list[EdgeRecord]:
        return [
            EdgeRecord(u, v, self.cw[e][0], self.ccw[e][0], self.cw[e][1], self.ccw[e][1])
            for e, (u, v) in enumerate(self.ends)
        ]

    def side(self, e: int, x: int) -> int:
        return 0 if self.ends[e][0] == x else 1

    def rotation_lists(self) -> list[list[int]]:
        """Clockwise edge list per vertex, starting at its smallest edge id.

        Raises :class:`EmbeddingError` naming the vertex if following the
        clockwise pointers does not cycle through exactly its edges.
        """
        inc = self._incidence()
        out = []
        for x, edges in enumerate(inc):
            if not edges:
                out.append([])
                continue
            start = min(edges)
            order = [start]
            e = start
            allowed = set(edges)
            for _ in range(len(edges)):
                if self.ends[e][0] != x and self.ends[e][1] != x:
                    raise EmbeddingError(f"rotation at vertex {x} reaches foreign edge {e}", x)
                e = self.cw[e][self.side(e, x)]
                if e not in allowed:
                    raise EmbeddingError(f"rotation at vertex {x} reaches foreign edge {e}", x)
                if e == start:
                    break
                order.append(e)
            if e != start or len(order) != len(edges) or len(set(order)) != len(edges):
                raise EmbeddingError(f"rotation at vertex {x} does not close over its edges", x)
            out.append(order)
        return out


# ---------------------------------------------------------------------------
# Planar map
# ---------------------------------------------------------------------------


class Planarisation:
    """Dart-based planar map.

    Every dart has a tail, a twin (the reverse dart), rotation neighbours
    ``nxt``/``prv`` around its tail, the working edge it belongs to and the
    input edge it descends from.  Splitting a dart keeps both original darts
    at their original tails, so dart references survive later splits.

    Maps produced by :func:`planarise` additionally carry a segment table:
    segment ``s`` consists of darts ``2s`` and ``2s+1``.
    """

    def __init__(self):
        self.kind: list[int] = []
        self.first: list[int] = []
        self.tail: list[int] = []
        self.twin: list[int] = []
        self.nxt: list[int] = []
        self.prv: list[int] = []
        self.dart_edge: list[int] = []
        self.dart_origin: list[int] = []
        self.alive: list[bool] = []
        # segment table (fresh maps only)
        self.seg_edge: list[int] = []
        self.seg_index: list[int] = []
        self.edge_segments: list[list[int]] = []
        self.dummy_edges: dict[int, tuple[int, int]] = {}
        self.dummy_position: dict[int, tuple[int, int]] = {}
        self.ends: list[tuple[int, int]] = []
        self.n_real = 0

    # -- primitive edits -----------------------------------------------------

    def add_vertex(self, kind: int) -> int:
        self.kind.append(kind)
        self.first.append(-1)
        return len(self.kind) - 1

    def add_pair(self, a: int, b: int, edge: int, origin: int) -> tuple[int, int]:
        d = len(self.tail)
        self.tail += [a, b]
        self.twin += [d + 1, d]
        self.nxt += [d, d + 1]
        self.prv += [d, d + 1]
        self.dart_edge += [edge, edge]
        self.dart_origin += [origin, origin]
        self.alive += [True, True]
        return d, d + 1

    def _new_dart(self, tail: int, edge: int, origin: int) -> int:
        d = len(self.tail)
        self.tail.append(tail)
        self.twin.append(-1)
        self.nxt.append(d)
        self.prv.append(d)
        self.dart_edge.append(edge)
        self.dart_origin.append(origin)
        self.alive.append(True)
        return d

    def set_rotation(self, x: int, darts: Sequence[int]) -> None:
        k = len(darts)
        for i, d in enumerate(darts):
            self.nxt[d] = darts[(i + 1) % k]
            self.prv[d] = darts[(i - 1) % k]
        self.first[x] = darts[0] if darts else -1

    def insert_before(self, ref: int, d: int) -> None:
        p = self.prv[ref]
        self.nxt[p] = d
        self.prv[d] = p
        self.nxt[d] = ref
        self.prv[ref] = d

    def split(self, d: int, kind: int) -> tuple[int, int, int]:
        """Put a new vertex ``x`` inside the segment of dart ``d`` (a->b).

        Afterwards ``d`` runs a->x and its old twin runs b->x.  Returns
        ``(x, p, q)`` with new darts ``p: x->a`` and ``q: x->b``; the
        rotation at ``x`` is left to the caller.
        """
        t = self.twin[d]
        x = self.add_vertex(kind)
        e, o = self.dart_edge[d], self.dart_origin[d]
        p = self._new_dart(x, e, o)
        q = self._new_dart(x, e, o)
        self.twin[d], self.twin[p] = p, d
        self.twin[t], self.twin[q] = q, t
        return x, p, q

    def subdivide(self, d: int) -> int:
        """Insert a degree-2 subdivision vertex into the segment of ``d``."""
        x, p, q = self.split(d, SUB)
        self.set_rotation(x, [p, q])
        return x

    def smooth(self, x: int) -> None:
        """Remove a degree-2 vertex, joining its two segments."""
        a = self.first[x]
        b = self.nxt[a]
        ta, tb = self.twin[a], self.twin[b]
        self.twin[ta], self.twin[tb] = tb, ta
        self.alive[a] = self.alive[b] = False
        self.kind[x] = DEAD
        self.first[x] = -1

    # -- queries ----------------------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.kind)

    def head(self, d: int) -> int:
        return self.tail[self.twin[d]]

    def rotation(self, x: int) -> list[int]:
        d0 = self.first[x]
        if d0 < 0:
            return []
        out = [d0]
        d = self.nxt[d0]
        while d != d0:
            out.append(d)
            d = self.nxt[d]
        return out

    def segments(self) -> list[int]:
        """One representative dart per live segment (the smaller id)."""
        return [d for d in range(len(self.tail)) if self.alive[d] and d < self.twin[d]]

    def live_vertex_count(self) -> int:
        return sum(1 for k, f in zip(self.kind, self.first) if k != DEAD and f >= 0)

    def real_darts(self, x: int) -> list[int]:
        return self.rotation(x)

    def straight(self, d: int) -> int:
        """Dart continuing straight through the dummy at the head of ``d``."""
        return self.nxt[self.nxt[self.twin[d]]]


def planarise(state: EmbeddingState, skip: Optional[int] = None) -> Planarisation:
    """Expand ``state`` into its planar map; ``skip`` drops a vertex and its edges.

    Dummies are numbered above all real and subdivision vertices in the order
    crossings are first met scanning edges by id.
    """
    n = state.num_vertices
    m = state.num_edges
    p = Planarisation()
    p.n_real = n
    p.ends = list(state.ends)
    rot = state.rotation_lists()

    ends = np.asarray(state.ends, dtype=np.int64).reshape(m, 2)
    alive_e = np.ones(m, dtype=bool)
    if skip is not None:
        alive_e[(ends[:, 0] == skip) | (ends[:, 1] == skip)] = False
    lens = np.fromiter((len(o) for o in state.crossing_order), dtype=np.int64, count=m)
    flat_c = np.fromiter(chain.from_iterable(state.crossing_order), dtype=np.int64, count=int(lens.sum()))
    flat_e = np.repeat(np.arange(m, dtype=np.int64), lens)
    if len(flat_c) and (flat_c.min() < 0 or flat_c.max() >= m):
        raise EmbeddingError("crossing order names an unknown edge")
    keep = alive_e[flat_e] & alive_e[flat_c]
    flat_c, flat_e = flat_c[keep], flat_e[keep]
    if np.any(flat_c == flat_e):
        e = int(flat_e[flat_c == flat_e][0])
        raise EmbeddingError(f"edge {e} crosses itself")
    r = np.bincount(flat_e, minlength=m)
    start = np.concatenate([[0], np.cumsum(r)[:-1]])
    pos = np.arange(len(flat_e), dtype=np.int64) - start[flat_e]

    nseg_e = np.where(alive_e, r + 1, 0)
    so = np.concatenate([[0], np.cumsum(nseg_e)[:-1]])
    nseg = int(nseg_e.sum())

    lo = np.minimum(flat_e, flat_c)
    hi = np.maximum(flat_e, flat_c)
    key = lo * m + hi
    uniq, first_idx, inv, counts = np.unique(key, return_index=True, return_inverse=True, return_counts=True)
    if np.any(counts != 2):
        bad = int(uniq[np.flatnonzero(counts != 2)[0]])
        a, b = divmod(bad, m)
        if counts[counts != 2][0] > 2:
            raise EmbeddingError(f"edges {a} and {b} cross more than once")
        raise EmbeddingError(f"crossing of edges {a} and {b} is not symmetric")
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[np.argsort(first_idx, kind="stable")] = np.arange(len(uniq))
    dnum = rank[inv]  # dummy number per occurrence
    K = len(uniq)
    dummy = n + dnum

    # stops: per edge u, dummies..., v
    stop_count = np.where(alive_e, r + 2, 0)
    st_off = np.concatenate([[0], np.cumsum(stop_count)[:-1]])
    stops = np.empty(int(stop_count.sum()), dtype=np.int64)
    ae = np.flatnonzero(alive_e)
    stops[st_off[ae]] = ends[ae, 0]
    stops[st_off[ae] + r[ae] + 1] = ends[ae, 1]
    stops[st_off[flat_e] + pos + 1] = dummy

    seg_edge = np.repeat(np.arange(m, dtype=np.int64), nseg_e)
    seg_index = np.arange(nseg, dtype=np.int64) - so[seg_edge] if nseg else np.zeros(0, np.int64)
    seg_stop = st_off[seg_edge] + seg_index
    tail = np.empty(2 * nseg, dtype=np.int64)
    tail[0::2] = stops[seg_stop]
    tail[1::2] = stops[seg_stop + 1]
    twin = np.arange(2 * nseg, dtype=np.int64) ^ 1
    dart_edge = np.repeat(seg_edge, 2)
    origin = np.asarray(state.origin, dtype=np.int64)
    nxt = np.arange(2 * nseg, dtype=np.int64)
    prv = nxt.copy()

    # dummy rotations from the stored orientation
    seg_at = so[flat_e] + pos
    tu = 2 * seg_at + 1
    tv = 2 * (seg_at + 1)
    is_lo = flat_e < flat_c
    occ_lo = np.empty(K, dtype=np.int64)
    occ_hi = np.empty(K, dtype=np.int64)
    occ_lo[dnum[is_lo]] = np.flatnonzero(is_lo)
    occ_hi[dnum[~is_lo]] = np.flatnonzero(~is_lo)
    e1 = flat_e[occ_lo]
    e2 = flat_e[occ_hi]
    orient = state.orientation
    sign = np.fromiter((orient.get((a, b), 0) for a, b in zip(e1.tolist(), e2.tolist())), dtype=np.int64, count=K)
    if np.any((sign != 1) & (sign != -1)):
        i = int(np.flatnonzero((sign != 1) & (sign != -1))[0])
        raise EmbeddingError(f"missing orientation for crossing ({int(e1[i])}, {int(e2[i])})")
    plus = sign == 1
    r0 = tu[occ_lo]
    r1 = np.where(plus, tu[occ_hi], tv[occ_hi])
    r2 = tv[occ_lo]
    r3 = np.where(plus, tv[occ_hi], tu[occ_hi])
    ring = np.stack([r0, r1, r2, r3], axis=1)
    nxt[ring] = np.roll(ring, -1, axis=1)
    prv[ring] = np.roll(ring, 1, axis=1)

    first = np.full(n + K, -1, dtype=np.int64)
    first[n:] = r0
    end_u = 2 * so
    end_v = 2 * (so + r) + 1
    for x in range(n):
        darts = [int(end_u[e]) if ends[e, 0] == x else int(end_v[e]) for e in rot[x] if alive_e[e]]
        k = len(darts)
        if k:
            first[x] = darts[0]
            for i, d in enumerate(darts):
                nxt[d] = darts[(i + 1) % k]
                prv[d] = darts[i - 1]

    p.kind = [REAL if x < state.base_vertices else SUB for x in range(n)] + [DUMMY] * K
    p.first = first.tolist()
    p.tail = tail.tolist()
    p.twin = twin.tolist()
    p.nxt = nxt.tolist()
    p.prv = prv.tolist()
    p.dart_edge = dart_edge.tolist()
    p.dart_origin = origin[dart_edge].tolist()
    p.alive = [True] * (2 * nseg)
    p.seg_edge = seg_edge.tolist()
    p.seg_index = seg_index.tolist()
    so_l, cnt_l = so.tolist(), nseg_e.tolist()
    p.edge_segments = [list(range(a, a + c)) for a, c in zip(so_l, cnt_l)]
    dids = (n + np.arange(K)).tolist()
    p.dummy_edges = dict(zip(dids, zip(e1.tolist(), e2.tolist())))
    p.dummy_position = dict(zip(dids, zip(pos[occ_lo].tolist(), pos[occ_hi].tolist())))
    return p


# ---------------------------------------------------------------------------
# Faces and dual
# ---------------------------------------------------------------------------


@dataclass
class FaceSet:
    faces: list[list[int]]
    face_of: list[int]

    @property
    def boundary_size(self) -> list[int]:
        return [len(f) for f in self.faces]

    def __len__(self):
        return len(self.faces)


def trace_faces(p: Planarisation) -> FaceSet:
    """Walk every live dart once; faces are numbered in order of their smallest dart."""
    face_of, order, ptr, bad = _kernels.trace_cycles(
        np.asarray(p.nxt, dtype=np.int64),
        np.asarray(p.twin, dtype=np.int64),
        np.asarray(p.alive, dtype=np.bool_),
    )
    if bad >= 0:
        x = p.tail[bad]
        raise EmbeddingError(f"face traversal from dart {bad} does not close (vertex {x})", x)
    ol = order.tolist()
    pl = ptr.tolist()
    faces = [ol[pl[i]:pl[i + 1]] for i in range(len(pl) - 1)]
    return FaceSet(faces, face_of.tolist())


@dataclass
class DualGraph:
    """Faces as vertices, one dual edge per segment.

    ``label`` maps each face to its current (possibly contracted) dual
    vertex; classes are numbered by their smallest face id.  ``dead`` marks
    contracted dual edges.  ``seg_dart`` is the representative dart of each
    segment; the dual edge of segment ``s`` joins the faces of that dart and
    of its twin.
    """

    faces: FaceSet
    seg_dart: np.ndarray
    seg_faces: np.ndarray
    face_size: np.ndarray
    label: np.ndarray
    num_classes: int
    dead: np.ndarray
    class_size: np.ndarray

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    def edges(self) -> list[tuple[int, int, int]]:
        """Surviving dual edges as ``(class_a, class_b, segment)``, loops dropped."""
        out = []
        for s in np.flatnonzero(~self.dead):
            a, b = self.label[self.seg_faces[s]]
            if a != b:
                out.append((int(a), int(b), int(s)))
        return out

    def simple_edges(self) -> set[tuple[int, int]]:
        return {(min(a, b), max(a, b)) for a, b, _ in self.edges()}


def build_dual(fs: FaceSet, p: Planarisation) -> DualGraph:
    segd = np.asarray(p.segments(), dtype=np.int64)
    face_of = np.asarray(fs.face_of, dtype=np.int64)
    twin = np.asarray(p.twin, dtype=np.int64)
    seg_faces = np.stack([face_of[segd], face_of[twin[segd]]], axis=1) if len(segd) else np.zeros((0, 2), np.int64)
    size = np.asarray(fs.boundary_size, dtype=np.int64)
    nf = len(fs)
    return DualGraph(
        faces=fs,
        seg_dart=segd,
        seg_faces=seg_faces,
        face_size=size,
        label=np.arange(nf, dtype=np.int64),
        num_classes=nf,
        dead=np.zeros(len(segd), dtype=bool),
        class_size=size.copy(),
    )


# ---------------------------------------------------------------------------
# Folding a map back into an embedding state
# ---------------------------------------------------------------------------


@dataclass
class Piece:
    """A working edge read off a map: real vertex to real vertex."""

    origin: int
    start: int
    end: int
    first_dart: int
    last_dart: int  # dart at ``end`` pointing back along the piece
    dummies: list[int]
    back: list[int]  # per dummy, dart pointing toward ``start``
    ahead: list[int]  # per dummy, dart pointing toward ``end``


def walk_origin(p: Planarisation, start_dart: int) -> list[Piece]:
    """Follow an input edge from ``start_dart`` to its far real endpoint.

    The walk goes straight through dummies and is cut into pieces at
    subdivision vertices.
    """
    pieces = []
    d = start_dart
    origin = p.dart_origin[d]
    cur = Piece(origin, p.tail[d], -1, d, -1, [], [], [])
    while True:
        y = p.head(d)
        k = p.kind[y]
        if k == DUMMY:
            cur.dummies.append(y)
            cur.back.append(p.twin[d])
            d = p.straight(d)
            cur.ahead.append(d)
            continue
        cur.end = y
        cur.last_dart = p.twin[d]
        pieces.append(cur)
        if k != SUB:
            return pieces
        d = p.nxt[p.twin[d]]
        cur = Piece(origin, y, -1, d, -1, [], [], [])


def origin_start_darts(p: Planarisation, origin_ends: Sequence[tuple[int, int]]) -> dict[int, int]:
    """Dart leaving the smaller endpoint of each present input edge."""
    want = {}
    for d in range(len(p.tail)):
        if not p.alive[d]:
            continue
        x = p.tail[d]
        if p.kind[x] != REAL:
            continue
        o = p.dart_origin[d]
        if o >= 0 and origin_ends[o][0] == x:
            want[o] = d
    return want


def read_pieces(p: Planarisation, origin_ends: Sequence[tuple[int, int]]) -> dict[int, list[Piece]]:
    starts = origin_start_darts(p, origin_ends)
    return {o: walk_origin(p, starts[o]) for o in sorted(starts)}


def state_from_planarisation(
    p: Planarisation,
    base_vertices: int,
    origin_ends: Sequence[tuple[int, int]],
) -> EmbeddingState:
    """Fold a complete map into an :class:`EmbeddingState`.

    Subdivision vertices are renumbered from ``base_vertices`` in order of
    (input edge, position along it); the first piece of every input edge
    keeps the input edge id and further pieces are numbered after all input
    edges in the same order.
    """
    by_origin = read_pieces(p, origin_ends)
    m0 = len(origin_ends)
    if len(by_origin) != m0:
        missing = sorted(set(range(m0)) - set(by_origin))
        raise EmbeddingError(f"input edges missing from map: {missing[:5]}")

    vid: dict[int, int] = {}
    for x in range(base_vertices):
        vid[x] = x
    next_v = base_vertices
    pieces: list[Piece] = [None] * m0  # type: ignore[list-item]
    extra: list[Piece] = []
    chains: dict[int, list[int]] = {}
    for o, plist in by_origin.items():
        pieces[o] = plist[0]
        if len(plist) > 1:
            chain = [plist[0].start]
            for pc in plist[:-1]:
                vid[pc.end] = next_v
                next_v += 1
                chain.append(vid[pc.end])
            chain.append(plist[-1].end)
            chains[o] = chain
            extra.extend(plist[1:])
    all_pieces = pieces + extra
    n = next_v

    ends = []
    cross: list[list[int]] = []
    towards: list[list[tuple[int, int]]] = []  # per piece per dummy: (dart to lower, dart to higher)
    piece_of_dart: dict[int, int] = {}
    dummy_pieces: dict[int, list[tuple[int, int]]] = {}
    for e, pc in enumerate(all_pieces):
        a, b = vid[pc.start], vid[pc.end]
        if a < b:
            ends.append((a, b))
            dums, tw = pc.dummies, list(zip(pc.back, pc.ahead))
            piece_of_dart[pc.first_dart] = e
            piece_of_dart[pc.last_dart] = e
        else:
            ends.append((b, a))
            dums, tw = pc.dummies[::-1], [(y, x) for x, y in zip(pc.back, pc.ahead)][::-1]
            piece_of_dart[pc.first_dart] = e
            piece_of_dart[pc.last_dart] = e
        for i, x in enumerate(dums):
            dummy_pieces.setdefault(x, []).append((e, i))
        cross.append(dums)
        towards.append(tw)

    orientation: dict[tuple[int, int], int] = {}
    crossing_order: list[list[int]] = [[] for _ in all_pieces]
    for e, dums in enumerate(cross):
        order = []
        for x in dums:
            pair = dummy_pieces[x]
            if len(pair) != 2:
                raise EmbeddingError(f"dummy {x} lies on {len(pair)} pieces")
            (ea, _), (eb, _) = pair
            order.append(eb if ea == e else ea)
        crossing_order[e] = order
    for x, pair in dummy_pieces.items():
        (ea, ia), (eb, ib) = sorted(pair)
        if ea == eb:
            raise EmbeddingError(f"working edge {ea} crosses itself")
        tu1 = towards[ea][ia][0]
        tu2, tv2 = towards[eb][ib]
        nx_ = p.nxt[tu1]
        if nx_ == tu2:
            orientation[(ea, eb)] = 1
        elif nx_ == tv2:
            orientation[(ea, eb)] = -1
        else:
            raise EmbeddingError(f"dummy {x} does not alternate its two edges", x)

    rotation: list[list[int]] = [[] for _ in range(n)]
    for old, new in vid.items():
        darts = p.rotation(old)
        rotation[new] = [piece_of_dart[d] for d in darts]
    origin = [pc.origin for pc in all_pieces]
    return EmbeddingState.from_rotation(
        n, ends, rotation, crossing_order, orientation,
        base_vertices=base_vertices, origin=origin, chains=chains,
    )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def euler_check(p: Planarisation, fs: FaceSet) -> list[Violation]:
    """``V - E + F == 2`` for every connected component of the map."""
    twin = np.asarray(p.twin, dtype=np.int64)
    tail = np.asarray(p.tail, dtype=np.int64)
    darts = np.arange(len(twin), dtype=np.int64)
    segd = darts[np.asarray(p.alive, dtype=bool) & (darts < twin)]
    nv = p.num_vertices
    root = _kernels.component_labels(nv, tail[segd], tail[twin[segd]])
    placed = np.asarray(p.first, dtype=np.int64) >= 0
    cv = np.bincount(root[placed], minlength=nv)
    ce = np.bincount(root[tail[segd]], minlength=nv)
    heads = np.asarray([f[0] for f in fs.faces], dtype=np.int64)
    cf = np.bincount(root[tail[heads]], minlength=nv) if len(heads) else np.zeros(nv, np.int64)
    out = []
    for r in np.flatnonzero(cv):
        chi = int(cv[r] - ce[r] + cf[r])
        if chi != 2:
            out.append(Violation("euler", f"component of vertex {int(r)}: V-E+F = {chi}"))
    return out


def validate(
    es: EmbeddingState,
    expected_total: Optional[int] = None,
    planarised: Optional[tuple[Planarisation, FaceSet]] = None,
) -> list[Violation]:
    """Check rotation closure, crossing symmetry, orientation and Euler.

    ``planarised`` may pass an already computed map and face set of ``es``.
    """
    out: list[Violation] = []
    m = es.num_edges
    for e in range(m):
        for side in (0, 1):
            x = es.ends[e][side]
            c = es.cw[e][side]
            if not (0 <= c < m) or x not in es.ends[c]:
                out.append(Violation("closure", f"vertex {x}: cw pointer of edge {e} leaves the vertex"))
                continue
            if es.ccw[c][es.side(c, x)] != e:
                out.append(Violation("closure", f"vertex {x}: cw/ccw of edge {e} are not inverse"))
    if not out:
        try:
            es.rotation_lists()
        except EmbeddingError as exc:
            out.append(Violation("closure", str(exc)))

    counts: dict[tuple[int, int], int] = {}
    for e, order in enumerate(es.crossing_order):
        for c in order:
            if c == e:
                out.append(Violation("symmetry", f"edge {e} crosses itself"))
                continue
            counts[(e, c)] = counts.get((e, c), 0) + 1
    for (e, c), k in counts.items():
        if counts.get((c, e), 0) != k:
            out.append(Violation("symmetry", f"edge {e} lists {c} {k} time(s), reverse count {counts.get((c, e), 0)}"))
        if k > 1 and e < c:
            out.append(Violation("multicrossing", f"edges {e} and {c} cross {k} times"))
    pairs = {(min(e, c), max(e, c)) for e, c in counts}
    for key in pairs:
        if es.orientation.get(key) not in (1, -1):
            out.append(Violation("orientation", f"crossing {key} has no orientation"))
    for key in es.orientation:
        if key not in pairs:
            out.append(Violation("orientation", f"orientation stored for non-crossing pair {key}"))

    total = sum(len(c) for c in es.crossing_order)
    if total % 2:
        out.append(Violation("count", "odd number of crossing-order entries"))
    if expected_total is not None and total // 2 != expected_total:
        out.append(Violation("count", f"recount {total // 2} != maintained {expected_total}"))

    for s, chain in es.chains.items():
        for x in chain[1:-1]:
            if x < es.base_vertices or len(es.incident(x)) != 2:
                out.append(Violation("subdivision", f"chain of edge {s} has bad vertex {x}"))

    if out:
        return out
    try:
        p, fs = planarised if planarised is not None else (None, None)
        if p is None:
            p = planarise(es)
            fs = trace_faces(p)
    except EmbeddingError as exc:
        return [Violation("planarise", str(exc))]
    k = es.total_crossings()
    segs = len(p.segments())
    if segs != m + 2 * k:
        out.append(Violation("count", f"planarisation has {segs} segments, expected {m + 2 * k}"))
    out.extend(euler_check(p, fs))
    return out


# ---------------------------------------------------------------------------
# Exchange format
# ---------------------------------------------------------------------------


def to_document(es: EmbeddingState, labels: Optional[Sequence[int]] = None) -> dict:
    crossings = []
    for (e1, e2), sign in sorted(es.orientation.items()):
        crossings.append({
            "edges": [e1, e2],
            "position": [es.crossing_order[e1].index(e2), es.crossing_order[e2].index(e1)],
            "orientation": sign,
        })
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "num_vertices": es.num_vertices,
        "base_vertices": es.base_vertices,
        "edges": [
            {"id": e, "u": r.u, "v": r.v, "cw_u": r.cw_u, "ccw_u": r.ccw_u, "cw_v": r.cw_v, "ccw_v": r.ccw_v}
            for e, r in enumerate(es.records())
        ],
        "crossings": crossings,
        "total_crossings": es.total_crossings(),
    }
    if labels is not None:
        doc["labels"] = list(labels)
    if es.chains:
        doc["origin"] = list(es.origin)
        doc["chains"] = {str(k): v for k, v in sorted(es.chains.items())}
    return doc


class DocumentError(ValueError):
    pass


def from_document(doc: dict) -> EmbeddingState:
    """Rebuild an embedding from :func:`to_document` output (no validation)."""
    if doc.get("format") != FORMAT_NAME:
        raise DocumentError(f"not a {FORMAT_NAME} document")
    if doc.get("version") != FORMAT_VERSION:
        raise DocumentError(f"unsupported version {doc.get('version')}")
    try:
        n = int(doc["num_vertices"])
        recs = sorted(doc["edges"], key=lambda r: r["id"])
        if [r["id"] for r in recs] != list(range(len(recs))):
            raise DocumentError("edge ids must be 0..m-1")
        ends = [(int(r["u"]), int(r["v"])) for r in recs]
        cw = [[int(r["cw_u"]), int(r["cw_v"])] for r in recs]
        ccw = [[int(r["ccw_u"]), int(r["ccw_v"])] for r in recs]
        slots: list[dict[int, int]] = [{} for _ in recs]
        orientation = {}
        for c in doc.get("crossings", []):
            e1, e2 = (int(x) for x in c["edges"])
            p1, p2 = (int(x) for x in c["position"])
            if e1 > e2:
                e1, e2, p1, p2 = e2, e1, p2, p1
            slots[e1][p1] = e2
            slots[e2][p2] = e1
            orientation[(e1, e2)] = int(c["orientation"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"malformed document: {exc}") from None
    for u, v in ends:
        if not (0 <= u < v < n):
            raise DocumentError(f"edge ({u}, {v}) must satisfy 0 <= u < v < {n}")
    order = []
    for e, sl in enumerate(slots):
        if sorted(sl) != list(range(len(sl))):
            raise DocumentError(f"crossing positions of edge {e} are not contiguous")
        order.append([sl[i] for i in range(len(sl))])
    kw = {}
    if "chains" in doc:
        kw["origin"] = [int(x) for x in doc["origin"]]
        kw["chains"] = {int(k): [int(x) for x in v] for k, v in doc["chains"].items()}
    return EmbeddingState(n, ends, cw, ccw, order, orientation,
                          base_vertices=int(doc.get("base_vertices", n)), **kw)


def dumps(es: EmbeddingState, labels: Optional[Sequence[int]] = None) -> str:
    return json.dumps(to_document(es, labels), indent=1, sort_keys=True)


def loads(text: str) -> EmbeddingState:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from None
    return from_document(doc)
