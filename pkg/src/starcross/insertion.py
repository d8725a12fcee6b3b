"""Realising a star insertion on a planar map.

The star is routed along the breadth-first tree of the dual rooted at the
chosen face.  Each tree face hands its child faces the ordered list of
strands that must leave through the shared segment; listing a face's exits in
boundary order and nesting the children's lists gives a non-crossing routing.
Faces lie to the left of their darts, so the new vertex takes the reverse of
the root face's exit list as its clockwise rotation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .embedding import (
    DUMMY,
    SUB,
    EmbeddingError,
    FaceSet,
    Planarisation,
    read_pieces,
    trace_faces,
)
from .sip import SipError, _flatten


@dataclass
class Target:
    w: int
    edge: int
    origin: int


@dataclass
class Insertion:
    """Result of :func:`insert_star`.

    ``strand_dummies[w]`` lists the new crossings on the edge to ``w`` from
    the new vertex outward and ``strand_darts[w]`` the darts of its segments
    in the same direction.
    """

    cost: int
    face: int
    strand_dummies: dict[int, list[int]] = field(default_factory=dict)
    strand_darts: dict[int, list[int]] = field(default_factory=dict)


def face_dual(p: Planarisation, fs: FaceSet):
    """Dual of the map as a CSR sorted by (neighbour, segment), plus segment faces.

    Each CSR entry also carries the dart of the segment lying in the row's face.
    """
    twin = np.asarray(p.twin, dtype=np.int64)
    alive = np.asarray(p.alive, dtype=bool)
    darts = np.arange(len(twin), dtype=np.int64)
    segd = darts[alive & (darts < twin)]
    face_of = np.asarray(fs.face_of, dtype=np.int64)
    fa = face_of[segd]
    fb = face_of[twin[segd]]
    seg_faces = np.stack([fa, fb], axis=1)
    sid = np.arange(len(segd), dtype=np.int64)
    ok = fa != fb
    row = np.concatenate([fa[ok], fb[ok]])
    col = np.concatenate([fb[ok], fa[ok]])
    seg = np.concatenate([sid[ok], sid[ok]])
    dart = np.concatenate([segd[ok], twin[segd[ok]]])
    idx = np.lexsort((seg, col, row))
    nf = len(fs.faces)
    indptr = np.zeros(nf + 1, dtype=np.int64)
    np.add.at(indptr, row + 1, 1)
    indptr = np.cumsum(indptr)
    return (indptr, col[idx], seg[idx], dart[idx]), seg_faces


def insert_star(
    p: Planarisation,
    z: int,
    targets: Sequence[Target],
    fs: Optional[FaceSet] = None,
    mode: int = 0,
    source: Optional[int] = None,
) -> Insertion:
    """Insert vertex ``z`` (no darts yet) with edges to ``targets``.

    ``mode`` 0 picks the optimal face; ``mode`` 1 routes from ``source``
    (or the largest face).  The map is modified in place.
    """
    if p.first[z] >= 0:
        raise EmbeddingError(f"vertex {z} is already placed", z)
    fs = fs or trace_faces(p)
    nf = len(fs.faces)
    csr, seg_faces = face_dual(p, fs)
    wf = []
    for t in targets:
        fl = sorted({fs.face_of[d] for d in p.rotation(t.w)})
        if not fl:
            raise SipError(f"target {t.w} is not placed")
        wf.append(fl)
    ptr, flat = _flatten(wf)
    face_size = np.asarray(fs.boundary_size, dtype=np.int64)
    cost, root, _, _ = _kernels.evaluate(
        nf, seg_faces, np.zeros(len(seg_faces), np.uint8), np.zeros(0, np.int64),
        face_size, np.zeros(0, np.int64), ptr, flat, mode, -1 if source is None else int(source),
    )
    if cost < 0:
        raise SipError("some target is unreachable in the dual")
    root = int(root)

    dist, parent, _, pdart = (a.tolist() for a in _kernels.bfs_parents(*csr, nf, root))

    # terminal corner per target: first dart of w (in rotation order) in the chosen face
    term: dict[int, int] = {}
    chain: dict[int, list[int]] = {}
    total = 0
    for t, fl in zip(targets, wf):
        tf = min(fl, key=lambda f: (dist[f], f))
        corner = next(d for d in p.rotation(t.w) if fs.face_of[d] == tf)
        term[corner] = t.w
        path = []
        x = tf
        while x != root:
            path.append(x)
            x = parent[x]
        path.reverse()
        chain[t.w] = path
        total += len(path)
    if total != cost:
        raise EmbeddingError(f"routing length {total} != optimum {cost}")

    needed: set[int] = {root}
    for path in chain.values():
        needed.update(path)
    exits: dict[int, int] = {}
    for h in needed:
        if h != root:
            exits[pdart[h]] = h

    exit_list: dict[int, list[int]] = {}
    for h in sorted(needed, key=lambda f: -dist[f]):
        cyc = fs.faces[h]
        if h == root:
            order = cyc
            entry = -1
        else:
            entry = p.twin[pdart[h]]
            i = cyc.index(entry)
            order = cyc[i + 1:] + cyc[: i + 1]
        lst: list[int] = []
        for d in order:
            w = term.get(d)
            if w is not None:
                lst.append(w)
            if d != entry:
                c = exits.get(d)
                if c is not None:
                    lst.extend(exit_list[c])
        exit_list[h] = lst

    # split every tree segment once per strand crossing it, tail to head
    crossing: dict[tuple[int, int], tuple[int, int, int]] = {}
    for h in needed:
        if h == root:
            continue
        cur = pdart[h]
        for w in exit_list[h]:
            x, a, b = p.split(cur, DUMMY)
            crossing[(h, w)] = (x, a, b)
            cur = b

    ins = Insertion(int(cost), root)
    first_dart: dict[int, int] = {}
    for t in targets:
        stops = [crossing[(h, t.w)] for h in chain[t.w]]
        prev = z
        prev_back = -1
        darts = []
        dummies = []
        for x, a, b in stops:
            fwd, back = p.add_pair(prev, x, t.edge, t.origin)
            if prev == z:
                first_dart[t.w] = fwd
            else:
                p.set_rotation(prev, prev_rot + [fwd])
            darts.append(fwd)
            dummies.append(x)
            prev_rot = [a, back, b]
            prev = x
        fwd, back = p.add_pair(prev, t.w, t.edge, t.origin)
        if prev == z:
            first_dart[t.w] = fwd
        else:
            p.set_rotation(prev, prev_rot + [fwd])
        darts.append(fwd)
        corner = next(d for d, w in term.items() if w == t.w)
        p.insert_before(corner, back)
        ins.strand_dummies[t.w] = dummies
        ins.strand_darts[t.w] = darts
    p.set_rotation(z, [first_dart[w] for w in reversed(exit_list[root])])
    return ins


# ---------------------------------------------------------------------------
# Subdivision management
# ---------------------------------------------------------------------------


def _piece_index(p: Planarisation, origin_ends):
    pieces = [pc for plist in read_pieces(p, origin_ends).values() for pc in plist]
    dart_piece: dict[int, int] = {}
    for i, pc in enumerate(pieces):
        d = pc.first_dart
        while True:
            dart_piece[d] = i
            dart_piece[p.twin[d]] = i
            y = p.head(d)
            if p.kind[y] != DUMMY:
                break
            d = p.straight(d)
    return pieces, dart_piece


def _partner(p: Planarisation, x: int, own: int, dart_piece: dict[int, int]) -> int:
    for d in p.rotation(x):
        pid = dart_piece[d]
        if pid != own:
            return pid
    raise EmbeddingError(f"dummy {x} carries a single piece", x)


def has_subdivisions(p: Planarisation) -> bool:
    return any(k == SUB and f >= 0 for k, f in zip(p.kind, p.first))


class _OriginPieces(dict):
    """Piece lookup when no edge is subdivided: every input edge is one piece."""

    def __init__(self, p: Planarisation):
        super().__init__()
        self.p = p

    def __missing__(self, d):
        return self.p.dart_origin[d]


def subdivide_strands(p: Planarisation, ins: Insertion, origin_ends) -> int:
    """Cut new strands so that no piece crosses another piece twice.

    Greedy from the new vertex outward, which yields the fewest pieces.
    Returns the number of subdivision vertices created.
    """
    if has_subdivisions(p):
        _, dart_piece = _piece_index(p, origin_ends)
    else:
        dart_piece = _OriginPieces(p)
    made = 0
    for w, dummies in ins.strand_dummies.items():
        if len(dummies) < 2:
            continue
        darts = ins.strand_darts[w]
        own = dart_piece[darts[0]]
        seen: set[int] = set()
        for i, x in enumerate(dummies):
            q = _partner(p, x, own, dart_piece)
            if q in seen:
                p.subdivide(darts[i])
                made += 1
                seen = {q}
            else:
                seen.add(q)
    return made


def merge_chains(p: Planarisation, origin_ends) -> int:
    """Smooth every chain whose merged edge would cross each edge at most once."""
    merged = 0
    while has_subdivisions(p):
        pieces, dart_piece = _piece_index(p, origin_ends)
        by_origin: dict[int, list[int]] = {}
        for i, pc in enumerate(pieces):
            by_origin.setdefault(pc.origin, []).append(i)
        done = True
        for o in sorted(by_origin):
            ids = by_origin[o]
            if len(ids) < 2:
                continue
            own = set(ids)
            partners = []
            for i in ids:
                for x in pieces[i].dummies:
                    partners.extend(dart_piece[d] for d in p.rotation(x) if dart_piece[d] != i)
            if any(q in own for q in partners):
                continue
            # at each dummy the partner's two darts were both listed
            partners = partners[::2]
            if len(set(partners)) != len(partners):
                continue
            for i in ids[:-1]:
                p.smooth(pieces[i].end)
                merged += 1
            done = False
            break
        if done:
            break
    return merged
