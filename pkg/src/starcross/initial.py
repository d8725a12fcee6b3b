"""Initial embeddings: circle, planar (incremental insertion), spring, user input."""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from .embedding import (
    DocumentError,
    EmbeddingState,
    GeometryError,
    Planarisation,
    REAL,
    from_document,
    state_from_planarisation,
    trace_faces,
    validate,
)
from .geometry import (
    circle_coords,
    from_straight_line_drawing,
    state_from_crossings,
    stress_layout,
    with_jitter,
)
from .graph import Graph, find_chordless_cycle
from .insertion import Target, insert_star, merge_chains, subdivide_strands

INIT_SCHEMES = ("circle", "planar", "spring")

# angular perturbation (fraction of the vertex spacing) that breaks the
# concurrency of long diagonals without changing the cyclic order
CIRCLE_JITTER = 1e-6


class InputError(ValueError):
    """User-supplied initial embedding is malformed or inconsistent."""

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = violations or []


def interleaving_pairs(n: int, ends) -> tuple[np.ndarray, np.ndarray]:
    """Edge pairs whose endpoints alternate around the circle."""
    e = np.asarray(ends, dtype=np.int64).reshape(-1, 2)
    m = len(e)
    if m < 2:
        z = np.zeros(0, dtype=np.int64)
        return z, z
    I, J = np.triu_indices(m, 1)
    a, c = e[I, 0], e[I, 1]
    b, d = e[J, 0], e[J, 1]
    hit = ((a < b) & (b < c) & (c < d)) | ((b < a) & (a < d) & (d < c))
    return I[hit], J[hit]


def circle_orientation(e1: tuple[int, int], e2: tuple[int, int]) -> int:
    """Sign of a crossing between two chords of the circle layout.

    Vertices strictly between ``u1`` and ``v1`` lie to the right of the
    chord ``u1 -> v1``, so ``u2`` there means anticlockwise order.
    """
    u1, v1 = e1
    return -1 if u1 < e2[0] < v1 else 1


def circle_init(g: Graph, seed: int = 0) -> EmbeddingState:
    """Vertices on the unit circle in label order; crossings by interleaving."""
    n, ends = g.num_vertices, list(g.edges)
    I, J = interleaving_pairs(n, ends)

    def build(c):
        TI, TJ = _chord_parameters(c, ends, I, J)
        es = state_from_crossings(n, ends, c, I, J, TI, TJ)
        for i, j in zip(I.tolist(), J.tolist()):
            if es.orientation[(i, j)] != circle_orientation(ends[i], ends[j]):
                raise GeometryError("circle orientation disagrees with geometry")
        return es

    return with_jitter(build, circle_coords(n, CIRCLE_JITTER, seed), seed)


def _chord_parameters(coords, ends, I, J):
    e = np.asarray(ends, dtype=np.int64).reshape(-1, 2)
    p = coords[e[I, 0]]
    r = coords[e[I, 1]] - p
    q = coords[e[J, 0]]
    s = coords[e[J, 1]] - q
    qp = q - p
    den = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    t = (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / den
    u = (qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]) / den
    return t, u


def spring_init(g: Graph, seed: int = 0) -> EmbeddingState:
    coords = stress_layout(g.num_vertices, list(g.edges), seed=seed)
    return from_straight_line_drawing(g.num_vertices, list(g.edges), coords, seed=seed)


def planar_init(g: Graph) -> EmbeddingState:
    """Grow an embedding from a chordless cycle by optimal star insertions.

    The next vertex is always the lowest label with an edge into the
    partial embedding; edges between placed vertices are added when their
    later endpoint is inserted.
    """
    n = g.num_vertices
    cyc = find_chordless_cycle(g)
    if cyc is None:
        return _tree_embedding(g)
    p = Planarisation()
    p.n_real = n
    for _ in range(n):
        p.add_vertex(REAL)
    edge_id = {pair: e for e, pair in enumerate(g.edges)}
    k = len(cyc)
    out_darts: list[list[int]] = [[] for _ in range(k)]
    for i in range(k):
        a, b = cyc[i], cyc[(i + 1) % k]
        e = edge_id[(min(a, b), max(a, b))]
        d, t = p.add_pair(a, b, e, e)
        out_darts[i].append(d)
        out_darts[(i + 1) % k].append(t)
    for i, x in enumerate(cyc):
        p.set_rotation(x, out_darts[i])
    placed = set(cyc)
    origin_ends = list(g.edges)
    while len(placed) < n:
        v = min(x for x in range(n) if x not in placed and any(w in placed for w in g.neighbours(x)))
        targets = [Target(w, e, e) for w, e in sorted(g.adjacency[v]) if w in placed]
        fs = trace_faces(p)
        ins = insert_star(p, v, targets, fs=fs, mode=0)
        subdivide_strands(p, ins, origin_ends)
        merge_chains(p, origin_ends)
        placed.add(v)
    return state_from_planarisation(p, n, origin_ends)


def _tree_embedding(g: Graph) -> EmbeddingState:
    rot = [sorted(g.incident_edges(v)) for v in range(g.num_vertices)]
    return EmbeddingState.from_rotation(g.num_vertices, list(g.edges), rot)


def initial_embedding(g: Graph, scheme: str, seed: int = 0) -> EmbeddingState:
    if scheme == "circle":
        return circle_init(g, seed)
    if scheme == "planar":
        return planar_init(g)
    if scheme == "spring":
        if find_chordless_cycle(g) is None:
            return _tree_embedding(g)
        return spring_init(g, seed)
    raise ValueError(f"unknown initial scheme {scheme!r}")


# ---------------------------------------------------------------------------
# User input
# ---------------------------------------------------------------------------


def parse_coordinates(text: str, g: Graph) -> np.ndarray:
    """Lines ``label x y`` for every vertex of ``g``."""
    labels = g.labels or tuple(range(g.num_vertices))
    index = {lab: i for i, lab in enumerate(labels)}
    coords = np.full((g.num_vertices, 2), np.nan)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise InputError(f"line {lineno}: expected 'label x y'")
        try:
            lab, x, y = int(parts[0]), float(parts[1]), float(parts[2])
        except ValueError:
            raise InputError(f"line {lineno}: cannot parse {line!r}") from None
        if lab not in index:
            raise InputError(f"line {lineno}: unknown vertex label {lab}")
        coords[index[lab]] = (x, y)
    missing = [labels[i] for i in range(g.num_vertices) if np.isnan(coords[i, 0])]
    if missing:
        raise InputError(f"no coordinates for vertices {missing[:5]}")
    return coords


def user_init(g: Graph, text: str, seed: int = 0) -> EmbeddingState:
    """Embedding from a rotation document (JSON) or a coordinate listing."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            es = from_document(json.loads(text))
        except (DocumentError, json.JSONDecodeError) as exc:
            raise InputError(str(exc)) from None
        if es.num_vertices != g.num_vertices or [tuple(e) for e in es.ends] != list(g.edges):
            raise InputError("rotation document does not describe this graph")
        bad = validate(es)
        if bad:
            raise InputError("rotation document is inconsistent", bad)
        return es
    coords = parse_coordinates(text, g)
    try:
        return from_straight_line_drawing(g.num_vertices, list(g.edges), coords, seed=seed)
    except GeometryError as exc:
        raise InputError(str(exc)) from None
