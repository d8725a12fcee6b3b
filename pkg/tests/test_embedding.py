from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starcross.embedding import (
    DUMMY,
    DocumentError,
    EmbeddingError,
    EmbeddingState,
    GeometryError,
    build_dual,
    dumps,
    from_document,
    loads,
    planarise,
    to_document,
    trace_faces,
    validate,
)
from starcross.geometry import from_straight_line_drawing, segment_crossings
from starcross.graph import complete, cycle
from starcross.initial import circle_init, planar_init
from starcross._kernels import contract_labels


def _k4_planar() -> EmbeddingState:
    coords = [(0, 0), (4, 0), (2, 3), (2, 1)]
    return from_straight_line_drawing(4, list(complete(4).edges), coords)


def _k5_one_crossing() -> EmbeddingState:
    # triangle with two interior points: the rectilinear optimum
    coords = [(0, 0), (10, 0), (5, 10), (4, 3), (6, 3)]
    es = from_straight_line_drawing(5, list(complete(5).edges), coords)
    assert es.total_crossings() == 1
    return es


def _placed_counts(es):
    p = planarise(es)
    nv = sum(1 for f in p.first if f >= 0)
    return p, nv, len(p.segments())


# ---------------------------------------------------------------------------
# Planarisation
# ---------------------------------------------------------------------------


def test_triangle_planarisation_is_identity():
    es = EmbeddingState.from_rotation(3, [(0, 1), (1, 2), (0, 2)], [[0, 2], [0, 1], [1, 2]])
    p, nv, m2 = _placed_counts(es)
    assert (nv, m2) == (3, 3)


def test_single_crossing_planarisation():
    es = from_straight_line_drawing(4, [(0, 1), (2, 3)], [(0, 0), (2, 2), (0, 2), (2, 0)])
    p, nv, m2 = _placed_counts(es)
    assert (nv, m2) == (5, 4)  # one dummy, each edge cut in two
    dummies = [x for x in range(p.num_vertices) if p.kind[x] == DUMMY]
    assert len(dummies) == 1 and len(p.rotation(dummies[0])) == 4


def test_k5_one_crossing_counts():
    p, nv, m2 = _placed_counts(_k5_one_crossing())
    assert (nv, m2) == (6, 12)


def test_dummy_rotation_alternates():
    es = circle_init(complete(6))
    p = planarise(es)
    for x in range(p.num_vertices):
        if p.kind[x] == DUMMY:
            edges = [p.dart_edge[d] for d in p.rotation(x)]
            assert edges[0] == edges[2] and edges[1] == edges[3] and edges[0] != edges[1]


def test_asymmetric_lists_rejected():
    es = _k5_one_crossing()
    e = next(i for i, c in enumerate(es.crossing_order) if c)
    es.crossing_order[e] = []
    with pytest.raises(EmbeddingError):
        planarise(es)


# ---------------------------------------------------------------------------
# Faces and dual
# ---------------------------------------------------------------------------


def test_triangle_faces():
    es = EmbeddingState.from_rotation(3, [(0, 1), (1, 2), (0, 2)], [[0, 2], [0, 1], [1, 2]])
    fs = trace_faces(planarise(es))
    assert sorted(fs.boundary_size) == [3, 3]


def test_planar_k4_faces():
    fs = trace_faces(planarise(_k4_planar()))
    assert fs.boundary_size == [3, 3, 3, 3]


def test_k5_planarised_faces():
    fs = trace_faces(planarise(_k5_one_crossing()))
    assert len(fs) == 8  # 6 - 12 + f = 2


def test_bad_rotation_names_vertex():
    es = _k4_planar()
    # make vertex 3's cw pointer skip an edge
    e = es.incident(3)[0]
    side = es.side(e, 3)
    es.cw[e][side] = e
    with pytest.raises(EmbeddingError) as info:
        es.rotation_lists()
    assert info.value.vertex == 3


def test_triangle_dual_parallel_edges():
    es = EmbeddingState.from_rotation(3, [(0, 1), (1, 2), (0, 2)], [[0, 2], [0, 1], [1, 2]])
    p = planarise(es)
    dual = build_dual(trace_faces(p), p)
    assert dual.num_faces == 2
    assert len(dual.edges()) == 3 and dual.simple_edges() == {(0, 1)}


def test_k4_dual_is_k4():
    p = planarise(_k4_planar())
    dual = build_dual(trace_faces(p), p)
    assert dual.simple_edges() == {(a, b) for a in range(4) for b in range(a + 1, 4)}


def test_single_edge_dual_loop():
    es = EmbeddingState.from_rotation(2, [(0, 1)], [[0], [0]])
    p = planarise(es)
    dual = build_dual(trace_faces(p), p)
    assert dual.num_faces == 1
    assert dual.seg_faces.tolist() == [[0, 0]]
    assert dual.edges() == []


def test_dual_edge_count_and_spanning_contraction():
    es = circle_init(complete(7))
    p = planarise(es)
    fs = trace_faces(p)
    dual = build_dual(fs, p)
    assert len(dual.seg_dart) == es.num_edges + 2 * es.total_crossings()
    # contract a spanning tree of the dual: one class remains
    parent = list(range(dual.num_faces))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    tree = []
    for s, (a, b) in enumerate(dual.seg_faces.tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            tree.append(s)
    assert len(tree) == dual.num_faces - 1
    _, ncls = contract_labels(dual.num_faces, dual.seg_faces, np.asarray(tree, dtype=np.int64))
    assert ncls == 1


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def test_circle_k5_valid():
    assert validate(circle_init(complete(5))) == []


def test_deleted_crossing_entry_reported():
    es = circle_init(complete(5))
    e = next(i for i, c in enumerate(es.crossing_order) if c)
    es.crossing_order[e].pop()
    kinds = {v.kind for v in validate(es)}
    assert "symmetry" in kinds


def test_swapped_cw_pointers_reported():
    es = circle_init(complete(5))
    a, b = es.incident(0)[:2]
    sa, sb = es.side(a, 0), es.side(b, 0)
    es.cw[a][sa], es.cw[b][sb] = es.cw[b][sb], es.cw[a][sa]
    bad = validate(es)
    assert any(v.kind == "closure" and "vertex 0" in v.detail for v in bad)


def test_flipped_orientation_breaks_euler():
    es = _k5_one_crossing()
    key = next(iter(es.orientation))
    es.orientation[key] = -es.orientation[key]
    assert any(v.kind == "euler" for v in validate(es))


def test_expected_total_mismatch():
    es = circle_init(complete(5))
    assert any(v.kind == "count" for v in validate(es, expected_total=4))


# ---------------------------------------------------------------------------
# Straight-line drawings
# ---------------------------------------------------------------------------


def test_convex_square_no_crossings():
    es = from_straight_line_drawing(4, list(cycle(4).edges), [(0, 0), (1, 0), (1, 1), (0, 1)])
    assert es.total_crossings() == 0 and validate(es) == []


def test_symmetric_x_parameters():
    coords = np.array([(0.0, 0.0), (2.0, 2.0), (0.0, 2.0), (2.0, 0.0)])
    I, J, TI, TJ = segment_crossings(coords, [(0, 1), (2, 3)])
    assert I.tolist() == [0] and J.tolist() == [1]
    assert TI[0] == pytest.approx(0.5) and TJ[0] == pytest.approx(0.5)


def test_k5_circle_drawing():
    n = 5
    coords = [(math.cos(2 * math.pi * i / n), math.sin(2 * math.pi * i / n)) for i in range(n)]
    es = from_straight_line_drawing(n, list(complete(n).edges), coords)
    assert es.total_crossings() == 5


def test_coincident_vertices_rejected():
    with pytest.raises(GeometryError):
        from_straight_line_drawing(3, [(0, 1), (1, 2)], [(0, 0), (1, 1), (0, 0)])


def test_vertex_on_edge_is_jittered():
    # vertex 2 sits on edge (0, 1); the jitter moves it off
    es = from_straight_line_drawing(4, [(0, 1), (2, 3)], [(0, 0), (2, 0), (1, 0), (1, 1)])
    assert validate(es) == []
    assert es.total_crossings() in (0, 1)


def _cw_order_sign(coords, e1, e2):
    """Independent orientation oracle from the actual angles at the crossing."""
    I, J, TI, _ = segment_crossings(coords, [e1, e2])
    p = coords[e1[0]] + TI[0] * (coords[e1[1]] - coords[e1[0]])
    ang = {}
    for name, x in (("u1", e1[0]), ("v1", e1[1]), ("u2", e2[0]), ("v2", e2[1])):
        d = coords[x] - p
        ang[name] = math.atan2(d[1], d[0])
    cw = sorted(ang, key=lambda k: -ang[k])
    i = cw.index("u1")
    cw = cw[i:] + cw[:i]
    assert cw in (["u1", "u2", "v1", "v2"], ["u1", "v2", "v1", "u2"])
    return 1 if cw[1] == "u2" else -1


@settings(max_examples=200)
@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=4, max_size=4))
def test_orientation_matches_angles(pts):
    coords = np.asarray(pts, dtype=float)
    if len({(round(x, 6), round(y, 6)) for x, y in pts}) < 4:
        return
    try:
        I, _, TI, TJ = segment_crossings(coords, [(0, 1), (2, 3)])
    except Exception:
        return
    if len(I) != 1 or min(TI[0], TJ[0], 1 - TI[0], 1 - TJ[0]) < 1e-6:
        return
    es = from_straight_line_drawing(4, [(0, 1), (2, 3)], coords)
    assert es.orientation[(0, 1)] == _cw_order_sign(coords, (0, 1), (2, 3))


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 9), st.integers(0, 10_000))
def test_random_drawings_are_valid(n, seed):
    rng = np.random.default_rng(seed)
    coords = rng.uniform(-1, 1, size=(n, 2))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = [pairs[i] for i in sorted(rng.choice(len(pairs), size=min(len(pairs), 2 * n), replace=False))]
    es = from_straight_line_drawing(n, keep, coords, seed=seed)
    assert validate(es) == []
    p = planarise(es)
    fs = trace_faces(p)
    assert sorted(d for f in fs.faces for d in f) == [d for d in range(len(p.tail)) if p.alive[d]]


def test_planar_drawing_has_no_crossings():
    # triangulated grid drawn straight: planar
    coords = [(x, y) for y in range(3) for x in range(3)]
    edges = []
    for y in range(3):
        for x in range(3):
            v = 3 * y + x
            if x < 2:
                edges.append((v, v + 1))
            if y < 2:
                edges.append((v, v + 3))
            if x < 2 and y < 2:
                edges.append((v, v + 4))
    es = from_straight_line_drawing(9, edges, coords)
    assert es.total_crossings() == 0 and validate(es) == []


# ---------------------------------------------------------------------------
# Exchange format
# ---------------------------------------------------------------------------


def test_document_round_trip():
    es = circle_init(complete(6))
    back = loads(dumps(es))
    assert back.ends == es.ends
    assert back.crossing_order == es.crossing_order
    assert back.orientation == es.orientation
    assert back.rotation_lists() == es.rotation_lists()


def test_document_fields():
    doc = to_document(_k5_one_crossing())
    assert doc["format"] == "starcross-rotation" and doc["version"] == 1
    assert set(doc["edges"][0]) >= {"id", "u", "v", "cw_u", "ccw_u", "cw_v", "ccw_v"}
    (c,) = doc["crossings"]
    assert set(c) == {"edges", "position", "orientation"}


def test_document_rejects_foreign():
    with pytest.raises(DocumentError):
        from_document({"format": "other"})
    with pytest.raises(DocumentError):
        loads("{not json")


def test_planar_init_round_trip_json():
    es = planar_init(complete(7))
    text = dumps(es)
    assert json.loads(text)["format"] == "starcross-rotation"
    assert loads(text).total_crossings() == es.total_crossings()


def test_reversed_endpoint_pairs_are_normalised():
    # the same drawing given with edges listed as (larger, smaller)
    coords = [(0, 0), (10, 0), (5, 10), (4, 3), (6, 3)]
    edges = [(v, u) for u, v in complete(5).edges]
    es = from_straight_line_drawing(5, edges, coords)
    assert validate(es) == [] and es.total_crossings() == 1
    assert dumps(es) == dumps(_k5_one_crossing())
