from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starcross.embedding import build_dual, planarise, trace_faces
from starcross.geometry import from_straight_line_drawing
from starcross.graph import Graph, complete, cycle, path, wheel
from starcross.heuristic import cut_vertices
from starcross.initial import initial_embedding
from starcross.sip import (
    VertexEvaluator,
    neighbour_faces,
    remove_vertex_dual,
    sip_biggest_face,
    sip_fixed,
    sip_reference_oracle,
)


def _drawing(n, edges, coords):
    return from_straight_line_drawing(n, list(edges), coords)


def _removed(es, v):
    p = planarise(es)
    fs = trace_faces(p)
    dual = build_dual(fs, p)
    return remove_vertex_dual(dual, v, p), p, fs


def _apex(base_coords, base_edges, targets, where=(50.0, 40.0)):
    """Base drawing plus an extra vertex joined to ``targets``, placed far outside."""
    n = len(base_coords)
    edges = list(base_edges) + [(t, n) for t in targets]
    return _drawing(n + 1, edges, list(base_coords) + [where]), n


K4_COORDS = [(0, 0), (4, 0), (2, 3), (2, 1)]
C4_COORDS = [(0, 0), (1, 0), (1, 1), (0, 1)]


# ---------------------------------------------------------------------------
# Vertex removal
# ---------------------------------------------------------------------------


def test_remove_degree3_from_k4():
    es = _drawing(4, complete(4).edges, K4_COORDS)
    dual, _, _ = _removed(es, 3)
    assert dual.num_classes == 2
    assert dual.simple_edges() == {(0, 1)}


def test_remove_wheel_hub():
    coords = [(np.cos(a), np.sin(a)) for a in np.linspace(0, 2 * np.pi, 5, endpoint=False)] + [(0, 0)]
    es = _drawing(6, wheel(5).edges, coords)
    dual, _, _ = _removed(es, 5)
    assert dual.num_classes == 2


def test_remove_pendant_vertex():
    es = _drawing(4, path(4).edges, [(0, 0), (1, 0), (2, 0.5), (3, 0)])
    dual, _, _ = _removed(es, 3)
    assert dual.num_classes == 1 and dual.dead.sum() == 1


def test_remove_out_of_range():
    es = _drawing(3, cycle(3).edges, [(0, 0), (1, 0), (0, 1)])
    p = planarise(es)
    with pytest.raises(ValueError):
        remove_vertex_dual(build_dual(trace_faces(p), p), 7, p)


# ---------------------------------------------------------------------------
# Star insertion
# ---------------------------------------------------------------------------


def test_c4_plus_apex_is_free():
    es, v = _apex(C4_COORDS, cycle(4).edges, range(4))
    dual, p, fs = _removed(es, v)
    assert sip_fixed(dual, p, v, fs).new_cr == 0
    assert sip_reference_oracle(es, v) == 0


def test_k4_plus_apex_costs_one():
    es, v = _apex(K4_COORDS, complete(4).edges, range(4))
    dual, p, fs = _removed(es, v)
    res = sip_fixed(dual, p, v, fs)
    assert res.new_cr == 1
    assert sum(len(x) for x in res.paths) == 1
    assert sip_reference_oracle(es, v) == 1


def test_k4_plus_two_on_a_face():
    es, v = _apex(K4_COORDS, complete(4).edges, [0, 1])
    dual, p, fs = _removed(es, v)
    assert sip_fixed(dual, p, v, fs).new_cr == 0


def test_biggest_face_k4():
    es, v = _apex(K4_COORDS, complete(4).edges, range(4))
    dual, p, _ = _removed(es, v)
    assert sip_biggest_face(dual, p, v).new_cr == 1


def test_biggest_face_c6():
    coords = [(np.cos(a), np.sin(a)) for a in np.linspace(0, 2 * np.pi, 6, endpoint=False)]
    es, v = _apex(coords, cycle(6).edges, [0, 3], where=(5.0, 0.3))
    dual, p, _ = _removed(es, v)
    assert sip_biggest_face(dual, p, v).new_cr == 0


# ---------------------------------------------------------------------------
# Properties
# ---------------------------------------------------------------------------


@st.composite
def embedded_graphs(draw):
    n = draw(st.integers(3, 8))
    order = draw(st.permutations(range(n)))
    edges = {tuple(sorted((order[i], order[draw(st.integers(0, i - 1))]))) for i in range(1, n)}
    pairs = [e for e in itertools.combinations(range(n), 2) if e not in edges]
    extra = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 14 - len(edges))))
    g = Graph(n, tuple(sorted(edges | set(extra))))
    scheme = draw(st.sampled_from(["circle", "spring", "planar"]))
    return initial_embedding(g, scheme, seed=draw(st.integers(0, 1000)))


def _check_paths(dual, p, fs, v, res):
    for w, pth in zip(res.neighbours, res.paths):
        targets = {int(dual.label[f]) for f in neighbour_faces(p, fs, w)}
        cur = res.newface
        if cur in targets:
            assert pth == []
        for s in pth:
            a, b = (int(dual.label[f]) for f in dual.seg_faces[s])
            assert not dual.dead[s] and cur in (a, b) and a != b
            cur = b if cur == a else a
        assert cur in targets


@settings(max_examples=150, deadline=None)
@given(embedded_graphs())
def test_solver_matches_oracle(es):
    p = planarise(es)
    fs = trace_faces(p)
    base = build_dual(fs, p)
    ev = VertexEvaluator(es, p, fs)
    for v in range(es.num_vertices):
        if not es.incident(v):
            continue
        dual = remove_vertex_dual(base, v, p)
        res = sip_fixed(dual, p, v, fs)
        assert res.new_cr == sip_reference_oracle(es, v)
        assert res.new_cr == sum(len(x) for x in res.paths)
        assert ev.evaluate(v, 0)[0] == res.new_cr
        _check_paths(dual, p, fs, v, res)
        bf = sip_biggest_face(dual, p, v)
        assert bf.new_cr >= res.new_cr
        _check_paths(dual, p, fs, v, bf)
        assert ev.evaluate(v, 1)[0] == bf.new_cr


@settings(max_examples=80, deadline=None)
@given(embedded_graphs())
def test_contracted_dual_matches_rebuilt_map(es):
    """Away from cut vertices, contraction equals rebuilding the map without v."""
    p = planarise(es)
    fs = trace_faces(p)
    base = build_dual(fs, p)
    cuts = cut_vertices(es)
    for v in range(es.num_vertices):
        if not es.incident(v) or v in cuts:
            continue
        dual = remove_vertex_dual(base, v, p)
        pm = planarise(es, skip=v)
        fm = trace_faces(pm)
        assert dual.num_classes == len(fm)
        assert sip_fixed(dual, p, v, fs).new_cr == sip_fixed(build_dual(fm, pm), pm, v, fm).new_cr


def test_neighbour_faces_are_at_distance_zero():
    es = initial_embedding(complete(6), "circle")
    p = planarise(es)
    fs = trace_faces(p)
    for v in range(6):
        dual = remove_vertex_dual(build_dual(fs, p), v, p)
        res = sip_fixed(dual, p, v, fs)
        for w, t in zip(res.neighbours, res.targets):
            assert t in {int(dual.label[f]) for f in neighbour_faces(p, fs, w)}
