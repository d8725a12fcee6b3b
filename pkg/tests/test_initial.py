from __future__ import annotations

import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starcross.embedding import dumps, to_document, validate
from starcross.geometry import circle_coords
from starcross.graph import Graph, complete, complete_bipartite, cycle, path, petersen
from starcross.heuristic import run
from starcross.initial import (
    InputError,
    circle_init,
    circle_orientation,
    initial_embedding,
    interleaving_pairs,
    planar_init,
    spring_init,
    user_init,
)


def _proper_crossings(coords, ends) -> int:
    """Brute-force count of properly crossing segment pairs."""

    def orient(a, b, c):
        return np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))

    total = 0
    for (a, b), (c, d) in itertools.combinations(ends, 2):
        if len({a, b, c, d}) < 4:
            continue
        p, q, r, s = (coords[x] for x in (a, b, c, d))
        if orient(p, q, r) * orient(p, q, s) < 0 and orient(r, s, p) * orient(r, s, q) < 0:
            total += 1
    return total


# ---------------------------------------------------------------------------
# Circle
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [3, 5, 8])
def test_circle_cycle_is_planar(n):
    assert circle_init(cycle(n)).total_crossings() == 0


@pytest.mark.parametrize("n", range(4, 10))
def test_circle_complete_counts(n):
    es = circle_init(complete(n))
    assert es.total_crossings() == math.comb(n, 4)
    assert validate(es) == []


@st.composite
def small_graphs(draw):
    n = draw(st.integers(4, 9))
    pairs = list(itertools.combinations(range(n), 2))
    return Graph(n, tuple(sorted(draw(st.lists(st.sampled_from(pairs), unique=True, max_size=18)))))


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_circle_matches_geometry(g):
    ends = list(g.edges)
    I, J = interleaving_pairs(g.num_vertices, ends)
    # chords of a convex polygon are in general position apart from shared ends
    assert len(I) == _proper_crossings(circle_coords(g.num_vertices), ends)
    es = circle_init(g)
    assert es.total_crossings() == len(I)
    assert validate(es) == []


def test_circle_orientation_rule():
    # chord 0-2 and chord 1-3 of a square: walking 0 -> 2, vertex 1 is on the right
    c = circle_coords(4)
    p, q, r = c[0], c[2], c[1]
    cross = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    assert cross < 0
    assert circle_orientation((0, 2), (1, 3)) == -1
    assert circle_orientation((1, 3), (0, 2)) == 1


# ---------------------------------------------------------------------------
# Planar
# ---------------------------------------------------------------------------


def test_planar_tree_has_no_crossings():
    es = planar_init(path(6))
    assert es.total_crossings() == 0 and validate(es) == []


@pytest.mark.parametrize("g", [complete(4), cycle(7), petersen(6, 1)])
def test_planar_init_on_planar_graphs(g):
    es = planar_init(g)
    assert es.total_crossings() == 0 and validate(es) == []


def test_planar_k6_close_to_optimum():
    es = planar_init(complete(6))
    assert 3 <= es.total_crossings() <= 5
    assert validate(es) == []


@pytest.mark.parametrize("n", range(5, 13))
def test_planar_never_worse_than_circle(n):
    g = complete(n)
    assert planar_init(g).total_crossings() <= circle_init(g).total_crossings()


def test_planar_bipartite_valid():
    es = planar_init(complete_bipartite(3, 4))
    assert validate(es) == [] and es.total_crossings() >= 2


# ---------------------------------------------------------------------------
# Spring
# ---------------------------------------------------------------------------


def test_spring_c4_and_p4_planar():
    assert spring_init(cycle(4)).total_crossings() == 0
    assert initial_embedding(path(4), "spring").total_crossings() == 0


def test_spring_k5_then_heuristic():
    g = complete(5)
    es = spring_init(g, seed=3)
    assert 1 <= es.total_crossings() <= 5
    final, res = run(g, es)
    assert res.final_cr == 1 and validate(final) == []


def test_spring_deterministic():
    g = petersen(5, 2)
    assert dumps(spring_init(g, seed=4)) == dumps(spring_init(g, seed=4))
    assert dumps(planar_init(g)) == dumps(planar_init(g))


def test_unknown_scheme():
    with pytest.raises(ValueError):
        initial_embedding(cycle(3), "hexagonal")


# ---------------------------------------------------------------------------
# User input
# ---------------------------------------------------------------------------


def test_user_coordinates_convex_pentagon():
    g = cycle(5)
    text = "\n".join(f"{i} {math.cos(2 * math.pi * i / 5):.6f} {math.sin(2 * math.pi * i / 5):.6f}"
                     for i in range(5))
    assert user_init(g, "# pentagon\n" + text).total_crossings() == 0


def test_user_coordinates_k4_crossed():
    g = complete(4)
    es = user_init(g, "0 0 0\n1 1 1\n2 1 0\n3 0 1\n")
    assert es.total_crossings() == 1


def test_user_rotation_round_trip():
    g = complete(6)
    es = circle_init(g)
    back = user_init(g, dumps(es))
    assert dumps(back) == dumps(es)


def test_user_rotation_inconsistent_rejected():
    g = complete(5)
    doc = to_document(circle_init(g))
    # flipping one crossing's sign breaks the face structure around it
    for c in doc["crossings"]:
        c["orientation"] = -c["orientation"]
        break
    with pytest.raises(InputError) as info:
        user_init(g, json.dumps(doc))
    assert info.value.violations


def test_user_rotation_wrong_graph():
    with pytest.raises(InputError):
        user_init(complete(4), dumps(circle_init(cycle(4))))


@pytest.mark.parametrize("text", [
    "0 0 0\n1 1 0\n",                    # missing vertex
    "0 0 0\n1 1 0\n2 x 1\n",             # bad number
    "0 0 0\n1 1 0\n2 0 1\n9 5 5\n",      # unknown label
    "0 0 0\n1 1 0\n2 0\n",               # short line
    "0 0 0\n1 0 0\n2 1 1\n",             # coincident vertices
    "0 0 0\n1 1 0\n2 nan 1\n",           # not finite
])
def test_user_coordinates_rejected(text):
    with pytest.raises(InputError):
        user_init(cycle(3), text)
