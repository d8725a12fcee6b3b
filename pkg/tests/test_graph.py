from __future__ import annotations

import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starcross.graph import (
    Graph,
    GraphError,
    ParseError,
    apply_permutation,
    biconnected_components,
    complete,
    complete_bipartite,
    cycle,
    cycle_product,
    disjoint_union,
    find_chordless_cycle,
    generate,
    invert_permutation,
    isolated_vertices,
    load_edge_list,
    path,
    petersen,
    wheel,
    write_edge_list,
)


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    return Graph(n, tuple(chosen))


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------


def test_load_triangle():
    g, stats = load_edge_list("0 1\n1 2\n2 0")
    assert (g.n, g.m) == (3, 3)
    assert stats.duplicates == 0 and stats.self_loops == 0


def test_load_dedup_and_self_loop():
    g, stats = load_edge_list("5 9\n9 5\n5 5")
    assert g.m == 1 and g.n == 2
    assert g.labels == (5, 9)
    assert (stats.duplicates, stats.self_loops) == (1, 1)


def test_load_k5_degrees():
    text = "".join(f"{i} {j}\n" for i, j in itertools.combinations(range(5), 2))
    g, _ = load_edge_list(text)
    assert (g.n, g.m) == (5, 10)
    assert all(g.degree(v) == 4 for v in range(5))


def test_load_comments_blank_and_first_seen_order():
    g, _ = load_edge_list("# header\n\n40 7\n7 3\n")
    assert g.labels == (40, 7, 3)
    assert g.edges == ((0, 1), (1, 2))


@pytest.mark.parametrize("text,line", [("0 1\n1\n", 2), ("0 x\n", 1), ("0 1 2\n", 1), ("-1 2\n", 1)])
def test_load_malformed(text, line):
    with pytest.raises(ParseError) as info:
        load_edge_list(text)
    assert info.value.lineno == line


def test_write_round_trip():
    g, _ = load_edge_list("10 20\n20 30\n30 10\n")
    h, _ = load_edge_list(write_edge_list(g))
    assert h.edges == g.edges and h.labels == g.labels


def test_graph_rejects_loops_and_duplicates():
    with pytest.raises(GraphError):
        Graph(2, ((0, 0),))
    with pytest.raises(GraphError):
        Graph(2, ((0, 1), (1, 0)))
    with pytest.raises(GraphError):
        Graph(2, ((0, 2),))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def test_complete_5():
    g = generate("complete", 5)
    assert (g.n, g.m) == (5, 10)


def test_complete_bipartite_3_3():
    g = generate("complete_bipartite", 3, 3)
    assert (g.n, g.m) == (6, 9)
    assert nx.is_bipartite(g.to_networkx())
    assert all((u < 3) != (v < 3) for u, v in g.edges)


def test_cycle_product_3_3():
    g = cycle_product(3, 3)
    assert (g.n, g.m) == (9, 18)
    assert all(g.degree(v) == 4 for v in range(9))
    # independent oracle: networkx's Cartesian product
    ref = nx.cartesian_product(nx.cycle_graph(3), nx.cycle_graph(3))
    assert nx.is_isomorphic(ref, g.to_networkx())


def test_petersen_5_2():
    g = petersen(5, 2)
    assert (g.n, g.m) == (10, 15)
    assert all(g.degree(v) == 3 for v in range(10))
    assert nx.is_isomorphic(g.to_networkx(), nx.petersen_graph())


@pytest.mark.parametrize("kind,params", [
    ("complete", (0,)), ("complete_bipartite", (0, 3)), ("cycle_product", (2, 3)),
    ("petersen", (4, 2)), ("petersen", (5,)), ("nonsense", (1,)),
])
def test_generator_domain_errors(kind, params):
    with pytest.raises(GraphError):
        generate(kind, *params)


@pytest.mark.parametrize("g", [complete(7), complete_bipartite(3, 5), cycle_product(3, 4), petersen(7, 3),
                               cycle(6), path(4), wheel(5)])
def test_degree_sum(g):
    assert sum(g.degree(v) for v in range(g.n)) == 2 * g.m


# ---------------------------------------------------------------------------
# Blocks
# ---------------------------------------------------------------------------


def test_bowtie_has_two_triangles():
    g = Graph(5, ((0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)))
    blocks = biconnected_components(g)
    assert len(blocks) == 2
    for b, vmap in blocks:
        assert (b.n, b.m) == (3, 3)
        assert 2 in vmap


def test_k5_is_one_block():
    (b, vmap), = biconnected_components(complete(5))
    assert b.edges == complete(5).edges and vmap == list(range(5))


def test_path_blocks_are_edges():
    blocks = biconnected_components(path(4))
    assert len(blocks) == 3
    assert all(b.m == 1 and b.n == 2 for b, _ in blocks)


def test_isolated_vertices():
    assert isolated_vertices(Graph(4, ((0, 1),))) == [2, 3]


@given(graphs())
def test_blocks_partition_edges(g):
    got = []
    for b, vmap in biconnected_components(g):
        got.extend((vmap[u], vmap[v]) for u, v in b.edges)
    assert sorted(got) == sorted(g.edges)


def test_disjoint_union_offsets():
    u = disjoint_union(complete(3), path(2))
    assert u.n == 5 and u.edges == ((0, 1), (0, 2), (1, 2), (3, 4))


# ---------------------------------------------------------------------------
# Permutations
# ---------------------------------------------------------------------------


def test_identity_permutation():
    g = complete_bipartite(2, 3)
    assert apply_permutation(g, range(5)).edges == g.edges


def test_triangle_stays_triangle():
    g = cycle(3)
    assert sorted(apply_permutation(g, [2, 0, 1]).edges) == sorted(g.edges)


def test_k23_degrees():
    g = complete_bipartite(2, 3)
    assert apply_permutation(g, [4, 2, 0, 3, 1]).degree_sequence() == [2, 2, 2, 3, 3]


def test_permutation_size_mismatch():
    with pytest.raises(GraphError):
        apply_permutation(cycle(3), [0, 1])
    with pytest.raises(GraphError):
        apply_permutation(cycle(3), [0, 0, 1])


@given(graphs(), st.randoms(use_true_random=False))
def test_permutation_inverse_restores(g, rnd):
    p = list(range(g.n))
    rnd.shuffle(p)
    h = apply_permutation(g, p)
    assert h.degree_sequence() == g.degree_sequence()
    back = apply_permutation(h, invert_permutation(p))
    assert sorted(back.edges) == sorted(g.edges)


# ---------------------------------------------------------------------------
# Chordless cycles
# ---------------------------------------------------------------------------


def test_tree_has_no_cycle():
    tree = Graph(5, ((0, 1), (0, 2), (2, 3), (2, 4)))
    assert find_chordless_cycle(tree) is None


def test_k4_gives_triangle():
    assert len(find_chordless_cycle(complete(4))) == 3


def test_c6_with_chord_gives_square():
    g = Graph(6, tuple(cycle(6).edges) + ((0, 3),))
    cyc = find_chordless_cycle(g)
    assert len(cyc) == 4 and {0, 3} <= set(cyc)


def _induced_edge_count(g: Graph, vs) -> int:
    s = set(vs)
    return sum(1 for u, v in g.edges if u in s and v in s)


@settings(max_examples=200)
@given(graphs())
def test_chordless_cycle_property(g):
    cyc = find_chordless_cycle(g)
    has_cycle = g.m > 0 and not nx.is_forest(g.to_networkx())
    assert (cyc is not None) == has_cycle
    if cyc is not None:
        assert len(cyc) >= 3 and len(set(cyc)) == len(cyc)
        es = set(g.edges)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            assert (min(a, b), max(a, b)) in es
        assert _induced_edge_count(g, cyc) == len(cyc)
