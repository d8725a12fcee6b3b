"""Simple undirected graphs: ingestion, generators and preprocessing."""

from __future__ import annotations

import io
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import networkx as nx


class GraphError(ValueError):
    """Raised for invalid generator parameters or permutation sizes."""


class ParseError(ValueError):
    """Malformed edge-list input; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..num_vertices-1``.

    Edges are stored as ``(u, v)`` with ``u < v``; the edge id is the index
    into :attr:`edges`.  ``labels`` optionally maps internal ids back to the
    labels used in the source file.
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    labels: Optional[tuple[int, ...]] = None
    adjacency: tuple[tuple[tuple[int, int], ...], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        n = self.num_vertices
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        seen = set()
        norm = []
        for e, (u, v) in enumerate(self.edges):
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            a, b = (u, v) if u < v else (v, u)
            if (a, b) in seen:
                raise GraphError(f"duplicate edge ({a}, {b})")
            seen.add((a, b))
            norm.append((a, b))
            adj[a].append((b, e))
            adj[b].append((a, e))
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "adjacency", tuple(tuple(x) for x in adj))

    @property
    def n(self) -> int:
        return self.num_vertices

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def neighbours(self, v: int) -> list[int]:
        return [w for w, _ in self.adjacency[v]]

    def incident_edges(self, v: int) -> list[int]:
        return [e for _, e in self.adjacency[v]]

    def degree_sequence(self) -> list[int]:
        return sorted(len(a) for a in self.adjacency)

    def to_networkx(self) -> nx.Graph:
        h = nx.Graph()
        h.add_nodes_from(range(self.num_vertices))
        h.add_edges_from(self.edges)
        return h

    def is_connected(self) -> bool:
        if self.num_vertices == 0:
            return True
        return nx.is_connected(self.to_networkx())


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------


@dataclass
class LoadStats:
    duplicates: int = 0
    self_loops: int = 0


def load_edge_list(text) -> tuple[Graph, LoadStats]:
    """Parse ``u v`` lines into a :class:`Graph`.

    ``text`` may be a string or a text stream.  Labels are compacted to
    ``0..n-1`` in first-seen order and kept in ``Graph.labels``.
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    ids: dict[int, int] = {}
    stats = LoadStats()
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(lineno, f"expected two labels, got {len(parts)} fields")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(lineno, f"non-integer label in {line!r}") from None
        if a < 0 or b < 0:
            raise ParseError(lineno, "labels must be non-negative")
        u = ids.setdefault(a, len(ids))
        v = ids.setdefault(b, len(ids))
        if u == v:
            stats.self_loops += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            stats.duplicates += 1
            continue
        seen.add(key)
        edges.append(key)
    labels = tuple(sorted(ids, key=ids.__getitem__))
    return Graph(len(ids), tuple(edges), labels=labels), stats


def write_edge_list(g: Graph) -> str:
    lab = g.labels or tuple(range(g.num_vertices))
    return "".join(f"{lab[u]} {lab[v]}\n" for u, v in g.edges)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------
# Canonical numberings:
#   complete n              vertices 0..n-1, edges (i, j) i<j lexicographic
#   complete_bipartite a b  parts 0..a-1 and a..a+b-1, edges (i, a+j) lexicographic
#   cycle_product i j       vertex (r, c) -> r*j + c; per vertex the row edge
#                           (r, c)-(r, c+1) then the column edge (r, c)-(r+1, c)
#   petersen j k            outer a -> a, inner a -> j+a; outer cycle,
#                           then spokes, then inner edges a -> a+k (mod j)


def complete(n: int) -> Graph:
    if n < 1:
        raise GraphError("complete graph needs n >= 1")
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def complete_bipartite(n1: int, n2: int) -> Graph:
    if n1 < 1 or n2 < 1:
        raise GraphError("complete bipartite graph needs n1, n2 >= 1")
    return Graph(n1 + n2, tuple((i, n1 + j) for i in range(n1) for j in range(n2)))


def cycle_product(i: int, j: int) -> Graph:
    if i < 3 or j < 3:
        raise GraphError("cycle product needs both cycles of length >= 3")
    edges = []
    for r in range(i):
        for c in range(j):
            x = r * j + c
            edges.append((x, r * j + (c + 1) % j))
            edges.append((x, ((r + 1) % i) * j + c))
    return Graph(i * j, tuple((min(a, b), max(a, b)) for a, b in edges))


def petersen(j: int, k: int) -> Graph:
    if k < 1 or j < 2 * k + 1:
        raise GraphError("generalised Petersen graph P(j, k) needs k >= 1 and j >= 2k+1")
    edges = [(a, (a + 1) % j) for a in range(j)]
    edges += [(a, j + a) for a in range(j)]
    edges += [(j + a, j + (a + k) % j) for a in range(j)]
    return Graph(2 * j, tuple((min(a, b), max(a, b)) for a, b in edges))


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return Graph(n, tuple((min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n)))


def path(n: int) -> Graph:
    if n < 1:
        raise GraphError("path needs n >= 1")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def wheel(k: int) -> Graph:
    """Rim ``0..k-1`` plus hub ``k``."""
    rim = cycle(k)
    return Graph(k + 1, rim.edges + tuple((i, k) for i in range(k)))


GENERATORS = {
    "complete": (complete, 1),
    "complete_bipartite": (complete_bipartite, 2),
    "cycle_product": (cycle_product, 2),
    "petersen": (petersen, 2),
    "cycle": (cycle, 1),
    "path": (path, 1),
    "wheel": (wheel, 1),
}


def generate(kind: str, *params: int) -> Graph:
    try:
        fn, arity = GENERATORS[kind]
    except KeyError:
        raise GraphError(f"unknown family {kind!r}") from None
    if len(params) != arity:
        raise GraphError(f"{kind} takes {arity} parameter(s), got {len(params)}")
    return fn(*params)


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    off = 0
    for g in graphs:
        edges.extend((u + off, v + off) for u, v in g.edges)
        off += g.num_vertices
    return Graph(off, tuple(edges))


# ---------------------------------------------------------------------------
# Preprocessing
# ---------------------------------------------------------------------------


def induced_on_edges(g: Graph, edge_ids: Iterable[int]) -> tuple[Graph, list[int]]:
    """Subgraph on the given edges; local ids follow ascending global ids.

    Returns the subgraph and the local-to-global vertex map.
    """
    eids = sorted(edge_ids)
    verts = sorted({x for e in eids for x in g.edges[e]})
    local = {v: i for i, v in enumerate(verts)}
    sub = Graph(len(verts), tuple((local[g.edges[e][0]], local[g.edges[e][1]]) for e in eids))
    return sub, verts


def biconnected_components(g: Graph) -> list[tuple[Graph, list[int]]]:
    """Split ``g`` into blocks, ordered by their smallest edge id.

    Every edge lands in exactly one block; cut vertices appear in several.
    Isolated vertices belong to no block.
    """
    index = {e: i for i, e in enumerate(g.edges)}
    blocks = []
    for comp in nx.biconnected_component_edges(g.to_networkx()):
        ids = sorted(index[(min(u, v), max(u, v))] for u, v in comp)
        blocks.append(ids)
    blocks.sort(key=lambda ids: ids[0])
    return [induced_on_edges(g, ids) for ids in blocks]


def isolated_vertices(g: Graph) -> list[int]:
    return [v for v in range(g.num_vertices) if not g.adjacency[v]]


def apply_permutation(g: Graph, p: Sequence[int]) -> Graph:
    """Relabel vertex ``v`` as ``p[v]``; edge order is kept."""
    n = g.num_vertices
    if len(p) != n or sorted(p) != list(range(n)):
        raise GraphError(f"permutation must be a bijection on 0..{n - 1}")
    labels = None
    if g.labels is not None:
        inv = [0] * n
        for v, pv in enumerate(p):
            inv[pv] = v
        labels = tuple(g.labels[inv[i]] for i in range(n))
    return Graph(n, tuple((p[u], p[v]) for u, v in g.edges), labels=labels)


def invert_permutation(p: Sequence[int]) -> list[int]:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return inv


def find_chordless_cycle(g: Graph) -> Optional[list[int]]:
    """Return a chordless cycle as a vertex list, or ``None`` if acyclic.

    Edges are scanned in id order and the first edge lying on a cycle yields
    the shortest cycle through it, which cannot have a chord.
    """
    for eid, (u, v) in enumerate(g.edges):
        parent = {u: -1}
        queue = deque([u])
        while queue and v not in parent:
            x = queue.popleft()
            for y, e in g.adjacency[x]:
                if e == eid or y in parent:
                    continue
                parent[y] = x
                queue.append(y)
        if v in parent:
            cyc = [v]
            while cyc[-1] != u:
                cyc.append(parent[cyc[-1]])
            return cyc
    return None
