"""The improvement loop: delete a vertex, re-insert it optimally, repeat."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx
import numpy as np

from .embedding import (
    EmbeddingError,
    EmbeddingState,
    Violation,
    build_dual,
    planarise,
    state_from_planarisation,
    trace_faces,
    validate,
)
from .graph import Graph
from .insertion import Target, insert_star, merge_chains, subdivide_strands
from .sip import VertexEvaluator, neighbour_faces, sip_fixed

SCHEMES = ("first", "best", "bf")


class ValidationError(ValueError):
    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(str(v) for v in violations[:5]))
        self.violations = violations


class InvariantError(RuntimeError):
    """An internal consistency check failed during the loop."""


@dataclass
class HeuristicConfig:
    scheme: str = "first"
    bf_failure_threshold: int = 10
    seed: int = 0
    max_iterations: Optional[int] = None
    check_invariants: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.bf_failure_threshold < 1:
            raise ValueError("bf_failure_threshold must be >= 1")


@dataclass
class Step:
    vertex: int
    before: int
    after: int
    scheme: str


@dataclass
class LoopResult:
    initial_cr: int
    final_cr: int
    steps: list[Step] = field(default_factory=list)
    loop_time: float = 0.0
    subdivisions_left: int = 0
    hit_cap: bool = False
    violations: list[str] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.steps)


@dataclass
class Proposal:
    vertex: int
    cost: int
    kv: int
    mode: int
    cls: int = -1
    label: Optional[np.ndarray] = None
    evaluator: Optional[VertexEvaluator] = None


# ---------------------------------------------------------------------------
# Per-iteration helpers
# ---------------------------------------------------------------------------


def vertex_crossings(state: EmbeddingState) -> list[int]:
    """k_v for every vertex; a crossing between two edges of v counts once."""
    kv = [0] * state.num_vertices
    for e, order in enumerate(state.crossing_order):
        u, v = state.ends[e]
        for c in order:
            a, b = state.ends[c]
            kv[u] += 1
            kv[v] += 1
            # the partner's endpoints are credited from the partner's own list;
            # only undo the double count where both edges share an endpoint
            if e < c:
                for x in {u, v} & {a, b}:
                    kv[x] -= 1
    return kv


def cut_vertices(state: EmbeddingState) -> set[int]:
    h = nx.Graph()
    h.add_nodes_from(range(state.num_vertices))
    h.add_edges_from(state.ends)
    return set(nx.articulation_points(h))


def _scan_order(n: int, last: int) -> list[int]:
    start = (last + 1) % n if n else 0
    return list(range(start, n)) + list(range(0, start))


def select_vertex(ev: VertexEvaluator, kv: list[int], order: list[int], scheme: str,
                  skip: set[int]) -> Optional[Proposal]:
    """One selection pass; ``None`` means no vertex improves."""
    best: Optional[Proposal] = None
    mode = 1 if scheme == "bf" else 0
    for v in order:
        if kv[v] == 0 or v in skip:
            continue
        cost, cls, label = ev.evaluate(v, mode)
        if cost < 0:
            raise InvariantError(f"dual disconnected when removing vertex {v}")
        if cost < kv[v]:
            prop = Proposal(v, cost, kv[v], mode, cls, label, ev)
            if scheme != "best":
                return prop
            gain = kv[v] - cost
            if best is None or gain > best.kv - best.cost or (gain == best.kv - best.cost and v < best.vertex):
                best = prop
    return best


def reinsert(state: EmbeddingState, prop: Proposal, origin_ends, base: int) -> EmbeddingState:
    """Move ``prop.vertex`` to its new place and fold the map back into a state."""
    v = prop.vertex
    pm = planarise(state, skip=v)
    fs = trace_faces(pm)
    targets = [Target(state.other(e, v), e, state.origin[e]) for e in state.incident(v)]
    if prop.mode == 0:
        ins = insert_star(pm, v, targets, fs=fs, mode=0)
    else:
        dart = prop.evaluator.skip_map_dart(v, prop.label, prop.cls)
        ins = insert_star(pm, v, targets, fs=fs, mode=1, source=fs.face_of[dart])
    if ins.cost != prop.cost:
        raise InvariantError(
            f"vertex {v}: contracted dual predicted {prop.cost} crossings, explicit map gives {ins.cost}"
        )
    subdivide_strands(pm, ins, origin_ends)
    merge_chains(pm, origin_ends)
    return state_from_planarisation(pm, base, origin_ends)


# ---------------------------------------------------------------------------
# Main loop
# ---------------------------------------------------------------------------


def run(g: Graph, initial: EmbeddingState, cfg: Optional[HeuristicConfig] = None):
    """Improve ``initial`` until no single vertex move reduces the crossings.

    Returns the final embedding and a :class:`LoopResult`.
    """
    cfg = cfg or HeuristicConfig()
    bad = validate(initial)
    if bad:
        raise ValidationError(bad)
    t0 = time.perf_counter()
    state = initial.copy()
    state.coords = None
    origin_ends = list(g.edges)
    base = g.num_vertices
    current = state.total_crossings()
    res = LoopResult(current, current)
    blocky = g.num_vertices > 2 and not nx.is_biconnected(g.to_networkx())
    last = -1
    bf_on = cfg.scheme == "bf"
    bf_fail = 0
    p = planarise(state)
    fs = trace_faces(p)
    while current > 0:
        if cfg.max_iterations is not None and res.iterations >= cfg.max_iterations:
            res.hit_cap = True
            break
        ev = VertexEvaluator(state, p, fs)
        kv = vertex_crossings(state)
        skip = cut_vertices(state) if blocky else set()
        order = _scan_order(state.num_vertices, last)
        prop = None
        used = cfg.scheme
        if bf_on:
            prop = select_vertex(ev, kv, order, "bf", skip)
            if prop is None:
                bf_fail += 1
                if bf_fail >= cfg.bf_failure_threshold:
                    bf_on = False
            else:
                bf_fail = 0
        if prop is None:
            used = "best" if cfg.scheme == "best" else "first"
            prop = select_vertex(ev, kv, order, used, skip)
        if prop is None:
            break
        state = reinsert(state, prop, origin_ends, base)
        after = current - prop.kv + prop.cost
        res.steps.append(Step(prop.vertex, current, after, used))
        p = planarise(state)
        fs = trace_faces(p)
        if cfg.check_invariants:
            problems = validate(state, expected_total=after, planarised=(p, fs))
            if problems:
                raise InvariantError(f"after moving vertex {prop.vertex}: " + "; ".join(map(str, problems[:5])))
        elif state.total_crossings() != after:
            raise InvariantError(f"recount {state.total_crossings()} != {after}")
        if after >= current:
            raise InvariantError("accepted move did not reduce the crossing count")
        current = after
        last = prop.vertex
    res.final_cr = current
    res.subdivisions_left = state.num_vertices - base
    if res.iterations > res.initial_cr:
        raise InvariantError("more iterations than initial crossings")
    res.loop_time = time.perf_counter() - t0
    return state, res


# ---------------------------------------------------------------------------
# Independent local optimality check
# ---------------------------------------------------------------------------


def improving_vertices(state: EmbeddingState) -> list[tuple[int, int, int]]:
    """``(v, k_v, best)`` for every vertex whose optimal re-insertion is cheaper.

    Each vertex is removed from a freshly planarised map and solved on that
    map's own dual, without the contraction shortcut used inside the loop.
    """
    kv = vertex_crossings(state)
    out = []
    skip = cut_vertices(state)
    for v in range(state.num_vertices):
        if kv[v] == 0 or v in skip:
            continue
        pm = planarise(state, skip=v)
        fs = trace_faces(pm)
        dual = build_dual(fs, pm)
        r = sip_fixed(dual, pm, v, fs)
        if r.new_cr < kv[v]:
            out.append((v, kv[v], r.new_cr))
    return out
