"""Permutation sweeps, conjectured reference values and block recombination."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .embedding import EmbeddingState
from .graph import Graph, apply_permutation, biconnected_components, invert_permutation, isolated_vertices
from .heuristic import HeuristicConfig, improving_vertices, run
from .initial import INIT_SCHEMES, initial_embedding

SCHEMA_VERSION = 1


def conjecture_H(n: int) -> int:
    """Conjectured crossing number of the complete graph on ``n`` vertices."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (n // 2) * ((n - 1) // 2) * ((n - 2) // 2) * ((n - 3) // 2) // 4


def conjecture_Z(n1: int, n2: int) -> int:
    """Conjectured crossing number of the complete bipartite graph."""
    if n1 < 1 or n2 < 1:
        raise ValueError("n1 and n2 must be >= 1")
    return (n1 // 2) * ((n1 - 1) // 2) * (n2 // 2) * ((n2 - 1) // 2)


def reference_for(kind: str, params: Sequence[int]) -> Optional[tuple[str, int]]:
    if kind == "complete":
        return "H", conjecture_H(params[0])
    if kind == "complete_bipartite":
        return "Z", conjecture_Z(params[0], params[1])
    return None


def derive_seed(seed: int, *keys: int) -> int:
    """Stable 63-bit seed from a base seed and integer keys."""
    ss = np.random.SeedSequence([abs(int(seed))] + [int(k) for k in keys])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def permutation_for(n: int, seed: int, index: int) -> list[int]:
    return np.random.default_rng(np.random.SeedSequence([abs(int(seed)), int(index)])).permutation(n).tolist()


def percent_deviation(found: int, reference: int) -> Optional[float]:
    if reference <= 0:
        return None
    return 100.0 * (found - reference) / reference


# ---------------------------------------------------------------------------
# Relabelling embeddings
# ---------------------------------------------------------------------------


def _relabel_parts(es: EmbeddingState, mapping: Sequence[int], emap: Sequence[int]):
    flip = []
    ends = {}
    for e, (u, v) in enumerate(es.ends):
        a, b = mapping[u], mapping[v]
        flip.append(a > b)
        ends[emap[e]] = (min(a, b), max(a, b))
    rotation = {mapping[x]: [emap[e] for e in lst] for x, lst in enumerate(es.rotation_lists())}
    order = {}
    for e, lst in enumerate(es.crossing_order):
        mapped = [emap[c] for c in lst]
        order[emap[e]] = mapped[::-1] if flip[e] else mapped
    orientation = {}
    for (e1, e2), s in es.orientation.items():
        s = -s if flip[e1] != flip[e2] else s
        a, b = emap[e1], emap[e2]
        orientation[(min(a, b), max(a, b))] = s
    return ends, rotation, order, orientation


def relabel_state(es: EmbeddingState, mapping: Sequence[int]) -> EmbeddingState:
    """Rename the vertices of a subdivision-free embedding.

    Edges whose endpoints swap order get their crossing list reversed and
    every crossing sign involving exactly one of them negated.
    """
    n, m = es.num_vertices, es.num_edges
    ends, rotation, order, orientation = _relabel_parts(es, mapping, range(m))
    return EmbeddingState.from_rotation(
        n, [ends[e] for e in range(m)], [rotation[x] for x in range(n)],
        [order[e] for e in range(m)], orientation,
    )


def combine_blocks(g: Graph, parts: Sequence[tuple[EmbeddingState, list[int], list[int]]]) -> EmbeddingState:
    """Glue block embeddings (with vertex and edge maps into ``g``) at cut vertices.

    Each block's rotation at a shared vertex is appended as one contiguous
    run, which places later blocks inside a corner of earlier ones.
    """
    rotation: list[list[int]] = [[] for _ in range(g.num_vertices)]
    order: list[list[int]] = [[] for _ in range(g.m)]
    orientation: dict[tuple[int, int], int] = {}
    for es, vmap, emap in parts:
        _, rot, ords, ori = _relabel_parts(es, vmap, emap)
        for x, lst in rot.items():
            rotation[x].extend(lst)
        for e, lst in ords.items():
            order[e] = lst
        orientation.update(ori)
    return EmbeddingState.from_rotation(g.num_vertices, list(g.edges), rotation, order, orientation)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class RunReport:
    perm: int
    initial_cr: int
    final_cr: int
    iterations: int
    init_time: float
    loop_time: float
    init_scheme: str
    min_scheme: str
    seed: int
    subdivisions_left: int = 0
    hit_cap: bool = False
    improving: Optional[int] = None


@dataclass
class ComponentResult:
    seed: int
    runs: list[RunReport]
    best_perm: int
    best_cr: int
    best_state: Optional[EmbeddingState] = None
    best_coords: Optional[np.ndarray] = None


@dataclass
class SweepReport:
    graph: str
    n: int
    m: int
    init_scheme: str
    min_scheme: str
    perms: int
    seed: int
    runs: list[RunReport]
    best_cr: int
    best_perm: int
    blocks: int
    isolated: list[int] = field(default_factory=list)
    reference: Optional[int] = None
    reference_kind: Optional[str] = None
    embedding: Optional[EmbeddingState] = None
    coords: Optional[np.ndarray] = None

    @property
    def deviation_percent(self) -> Optional[float]:
        if self.reference is None:
            return None
        return percent_deviation(self.best_cr, self.reference)

    @property
    def deviation_label(self) -> Optional[str]:
        if self.reference is None:
            return None
        if self.reference == 0:
            return "exact" if self.best_cr == 0 else "n/a"
        return f"{self.deviation_percent:.4f}"

    def to_dict(self, timings: bool = True) -> dict:
        runs = []
        for r in self.runs:
            d = asdict(r)
            if not timings:
                d.pop("init_time")
                d.pop("loop_time")
            runs.append(d)
        out = {
            "schema": "starcross-sweep",
            "version": SCHEMA_VERSION,
            "graph": self.graph,
            "n": self.n,
            "m": self.m,
            "init_scheme": self.init_scheme,
            "min_scheme": self.min_scheme,
            "perms": self.perms,
            "seed": self.seed,
            "blocks": self.blocks,
            "isolated": list(self.isolated),
            "best_cr": self.best_cr,
            "best_perm": self.best_perm,
            "reference": self.reference,
            "reference_kind": self.reference_kind,
            "deviation_percent": self.deviation_percent,
            "deviation": self.deviation_label,
            "runs": runs,
        }
        if timings:
            out["init_time_total"] = sum(r.init_time for r in self.runs)
            out["loop_time_total"] = sum(r.loop_time for r in self.runs)
        return out


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass
class _Task:
    graph: Graph
    init: str
    scheme: str
    seed: int
    index: int
    bf_threshold: int
    check: bool
    verify: bool
    max_iterations: Optional[int]


def _run_one(task: _Task):
    g = task.graph
    perm = permutation_for(g.num_vertices, task.seed, task.index)
    gp = apply_permutation(g, perm)
    rs = derive_seed(task.seed, task.index)
    t0 = time.perf_counter()
    es = initial_embedding(gp, task.init, seed=rs)
    t_init = time.perf_counter() - t0
    coords = es.coords
    cfg = HeuristicConfig(task.scheme, task.bf_threshold, rs, task.max_iterations, task.check)
    final, res = run(gp, es, cfg)
    improving = len(improving_vertices(final)) if task.verify else None
    rep = RunReport(
        task.index, res.initial_cr, res.final_cr, res.iterations, t_init, res.loop_time,
        task.init, task.scheme, task.seed, res.subdivisions_left, res.hit_cap, improving,
    )
    # back to the block's own labels
    inv = invert_permutation(perm)
    if res.subdivisions_left == 0:
        final = relabel_state(final, inv)
    if coords is not None:
        coords = coords[perm]
    return rep, final, coords


def sweep_component(
    g: Graph,
    init: str = "planar",
    scheme: str = "first",
    perms: int = 100,
    seed: int = 0,
    bf_threshold: int = 10,
    workers: int = 1,
    check: bool = True,
    verify: bool = False,
    max_iterations: Optional[int] = None,
) -> ComponentResult:
    """All permutation runs for one connected block."""
    if perms < 1:
        raise ValueError("perms must be >= 1")
    if init not in INIT_SCHEMES:
        raise ValueError(f"unknown initial scheme {init!r}")
    tasks = [_Task(g, init, scheme, seed, i, bf_threshold, check, verify, max_iterations) for i in range(perms)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, tasks))
    else:
        results = [_run_one(t) for t in tasks]
    best = min(range(perms), key=lambda i: (results[i][0].final_cr, i))
    rep, state, coords = results[best]
    return ComponentResult(seed, [r[0] for r in results], best, rep.final_cr, state, coords)


def sweep(
    g: Graph,
    init: str = "planar",
    scheme: str = "first",
    perms: int = 100,
    seed: int = 0,
    bf_threshold: int = 10,
    workers: int = 1,
    reference: Optional[tuple[str, int]] = None,
    name: str = "graph",
    check: bool = True,
    verify: bool = False,
    max_iterations: Optional[int] = None,
) -> SweepReport:
    """Best crossing count over ``perms`` random relabellings.

    The graph is split into blocks; block ``j`` is swept with the seed
    ``derive_seed(seed, j)`` (or ``seed`` itself for a single block) and
    the block minima are summed.  Per
    permutation reports add up the blocks' runs with the same index.
    """
    blocks = [(b, vmap) for b, vmap in biconnected_components(g)]
    comps: list[ComponentResult] = []
    parts = []
    edge_index = {e: i for i, e in enumerate(g.edges)}
    for j, (b, vmap) in enumerate(blocks):
        bseed = seed if len(blocks) == 1 else derive_seed(seed, j)
        cr = sweep_component(b, init, scheme, perms, bseed, bf_threshold,
                             workers, check, verify, max_iterations)
        comps.append(cr)
        emap = [edge_index[(vmap[u], vmap[v])] for u, v in b.edges]
        parts.append((cr.best_state, vmap, emap))

    runs = []
    for i in range(perms):
        members = [c.runs[i] for c in comps]
        runs.append(RunReport(
            i,
            sum(r.initial_cr for r in members),
            sum(r.final_cr for r in members),
            sum(r.iterations for r in members),
            sum(r.init_time for r in members),
            sum(r.loop_time for r in members),
            init, scheme, seed,
            sum(r.subdivisions_left for r in members),
            any(r.hit_cap for r in members),
            None if not verify else sum(r.improving or 0 for r in members),
        ))
    best_cr = sum(c.best_cr for c in comps)
    best_perm = comps[0].best_perm if len(comps) == 1 else min(range(perms), key=lambda i: (runs[i].final_cr, i))
    embedding = None
    if all(c.best_state is not None and c.best_state.num_vertices == b.num_vertices
           for c, (b, _) in zip(comps, blocks)):
        embedding = combine_blocks(g, parts)
    coords = comps[0].best_coords if len(comps) == 1 and comps[0].best_coords is not None else None
    if coords is not None:
        full = np.zeros((g.num_vertices, 2))
        full[blocks[0][1]] = coords
        coords = full
    return SweepReport(
        name, g.num_vertices, g.m, init, scheme, perms, seed, runs, best_cr, best_perm,
        len(blocks), isolated_vertices(g),
        reference[1] if reference else None, reference[0] if reference else None,
        embedding, coords,
    )
