"""Straight-line drawings: segment intersections, circle and stress layouts."""

from __future__ import annotations

import math
from typing import Optional, Sequence

import networkx as nx
import numpy as np

from .embedding import EmbeddingState, GeometryError

ENDPOINT_EPS = 1e-12
JITTER_SCALE = 1e-9
MAX_RETRIES = 8


class Degenerate(Exception):
    """Internal signal: the drawing is not in general position."""


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def segment_crossings(coords: np.ndarray, ends: Sequence[tuple[int, int]]):
    """All proper crossings between non-adjacent segments.

    Returns arrays ``(i, j, t_i, t_j)`` with ``i < j`` and the crossing
    parameters along each segment from its first endpoint.  Raises
    :class:`Degenerate` on endpoint contact, overlaps or touching.
    """
    e = np.asarray(ends, dtype=np.int64).reshape(-1, 2)
    m = len(e)
    if m < 2:
        z = np.zeros(0, dtype=np.int64)
        return z, z, np.zeros(0), np.zeros(0)
    I, J = np.triu_indices(m, 1)
    a = e[I]
    b = e[J]
    adjacent = (a[:, 0] == b[:, 0]) | (a[:, 0] == b[:, 1]) | (a[:, 1] == b[:, 0]) | (a[:, 1] == b[:, 1])
    I, J, a, b = I[~adjacent], J[~adjacent], a[~adjacent], b[~adjacent]
    p = coords[a[:, 0]]
    r = coords[a[:, 1]] - p
    q = coords[b[:, 0]]
    s = coords[b[:, 1]] - q
    qp = q - p
    den = _cross(r[:, 0], r[:, 1], s[:, 0], s[:, 1])
    num_t = _cross(qp[:, 0], qp[:, 1], s[:, 0], s[:, 1])
    num_u = _cross(qp[:, 0], qp[:, 1], r[:, 0], r[:, 1])
    scale = np.hypot(r[:, 0], r[:, 1]) * np.hypot(s[:, 0], s[:, 1])
    parallel = np.abs(den) <= 1e-14 * scale
    if parallel.any():
        # collinear and overlapping segments are a degeneracy
        col = parallel & (np.abs(num_t) <= 1e-14 * scale)
        if col.any():
            rr = np.einsum("ij,ij->i", r, r)
            t0 = np.einsum("ij,ij->i", qp, r) / rr
            t1 = t0 + np.einsum("ij,ij->i", s, r) / rr
            lo, hi = np.minimum(t0, t1), np.maximum(t0, t1)
            if np.any(col & (hi >= -ENDPOINT_EPS) & (lo <= 1 + ENDPOINT_EPS)):
                raise Degenerate("collinear overlap")
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(parallel, -1.0, num_t / den)
        u = np.where(parallel, -1.0, num_u / den)
    near = lambda x: (np.abs(x) <= ENDPOINT_EPS) | (np.abs(x - 1) <= ENDPOINT_EPS)
    inside_t = (t > -ENDPOINT_EPS) & (t < 1 + ENDPOINT_EPS)
    inside_u = (u > -ENDPOINT_EPS) & (u < 1 + ENDPOINT_EPS)
    if np.any(inside_t & inside_u & (near(t) | near(u))):
        raise Degenerate("segment touches a vertex")
    hit = (t > 0) & (t < 1) & (u > 0) & (u < 1)
    return I[hit], J[hit], t[hit], u[hit]


def rotation_by_angle(coords: np.ndarray, ends, n: int) -> list[list[int]]:
    """Clockwise (descending angle, y up) incident edge lists."""
    inc: list[list[tuple[float, int]]] = [[] for _ in range(n)]
    for e, (u, v) in enumerate(ends):
        du = coords[v] - coords[u]
        inc[u].append((math.atan2(du[1], du[0]), e))
        inc[v].append((math.atan2(-du[1], -du[0]), e))
    out = []
    for lst in inc:
        lst.sort(key=lambda x: (-x[0], x[1]))
        for (a1, _), (a2, _) in zip(lst, lst[1:]):
            if abs(a1 - a2) <= 1e-12:
                raise Degenerate("two edges leave a vertex in the same direction")
        out.append([e for _, e in lst])
    return out


def orientation_sign(coords: np.ndarray, e1: tuple[int, int], e2: tuple[int, int]) -> int:
    u1, v1 = e1
    u2 = e2[0]
    d = coords[v1] - coords[u1]
    w = coords[u2] - coords[u1]
    return 1 if _cross(d[0], d[1], w[0], w[1]) > 0 else -1


def state_from_crossings(n: int, ends, coords: np.ndarray, I, J, TI, TJ) -> EmbeddingState:
    """Assemble an embedding from crossing pairs and their parameters.

    ``ends`` must list every edge as ``(u, v)`` with ``u < v``; parameters
    run from ``u``.
    """
    if any(u > v for u, v in ends):
        raise ValueError("edge endpoints must be ordered u < v")
    m = len(ends)
    along: list[list[tuple[float, int]]] = [[] for _ in range(m)]
    orientation = {}
    for i, j, ti, tj in zip(I.tolist(), J.tolist(), TI.tolist(), TJ.tolist()):
        along[i].append((ti, j))
        along[j].append((tj, i))
        orientation[(i, j)] = orientation_sign(coords, ends[i], ends[j])
    order = []
    for lst in along:
        lst.sort()
        for (a, _), (b, _) in zip(lst, lst[1:]):
            if b - a <= ENDPOINT_EPS:
                raise Degenerate("three segments through one point")
        order.append([c for _, c in lst])
    rot = rotation_by_angle(coords, ends, n)
    es = EmbeddingState.from_rotation(n, ends, rot, order, orientation)
    es.coords = coords.copy()
    return es


def with_jitter(build, coords: np.ndarray, seed: int):
    """Call ``build(coords)``, retrying with tiny seeded jitter on degeneracy."""
    coords = np.asarray(coords, dtype=float)
    if not np.all(np.isfinite(coords)):
        raise GeometryError("coordinates must be finite")
    n = len(coords)
    if n > 1:
        keys = np.round(coords, 15)
        if len(np.unique(keys, axis=0)) < n:
            raise GeometryError("two vertices share a position")
    span = coords.max(axis=0) - coords.min(axis=0) if n else np.zeros(2)
    diag = float(np.hypot(*span)) or 1.0
    rng = np.random.default_rng([abs(int(seed)), 7919])
    cur = coords
    for attempt in range(MAX_RETRIES + 1):
        try:
            return build(cur)
        except Degenerate as exc:
            reason = str(exc)
        cur = coords + rng.normal(size=coords.shape) * JITTER_SCALE * diag
    raise GeometryError(f"drawing stays degenerate after {MAX_RETRIES} perturbations ({reason})")


def from_straight_line_drawing(n: int, ends, coords, seed: int = 0) -> EmbeddingState:
    """Embedding of the straight-line drawing given by ``coords``."""
    coords = np.asarray(coords, dtype=float).reshape(n, 2)
    # crossing parameters and signs are measured from the smaller endpoint
    ends = [(u, v) if u < v else (v, u) for u, v in ends]

    def build(c):
        I, J, TI, TJ = segment_crossings(c, ends)
        return state_from_crossings(n, ends, c, I, J, TI, TJ)

    return with_jitter(build, coords, seed)


# ---------------------------------------------------------------------------
# Layouts
# ---------------------------------------------------------------------------


def circle_coords(n: int, jitter: float = 0.0, seed: int = 0) -> np.ndarray:
    """Vertex ``i`` at angle ``2*pi*i/n``, optionally perturbed along the circle."""
    ang = 2 * np.pi * np.arange(n) / max(n, 1)
    if jitter:
        rng = np.random.default_rng([abs(int(seed)), 104729])
        ang = ang + rng.uniform(-1, 1, size=n) * jitter * 2 * np.pi / max(n, 1)
    return np.stack([np.cos(ang), np.sin(ang)], axis=1)


def stress_layout(
    n: int,
    ends,
    seed: int = 0,
    tol: float = 1e-4,
    max_iter: Optional[int] = None,
) -> np.ndarray:
    """Stress majorisation with graph distances as ideal lengths (edge length 1).

    Starts from the circle layout plus seeded noise and stops when no vertex
    moves more than ``tol`` or after ``200 * n`` iterations.
    """
    if n == 1:
        return np.zeros((1, 2))
    h = nx.Graph()
    h.add_nodes_from(range(n))
    h.add_edges_from(ends)
    D = np.zeros((n, n))
    for u, dist in nx.all_pairs_shortest_path_length(h):
        for v, d in dist.items():
            D[u, v] = d
    if np.any((D == 0) & ~np.eye(n, dtype=bool)):
        raise GeometryError("stress layout needs a connected graph")
    W = np.zeros_like(D)
    off = ~np.eye(n, dtype=bool)
    W[off] = D[off] ** -2.0
    Lw = -W.copy()
    np.fill_diagonal(Lw, W.sum(axis=1))
    # pin the translation freedom through the pseudo-inverse
    Lw_pinv = np.linalg.pinv(Lw)
    rng = np.random.default_rng([abs(int(seed)), 15485863])
    X = circle_coords(n) * (D.max() / 2.0) + rng.normal(scale=0.01, size=(n, 2))
    cap = max_iter if max_iter is not None else 200 * n
    for _ in range(cap):
        diff = X[:, None, :] - X[None, :, :]
        dist = np.sqrt((diff ** 2).sum(axis=2))
        with np.errstate(divide="ignore", invalid="ignore"):
            B = np.where(off & (dist > 0), -W * D / dist, 0.0)
        np.fill_diagonal(B, -B.sum(axis=1))
        Xn = Lw_pinv @ (B @ X)
        Xn -= Xn.mean(axis=0)
        delta = np.max(np.hypot(*(Xn - X).T))
        X = Xn
        if delta < tol:
            break
    return X
