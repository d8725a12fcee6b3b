"""Writing sweep results: JSON report, CSV table, rotation export and figures."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .embedding import dumps
from .geometry import Degenerate, segment_crossings
from .harness import RunReport, SweepReport

FORMATS = ("json", "csv", "rotation", "svg", "png")

CSV_FIELDS = (
    "perm", "seed", "init_scheme", "min_scheme", "initial_cr", "final_cr",
    "iterations", "init_time", "loop_time", "subdivisions_left", "hit_cap", "improving",
)


class EmitError(ValueError):
    """A requested output cannot be produced."""


def report_json(report: SweepReport, timings: bool = True) -> str:
    return json.dumps(report.to_dict(timings), indent=1, sort_keys=True)


def runs_csv(runs: Sequence[RunReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in runs:
        w.writerow({k: getattr(r, k) for k in CSV_FIELDS})
    return buf.getvalue()


BATCH_FIELDS = ("graph", "n", "m", "best_cr", "best_perm", "reference", "deviation_percent")


def batch_csv(reports: Sequence[SweepReport]) -> str:
    """One row per graph plus a closing ``mean`` row over ``best_cr``."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BATCH_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow({"graph": r.graph, "n": r.n, "m": r.m, "best_cr": r.best_cr, "best_perm": r.best_perm,
                    "reference": r.reference, "deviation_percent": r.deviation_percent})
    if reports:
        w.writerow({"graph": "mean", "best_cr": f"{batch_mean(reports):.4f}"})
    return buf.getvalue()


def batch_mean(reports: Sequence[SweepReport]) -> float:
    return float(np.mean([r.best_cr for r in reports]))


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def crossing_points(coords: np.ndarray, ends) -> np.ndarray:
    """Intersection points of a straight-line drawing, one row per crossing."""
    I, J, TI, _ = segment_crossings(coords, ends)
    e = np.asarray(ends, dtype=np.int64).reshape(-1, 2)
    if len(I) == 0:
        return np.zeros((0, 2))
    a = coords[e[I, 0]]
    b = coords[e[I, 1]]
    return a + TI[:, None] * (b - a)


def draw_layout(coords: Optional[np.ndarray], ends, path, title: str = "") -> tuple[int, int]:
    """Straight-line drawing with a marker on every crossing.

    Each segment and marker gets its own ``gid`` in SVG output.  Returns the
    number of segments and of crossing markers drawn.
    """
    if coords is None:
        raise EmitError("this layout has no vertex coordinates; only the rotation export is available")
    try:
        pts = crossing_points(coords, ends)
    except Degenerate as exc:
        raise EmitError(f"degenerate drawing: {exc}") from None
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 6))
    for i, (u, v) in enumerate(ends):
        (line,) = ax.plot([coords[u, 0], coords[v, 0]], [coords[u, 1], coords[v, 1]],
                          color="0.35", linewidth=0.8, zorder=1)
        line.set_gid(f"edge-{i}")
    for k, (x, y) in enumerate(pts):
        mk = ax.scatter([x], [y], s=14, color="tab:red", marker="x", zorder=3)
        mk.set_gid(f"crossing-{k}")
    ax.scatter(coords[:, 0], coords[:, 1], s=18, color="black", zorder=2)
    ax.set_aspect("equal")
    ax.axis("off")
    if title:
        ax.set_title(title)
    fig.savefig(path)
    plt.close(fig)
    return len(ends), len(pts)


def draw_runs(report: SweepReport, path) -> None:
    """Initial and final crossing counts per permutation."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    idx = [r.perm for r in report.runs]
    ax.plot(idx, [r.initial_cr for r in report.runs], ".", color="0.6", label="initial")
    ax.plot(idx, [r.final_cr for r in report.runs], "o", markersize=3, color="tab:blue", label="final")
    if report.reference is not None:
        ax.axhline(report.reference, color="tab:red", linewidth=0.8, label=f"reference {report.reference}")
    ax.set_xlabel("permutation")
    ax.set_ylabel("crossings")
    ax.set_title(f"{report.graph}: {report.init_scheme}, {report.min_scheme}")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


# ---------------------------------------------------------------------------
# Emit
# ---------------------------------------------------------------------------


def emit(report: SweepReport, prefix, formats: Iterable[str], ends=None,
         labels: Optional[Sequence[int]] = None) -> list[Path]:
    """Write the requested formats next to ``prefix`` and return the paths.

    ``svg`` draws the starting layout of the best permutation and needs
    coordinates (circle or spring); ``png`` plots the per-permutation counts.
    """
    prefix = Path(prefix)
    if prefix.parent and not prefix.parent.exists():
        prefix.parent.mkdir(parents=True)
    written = []
    for fmt in formats:
        if fmt not in FORMATS:
            raise EmitError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
        if fmt == "json":
            path = prefix.with_name(prefix.name + ".json")
            path.write_text(report_json(report) + "\n")
        elif fmt == "csv":
            path = prefix.with_name(prefix.name + ".csv")
            path.write_text(runs_csv(report.runs))
        elif fmt == "rotation":
            if report.embedding is None:
                raise EmitError("the best embedding still contains subdivision vertices")
            path = prefix.with_name(prefix.name + ".rotation.json")
            path.write_text(dumps(report.embedding, labels) + "\n")
        elif fmt == "svg":
            if report.coords is None:
                raise EmitError(
                    f"svg needs vertex coordinates; the {report.init_scheme!r} scheme on a graph with "
                    f"{report.blocks} block(s) has none (use --init circle or spring on a biconnected graph)"
                )
            path = prefix.with_name(prefix.name + ".svg")
            draw_layout(report.coords, ends, path, f"{report.graph} ({report.init_scheme})")
        else:
            path = prefix.with_name(prefix.name + ".png")
            draw_runs(report, path)
        written.append(path)
    return written
