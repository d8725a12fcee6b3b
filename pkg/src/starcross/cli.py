"""Command-line driver."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .embedding import GeometryError
from .graph import GENERATORS, Graph, GraphError, ParseError, generate, load_edge_list
from .harness import RunReport, SweepReport, reference_for, sweep
from .heuristic import SCHEMES, HeuristicConfig, InvariantError, ValidationError, run
from .initial import INIT_SCHEMES, InputError, user_init
from .report import FORMATS, EmitError, batch_csv, batch_mean, emit

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVALID = 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="starcross",
        description="Reduce the crossings of a graph drawing by repeated optimal vertex re-insertion.",
    )
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="FILE", nargs="+",
                     help="edge list, one 'u v' pair per line ('-' for stdin); several files are swept "
                          "one after another and summarised by their mean best crossing count")
    src.add_argument("--gen", nargs="+", metavar="ARG",
                     help=f"generated family and parameters, e.g. 'complete 8'; families: {', '.join(GENERATORS)}")
    ap.add_argument("--init", choices=INIT_SCHEMES, default="planar", help="initial embedding scheme")
    ap.add_argument("--user-init", metavar="FILE",
                    help="start from a rotation document or a 'label x y' coordinate file instead")
    ap.add_argument("--scheme", choices=SCHEMES, default="first", help="minimisation scheme")
    ap.add_argument("--perms", type=int, default=100, help="number of random relabellings")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--bf-threshold", type=int, default=10,
                    help="failed biggest-face attempts before falling back for good")
    ap.add_argument("--max-iterations", type=int, default=None)
    ap.add_argument("--ref", type=int, default=None, help="reference crossing number for the deviation")
    ap.add_argument("--out", metavar="PREFIX", help="output path prefix")
    ap.add_argument("--emit", default="json",
                    help=f"comma-separated formats to write with --out: {','.join(FORMATS)}")
    ap.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    ap.add_argument("--no-checks", action="store_true", help="skip per-iteration invariant validation")
    ap.add_argument("--verify", action="store_true", help="check local optimality of every final drawing")
    return ap


def _load_graph(args, ap, source: Optional[str] = None) -> tuple[Graph, str, Optional[tuple[str, int]]]:
    if args.gen:
        kind, *raw = args.gen
        try:
            params = [int(x) for x in raw]
        except ValueError:
            ap.error(f"--gen parameters must be integers: {raw}")
        g = generate(kind, *params)
        return g, f"{kind}({','.join(map(str, params))})", reference_for(kind, params)
    if source == "-":
        g, stats = load_edge_list(sys.stdin)
        name = "stdin"
    else:
        with open(source) as fh:
            g, stats = load_edge_list(fh)
        name = Path(source).stem
    if stats.duplicates or stats.self_loops:
        print(f"note: {stats.duplicates} duplicate edge(s) collapsed, {stats.self_loops} self-loop(s) dropped",
              file=sys.stderr)
    return g, name, None


def _user_sweep(g: Graph, text: str, args, name: str) -> SweepReport:
    if not g.is_connected() and g.num_vertices > 1:
        raise InputError("--user-init needs a connected graph")
    t0 = time.perf_counter()
    es = user_init(g, text, seed=args.seed)
    t_init = time.perf_counter() - t0
    coords = es.coords
    cfg = HeuristicConfig(args.scheme, args.bf_threshold, args.seed, args.max_iterations, not args.no_checks)
    final, res = run(g, es, cfg)
    rep = RunReport(0, res.initial_cr, res.final_cr, res.iterations, t_init, res.loop_time,
                    "user", args.scheme, args.seed, res.subdivisions_left, res.hit_cap)
    return SweepReport(name, g.num_vertices, g.m, "user", args.scheme, 1, args.seed, [rep],
                       res.final_cr, 0, 1, embedding=final if res.subdivisions_left == 0 else None,
                       coords=coords)


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.perms < 1:
        ap.error("--perms must be >= 1")
    if args.bf_threshold < 1:
        ap.error("--bf-threshold must be >= 1")
    formats = [f.strip() for f in args.emit.split(",") if f.strip()]
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        ap.error(f"unknown --emit format(s): {', '.join(bad)}")

    if args.input and len(args.input) > 1:
        if args.user_init:
            ap.error("--user-init takes a single --input file")
        return _batch(args, ap, formats)
    status, _ = _one(args, ap, formats, args.input[0] if args.input else None, args.out)
    return status


def _one(args, ap, formats, source, out) -> tuple[int, Optional[SweepReport]]:
    try:
        g, name, ref = _load_graph(args, ap, source)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE, None
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE, None
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE, None
    if args.ref is not None:
        ref = ("user", args.ref)

    try:
        if args.user_init:
            report = _user_sweep(g, Path(args.user_init).read_text(), args, name)
        else:
            report = sweep(g, args.init, args.scheme, args.perms, args.seed, args.bf_threshold,
                           args.workers, None, name, not args.no_checks, args.verify, args.max_iterations)
    except (InputError, ValidationError, GeometryError) as exc:
        print(f"invalid initial embedding: {exc}", file=sys.stderr)
        for v in getattr(exc, "violations", [])[:10]:
            print(f"  {v}", file=sys.stderr)
        return EXIT_INVALID, None
    except InvariantError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return EXIT_INVALID, None
    if ref is not None:
        report.reference_kind, report.reference = ref

    _print_summary(report)

    status = EXIT_OK
    if out:
        for fmt in formats:
            try:
                for path in emit(report, out, [fmt], ends=list(g.edges), labels=g.labels):
                    print(f"wrote {path}")
            except EmitError as exc:
                print(f"cannot write {fmt}: {exc}", file=sys.stderr)
                status = EXIT_INVALID
    return status, report


def _batch(args, ap, formats) -> int:
    """Sweep several edge-list files and report their mean best crossing count."""
    reports, status = [], EXIT_OK
    for source in args.input:
        out = f"{args.out}.{Path(source).stem}" if args.out else None
        code, rep = _one(args, ap, formats, source, out)
        status = max(status, code)
        if rep is not None:
            reports.append(rep)
        print()
    if reports:
        print(f"{len(reports)} graph(s): mean best crossings {batch_mean(reports):.4f}")
    if args.out and reports:
        path = Path(f"{args.out}.batch.csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(batch_csv(reports))
        print(f"wrote {path}")
    return status


def _print_summary(r: SweepReport) -> None:
    print(f"graph {r.graph}: n={r.n} m={r.m} blocks={r.blocks}")
    print(f"schemes {r.init_scheme},{r.min_scheme}  perms={r.perms} seed={r.seed}")
    init_t = sum(x.init_time for x in r.runs)
    loop_t = sum(x.loop_time for x in r.runs)
    print(f"best crossings {r.best_cr} (permutation {r.best_perm})")
    if r.reference is not None:
        dev = r.deviation_label
        extra = "" if dev in ("exact", "n/a") else "%"
        print(f"reference {r.reference_kind}={r.reference}  deviation {dev}{extra}")
    print(f"time init {init_t:.3f}s  loop {loop_t:.3f}s")


if __name__ == "__main__":
    sys.exit(main())
