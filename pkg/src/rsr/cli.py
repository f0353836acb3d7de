"""Command line entry point: ``rsr <subcommand> ...``."""

from __future__ import annotations

import argparse
import sys
import time
from contextlib import nullcontext
from typing import List, Optional, Sequence

from . import bench as B
from .decomposition import decompose, dump
from .dynamic import CellChange, ChangeError, apply_change, repair_consistency_check
from .grid import Connectivity, GridMap, MapFormatError, read_map, read_scenario, serialize_map
from .generate import GenSpec, generate_map, sample_instances
from .search import FLAG_MATRIX, SearchOptions, astar_rsr, refine_path

EXIT_OK, EXIT_VERIFY, EXIT_IO, EXIT_QUERY, EXIT_SCRIPT = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def _load(args) -> GridMap:
    conn = Connectivity.parse(args.conn)
    if getattr(args, "map", None):
        try:
            return read_map(args.map, conn)
        except OSError as e:
            raise CliError(EXIT_IO, f"cannot read map: {e}")
        except MapFormatError as e:
            raise CliError(EXIT_IO, f"bad map file {args.map}: {e}")
    if getattr(args, "kind", None):
        return generate_map(_gen_spec(args), conn)
    raise CliError(EXIT_IO, "no map given (use --map or --kind)")


def _gen_spec(args) -> GenSpec:
    try:
        return GenSpec(args.kind, args.size, args.seed, args.density, args.room, args.door_p, args.scale)
    except ValueError as e:
        raise CliError(EXIT_QUERY, str(e))


def _options(args) -> SearchOptions:
    return SearchOptions(online_pruning=not args.no_op, perimeter_reduction=not args.no_pr)


def _open_out(path):
    if path in (None, "-"):
        return nullcontext(sys.stdout)
    try:
        return open(path, "w", newline="")
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot write {path}: {e}")


# -- subcommands ------------------------------------------------------------------


def cmd_preprocess(args) -> int:
    grid = _load(args)
    t0 = time.perf_counter()
    d = decompose(grid)
    ms = (time.perf_counter() - t0) * 1e3
    for k, v in d.counts().items():
        print(f"{k} {v}")
    print(f"preprocess_ms {ms:.3f}")
    if args.dump:
        print(dump(d), end="")
    return EXIT_OK


def cmd_solve(args) -> int:
    grid = _load(args)
    s, g = tuple(args.start), tuple(args.goal)
    for c, what in ((s, "start"), (g, "goal")):
        if not grid.in_bounds(c) or not grid.traversable(c):
            raise CliError(EXIT_QUERY, f"{what} {c} is out of bounds or blocked")
    d = decompose(grid)
    p = astar_rsr(grid, d, s, g, _options(args))
    if p is None:
        print("no path")
        return EXIT_OK
    print(f"cost {p.cost:.6f}")
    print(f"expanded {p.stats.expanded}")
    print(f"elapsed_us {int(round(p.stats.elapsed * 1e6))}")
    if args.refine:
        cells = refine_path(p, grid).nodes
        print("path " + " ".join(f"{x},{y}" for x, y in cells))
    return EXIT_OK


def cmd_bench(args) -> int:
    grid = _load(args)
    if args.scen:
        try:
            entries = read_scenario(args.scen)
        except OSError as e:
            raise CliError(EXIT_IO, f"cannot read scenario: {e}")
        except ValueError as e:
            raise CliError(EXIT_IO, f"bad scenario file: {e}")
        instances = [(e.start, e.goal) for e in entries]
    else:
        try:
            instances = sample_instances(grid, args.instances, args.seed)
        except RuntimeError as e:
            raise CliError(EXIT_QUERY, str(e))
    map_id = args.map or f"{args.kind}{args.size}"
    d = decompose(grid)
    rows = []
    for s, g in instances:
        try:
            rows.append(B.bench_instance(grid, d, s, g, map_id, _options(args)))
        except B.CostMismatch as e:
            print(f"cost mismatch: {e}", file=sys.stderr)
            return EXIT_VERIFY
        except ValueError as e:
            print(f"skipping: {e}", file=sys.stderr)
    with _open_out(args.out) as fh:
        B.write_csv(rows, fh)
    sm = B.summarize(rows)
    print(
        f"rows {sm.rows} counted {sm.counted} "
        f"expanded_rsr {sm.mean_expanded_rsr:.1f} expanded_plain {sm.mean_expanded_plain:.1f} "
        f"ratio {sm.expansion_ratio:.3f} speedup {sm.speedup:.3f}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_gen(args) -> int:
    grid = generate_map(_gen_spec(args), Connectivity.parse(args.conn))
    with _open_out(args.out) as fh:
        fh.write(serialize_map(grid))
    return EXIT_OK


def cmd_verify(args, corrupt=None) -> int:
    base = _load(args)
    ok = True
    for conn in (Connectivity.FOUR, Connectivity.EIGHT):
        grid = base.with_conn(conn)
        try:
            inst = sample_instances(grid, args.instances, args.seed)
        except RuntimeError as e:
            raise CliError(EXIT_QUERY, str(e))
        rep = B.verify_map(grid, inst, corrupt=corrupt, flags=FLAG_MATRIX)
        for line in rep.lines():
            print(line)
        ok &= rep.ok
    return EXIT_OK if ok else EXIT_VERIFY


def parse_changes(text: str, grid: GridMap) -> List[CellChange]:
    """``add x y`` blocks a cell, ``del x y`` frees it. Blank and ``#`` lines are skipped."""
    out = []
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in ("add", "del"):
            raise CliError(EXIT_SCRIPT, f"line {k}: expected 'add x y' or 'del x y'")
        try:
            c = (int(parts[1]), int(parts[2]))
        except ValueError:
            raise CliError(EXIT_SCRIPT, f"line {k}: bad coordinates")
        if not grid.in_bounds(c):
            raise CliError(EXIT_SCRIPT, f"line {k}: cell {c} out of bounds")
        out.append(CellChange(c, parts[0] == "del"))
    return out


def cmd_mutate(args) -> int:
    grid = _load(args)
    try:
        with open(args.changes) as fh:
            text = fh.read()
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot read changes: {e}")
    changes = parse_changes(text, grid)
    d = decompose(grid)
    for k, ch in enumerate(changes, 1):
        t0 = time.perf_counter()
        try:
            grid, d = apply_change(grid, d, ch)
        except ChangeError as e:
            raise CliError(EXIT_SCRIPT, f"change {k}: {e}")
        us = int(round((time.perf_counter() - t0) * 1e6))
        verb = "del" if ch.new_state else "add"
        print(f"change {k} {verb} {ch.cell[0]} {ch.cell[1]} repair_us {us}")
    try:
        queries = sample_instances(grid, args.queries, args.seed)
    except RuntimeError as e:
        raise CliError(EXIT_QUERY, str(e))
    rep = repair_consistency_check(grid, d, queries, _options(args))
    for s, g, a, b, p in rep.mismatches:
        print(f"mismatch {s} -> {g}: repaired={a} fresh={b} plain={p}")
    print(f"queries {rep.checked} mismatches {len(rep.mismatches)} {'PASS' if rep.ok else 'FAIL'}")
    return EXIT_OK if rep.ok else EXIT_VERIFY


# -- parser -----------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, needs_map: bool = True) -> None:
    if needs_map:
        p.add_argument("--map", help="map file (octile format)")
    p.add_argument("--conn", default="8", choices=["4", "8"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--no-pr", action="store_true", help="disable perimeter reduction")
    p.add_argument("--no-op", action="store_true", help="disable online pruning")


def _gen_args(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--kind", choices=["empty", "random", "rooms"], required=required)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--density", type=float, default=0.0)
    p.add_argument("--room", type=int, default=7)
    p.add_argument("--door-p", type=float, default=0.5)
    p.add_argument("--scale", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rsr", description="Symmetry-reduced A* on grid maps")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="decompose a map and print node statistics")
    _common(p)
    _gen_args(p)
    p.add_argument("--stats", "--dump", dest="dump", action="store_true", help="also print the rectangle list")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("solve", help="answer one query")
    _common(p)
    _gen_args(p)
    p.add_argument("--start", type=int, nargs=2, metavar=("X", "Y"), required=True)
    p.add_argument("--goal", type=int, nargs=2, metavar=("X", "Y"), required=True)
    p.add_argument("--refine", action="store_true", help="print the cell-by-cell path")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="compare against plain A* and write CSV")
    _common(p)
    _gen_args(p)
    p.add_argument("--scen", help="scenario file with the queries")
    p.add_argument("--instances", type=int, default=100)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write a synthetic map")
    _common(p, needs_map=False)
    _gen_args(p, required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="check the flag matrix against plain A* and Dijkstra")
    _common(p)
    _gen_args(p)
    p.add_argument("--instances", type=int, default=100)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mutate", help="apply obstacle changes and check repaired queries")
    _common(p)
    _gen_args(p)
    p.add_argument("--changes", required=True, help="script of 'add x y' / 'del x y' lines")
    p.add_argument("--queries", type=int, default=200)
    p.set_defaults(func=cmd_mutate)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
