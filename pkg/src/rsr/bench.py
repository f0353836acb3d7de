"""Benchmark rows, speedup aggregation and the flag-matrix verifier."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Iterable, List, Optional, Sequence, TextIO, Tuple

from .decomposition import Decomposition, decompose, validate
from .grid import Cell, GridMap
from .search import FLAG_MATRIX, SearchOptions, astar_plain, astar_rsr, dijkstra_plain

COST_TOL = 1e-6


class CostMismatch(RuntimeError):
    """RSR and plain A* disagree: a correctness bug, never a benchmark artefact."""


@dataclass(frozen=True)
class BenchRecord:
    map: str
    conn: int
    sx: int
    sy: int
    gx: int
    gy: int
    cost_rsr: float
    cost_plain: float
    expanded_rsr: int
    expanded_plain: int
    time_rsr_us: int
    time_plain_us: int
    same_rect: int
    speedup: float


CSV_HEADER = [f.name for f in fields(BenchRecord)]


def _us(seconds: float) -> int:
    return int(round(seconds * 1e6))


def bench_instance(
    grid: GridMap,
    decomp: Decomposition,
    s: Cell,
    g: Cell,
    map_id: str = "map",
    options: SearchOptions = SearchOptions(),
) -> BenchRecord:
    grid.adjacency  # built once and cached; keep it out of the first row's timing
    plain = astar_plain(grid, s, g)
    rsr = astar_rsr(grid, decomp, s, g, options)
    if plain is None or rsr is None:
        if plain is None and rsr is None:
            raise ValueError(f"instance {s} -> {g} is unsolvable")
        raise CostMismatch(f"{map_id}: {s} -> {g}: reachability differs (rsr={rsr}, plain={plain})")
    if abs(rsr.cost - plain.cost) > COST_TOL:
        raise CostMismatch(f"{map_id}: {s} -> {g}: cost_rsr={rsr.cost:.9f} cost_plain={plain.cost:.9f}")
    t_rsr = _us(rsr.stats.elapsed)
    t_plain = _us(plain.stats.elapsed)
    same = decomp.rect_of[grid.cell_id(s)] == decomp.rect_of[grid.cell_id(g)]
    return BenchRecord(
        map_id,
        int(grid.conn),
        s[0],
        s[1],
        g[0],
        g[1],
        rsr.cost,
        plain.cost,
        rsr.stats.expanded,
        plain.stats.expanded,
        t_rsr,
        t_plain,
        int(same),
        max(t_plain, 1) / max(t_rsr, 1),
    )


def run_bench(
    grid: GridMap,
    instances: Iterable[Tuple[Cell, Cell]],
    map_id: str = "map",
    options: SearchOptions = SearchOptions(),
    decomp: Optional[Decomposition] = None,
) -> List[BenchRecord]:
    decomp = decomp if decomp is not None else decompose(grid)
    return [bench_instance(grid, decomp, s, g, map_id, options) for s, g in instances]


def write_csv(records: Iterable[BenchRecord], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        row = asdict(r)
        row["cost_rsr"] = f"{r.cost_rsr:.6f}"
        row["cost_plain"] = f"{r.cost_plain:.6f}"
        row["speedup"] = f"{r.speedup:.4f}"
        w.writerow([row[k] for k in CSV_HEADER])


@dataclass
class BenchSummary:
    rows: int
    counted: int  # rows with endpoints in different rectangles
    mean_expanded_rsr: float
    mean_expanded_plain: float
    speedup: float  # summed plain time / summed rsr time

    @property
    def expansion_ratio(self) -> float:
        if self.mean_expanded_plain == 0:
            return math.nan
        return self.mean_expanded_rsr / self.mean_expanded_plain


def summarize(records: Sequence[BenchRecord]) -> BenchSummary:
    """Aggregate over rows whose endpoints lie in different rectangles."""
    kept = [r for r in records if not r.same_rect]
    if not kept:
        return BenchSummary(len(records), 0, math.nan, math.nan, math.nan)
    n = len(kept)
    t_plain = sum(r.time_plain_us for r in kept)
    t_rsr = sum(r.time_rsr_us for r in kept)
    return BenchSummary(
        len(records),
        n,
        sum(r.expanded_rsr for r in kept) / n,
        sum(r.expanded_plain for r in kept) / n,
        max(t_plain, 1) / max(t_rsr, 1),
    )


# -- verification -----------------------------------------------------------------


@dataclass
class VerifyReport:
    conn: int
    instances: int = 0
    validation: str = "ok"
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.validation == "ok" and not self.failures

    def lines(self) -> List[str]:
        out = [
            f"[conn {self.conn}] instances {self.instances}",
            f"[conn {self.conn}] validate {self.validation}",
        ]
        out += [f"[conn {self.conn}] FAIL {f}" for f in self.failures]
        out.append(f"[conn {self.conn}] {'PASS' if self.ok else 'FAIL'}")
        return out


def verify_map(
    grid: GridMap,
    instances: Sequence[Tuple[Cell, Cell]],
    corrupt: Optional[Callable[[Decomposition], Decomposition]] = None,
    dijkstra_every: int = 10,
    flags: Sequence[SearchOptions] = FLAG_MATRIX,
) -> VerifyReport:
    """Check every instance under the whole flag matrix against plain A*.

    Every ``dijkstra_every``-th instance is also checked against exact
    single-source distances. ``corrupt`` rewrites the decomposition before
    use; it exists so tests can confirm failures are detected.
    """
    decomp = decompose(grid)
    if corrupt is not None:
        decomp = corrupt(decomp)
    rep = VerifyReport(int(grid.conn), len(instances))
    v = validate(decomp, grid)
    if not v:
        rep.validation = f"{v.violation}: {v.detail}"
    for k, (s, g) in enumerate(instances):
        plain = astar_plain(grid, s, g)
        ref = None if plain is None else plain.cost
        if dijkstra_every and k % dijkstra_every == 0:
            d = float(dijkstra_plain(grid, s)[g[1], g[0]])
            exact = None if math.isinf(d) else d
            if (ref is None) != (exact is None) or (ref is not None and abs(ref - exact) > COST_TOL):
                rep.failures.append(f"{s} -> {g}: plain={ref} dijkstra={exact}")
        for opt in flags:
            try:
                p = astar_rsr(grid, decomp, s, g, opt)
            except Exception as e:  # a corrupted graph may break invariants outright
                rep.failures.append(f"{s} -> {g} {_flag_name(opt)}: {type(e).__name__}: {e}")
                continue
            got = None if p is None else p.cost
            if (got is None) != (ref is None) or (got is not None and abs(got - ref) > COST_TOL):
                rep.failures.append(f"{s} -> {g} {_flag_name(opt)}: rsr={got} plain={ref}")
    return rep


def _flag_name(opt: SearchOptions) -> str:
    return f"pr={int(opt.perimeter_reduction)} op={int(opt.online_pruning)}"
