"""Incremental repair of a decomposition when single cells change state.

Every change produces a new (map, decomposition) snapshot; the inputs are
never mutated, so searches running on the old snapshot stay valid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Set, Tuple

from .decomposition import Decomposition, build_rect_info, classify_rect, decompose, greedy_tile, paint
from .grid import Cell, Connectivity, GridMap
from .search import SearchOptions, astar_plain, astar_rsr

_ORTHO = ((1, 0), (-1, 0), (0, 1), (0, -1))
_RING = _ORTHO + ((1, 1), (1, -1), (-1, 1), (-1, -1))


class ChangeError(ValueError):
    pass


@dataclass(frozen=True)
class CellChange:
    cell: Cell
    new_state: bool  # True = traversable


def _check(grid: GridMap, ch: CellChange) -> None:
    if not grid.in_bounds(ch.cell):
        raise ChangeError(f"cell {ch.cell} out of bounds")
    if grid.traversable(ch.cell) == bool(ch.new_state):
        raise ChangeError(f"no-op change at {ch.cell}")


def apply_change(grid: GridMap, decomp: Decomposition, ch: CellChange) -> Tuple[GridMap, Decomposition]:
    """Apply one cell toggle and repair the decomposition locally."""
    _check(grid, ch)
    W, H = grid.width, grid.height
    x, y = ch.cell
    c = y * W + x
    new_grid = grid.set_cell(ch.cell, ch.new_state)
    d = decomp.copy()
    rect_of, class_of = d.rect_of, d.class_of

    if ch.new_state:
        # the freed cell may merge with any rectangle it can step into
        steps = _RING if grid.conn == Connectivity.EIGHT else _ORTHO
        invalid = set()
        for dx, dy in steps:
            nx, ny = x + dx, y + dy
            if 0 <= nx < W and 0 <= ny < H and rect_of[ny * W + nx] >= 0:
                invalid.add(rect_of[ny * W + nx])
    else:
        invalid = {rect_of[c]}

    old = [d.rects.pop(rid) for rid in invalid]
    for rid in invalid:
        del d.info[rid]
    xs = [r.x0 for r in old] + [r.x1 for r in old] + [x]
    ys = [r.y0 for r in old] + [r.y1 for r in old] + [y]
    bx0, bx1, by0, by1 = min(xs), max(xs), min(ys), max(ys)
    bw = bx1 - bx0 + 1
    avail = [bytearray(bw) for _ in range(by1 - by0 + 1)]
    for r in old:
        for yy in range(r.y0, r.y1 + 1):
            avail[yy - by0][r.x0 - bx0 : r.x1 - bx0 + 1] = b"\x01" * r.w
            rect_of[yy * W + r.x0 : yy * W + r.x1 + 1] = [-1] * r.w
            class_of[yy * W + r.x0 : yy * W + r.x1 + 1] = bytes(r.w)
    avail[y - by0][x - bx0] = 1 if ch.new_state else 0
    region = [(r.x0, r.y0, r.x1, r.y1) for r in old] + [(x, y, x, y)]

    ids = itertools.count(d.next_id)
    fresh = greedy_tile(avail, ids, bx0, by0)
    d.next_id = next(ids)
    for r in fresh:
        d.rects[r.id] = r
    paint(rect_of, W, fresh)

    # surviving rectangles whose cells touch the region's border ring
    touched: Set[int] = {r.id for r in fresh}
    for x0, y0, x1, y1 in region:
        for yy in range(max(y0 - 1, 0), min(y1 + 1, H - 1) + 1):
            row = yy * W
            if yy == y0 - 1 or yy == y1 + 1:
                xs_ = range(max(x0 - 1, 0), min(x1 + 1, W - 1) + 1)
            else:
                xs_ = [v for v in (x0 - 1, x1 + 1) if 0 <= v < W]
            for xx in xs_:
                rid = rect_of[row + xx]
                if rid >= 0:
                    touched.add(rid)
    for rid in touched:
        r = d.rects[rid]
        classify_rect(new_grid, rect_of, r, class_of)
        d.info[rid] = build_rect_info(r, class_of, W, new_grid.conn)
    return new_grid, d


def apply_changes(
    grid: GridMap, decomp: Decomposition, changes: Iterable[CellChange]
) -> Tuple[GridMap, Decomposition]:
    for ch in changes:
        grid, decomp = apply_change(grid, decomp, ch)
    return grid, decomp


@dataclass
class ConsistencyReport:
    checked: int = 0
    mismatches: List[Tuple[Cell, Cell, Optional[float], Optional[float], Optional[float]]] = field(
        default_factory=list
    )

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def __bool__(self) -> bool:
        return self.ok


def _cost(p) -> Optional[float]:
    return None if p is None else p.cost


def _agree(a: Optional[float], b: Optional[float], tol: float) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)


def repair_consistency_check(
    grid: GridMap,
    decomp: Decomposition,
    queries: Sequence[Tuple[Cell, Cell]],
    options: SearchOptions = SearchOptions(),
    tol: float = 1e-6,
) -> ConsistencyReport:
    """Compare repaired, freshly decomposed and plain-grid costs on each query.

    Queries with a blocked endpoint are skipped.
    """
    fresh = decompose(grid)
    rep = ConsistencyReport()
    for s, g in queries:
        if not (grid.traversable(s) and grid.traversable(g)):
            continue
        a = _cost(astar_rsr(grid, decomp, s, g, options))
        b = _cost(astar_rsr(grid, fresh, s, g, options))
        p = _cost(astar_plain(grid, s, g))
        rep.checked += 1
        if not (_agree(a, b, tol) and _agree(a, p, tol)):
            rep.mismatches.append((s, g, a, b, p))
    return rep
