"""Successor generation over the symmetry-reduced graph.

Macro edges are produced on demand from rectangle geometry:

* same side: neighbouring perimeter cells along a side, cost 1;
* orthogonal: the 45-degree hit on each side orthogonal to the node's side;
* fan: every cell of the opposite side within 45 degrees (8-connected), or
  the single directly opposite cell (4-connected);
* contracted: direct links between active cells that border the same
  component of pruned perimeter cells.

Every macro edge costs the metric distance between its endpoints.
"""

from __future__ import annotations

import enum
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .decomposition import ACTIVE, PRUNED, Decomposition, contracted_active_edges
from .grid import DIAG_EXTRA, Cell, Connectivity, GridMap, check_cell, metric_distance
from .path import Path, SearchStats
from .rect import (
    BOTTOM,
    HORIZONTAL,
    LEFT,
    OPPOSITE,
    RIGHT,
    TOP,
    Rectangle,
    diagonal_hit_targets,
    diagonal_then_straight,
    fan_range,
    opposite_target,
    same_side_targets,
)


class EdgeKind(enum.Enum):
    SAME_SIDE = "same_side"
    ORTHOGONAL = "orthogonal"
    FAN = "fan"
    CONTRACTED = "contracted"
    INSERTION = "insertion"
    GRID = "grid"


@dataclass(frozen=True)
class MacroEdge:
    source: Cell
    target: Cell
    cost: float
    kind: EdgeKind


@dataclass
class SuccessorSet:
    primary: List[MacroEdge] = field(default_factory=list)
    secondary: List[MacroEdge] = field(default_factory=list)

    def all(self) -> List[MacroEdge]:
        return self.primary + self.secondary

    def targets(self) -> Dict[Cell, float]:
        return {e.target: e.cost for e in self.all()}


def _require_perimeter(r: Rectangle, n: Cell) -> None:
    if not r.on_perimeter(n):
        raise ValueError(f"{n} is not on the perimeter of rectangle {r.id}")


def _edges(n: Cell, targets: Iterable[Cell], conn, kind: EdgeKind) -> List[MacroEdge]:
    return [MacroEdge(n, t, metric_distance(conn, n, t), kind) for t in targets]


def same_side_neighbours(r: Rectangle, n: Cell) -> List[MacroEdge]:
    _require_perimeter(r, n)
    return _edges(n, same_side_targets(r, n), Connectivity.FOUR, EdgeKind.SAME_SIDE)


def orthogonal_neighbours(r: Rectangle, n: Cell) -> List[MacroEdge]:
    """45-degree macro edges to the sides orthogonal to ``n``'s side (8-connected only)."""
    _require_perimeter(r, n)
    return _edges(n, diagonal_hit_targets(r, n), Connectivity.EIGHT, EdgeKind.ORTHOGONAL)


def fan_neighbours(r: Rectangle, n: Cell, side: Optional[int] = None) -> List[MacroEdge]:
    """Opposite-side fan of ``n`` (8-connected).

    A corner lies on two sides and so owns two fans; pass ``side`` to get one.
    """
    _require_perimeter(r, n)
    sides = r.sides(n) if side is None else (side,)
    if side is not None and side not in r.sides(n):
        raise ValueError(f"{n} is not on side {side}")
    out: Dict[Cell, None] = {}
    for s in sides:
        fr = fan_range(r, n, s)
        if fr is None:
            continue
        tgt, lo, hi = fr
        for t in range(lo, hi + 1):
            out[r.side_cell(tgt, t)] = None
    out.pop(n, None)
    return _edges(n, out, Connectivity.EIGHT, EdgeKind.FAN)


def fan_neighbours_4(r: Rectangle, n: Cell) -> List[MacroEdge]:
    """Single macro edge per side of ``n`` to the directly opposite cell (4-connected)."""
    _require_perimeter(r, n)
    out: Dict[Cell, None] = {}
    for s in r.sides(n):
        t = opposite_target(r, n, s)
        if t is not None and t != n:
            out[t] = None
    return _edges(n, out, Connectivity.FOUR, EdgeKind.FAN)


def constructive_edges(r: Rectangle, n: Cell, conn) -> List[MacroEdge]:
    """Union of the constructive rules for ``n``, one edge per target."""
    if conn == Connectivity.EIGHT:
        rules = (same_side_neighbours(r, n), orthogonal_neighbours(r, n), fan_neighbours(r, n))
    else:
        rules = (same_side_neighbours(r, n), fan_neighbours_4(r, n))
    out: Dict[Cell, MacroEdge] = {}
    for edges in rules:
        for e in edges:
            if e.target not in out or e.cost < out[e.target].cost:
                out[e.target] = e
    return list(out.values())


def is_secondary(r: Rectangle, n: Cell, t: Cell) -> bool:
    """True if ``t`` is on the side opposite ``n``'s (only) side and is not a corner."""
    ns = r.sides(n)
    ts = r.sides(t)
    return len(ns) == 1 and len(ts) == 1 and ts[0] == OPPOSITE[ns[0]]


# -- endpoint insertion ---------------------------------------------------------------


@dataclass
class InsertionOverlay:
    """Search-local edges for start/goal cells that are not active perimeter nodes."""

    forward: Dict[int, List[Tuple[int, float]]] = field(default_factory=dict)
    reverse: Dict[int, List[Tuple[int, float]]] = field(default_factory=dict)
    rect_of: Dict[int, int] = field(default_factory=dict)

    def add(self, node: int, rect_id: int, edges: List[Tuple[int, float]]) -> None:
        self.rect_of[node] = rect_id
        self.forward[node] = list(edges)
        for j, c in edges:
            self.reverse.setdefault(j, []).append((node, c))


def _active_cells(decomp: Decomposition, r: Rectangle) -> List[Cell]:
    info = decomp.info[r.id]
    seen: Dict[Cell, None] = {}
    for side in (TOP, BOTTOM, LEFT, RIGHT):
        for t in info.active_along[side]:
            seen[r.side_cell(side, t)] = None
    return list(seen)


def needs_insertion(decomp: Decomposition, c: Cell, perimeter_reduction: bool = True) -> bool:
    k = decomp.class_of[c[1] * decomp.width + c[0]]
    if k == ACTIVE:
        return False
    return not (k == PRUNED and not perimeter_reduction)


def insert_endpoint(
    decomp: Decomposition, grid: GridMap, c: Cell, perimeter_reduction: bool = True
) -> List[MacroEdge]:
    """Temporary macro edges connecting ``c`` to its rectangle's searchable perimeter.

    Empty if ``c`` is already a search node. In a rectangle with pruned
    perimeter cells ``c`` is linked straight to every active cell; otherwise it
    gets one fan per side (8-connected) or one projection per side (4-connected).
    """
    check_cell(grid, c)
    if not needs_insertion(decomp, c, perimeter_reduction):
        return []
    r = decomp.rect_at(c)
    conn = decomp.conn
    if perimeter_reduction and decomp.info[r.id].n_pruned > 0:
        targets = [t for t in _active_cells(decomp, r) if t != c]
    else:
        out: Dict[Cell, None] = {}
        for side in (TOP, BOTTOM, LEFT, RIGHT):
            if conn == Connectivity.EIGHT:
                fr = fan_range(r, c, side)
                if fr is None:
                    continue
                tgt, lo, hi = fr
                for t in range(lo, hi + 1):
                    out[r.side_cell(tgt, t)] = None
            else:
                if side in HORIZONTAL:
                    t = (c[0], r.y0 if side == TOP else r.y1)
                else:
                    t = (r.x0 if side == LEFT else r.x1, c[1])
                out[t] = None
        out.pop(c, None)
        targets = list(out)
    return _edges(c, targets, conn, EdgeKind.INSERTION)


def build_overlay(
    decomp: Decomposition, grid: GridMap, cells: Iterable[Cell], perimeter_reduction: bool = True
) -> InsertionOverlay:
    overlay = InsertionOverlay()
    W = decomp.width
    for c in dict.fromkeys(cells):
        edges = insert_endpoint(decomp, grid, c, perimeter_reduction)
        if edges or needs_insertion(decomp, c, perimeter_reduction):
            i = c[1] * W + c[0]
            overlay.add(i, decomp.rect_of[i], [(e.target[1] * W + e.target[0], e.cost) for e in edges])
    return overlay


# -- successor generation ---------------------------------------------------------------


def successors(
    decomp: Decomposition,
    overlay: Optional[InsertionOverlay],
    grid: GridMap,
    n: Cell,
    parent_rect: Optional[int] = None,
    online_pruning: bool = True,
    perimeter_reduction: bool = True,
) -> SuccessorSet:
    """Successors of ``n`` in the reduced graph, split into primary and secondary.

    Secondary edges are dropped when online pruning is on and the parent of
    ``n`` lies in the same rectangle.
    """
    check_cell(grid, n)
    W = decomp.width
    i = n[1] * W + n[0]
    overlay = overlay or InsertionOverlay()
    cell = lambda j: (j % W, j // W)  # noqa: E731
    if i in overlay.forward:
        return SuccessorSet(
            [MacroEdge(n, cell(j), c, EdgeKind.INSERTION) for j, c in overlay.forward[i]]
        )
    k = decomp.class_of[i]
    if not (k == ACTIVE or (k == PRUNED and not perimeter_reduction)):
        raise ValueError(f"{n} is not a search node of the reduced graph")
    r = decomp.rect_at(n)
    conn = decomp.conn
    result = SuccessorSet()
    for j, c in grid.adjacency[i]:
        if decomp.rect_of[j] != r.id:
            result.primary.append(MacroEdge(n, cell(j), c, EdgeKind.GRID))

    intra: Dict[Cell, MacroEdge] = {}
    for e in constructive_edges(r, n, conn):
        t = e.target
        if perimeter_reduction and decomp.class_of[t[1] * W + t[0]] != ACTIVE:
            continue
        intra[t] = e
    if perimeter_reduction:
        for t, c in contracted_active_edges(decomp, r, n):
            if t not in intra:
                intra[t] = MacroEdge(n, t, c, EdgeKind.CONTRACTED)
    drop = online_pruning and parent_rect == r.id
    for t, e in intra.items():
        if is_secondary(r, n, t):
            if not drop:
                result.secondary.append(e)
        else:
            result.primary.append(e)
    for j, c in overlay.reverse.get(i, ()):
        result.primary.append(MacroEdge(n, cell(j), c, EdgeKind.INSERTION))
    return result


def intra_edges(
    decomp: Decomposition, r: Rectangle, x: int, y: int, perimeter_reduction: bool
) -> Tuple[List[Tuple[int, float]], List[Tuple[int, float]]]:
    """Fast form of the intra-rectangle part of :func:`successors`.

    Returns ``(primary, secondary)`` lists of ``(cell id, cost)``.
    """
    W = decomp.width
    cls = decomp.class_of
    eight = decomp.conn == Connectivity.EIGHT
    pr = perimeter_reduction
    x0, y0, x1, y1 = r.x0, r.y0, r.x1, r.y1
    top, bottom, left, right = y == y0, y == y1, x == x0, x == x1
    single = (top + bottom + left + right) == 1
    tgt: Dict[int, None] = {}

    def add(tx, ty):
        j = ty * W + tx
        if not pr or cls[j] == ACTIVE:
            tgt[j] = None

    if top or bottom:
        if x > x0:
            add(x - 1, y)
        if x < x1:
            add(x + 1, y)
        if eight:
            if not left:
                d = x - x0
                if y + d <= y1:
                    add(x0, y + d)
                if y - d >= y0:
                    add(x0, y - d)
            if not right:
                d = x1 - x
                if y + d <= y1:
                    add(x1, y + d)
                if y - d >= y0:
                    add(x1, y - d)
    if left or right:
        if y > y0:
            add(x, y - 1)
        if y < y1:
            add(x, y + 1)
        if eight:
            if not top:
                d = y - y0
                if x + d <= x1:
                    add(x + d, y0)
                if x - d >= x0:
                    add(x - d, y0)
            if not bottom:
                d = y1 - y
                if x + d <= x1:
                    add(x + d, y1)
                if x - d >= x0:
                    add(x - d, y1)

    info = decomp.info[r.id] if pr else None
    d_v = y1 - y0
    d_h = x1 - x0
    for side, on in ((TOP, top), (BOTTOM, bottom), (LEFT, left), (RIGHT, right)):
        if not on:
            continue
        horizontal = side == TOP or side == BOTTOM
        d = d_v if horizontal else d_h
        if d <= 0:
            continue
        t = x if horizontal else y
        if eight:
            lo, hi = t - d, t + d
            if horizontal:
                lo, hi = max(lo, x0), min(hi, x1)
            else:
                lo, hi = max(lo, y0), min(hi, y1)
        else:
            lo = hi = t
        opp = OPPOSITE[side]
        if opp == TOP:
            base, step = y0 * W, 1
        elif opp == BOTTOM:
            base, step = y1 * W, 1
        elif opp == LEFT:
            base, step = x0, W
        else:
            base, step = x1, W
        if pr:
            along = info.active_along[opp]
            for a in along[bisect_left(along, lo) : bisect_right(along, hi)]:
                tgt[base + a * step] = None
        else:
            for a in range(lo, hi + 1):
                tgt[base + a * step] = None

    i = y * W + x
    if pr:
        info_ac = info.active_comps.get(i)
        if info_ac:
            for k in info_ac:
                for a in info.comp_actives[k]:
                    tgt[a] = None
    tgt.pop(i, None)

    primary: List[Tuple[int, float]] = []
    secondary: List[Tuple[int, float]] = []
    if single:
        if top:
            opp_row, opp_col = y1, -1
        elif bottom:
            opp_row, opp_col = y0, -1
        elif left:
            opp_row, opp_col = -1, x1
        else:
            opp_row, opp_col = -1, x0
    for j in tgt:
        tx, ty = j % W, j // W
        dx = tx - x if tx > x else x - tx
        dy = ty - y if ty > y else y - ty
        if eight:
            cost = dx + DIAG_EXTRA * dy if dx > dy else dy + DIAG_EXTRA * dx
        else:
            cost = float(dx + dy)
        if single and (
            (ty == opp_row and x0 < tx < x1) or (tx == opp_col and y0 < ty < y1)
        ):
            secondary.append((j, cost))
        else:
            primary.append((j, cost))
    return primary, secondary


def same_rectangle_shortcut(decomp: Decomposition, s: Cell, g: Cell) -> Optional[Path]:
    """Search-free optimal path when ``s`` and ``g`` share a rectangle."""
    W = decomp.width
    rs = decomp.rect_of[s[1] * W + s[0]]
    if rs < 0 or rs != decomp.rect_of[g[1] * W + g[0]]:
        return None
    nodes = diagonal_then_straight(s, g, decomp.conn)
    return Path(nodes, metric_distance(decomp.conn, s, g), SearchStats(expanded=0, generated=0))


# -- dominance oracle ---------------------------------------------------------------------


def clique_oracle(r: Rectangle, conn, max_perimeter: int = 40) -> Dict[Tuple[Cell, Cell], bool]:
    """Perimeter clique of ``r`` with each edge labelled strictly non-dominated or not.

    An edge is strictly non-dominated when every other path between its
    endpoints in the clique is strictly longer. Keys are ``(a, b)`` with ``a < b``.
    """
    perim = r.perimeter()
    if len(perim) > max_perimeter:
        raise ValueError(f"perimeter of {len(perim)} nodes exceeds the oracle limit {max_perimeter}")
    n = len(perim)
    weights = np.array([[metric_distance(conn, a, b) for b in perim] for a in perim])
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            w = weights.copy()
            w[i, j] = w[j, i] = 0.0  # zero means "no edge" for csgraph
            alt = shortest_path(w, method="D", directed=False, indices=i)[j]
            out[(perim[i], perim[j])] = bool(alt > weights[i, j] + 1e-9)
    return out
