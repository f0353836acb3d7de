"""A* over the symmetry-reduced graph, plain-grid baselines and path refinement."""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .decomposition import Decomposition
from .grid import DIAG_EXTRA, SQRT2, Cell, Connectivity, GridMap, check_cell, metric_distance
from .macro import build_overlay, intra_edges, same_rectangle_shortcut
from .path import Path, SearchStats
from .rect import diagonal_then_straight


@dataclass(frozen=True)
class SearchOptions:
    online_pruning: bool = True
    perimeter_reduction: bool = True


FLAG_MATRIX = tuple(
    SearchOptions(online_pruning=op, perimeter_reduction=pr)
    for pr in (True, False)
    for op in (True, False)
)


def _heuristic(conn, W: int, goal: int) -> Callable[[int], float]:
    gx, gy = goal % W, goal // W
    if conn == Connectivity.FOUR:
        def h(i):
            x, y = i % W, i // W
            return float(abs(x - gx) + abs(y - gy))
    else:
        def h(i):
            dx = abs(i % W - gx)
            dy = abs(i // W - gy)
            return dx + DIAG_EXTRA * dy if dx > dy else dy + DIAG_EXTRA * dx
    return h


def _trace(parent: Dict[int, int], goal: int, W: int) -> List[Cell]:
    out = []
    i = goal
    while i != -1:
        out.append((i % W, i // W))
        i = parent[i]
    out.reverse()
    return out


def astar_rsr(
    grid: GridMap,
    decomp: Decomposition,
    start: Cell,
    goal: Cell,
    options: SearchOptions = SearchOptions(),
) -> Optional[Path]:
    """Optimal path from ``start`` to ``goal`` over the reduced graph, or None.

    The returned nodes are macro-path vertices; see :func:`refine_path`.
    """
    check_cell(grid, start, "start")
    check_cell(grid, goal, "goal")
    t0 = time.perf_counter()
    shortcut = same_rectangle_shortcut(decomp, start, goal)
    if shortcut is not None:
        shortcut.stats.elapsed = time.perf_counter() - t0
        return shortcut

    W = grid.width
    pr = options.perimeter_reduction
    op = options.online_pruning
    overlay = build_overlay(decomp, grid, (start, goal), pr)
    forward, reverse = overlay.forward, overlay.reverse
    rect_of = decomp.rect_of
    rects = decomp.rects
    adj = grid.adjacency
    s = start[1] * W + start[0]
    t = goal[1] * W + goal[0]
    h = _heuristic(decomp.conn, W, t)

    g_best = {s: 0.0}
    parent = {s: -1}
    parent_rect = {s: -1}
    closed = set()
    heap = [(h(s), -0.0, start[0], start[1], s)]
    expanded = generated = 0
    found = False
    while heap:
        f, neg_g, _, _, u = heapq.heappop(heap)
        if u in closed:
            continue
        g = -neg_g
        if g > g_best[u]:
            continue
        closed.add(u)
        if u == t:
            found = True
            break
        expanded += 1
        ru = rect_of[u]
        fw = forward.get(u)
        if fw is not None:
            edges = fw
        else:
            edges = [(j, c) for j, c in adj[u] if rect_of[j] != ru]
            primary, secondary = intra_edges(decomp, rects[ru], u % W, u // W, pr)
            edges += primary
            if not (op and parent_rect[u] == ru):
                edges += secondary
            rv = reverse.get(u)
            if rv:
                edges += rv
        for v, c in edges:
            if v in closed:
                continue
            ng = g + c
            old = g_best.get(v)
            if old is None or ng < old - 1e-12:
                g_best[v] = ng
                parent[v] = u
                parent_rect[v] = ru
                generated += 1
                heapq.heappush(heap, (ng + h(v), -ng, v % W, v // W, v))
    elapsed = time.perf_counter() - t0
    if not found:
        return None
    return Path(_trace(parent, t, W), g_best[t], SearchStats(expanded, generated, elapsed))


def astar_plain(grid: GridMap, start: Cell, goal: Cell) -> Optional[Path]:
    """Textbook A* on raw grid edges with the same heuristic and tie-breaking."""
    check_cell(grid, start, "start")
    check_cell(grid, goal, "goal")
    t0 = time.perf_counter()
    W = grid.width
    adj = grid.adjacency
    s = start[1] * W + start[0]
    t = goal[1] * W + goal[0]
    h = _heuristic(grid.conn, W, t)
    g_best = {s: 0.0}
    parent = {s: -1}
    closed = set()
    heap = [(h(s), -0.0, start[0], start[1], s)]
    expanded = generated = 0
    found = False
    while heap:
        f, neg_g, _, _, u = heapq.heappop(heap)
        if u in closed:
            continue
        g = -neg_g
        if g > g_best[u]:
            continue
        closed.add(u)
        if u == t:
            found = True
            break
        expanded += 1
        for v, c in adj[u]:
            if v in closed:
                continue
            ng = g + c
            old = g_best.get(v)
            if old is None or ng < old - 1e-12:
                g_best[v] = ng
                parent[v] = u
                generated += 1
                heapq.heappush(heap, (ng + h(v), -ng, v % W, v // W, v))
    elapsed = time.perf_counter() - t0
    if not found:
        return None
    return Path(_trace(parent, t, W), g_best[t], SearchStats(expanded, generated, elapsed))


def grid_graph(grid: GridMap) -> csr_matrix:
    """Sparse adjacency matrix of the raw grid, built independently of ``GridMap.adjacency``."""
    H, W = grid.height, grid.width
    free = np.frombuffer(grid.free, dtype=np.uint8).reshape(H, W).astype(bool)
    ys, xs = np.nonzero(free)

    def ok(x, y):
        inside = (x >= 0) & (x < W) & (y >= 0) & (y < H)
        out = np.zeros(x.shape, dtype=bool)
        out[inside] = free[y[inside], x[inside]]
        return out

    steps = [(1, 0, 1.0), (0, 1, 1.0)]
    if grid.conn == Connectivity.EIGHT:
        steps += [(1, 1, SQRT2), (-1, 1, SQRT2)]
    rows, cols, vals = [], [], []
    for dx, dy, cost in steps:
        nx, ny = xs + dx, ys + dy
        valid = ok(nx, ny)
        if dx and dy:
            valid &= ok(xs + dx, ys) & ok(xs, ys + dy)
        rows.append(ys[valid] * W + xs[valid])
        cols.append(ny[valid] * W + nx[valid])
        vals.append(np.full(int(valid.sum()), cost))
    r, c, v = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    return csr_matrix(
        (np.concatenate([v, v]), (np.concatenate([r, c]), np.concatenate([c, r]))),
        shape=(H * W, H * W),
    )


def dijkstra_plain(grid: GridMap, source: Cell) -> np.ndarray:
    """Exact single-source distances over raw grid edges, shape (H, W); inf if unreached."""
    check_cell(grid, source, "source")
    dist = dijkstra(grid_graph(grid), directed=False, indices=grid.cell_id(source))
    return dist.reshape(grid.height, grid.width)


def refine_path(path: Path, grid: GridMap) -> Path:
    """Expand every macro edge into unit grid steps (diagonal first, then straight)."""
    if not path.nodes:
        return Path([], path.cost, path.stats)
    cells = [path.nodes[0]]
    cost = 0.0
    for a, b in zip(path.nodes, path.nodes[1:]):
        steps = diagonal_then_straight(a, b, grid.conn)
        cells.extend(steps[1:])
        cost += metric_distance(grid.conn, a, b)
    return Path(cells, cost, path.stats)


def path_cost(cells: List[Cell]) -> float:
    """Sum of unit step costs along a cell-by-cell path."""
    total = 0.0
    for a, b in zip(cells, cells[1:]):
        total += SQRT2 if a[0] != b[0] and a[1] != b[1] else 1.0
    return total
