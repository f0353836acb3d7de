"""Offline empty-rectangle decomposition, perimeter classification and pruning.

Free space is tiled greedily into disjoint empty rectangles. Perimeter cells
with no grid neighbour in another rectangle are pruned; each rectangle keeps
the connected components of its pruned cells (under the constructive
macro-edge rules) so that the remaining active cells can be wired directly
to each other.
"""

from __future__ import annotations

import enum
import itertools
import re
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .grid import Cell, Connectivity, GridMap, grid_neighbours, metric_distance
from .rect import (
    BOTTOM,
    LEFT,
    RIGHT,
    TOP,
    Rectangle,
    constructive_targets,
    reach_intervals,
)


class NodeClass(enum.IntEnum):
    BLOCKED = 0
    INTERIOR = 1
    PERIMETER_PRUNED = 2
    PERIMETER_ACTIVE = 3


INTERIOR = int(NodeClass.INTERIOR)
PRUNED = int(NodeClass.PERIMETER_PRUNED)
ACTIVE = int(NodeClass.PERIMETER_ACTIVE)


@dataclass
class RectInfo:
    """Per-rectangle offline data.

    ``active_along[side]`` holds the sorted along-side coordinates of the
    active perimeter cells on that side (corners appear on both sides).
    Pruned cells are stored as runs ``(side, lo, hi, component)``; a corner
    may be covered by runs of both its sides. Components are numbered
    0..k-1; ``comp_actives[k]`` lists the flat ids of the active cells
    macro-adjacent to component k.
    """

    active_along: Tuple[List[int], List[int], List[int], List[int]]
    n_pruned: int = 0
    pruned_runs: List[Tuple[int, int, int, int]] = field(default_factory=list)
    comp_actives: List[List[int]] = field(default_factory=list)
    active_comps: Dict[int, Tuple[int, ...]] = field(default_factory=dict)

    def comp_of(self, r: Rectangle, width: int) -> Dict[int, int]:
        """Flat cell id -> component id for every pruned cell."""
        out = {}
        for side, lo, hi, k in self.pruned_runs:
            for t in range(lo, hi + 1):
                x, y = r.side_cell(side, t)
                out[y * width + x] = k
        return out


@dataclass
class Decomposition:
    width: int
    height: int
    conn: Connectivity
    rect_of: List[int]
    rects: Dict[int, Rectangle]
    class_of: bytearray
    info: Dict[int, RectInfo]
    next_id: int = 0

    def rect_at(self, c: Cell) -> Optional[Rectangle]:
        rid = self.rect_of[c[1] * self.width + c[0]]
        return None if rid < 0 else self.rects[rid]

    def node_class(self, c: Cell) -> NodeClass:
        return NodeClass(self.class_of[c[1] * self.width + c[0]])

    def pruned_components(self, rect_id: int) -> List[List[Cell]]:
        info = self.info[rect_id]
        comps: List[List[Cell]] = [[] for _ in info.comp_actives]
        for cid, k in sorted(info.comp_of(self.rects[rect_id], self.width).items()):
            comps[k].append((cid % self.width, cid // self.width))
        return comps

    def counts(self) -> Dict[str, int]:
        c = self.class_of
        return {
            "rectangles": len(self.rects),
            "interior": c.count(INTERIOR),
            "pruned": c.count(PRUNED),
            "active": c.count(ACTIVE),
        }

    def copy(self) -> "Decomposition":
        return Decomposition(
            self.width,
            self.height,
            self.conn,
            list(self.rect_of),
            dict(self.rects),
            bytearray(self.class_of),
            dict(self.info),
            self.next_id,
        )


# -- tiling ------------------------------------------------------------------------


def greedy_tile(avail: List[bytearray], ids: Iterator[int], x_off: int = 0, y_off: int = 0) -> List[Rectangle]:
    """Tile the cells flagged 1 in ``avail`` (rows of a bounding box) with rectangles.

    Row-major: from the first available cell take the widest run to the
    right, then extend down while the whole span stays available. ``avail``
    is consumed.
    """
    rects = []
    n_rows = len(avail)
    for y in range(n_rows):
        row = avail[y]
        x = row.find(1)
        while x != -1:
            end = row.find(0, x)
            if end == -1:
                end = len(row)
            w = end - x
            ones = b"\x01" * w
            y2 = y + 1
            while y2 < n_rows and avail[y2][x:end] == ones:
                y2 += 1
            zeros = bytes(w)
            for yy in range(y, y2):
                avail[yy][x:end] = zeros
            rects.append(Rectangle(next(ids), x + x_off, y + y_off, w, y2 - y))
            x = row.find(1, end)
    return rects


def paint(rect_of: List[int], width: int, rects: Iterable[Rectangle]) -> None:
    for r in rects:
        span = [r.id] * r.w
        for y in range(r.y0, r.y1 + 1):
            start = y * width + r.x0
            rect_of[start : start + r.w] = span


# -- classification -----------------------------------------------------------------


def classify(grid: GridMap, rects: Dict[int, Rectangle], rect_of: Sequence[int]) -> bytearray:
    """Node class of every cell (vectorised over the whole map)."""
    H, W = grid.height, grid.width
    ro = np.asarray(rect_of, dtype=np.int64).reshape(H, W)
    free = np.frombuffer(grid.free, dtype=np.uint8).reshape(H, W).astype(bool)
    covered = ro >= 0
    n_ids = (max(rects) + 1) if rects else 1
    bounds = np.zeros((4, n_ids), dtype=np.int64)
    for r in rects.values():
        bounds[:, r.id] = (r.x0, r.x1, r.y0, r.y1)
    safe = np.where(covered, ro, 0)
    xs = np.arange(W)[None, :]
    ys = np.arange(H)[:, None]
    perim = covered & (
        (xs == bounds[0][safe])
        | (xs == bounds[1][safe])
        | (ys == bounds[2][safe])
        | (ys == bounds[3][safe])
    )

    pro = np.full((H + 2, W + 2), -1, dtype=np.int64)
    pro[1:-1, 1:-1] = np.where(free, ro, -1)

    def shifted(dx, dy):
        return pro[1 + dy : H + 1 + dy, 1 + dx : W + 1 + dx]

    ext = np.zeros((H, W), dtype=bool)
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        nb = shifted(dx, dy)
        ext |= (nb >= 0) & (nb != ro)
    if grid.conn == Connectivity.EIGHT:
        for dx, dy in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            nb = shifted(dx, dy)
            ok = (nb >= 0) & (shifted(dx, 0) >= 0) & (shifted(0, dy) >= 0)
            ext |= ok & (nb != ro)

    cls = np.zeros((H, W), dtype=np.uint8)
    cls[covered & ~perim] = INTERIOR
    cls[perim & ~ext] = PRUNED
    cls[perim & ext] = ACTIVE
    return bytearray(cls.tobytes())


def classify_rect(grid: GridMap, rect_of: Sequence[int], r: Rectangle, class_of: bytearray) -> None:
    """Recompute the classes of one rectangle's cells in place."""
    W, H = grid.width, grid.height
    free = grid.free
    eight = grid.conn == Connectivity.EIGHT
    rid = r.id

    def external(x, y):
        i = y * W + x
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nx, ny = x + dx, y + dy
            if 0 <= nx < W and 0 <= ny < H and free[ny * W + nx] and rect_of[ny * W + nx] != rid:
                return True
        if eight:
            for dx, dy in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                nx, ny = x + dx, y + dy
                if (
                    0 <= nx < W
                    and 0 <= ny < H
                    and free[ny * W + nx]
                    and free[i + dx]
                    and free[ny * W + x]
                    and rect_of[ny * W + nx] != rid
                ):
                    return True
        return False

    for y in range(r.y0, r.y1 + 1):
        row = y * W
        edge_row = y == r.y0 or y == r.y1
        if not edge_row:
            class_of[row + r.x0 + 1 : row + r.x1] = bytes([INTERIOR]) * max(r.w - 2, 0)
            xs = (r.x0, r.x1) if r.w > 1 else (r.x0,)
        else:
            xs = range(r.x0, r.x1 + 1)
        for x in xs:
            class_of[row + x] = ACTIVE if external(x, y) else PRUNED


# -- pruned components ----------------------------------------------------------------


_ACTIVE_RE = re.compile(bytes([ACTIVE]))
_PRUNED_RE = re.compile(bytes([PRUNED]) + b"+")


def _find(parent: List[int], a: int) -> int:
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


def _union(parent: List[int], a: int, b: int) -> None:
    ra, rb = _find(parent, a), _find(parent, b)
    if ra != rb:
        parent[max(ra, rb)] = min(ra, rb)


def _runs(values: List[int]) -> List[Tuple[int, int]]:
    out = []
    for v in values:
        if out and out[-1][1] == v - 1:
            out[-1] = (out[-1][0], v)
        else:
            out.append((v, v))
    return out


def build_rect_info(r: Rectangle, class_of: Sequence[int], width: int, conn) -> RectInfo:
    """Active side lists and pruned components for one rectangle.

    Works on maximal runs of pruned cells along each side rather than on
    individual macro edges: runs meeting at a corner are merged, then any
    two runs joined by a constructive edge, found as interval overlaps.
    """
    W = width
    x0, y0, w, h = r.x0, r.y0, r.w, r.h
    x1, y1 = x0 + w - 1, y0 + h - 1
    base = (y0 * W, y1 * W, x0, x1)
    step = (1, 1, W, W)
    first = (x0, x0, y0, y0)
    strips = (
        class_of[base[0] + x0 : base[0] + x1 + 1],
        class_of[base[1] + x0 : base[1] + x1 + 1],
        class_of[y0 * W + x0 : y1 * W + x0 + 1 : W],
        class_of[y0 * W + x1 : y1 * W + x1 + 1 : W],
    )
    active = tuple(
        [first[s] + m.start() for m in _ACTIVE_RE.finditer(strips[s])] if ACTIVE in strips[s] else []
        for s in range(4)
    )
    info = RectInfo(active)
    # cells shared by two sides: (side a, along a, side b, along b). A one-cell
    # thick rectangle is read from its long side plus its two end cells.
    if w == 1 and h == 1:
        sides, shared = (TOP,), ()
    elif h == 1:
        sides = (TOP, LEFT, RIGHT)
        shared = ((TOP, x0, LEFT, y0), (TOP, x1, RIGHT, y0))
    elif w == 1:
        sides = (LEFT, TOP, BOTTOM)
        shared = ((LEFT, y0, TOP, x0), (LEFT, y1, BOTTOM, x0))
    else:
        sides = (TOP, BOTTOM, LEFT, RIGHT)
        shared = ((TOP, x0, LEFT, y0), (TOP, x1, RIGHT, y0), (BOTTOM, x0, LEFT, y1), (BOTTOM, x1, RIGHT, y1))
    runs: List[Tuple[int, int, int]] = []
    side_runs: Tuple[List[Tuple[int, int, int]], ...] = ([], [], [], [])
    n_pruned = 0
    for s in sides:
        strip = strips[s]
        if s == sides[0]:
            n_pruned = strip.count(PRUNED)
        if PRUNED not in strip:
            continue
        f = first[s]
        for m in _PRUNED_RE.finditer(strip):
            lo, hi = f + m.start(), f + m.end() - 1
            side_runs[s].append((lo, hi, len(runs)))
            runs.append((s, lo, hi))
    if not runs:
        return info
    if len(sides) == 4:
        n_pruned = strips[TOP].count(PRUNED) + strips[BOTTOM].count(PRUNED)
        if h > 2:
            n_pruned += strips[LEFT][1:-1].count(PRUNED) + strips[RIGHT][1:-1].count(PRUNED)

    # few runs per rectangle: plain relabelling beats a union-find here
    label = list(range(len(runs)))

    def merge(i, j):
        a, b = label[i], label[j]
        if a != b:
            for k, v in enumerate(label):
                if v == b:
                    label[k] = a

    for sa, ta, sb, tb in shared:
        ra = [j for lo, hi, j in side_runs[sa] if lo <= ta <= hi]
        rb = [j for lo, hi, j in side_runs[sb] if lo <= tb <= hi]
        if ra and rb:
            merge(ra[0], rb[0])
    # constructive edges are symmetric: the actives a run reaches are exactly
    # the actives macro-adjacent to it
    reached: List[List[int]] = []
    for k, (s, lo, hi) in enumerate(runs):
        cells = []
        for s2, qlo, qhi in reach_intervals(r, s, lo, hi, conn):
            for lo2, hi2, j in side_runs[s2]:
                if lo2 <= qhi and hi2 >= qlo:
                    merge(k, j)
            along = active[s2]
            if along:
                b, st = base[s2], step[s2]
                cells += [b + t * st for t in along[bisect_left(along, qlo) : bisect_right(along, qhi)]]
        reached.append(cells)

    comp_index: Dict[int, int] = {}
    run_comp = []
    for v in label:
        if v not in comp_index:
            comp_index[v] = len(comp_index)
        run_comp.append(comp_index[v])
    active_comps: Dict[int, set] = {}
    for k, cells in enumerate(reached):
        comp = run_comp[k]
        for c in cells:
            got = active_comps.get(c)
            if got is None:
                active_comps[c] = {comp}
            else:
                got.add(comp)
    comp_actives: List[List[int]] = [[] for _ in comp_index]
    for c in sorted(active_comps):
        for k in active_comps[c]:
            comp_actives[k].append(c)
    info.n_pruned = n_pruned
    info.pruned_runs = [(s, lo, hi, run_comp[k]) for k, (s, lo, hi) in enumerate(runs)]
    info.comp_actives = comp_actives
    info.active_comps = {c: tuple(sorted(ks)) for c, ks in active_comps.items()}
    return info


def _shifted(info: RectInfo, dx: int, dy: int, width: int) -> RectInfo:
    off = dy * width + dx
    sh = (dx, dx, dy, dy)  # TOP/BOTTOM positions are x, LEFT/RIGHT are y
    return RectInfo(
        tuple([t + sh[s] for t in info.active_along[s]] for s in range(4)),
        info.n_pruned,
        [(s, lo + sh[s], hi + sh[s], k) for s, lo, hi, k in info.pruned_runs],
        [[c + off for c in cells] for cells in info.comp_actives],
        {c + off: ks for c, ks in info.active_comps.items()},
    )


def build_rect_infos(rects: Iterable[Rectangle], class_of: Sequence[int], width: int, conn) -> Dict[int, RectInfo]:
    """:func:`build_rect_info` for many rectangles, reusing results for repeated patterns.

    The result depends only on the rectangle's size and the classes along
    its perimeter, so rectangles that match up to translation share work.
    """
    W = width
    seen: Dict[tuple, Tuple[Rectangle, RectInfo]] = {}
    out = {}
    for r in rects:
        x0, y0, x1, y1 = r.x0, r.y0, r.x0 + r.w - 1, r.y0 + r.h - 1
        key = (
            r.w,
            r.h,
            bytes(class_of[y0 * W + x0 : y0 * W + x1 + 1]),
            bytes(class_of[y1 * W + x0 : y1 * W + x1 + 1]),
            bytes(class_of[y0 * W + x0 : y1 * W + x0 + 1 : W]),
            bytes(class_of[y0 * W + x1 : y1 * W + x1 + 1 : W]),
        )
        hit = seen.get(key)
        if hit is None:
            info = build_rect_info(r, class_of, W, conn)
            seen[key] = (r, info)
        else:
            r0, info0 = hit
            info = _shifted(info0, r.x0 - r0.x0, r.y0 - r0.y0, W)
        out[r.id] = info
    return out


def pruned_components_bruteforce(r: Rectangle, class_of: Sequence[int], width: int, conn):
    """Reference computation of pruned components from per-cell constructive edges.

    Returns ``(components, adjacency)``: a set of frozensets of pruned cell ids,
    and for each active cell id the frozenset of pruned cells it is
    macro-adjacent to.
    """
    W = width
    perim = r.perimeter()
    pruned = [c for c in perim if class_of[c[1] * W + c[0]] == PRUNED]
    index = {c: k for k, c in enumerate(pruned)}
    parent = list(range(len(pruned)))
    adjacency = {}
    for c in perim:
        targets = [t for t in constructive_targets(r, c, conn) if t in index]
        if c in index:
            for t in targets:
                _union(parent, index[c], index[t])
        else:
            adjacency[c[1] * W + c[0]] = frozenset(t[1] * W + t[0] for t in targets)
    groups: Dict[int, set] = {}
    for c, k in index.items():
        groups.setdefault(_find(parent, k), set()).add(c[1] * W + c[0])
    return {frozenset(g) for g in groups.values()}, adjacency


# -- whole-map decomposition ------------------------------------------------------------


def decompose(grid: GridMap) -> Decomposition:
    """Tile, classify and compute pruned components for ``grid``."""
    W, H = grid.width, grid.height
    free = grid.free
    avail = [bytearray(free[y * W : (y + 1) * W]) for y in range(H)]
    ids = itertools.count()
    rect_list = greedy_tile(avail, ids)
    rects = {r.id: r for r in rect_list}
    rect_of = [-1] * (W * H)
    paint(rect_of, W, rect_list)
    class_of = classify(grid, rects, rect_of)
    info = build_rect_infos(rect_list, class_of, W, grid.conn)
    return Decomposition(W, H, grid.conn, rect_of, rects, class_of, info, len(rect_list))


def contracted_active_edges(decomp: Decomposition, r: Rectangle, n: Cell) -> List[Tuple[Cell, float]]:
    """Direct edges from active cell ``n`` to the actives sharing a pruned component with it."""
    W = decomp.width
    i = n[1] * W + n[0]
    if not r.contains(n) or decomp.rect_of[i] != r.id:
        raise ValueError(f"{n} is not in rectangle {r.id}")
    if decomp.class_of[i] != ACTIVE:
        raise ValueError(f"{n} is not an active perimeter node")
    info = decomp.info[r.id]
    seen = set()
    out = []
    for k in info.active_comps.get(i, ()):
        for a in info.comp_actives[k]:
            if a != i and a not in seen:
                seen.add(a)
                c = (a % W, a // W)
                out.append((c, metric_distance(decomp.conn, n, c)))
    return out


# -- validation / reporting ---------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    violation: Optional[str] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return f"{self.violation}: {self.detail}" if self.detail else self.violation


def validate(decomp: Decomposition, grid: GridMap) -> ValidationReport:
    """Check every decomposition invariant; report the first violation found."""
    W, H = grid.width, grid.height
    if (decomp.width, decomp.height) != (W, H) or len(decomp.rect_of) != W * H:
        return ValidationReport(False, "size mismatch")
    free = grid.free
    cover = [0] * (W * H)
    for rid, r in decomp.rects.items():
        if rid != r.id:
            return ValidationReport(False, "rectangle id mismatch", str(rid))
        if r.w < 1 or r.h < 1 or r.x0 < 0 or r.y0 < 0 or r.x1 >= W or r.y1 >= H:
            return ValidationReport(False, "rectangle out of bounds", str(r))
        for y in range(r.y0, r.y1 + 1):
            for x in range(r.x0, r.x1 + 1):
                i = y * W + x
                if not free[i]:
                    return ValidationReport(False, "rectangle covers blocked cell", f"{r} at {(x, y)}")
                if cover[i]:
                    return ValidationReport(False, "overlap", f"{r} at {(x, y)}")
                cover[i] = 1
    for i in range(W * H):
        c = (i % W, i // W)
        rid = decomp.rect_of[i]
        if not free[i]:
            if rid != -1 or decomp.class_of[i] != NodeClass.BLOCKED:
                return ValidationReport(False, "blocked cell assigned", str(c))
            continue
        if not cover[i]:
            return ValidationReport(False, "free cell not covered", str(c))
        r = decomp.rects.get(rid)
        if r is None or not r.contains(c):
            return ValidationReport(False, "cell not covered by its rectangle", f"{c} -> {rid}")
    for r in decomp.rects.values():
        for c in r.cells():
            if not r.on_perimeter(c):
                want = NodeClass.INTERIOR
            elif any(decomp.rect_of[n[1] * W + n[0]] != r.id for n, _ in grid_neighbours(grid, c)):
                want = NodeClass.PERIMETER_ACTIVE
            else:
                want = NodeClass.PERIMETER_PRUNED
            got = decomp.class_of[c[1] * W + c[0]]
            if got != want:
                return ValidationReport(
                    False, "node class mismatch", f"{c}: {NodeClass(got).name} != {want.name}"
                )
    for rid, r in decomp.rects.items():
        info = decomp.info.get(rid)
        if info is None:
            return ValidationReport(False, "missing rectangle info", str(rid))
        comps, adjacency = pruned_components_bruteforce(r, decomp.class_of, W, decomp.conn)
        stored = [set() for _ in info.comp_actives]
        for c, k in info.comp_of(r, W).items():
            stored[k].add(c)
        if {frozenset(s) for s in stored} != comps or sum(map(len, stored)) != info.n_pruned:
            return ValidationReport(False, "pruned components do not partition pruned nodes", str(r))
        for a, targets in adjacency.items():
            got = set()
            for k in info.active_comps.get(a, ()):
                got |= stored[k]
            want = set()
            for comp in comps:
                if comp & targets:
                    want |= comp
            if got != want:
                return ValidationReport(
                    False, "active component adjacency mismatch", f"{(a % W, a // W)} in {r}"
                )
        for side in (TOP, BOTTOM, LEFT, RIGHT):
            lo, hi = r.side_range(side)
            want = [
                t for t in range(lo, hi + 1)
                if decomp.class_of[_side_id(r, side, t, W)] == ACTIVE
            ]
            if info.active_along[side] != want:
                return ValidationReport(False, "active side list mismatch", str(r))
    return ValidationReport(True)


def _side_id(r: Rectangle, side: int, t: int, W: int) -> int:
    x, y = r.side_cell(side, t)
    return y * W + x


def dump(decomp: Decomposition) -> str:
    """Text dump: ``rect <id> <x0> <y0> <w> <h>`` lines, then ``pruned <id> <count>`` lines."""
    lines = [f"rect {r.id} {r.x0} {r.y0} {r.w} {r.h}" for r in sorted(decomp.rects.values(), key=lambda r: r.id)]
    lines += [f"pruned {rid} {decomp.info[rid].n_pruned}" for rid in sorted(decomp.rects)]
    return "\n".join(lines) + ("\n" if lines else "")
