"""Empty-rectangle geometry: sides, perimeter walks and constructive macro targets.

Sides are numbered TOP, BOTTOM, LEFT, RIGHT. A position along a side is the
x coordinate for TOP/BOTTOM and the y coordinate for LEFT/RIGHT.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from .grid import Cell, Connectivity

TOP, BOTTOM, LEFT, RIGHT = 0, 1, 2, 3
SIDE_NAMES = ("top", "bottom", "left", "right")
OPPOSITE = (BOTTOM, TOP, RIGHT, LEFT)
HORIZONTAL = frozenset((TOP, BOTTOM))


@dataclass(frozen=True)
class Rectangle:
    id: int
    x0: int
    y0: int
    w: int
    h: int

    @property
    def x1(self) -> int:
        return self.x0 + self.w - 1

    @property
    def y1(self) -> int:
        return self.y0 + self.h - 1

    @property
    def area(self) -> int:
        return self.w * self.h

    def contains(self, c: Cell) -> bool:
        return self.x0 <= c[0] <= self.x1 and self.y0 <= c[1] <= self.y1

    def sides(self, c: Cell) -> Tuple[int, ...]:
        x, y = c
        out = []
        if y == self.y0:
            out.append(TOP)
        if y == self.y1:
            out.append(BOTTOM)
        if x == self.x0:
            out.append(LEFT)
        if x == self.x1:
            out.append(RIGHT)
        return tuple(out)

    def on_perimeter(self, c: Cell) -> bool:
        x, y = c
        return self.contains(c) and (
            x == self.x0 or x == self.x1 or y == self.y0 or y == self.y1
        )

    def is_corner(self, c: Cell) -> bool:
        return len(self.sides(c)) >= 2

    def side_range(self, side: int) -> Tuple[int, int]:
        if side in HORIZONTAL:
            return self.x0, self.x1
        return self.y0, self.y1

    def side_cell(self, side: int, t: int) -> Cell:
        if side == TOP:
            return (t, self.y0)
        if side == BOTTOM:
            return (t, self.y1)
        if side == LEFT:
            return (self.x0, t)
        return (self.x1, t)

    def along(self, side: int, c: Cell) -> int:
        return c[0] if side in HORIZONTAL else c[1]

    def span(self, side: int) -> int:
        """Perpendicular distance from ``side`` to its opposite side."""
        return self.h - 1 if side in HORIZONTAL else self.w - 1

    def cells(self) -> Iterator[Cell]:
        for y in range(self.y0, self.y1 + 1):
            for x in range(self.x0, self.x1 + 1):
                yield (x, y)

    def perimeter(self) -> List[Cell]:
        """Perimeter cells, each listed once, in row-major order."""
        return [c for c in self.cells() if self.on_perimeter(c)]

    def interior_count(self) -> int:
        return max(self.w - 2, 0) * max(self.h - 2, 0)


def _clip(lo: int, hi: int, bounds: Tuple[int, int]) -> Optional[Tuple[int, int]]:
    lo = max(lo, bounds[0])
    hi = min(hi, bounds[1])
    return (lo, hi) if lo <= hi else None


def same_side_targets(r: Rectangle, c: Cell) -> List[Cell]:
    x, y = c
    out = []
    sides = r.sides(c)
    if TOP in sides or BOTTOM in sides:
        for nx in (x - 1, x + 1):
            if r.x0 <= nx <= r.x1:
                out.append((nx, y))
    if LEFT in sides or RIGHT in sides:
        for ny in (y - 1, y + 1):
            if r.y0 <= ny <= r.y1:
                out.append((x, ny))
    return out


def diagonal_hit_targets(r: Rectangle, c: Cell) -> List[Cell]:
    """Cells on sides orthogonal to ``c``'s side(s) reached by a pure 45-degree line."""
    x, y = c
    sides = r.sides(c)
    out = []
    if TOP in sides or BOTTOM in sides:
        for s, dist in ((LEFT, x - r.x0), (RIGHT, r.x1 - x)):
            if s in sides or dist <= 0:
                continue
            for ny in (y - dist, y + dist):
                if r.y0 <= ny <= r.y1:
                    out.append(r.side_cell(s, ny))
    if LEFT in sides or RIGHT in sides:
        for s, dist in ((TOP, y - r.y0), (BOTTOM, r.y1 - y)):
            if s in sides or dist <= 0:
                continue
            for nx in (x - dist, x + dist):
                if r.x0 <= nx <= r.x1:
                    out.append(r.side_cell(s, nx))
    return out


def fan_range(r: Rectangle, c: Cell, side: int) -> Optional[Tuple[int, int, int]]:
    """Fan of ``c`` from ``side`` onto the opposite side: ``(opposite, lo, hi)``.

    ``c`` need not lie on ``side``; for an interior cell the fan is cast onto
    ``side`` itself using the cell's distance to it. Returns None when the
    distance is zero.
    """
    x, y = c
    if side == TOP:
        target, d, t = (BOTTOM, r.y1 - y, x) if y == r.y0 else (TOP, y - r.y0, x)
    elif side == BOTTOM:
        target, d, t = (TOP, y - r.y0, x) if y == r.y1 else (BOTTOM, r.y1 - y, x)
    elif side == LEFT:
        target, d, t = (RIGHT, r.x1 - x, y) if x == r.x0 else (LEFT, x - r.x0, y)
    else:
        target, d, t = (LEFT, x - r.x0, y) if x == r.x1 else (RIGHT, r.x1 - x, y)
    if d <= 0:
        return None
    span = _clip(t - d, t + d, r.side_range(target))
    return (target, span[0], span[1])


def opposite_target(r: Rectangle, c: Cell, side: int) -> Optional[Cell]:
    """Directly opposite perimeter cell across ``side`` (4-connected macro edge)."""
    if r.span(side) <= 0:
        return None
    target = OPPOSITE[side]
    return r.side_cell(target, r.along(side, c))


def constructive_targets(r: Rectangle, c: Cell, conn) -> List[Cell]:
    """All perimeter targets of the constructive macro-edge rules, deduplicated."""
    out = dict.fromkeys(same_side_targets(r, c))
    sides = r.sides(c)
    if conn == Connectivity.EIGHT:
        out.update(dict.fromkeys(diagonal_hit_targets(r, c)))
        for s in sides:
            fr = fan_range(r, c, s)
            if fr is not None:
                tgt, lo, hi = fr
                for t in range(lo, hi + 1):
                    out[r.side_cell(tgt, t)] = None
    else:
        for s in sides:
            o = opposite_target(r, c, s)
            if o is not None:
                out[o] = None
    out.pop(c, None)
    return list(out)


def reach_intervals(r: Rectangle, side: int, a: int, b: int, conn) -> List[Tuple[int, int, int]]:
    """Intervals ``(side, lo, hi)`` reached by constructive edges from cells ``a..b`` of ``side``.

    Interval form of :func:`constructive_targets`, used to compute
    connectivity between runs of perimeter cells without per-cell edges.
    May include the source cells themselves.
    """
    x0, y0 = r.x0, r.y0
    x1, y1 = x0 + r.w - 1, y0 + r.h - 1
    horizontal = side == TOP or side == BOTTOM
    lo_b, hi_b = (x0, x1) if horizontal else (y0, y1)
    out = [(side, a - 1 if a > lo_b else a, b + 1 if b < hi_b else b)]
    d = (y1 - y0) if horizontal else (x1 - x0)
    if d >= 1:
        if conn == Connectivity.EIGHT:
            lo, hi = max(a - d, lo_b), min(b + d, hi_b)
        else:
            lo, hi = a, b
        out.append((OPPOSITE[side], lo, hi))
    if conn != Connectivity.EIGHT:
        return out
    # 45-degree hits: distance to the orthogonal side becomes the offset along it
    if horizontal:
        c = y0 if side == TOP else y1
        pairs = ((LEFT, a - x0, b - x0), (RIGHT, x1 - b, x1 - a))
        ob_lo, ob_hi = y0, y1
    else:
        c = x0 if side == LEFT else x1
        pairs = ((TOP, a - y0, b - y0), (BOTTOM, y1 - b, y1 - a))
        ob_lo, ob_hi = x0, x1
    for s, d_lo, d_hi in pairs:
        lo, hi = max(c + d_lo, ob_lo), min(c + d_hi, ob_hi)
        if lo <= hi:
            out.append((s, lo, hi))
        lo, hi = max(c - d_hi, ob_lo), min(c - d_lo, ob_hi)
        if lo <= hi:
            out.append((s, lo, hi))
    return out


def diagonal_then_straight(a: Cell, b: Cell, conn=Connectivity.EIGHT) -> List[Cell]:
    """Canonical step sequence from ``a`` to ``b``: diagonal moves first, then straight.

    On 4-connected grids all horizontal steps come before the vertical ones.
    """
    x, y = a
    dx = b[0] - x
    dy = b[1] - y
    sx = (dx > 0) - (dx < 0)
    sy = (dy > 0) - (dy < 0)
    if conn == Connectivity.FOUR:
        out = [a]
        for _ in range(abs(dx)):
            x += sx
            out.append((x, y))
        for _ in range(abs(dy)):
            y += sy
            out.append((x, y))
        return out
    n_diag = min(abs(dx), abs(dy))
    out = [a]
    for _ in range(n_diag):
        x += sx
        y += sy
        out.append((x, y))
    if abs(dx) > abs(dy):
        for _ in range(abs(dx) - n_diag):
            x += sx
            out.append((x, y))
    else:
        for _ in range(abs(dy) - n_diag):
            y += sy
            out.append((x, y))
    return out
