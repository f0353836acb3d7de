"""Grid map model, movement metrics and map/scenario file I/O.

Cells are ``(x, y)`` tuples with ``x`` the column (left to right) and ``y``
the row (top to bottom). Internally a cell is also addressed by its flat id
``y * width + x``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

SQRT2 = math.sqrt(2.0)
DIAG_EXTRA = SQRT2 - 1.0

TRAVERSABLE_CHARS = frozenset(".G")
BLOCKED_CHARS = frozenset("@OTSW")
KNOWN_CHARS = TRAVERSABLE_CHARS | BLOCKED_CHARS

Cell = Tuple[int, int]

ORTHOGONAL_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))
DIAGONAL_STEPS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


class Connectivity(enum.IntEnum):
    FOUR = 4
    EIGHT = 8

    @classmethod
    def parse(cls, value) -> "Connectivity":
        try:
            return cls(int(value))
        except (TypeError, ValueError):
            raise ValueError(f"connectivity must be 4 or 8, got {value!r}") from None


class MapFormatError(ValueError):
    """Raised for malformed map or scenario text."""


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    terrain: bytes
    conn: Connectivity = Connectivity.EIGHT

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("map dimensions must be positive")
        if len(self.terrain) != self.width * self.height:
            raise ValueError("terrain size does not match width*height")
        object.__setattr__(self, "conn", Connectivity(self.conn))

    @classmethod
    def from_rows(cls, rows: Sequence[str], conn=Connectivity.EIGHT) -> "GridMap":
        if not rows:
            raise ValueError("map needs at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged rows")
        return cls(width, len(rows), "".join(rows).encode("ascii"), conn)

    @classmethod
    def empty(cls, width: int, height: int, conn=Connectivity.EIGHT) -> "GridMap":
        return cls(width, height, b"." * (width * height), conn)

    def with_conn(self, conn) -> "GridMap":
        return GridMap(self.width, self.height, self.terrain, Connectivity(conn))

    @cached_property
    def free(self) -> bytes:
        """Row-major traversability flags, one byte (0/1) per cell."""
        table = bytes(1 if chr(i) in TRAVERSABLE_CHARS else 0 for i in range(256))
        return self.terrain.translate(table)

    @property
    def size(self) -> int:
        return self.width * self.height

    def cell_id(self, c: Cell) -> int:
        return c[1] * self.width + c[0]

    def cell_of(self, i: int) -> Cell:
        return (i % self.width, i // self.width)

    def in_bounds(self, c: Cell) -> bool:
        return 0 <= c[0] < self.width and 0 <= c[1] < self.height

    def traversable(self, c: Cell) -> bool:
        return self.in_bounds(c) and self.free[c[1] * self.width + c[0]] == 1

    def free_count(self) -> int:
        return self.free.count(1)

    def rows(self) -> List[str]:
        t = self.terrain.decode("ascii")
        w = self.width
        return [t[i : i + w] for i in range(0, len(t), w)]

    def set_cell(self, c: Cell, traversable: bool) -> "GridMap":
        """Copy of the map with one cell toggled to '.' or '@'."""
        buf = bytearray(self.terrain)
        buf[self.cell_id(c)] = ord(".") if traversable else ord("@")
        return GridMap(self.width, self.height, bytes(buf), self.conn)

    @cached_property
    def adjacency(self) -> List[List[Tuple[int, float]]]:
        """Per-cell list of ``(neighbour id, step cost)`` over raw grid edges."""
        w, h, free = self.width, self.height, self.free
        diag = self.conn == Connectivity.EIGHT
        adj: List[List[Tuple[int, float]]] = [[] for _ in range(w * h)]
        for y in range(h):
            row = y * w
            for x in range(w):
                i = row + x
                if not free[i]:
                    continue
                out = adj[i]
                l = x > 0 and free[i - 1]
                r = x < w - 1 and free[i + 1]
                u = y > 0 and free[i - w]
                d = y < h - 1 and free[i + w]
                if r:
                    out.append((i + 1, 1.0))
                if l:
                    out.append((i - 1, 1.0))
                if d:
                    out.append((i + w, 1.0))
                if u:
                    out.append((i - w, 1.0))
                if diag:
                    if r and d and free[i + w + 1]:
                        out.append((i + w + 1, SQRT2))
                    if r and u and free[i - w + 1]:
                        out.append((i - w + 1, SQRT2))
                    if l and d and free[i + w - 1]:
                        out.append((i + w - 1, SQRT2))
                    if l and u and free[i - w - 1]:
                        out.append((i - w - 1, SQRT2))
        return adj


def grid_neighbours(grid: GridMap, c: Cell) -> List[Tuple[Cell, float]]:
    """Traversable neighbours of ``c`` with step costs.

    Diagonal steps need both flanking orthogonal cells free (no corner cutting).
    """
    if not grid.in_bounds(c):
        raise ValueError(f"cell {c} out of bounds")
    if not grid.traversable(c):
        raise ValueError(f"cell {c} is blocked")
    x, y = c
    out = []
    for dx, dy in ORTHOGONAL_STEPS:
        n = (x + dx, y + dy)
        if grid.traversable(n):
            out.append((n, 1.0))
    if grid.conn == Connectivity.EIGHT:
        for dx, dy in DIAGONAL_STEPS:
            n = (x + dx, y + dy)
            if (
                grid.traversable(n)
                and grid.traversable((x + dx, y))
                and grid.traversable((x, y + dy))
            ):
                out.append((n, SQRT2))
    return out


def metric_distance(conn, a: Cell, b: Cell) -> float:
    """Manhattan distance for 4-connected grids, octile distance for 8-connected."""
    dx = abs(a[0] - b[0])
    dy = abs(a[1] - b[1])
    if conn == Connectivity.FOUR:
        return float(dx + dy)
    if dx > dy:
        return dx + DIAG_EXTRA * dy
    return dy + DIAG_EXTRA * dx


def scale_map(grid: GridMap, k: int) -> GridMap:
    """Replace every cell by a k-by-k block of the same terrain."""
    if k < 1:
        raise ValueError("scale factor must be >= 1")
    if k == 1:
        return grid
    rows = []
    for row in grid.rows():
        wide = "".join(ch * k for ch in row)
        rows.extend([wide] * k)
    return GridMap.from_rows(rows, grid.conn)


# -- map files ---------------------------------------------------------------


def _header_value(line: str, key: str) -> int:
    parts = line.split()
    if len(parts) != 2 or parts[0] != key:
        raise MapFormatError(f"malformed header: expected '{key} <int>', got {line!r}")
    try:
        value = int(parts[1])
    except ValueError:
        raise MapFormatError(f"malformed header: {line!r}") from None
    if value < 1:
        raise MapFormatError(f"malformed header: non-positive {key}")
    return value


def parse_map(text: str, conn=Connectivity.EIGHT, strict: bool = True) -> GridMap:
    """Parse a map in the ``type octile`` text format.

    With ``strict=False`` unknown terrain characters are kept and read as
    blocked instead of raising.
    """
    lines = text.split("\n")
    if len(lines) < 4:
        raise MapFormatError("malformed header: too few lines")
    lines = [ln.rstrip("\r") for ln in lines]
    if lines[0].split() != ["type", "octile"]:
        raise MapFormatError(f"malformed header: {lines[0]!r}")
    height = _header_value(lines[1], "height")
    width = _header_value(lines[2], "width")
    if lines[3].strip() != "map":
        raise MapFormatError(f"malformed header: expected 'map', got {lines[3]!r}")
    body = lines[4:]
    while body and body[-1] == "":
        body.pop()
    if len(body) != height:
        raise MapFormatError(f"row count mismatch: header says {height}, found {len(body)}")
    for y, row in enumerate(body):
        if len(row) != width:
            raise MapFormatError(
                f"row length mismatch on row {y}: expected {width}, found {len(row)}"
            )
        if strict:
            bad = set(row) - KNOWN_CHARS
            if bad:
                raise MapFormatError(
                    f"unknown terrain character {sorted(bad)[0]!r} on row {y}"
                )
    try:
        terrain = "".join(body).encode("ascii")
    except UnicodeEncodeError:
        raise MapFormatError("unknown terrain character (non-ascii)") from None
    return GridMap(width, height, terrain, conn)


def serialize_map(grid: GridMap) -> str:
    head = f"type octile\nheight {grid.height}\nwidth {grid.width}\nmap\n"
    return head + "".join(row + "\n" for row in grid.rows())


def read_map(path, conn=Connectivity.EIGHT, strict: bool = True) -> GridMap:
    return parse_map(Path(path).read_text(), conn, strict)


def write_map(grid: GridMap, path) -> None:
    Path(path).write_text(serialize_map(grid))


# -- scenario files ------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioEntry:
    bucket: int
    map_path: str
    width: int
    height: int
    start: Cell
    goal: Cell
    optimal_cost: float = field(default=float("nan"), compare=False)


def parse_scenario(text: str) -> List[ScenarioEntry]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split() != ["version", "1"]:
        raise MapFormatError("scenario must start with 'version 1'")
    out = []
    for n, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 9:
            raise MapFormatError(f"scenario line {n}: expected 9 fields, got {len(parts)}")
        try:
            b, w, h, sx, sy, gx, gy = (int(parts[i]) for i in (0, 2, 3, 4, 5, 6, 7))
            cost = float(parts[8])
        except ValueError:
            raise MapFormatError(f"scenario line {n}: bad number") from None
        out.append(ScenarioEntry(b, parts[1], w, h, (sx, sy), (gx, gy), cost))
    return out


def serialize_scenario(entries: Iterable[ScenarioEntry]) -> str:
    lines = ["version 1"]
    for e in entries:
        lines.append(
            f"{e.bucket}\t{e.map_path}\t{e.width}\t{e.height}\t"
            f"{e.start[0]}\t{e.start[1]}\t{e.goal[0]}\t{e.goal[1]}\t{e.optimal_cost:.8f}"
        )
    return "\n".join(lines) + "\n"


def read_scenario(path) -> List[ScenarioEntry]:
    return parse_scenario(Path(path).read_text())


def free_cells(grid: GridMap) -> List[Cell]:
    w = grid.width
    return [(i % w, i // w) for i, f in enumerate(grid.free) if f]


def check_cell(grid: GridMap, c: Cell, what: str = "cell") -> None:
    if not grid.in_bounds(c):
        raise ValueError(f"{what} {c} out of bounds")
    if not grid.traversable(c):
        raise ValueError(f"{what} {c} is blocked")


def parse_cell(text: str) -> Optional[Cell]:
    parts = text.replace(",", " ").split()
    if len(parts) != 2:
        return None
    return (int(parts[0]), int(parts[1]))
