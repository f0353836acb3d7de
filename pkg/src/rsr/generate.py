"""Synthetic benchmark maps and random problem instances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import ndimage

from .grid import Cell, Connectivity, GridMap, metric_distance, scale_map


@dataclass(frozen=True)
class GenSpec:
    kind: str = "empty"  # empty | random | rooms
    size: int = 64
    seed: int = 0
    density: float = 0.0  # random: obstacle probability per cell
    room: int = 7  # rooms: side length of each room
    door_p: float = 0.5  # rooms: probability of a door in each wall segment
    scale: int = 1

    def __post_init__(self):
        if self.kind not in ("empty", "random", "rooms"):
            raise ValueError(f"unknown map kind {self.kind!r}")
        if self.size < 1 or self.scale < 1:
            raise ValueError("size and scale must be positive")
        if not 0.0 <= self.density < 1.0:
            raise ValueError("density must be in [0, 1)")
        if self.room < 3:
            raise ValueError("room side must be >= 3")
        if not 0.0 <= self.door_p <= 1.0:
            raise ValueError("door_p must be in [0, 1]")


def _rooms(size: int, room: int, door_p: float, rng: np.random.Generator) -> np.ndarray:
    """Lattice of room x room open areas separated by one-cell walls.

    Each wall segment between two neighbouring rooms gets a one-cell door
    with probability ``door_p``; a room left without any door gets one in a
    random segment.
    """
    pitch = room + 1
    blocked = np.zeros((size, size), dtype=bool)
    blocked[room::pitch, :] = True
    blocked[:, room::pitch] = True
    n = math.ceil(size / pitch)

    def extent(k):
        lo = k * pitch
        return lo, min(lo + room, size)

    # ("v", i, j): wall between rooms (i, j) and (i + 1, j); ("h", i, j): between (i, j) and (i, j + 1)
    segments = []
    for j in range(n):
        for i in range(n):
            if (i + 1) * pitch < size:
                segments.append(("v", i, j))
            if (j + 1) * pitch < size:
                segments.append(("h", i, j))
    doors = {s: rng.random() < door_p for s in segments}

    def segment_rooms(seg):
        kind, i, j = seg
        return [(i, j), (i + 1, j)] if kind == "v" else [(i, j), (i, j + 1)]

    has_door = {}
    for seg, open_ in doors.items():
        if open_:
            for rm in segment_rooms(seg):
                has_door[rm] = True
    for seg in segments:
        for rm in segment_rooms(seg):
            has_door.setdefault(rm, False)
    for rm in sorted(has_door):
        if not has_door[rm]:
            options = [s for s in segments if rm in segment_rooms(s)]
            seg = options[int(rng.integers(len(options)))]
            doors[seg] = True
            for r2 in segment_rooms(seg):
                has_door[r2] = True

    for seg in segments:
        if not doors[seg]:
            continue
        kind, i, j = seg
        if kind == "v":
            wx = (i + 1) * pitch - 1
            lo, hi = extent(j)
            y = lo + int(rng.integers(hi - lo))
            blocked[y, wx] = False
        else:
            wy = (j + 1) * pitch - 1
            lo, hi = extent(i)
            x = lo + int(rng.integers(hi - lo))
            blocked[wy, x] = False
    return blocked


def generate_map(spec: GenSpec, conn=Connectivity.EIGHT) -> GridMap:
    rng = np.random.default_rng(spec.seed)
    n = spec.size
    if spec.kind == "empty":
        blocked = np.zeros((n, n), dtype=bool)
    elif spec.kind == "random":
        blocked = rng.random((n, n)) < spec.density
    else:
        blocked = _rooms(n, spec.room, spec.door_p, rng)
    chars = np.where(blocked, ord("@"), ord(".")).astype(np.uint8)
    grid = GridMap(n, n, chars.tobytes(), conn)
    return scale_map(grid, spec.scale)


def components(grid: GridMap) -> np.ndarray:
    """Connected-component label per cell (0 = blocked).

    Diagonal moves need both flanking cells free, so 8-connected components
    coincide with 4-connected ones.
    """
    free = np.frombuffer(grid.free, dtype=np.uint8).reshape(grid.height, grid.width)
    labels, _ = ndimage.label(free)
    return labels


def sample_instances(
    grid: GridMap,
    count: int,
    seed: int = 0,
    min_separation: Optional[float] = None,
    max_tries: int = 1000,
) -> List[Tuple[Cell, Cell]]:
    """Uniform random solvable (start, goal) pairs.

    Pairs closer than ``min_separation`` (default: 10% of the map diagonal,
    metric distance) are rejected, as are pairs in different components.
    """
    rng = np.random.default_rng(seed)
    labels = components(grid)
    ys, xs = np.nonzero(labels)
    if len(xs) == 0:
        return []
    if min_separation is None:
        min_separation = 0.1 * math.hypot(grid.width, grid.height)
    out = []
    for _ in range(count):
        for _ in range(max_tries):
            a, b = rng.integers(len(xs), size=2)
            s = (int(xs[a]), int(ys[a]))
            g = (int(xs[b]), int(ys[b]))
            if labels[s[1], s[0]] != labels[g[1], g[0]]:
                continue
            if metric_distance(grid.conn, s, g) < min_separation:
                continue
            out.append((s, g))
            break
        else:
            raise RuntimeError("could not sample a solvable instance; map too fragmented")
    return out
