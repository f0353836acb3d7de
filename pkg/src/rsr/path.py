from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

from .grid import Cell


@dataclass
class SearchStats:
    expanded: int = 0
    generated: int = 0
    elapsed: float = 0.0  # seconds, monotonic clock


@dataclass
class Path:
    nodes: List[Cell]
    cost: float
    stats: SearchStats = field(default_factory=SearchStats)

    def __len__(self) -> int:
        return len(self.nodes)
