"""Rectangle-decomposition symmetry reduction for optimal A* on grid maps."""

from .decomposition import Decomposition, NodeClass, decompose, validate
from .dynamic import CellChange, apply_change, repair_consistency_check
from .grid import Connectivity, GridMap, metric_distance, parse_map, read_map
from .path import Path, SearchStats
from .search import SearchOptions, astar_plain, astar_rsr, dijkstra_plain, refine_path

__all__ = [
    "CellChange",
    "Connectivity",
    "Decomposition",
    "GridMap",
    "NodeClass",
    "Path",
    "SearchOptions",
    "SearchStats",
    "apply_change",
    "astar_plain",
    "astar_rsr",
    "decompose",
    "dijkstra_plain",
    "metric_distance",
    "parse_map",
    "read_map",
    "refine_path",
    "repair_consistency_check",
    "validate",
]
