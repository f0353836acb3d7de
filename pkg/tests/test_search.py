import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CONNS, grids
from rsr.decomposition import decompose
from rsr.grid import SQRT2, Connectivity, GridMap, grid_neighbours, metric_distance
from rsr.path import Path
from rsr.search import (
    FLAG_MATRIX,
    SearchOptions,
    astar_plain,
    astar_rsr,
    dijkstra_plain,
    path_cost,
    refine_path,
)


def free_pairs(g, k, seed):
    rng = np.random.default_rng(seed)
    cells = [g.cell_of(i) for i in range(g.size) if g.free[i]]
    if not cells:
        return []
    return [(cells[rng.integers(len(cells))], cells[rng.integers(len(cells))]) for _ in range(k)]


def test_open_diagonal():
    g = GridMap.empty(10, 10)
    p = astar_rsr(g, decompose(g), (0, 0), (9, 9))
    assert p.cost == pytest.approx(12.7279221, abs=1e-6)
    assert p.stats.expanded == 0


def test_plain_same_cell():
    g = GridMap.empty(4, 4)
    p = astar_plain(g, (1, 1), (1, 1))
    assert p.cost == 0 and len(p) == 1


def test_walled_off_goal():
    g = GridMap.from_rows(["..@.", "..@.", "@@@."])
    d = decompose(g)
    assert astar_plain(g, (0, 0), (3, 0)) is None
    for opt in FLAG_MATRIX:
        assert astar_rsr(g, d, (0, 0), (3, 0), opt) is None


def test_blocked_endpoint_rejected():
    g = GridMap.from_rows([".@"])
    with pytest.raises(ValueError):
        astar_rsr(g, decompose(g), (0, 0), (1, 0))
    with pytest.raises(ValueError):
        astar_plain(g, (0, 0), (5, 0))


def test_rooms_path_leaves_start_rectangle():
    rows = [
        ".....@.....",
        ".....@.....",
        "...........",
        ".....@.....",
        ".....@.....",
    ]
    g = GridMap.from_rows(rows)
    d = decompose(g)
    p = astar_rsr(g, d, (0, 0), (10, 4))
    assert p.cost == pytest.approx(astar_plain(g, (0, 0), (10, 4)).cost, abs=1e-9)
    assert p.stats.expanded > 0


@given(grids(max_side=14), st.integers(0, 2**16))
def test_flag_matrix_matches_plain(g, seed):
    d = decompose(g)
    for s, t in free_pairs(g, 6, seed):
        ref = astar_plain(g, s, t)
        for opt in FLAG_MATRIX:
            p = astar_rsr(g, d, s, t, opt)
            if ref is None:
                assert p is None
            else:
                assert p.cost == pytest.approx(ref.cost, abs=1e-6)


@given(grids(max_side=14), st.integers(0, 2**16))
def test_plain_matches_dijkstra(g, seed):
    for s, t in free_pairs(g, 4, seed):
        dist = dijkstra_plain(g, s)[t[1], t[0]]
        p = astar_plain(g, s, t)
        if math.isinf(dist):
            assert p is None
        else:
            assert p.cost == pytest.approx(float(dist), abs=1e-6)


@given(grids(max_side=12), st.integers(0, 2**16))
def test_dijkstra_symmetric(g, seed):
    for s, t in free_pairs(g, 3, seed):
        a = dijkstra_plain(g, s)[t[1], t[0]]
        b = dijkstra_plain(g, t)[s[1], s[0]]
        assert a == pytest.approx(b, abs=1e-9) or (math.isinf(a) and math.isinf(b))


def test_dijkstra_blocked_unreached():
    g = GridMap.from_rows(["..@", "@@@", "..."])
    dist = dijkstra_plain(g, (0, 0))
    assert math.isinf(dist[0, 2]) and math.isinf(dist[2, 0]) and dist[0, 1] == 1.0


@pytest.mark.parametrize("conn", CONNS)
def test_dijkstra_open_grid_equals_metric(conn):
    g = GridMap.empty(12, 12, conn)
    for s in [(0, 0), (5, 7), (11, 3)]:
        dist = dijkstra_plain(g, s)
        for y in range(12):
            for x in range(12):
                assert dist[y, x] == pytest.approx(metric_distance(conn, s, (x, y)), abs=1e-9)


# -- refinement --------------------------------------------------------------------


def test_refine_diagonal():
    g = GridMap.empty(5, 3)
    p = refine_path(Path([(2, 0), (0, 2)], 2 * SQRT2), g)
    assert p.nodes == [(2, 0), (1, 1), (0, 2)]


def test_refine_straight():
    g = GridMap.empty(5, 3)
    assert refine_path(Path([(2, 0), (2, 2)], 2.0), g).nodes == [(2, 0), (2, 1), (2, 2)]


def test_refine_four_connected():
    g = GridMap.empty(5, 3, Connectivity.FOUR)
    p = refine_path(Path([(0, 0), (2, 1)], 3.0), g)
    assert p.nodes == [(0, 0), (1, 0), (2, 0), (2, 1)]


def test_refine_empty():
    assert refine_path(Path([], 0.0), GridMap.empty(2, 2)).nodes == []


@given(grids(max_side=14), st.integers(0, 2**16), st.sampled_from(FLAG_MATRIX))
def test_refined_paths_are_legal(g, seed, opt):
    d = decompose(g)
    for s, t in free_pairs(g, 4, seed):
        p = astar_rsr(g, d, s, t, opt)
        if p is None:
            continue
        cells = refine_path(p, g).nodes
        assert cells[0] == s and cells[-1] == t
        for a, b in zip(cells, cells[1:]):
            assert b in dict(grid_neighbours(g, a))
        assert path_cost(cells) == pytest.approx(p.cost, abs=1e-9)


@given(grids(max_side=14), st.integers(0, 2**16))
def test_path_cost_is_edge_sum(g, seed):
    d = decompose(g)
    for s, t in free_pairs(g, 4, seed):
        p = astar_rsr(g, d, s, t)
        if p is not None:
            total = sum(metric_distance(g.conn, a, b) for a, b in zip(p.nodes, p.nodes[1:]))
            assert total == pytest.approx(p.cost, abs=1e-9)


def test_stats_recorded():
    g = GridMap.from_rows(["....@....", "....@....", ".........", "....@...."])
    p = astar_rsr(g, decompose(g), (0, 0), (8, 0), SearchOptions(online_pruning=False))
    assert p.stats.expanded > 0 and p.stats.generated >= p.stats.expanded
    assert p.stats.elapsed >= 0.0
