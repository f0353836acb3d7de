import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CONNS, grids, random_grid
from rsr.grid import (
    SQRT2,
    Connectivity,
    GridMap,
    MapFormatError,
    ScenarioEntry,
    grid_neighbours,
    metric_distance,
    parse_map,
    parse_scenario,
    scale_map,
    serialize_map,
    serialize_scenario,
)
from rsr.search import dijkstra_plain


def map_text(rows):
    return f"type octile\nheight {len(rows)}\nwidth {len(rows[0])}\nmap\n" + "\n".join(rows) + "\n"


# -- parsing -------------------------------------------------------------------------


def test_parse_single_row():
    g = parse_map(map_text(["..@"]))
    assert (g.width, g.height) == (3, 1)
    assert [g.traversable((x, 0)) for x in range(3)] == [True, True, False]


def test_terrain_characters():
    g = parse_map(map_text([".G@OTSW"]))
    assert [g.traversable((x, 0)) for x in range(7)] == [True, True] + [False] * 5


@pytest.mark.parametrize(
    "text, message",
    [
        ("type octile\nheight 2\nwidth 3\nmap\n...\n", "row count mismatch"),
        ("type octile\nheight 1\nwidth 3\nmap\n....\n", "row length mismatch"),
        ("type octile\nheight x\nwidth 3\nmap\n...\n", "malformed header"),
        ("type octile\nwidth 3\nheight 1\nmap\n...\n", "malformed header"),
        ("type octile\nheight 1\nwidth 3\nmap\n.?.\n", "unknown terrain character"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(MapFormatError, match=message):
        parse_map(text)


def test_lenient_parse_blocks_unknown():
    g = parse_map("type octile\nheight 1\nwidth 3\nmap\n.?.\n", strict=False)
    assert not g.traversable((1, 0))


def test_crlf_accepted():
    g = parse_map(map_text(["..", ".@"]).replace("\n", "\r\n"))
    assert g.rows() == ["..", ".@"]


@given(grids(max_side=20))
def test_serialize_round_trip(g):
    text = serialize_map(g)
    assert serialize_map(parse_map(text)) == text
    assert parse_map(text).terrain == g.terrain


def test_round_trip_keeps_terrain_letters():
    text = map_text([".GT", "SW@", "O.."])
    assert serialize_map(parse_map(text)) == text


def test_scenario_round_trip():
    entries = [
        ScenarioEntry(0, "maps/a.map", 10, 8, (1, 2), (7, 5), 7.24264069),
        ScenarioEntry(3, "maps/a.map", 10, 8, (0, 0), (9, 7), 11.89949494),
    ]
    text = serialize_scenario(entries)
    assert text.startswith("version 1\n")
    back = parse_scenario(text)
    assert [(e.start, e.goal, e.bucket) for e in back] == [(e.start, e.goal, e.bucket) for e in entries]
    assert back[1].optimal_cost == pytest.approx(11.89949494)


def test_scenario_rejects_short_line():
    with pytest.raises(ValueError):
        parse_scenario("version 1\n0 a.map 10 8 1 2 7 5\n")


# -- neighbours ----------------------------------------------------------------------


def test_open_centre_eight():
    nb = grid_neighbours(GridMap.empty(3, 3), (1, 1))
    assert len(nb) == 8
    assert sorted(c for _, c in nb) == [1.0] * 4 + [SQRT2] * 4


def test_corner_four():
    g = GridMap.empty(3, 3, Connectivity.FOUR)
    assert sorted(grid_neighbours(g, (0, 0))) == [((0, 1), 1.0), ((1, 0), 1.0)]


def test_no_corner_cutting():
    g = GridMap.from_rows(["...", "...", "..."]).set_cell((1, 0), False)
    cells = {c for c, _ in grid_neighbours(g, (1, 1))}
    assert (0, 0) not in cells and (2, 0) not in cells
    assert (0, 2) in cells and (2, 2) in cells


def test_neighbours_errors():
    g = GridMap.from_rows([".@"])
    with pytest.raises(ValueError):
        grid_neighbours(g, (1, 0))
    with pytest.raises(ValueError):
        grid_neighbours(g, (2, 0))


@given(grids(max_side=10))
def test_neighbour_symmetry(g):
    for y in range(g.height):
        for x in range(g.width):
            if not g.traversable((x, y)):
                continue
            for c, cost in grid_neighbours(g, (x, y)):
                back = dict(grid_neighbours(g, c))
                assert back[(x, y)] == cost


@given(grids(max_side=10))
def test_adjacency_matches_neighbours(g):
    for i in range(g.size):
        c = g.cell_of(i)
        if g.traversable(c):
            got = sorted((g.cell_of(j), w) for j, w in g.adjacency[i])
            assert got == sorted(grid_neighbours(g, c))


# -- metric --------------------------------------------------------------------------


@pytest.mark.parametrize(
    "a, b, expected",
    [((0, 0), (3, 0), 3.0), ((0, 0), (2, 2), 2 * SQRT2), ((0, 0), (3, 4), 5.242640687119285)],
)
def test_octile_examples(a, b, expected):
    assert metric_distance(Connectivity.EIGHT, a, b) == pytest.approx(expected, abs=1e-9)


def test_manhattan():
    assert metric_distance(Connectivity.FOUR, (0, 0), (3, 4)) == 7.0


@pytest.mark.parametrize("conn", CONNS)
def test_metric_axioms_exhaustive(conn):
    n = 16
    cells = [(x, y) for y in range(n) for x in range(n)]
    D = np.array([[metric_distance(conn, a, b) for b in cells] for a in cells])
    assert np.all(np.diag(D) == 0)
    off = ~np.eye(len(cells), dtype=bool)
    assert np.all(D[off] > 0)
    assert np.array_equal(D, D.T)
    for j in range(len(cells)):
        assert np.all(D <= D[:, j, None] + D[None, j, :] + 1e-9)


@pytest.mark.parametrize("conn", CONNS)
def test_metric_equals_open_grid_dijkstra(conn):
    n = 12
    g = GridMap.empty(n, n, conn)
    for sy in range(n):
        for sx in range(n):
            dist = dijkstra_plain(g, (sx, sy))
            expect = np.array([[metric_distance(conn, (sx, sy), (x, y)) for x in range(n)] for y in range(n)])
            np.testing.assert_allclose(dist, expect, atol=1e-9)


# -- scaling ---------------------------------------------------------------------------


def test_scale_identity():
    g = GridMap.from_rows([".@", "@."])
    assert scale_map(g, 1) == g


def test_scale_blocks():
    g = scale_map(GridMap.from_rows([".@"]), 3)
    assert (g.width, g.height) == (6, 3)
    assert g.rows() == ["...@@@"] * 3


def test_scale_zero_rejected():
    with pytest.raises(ValueError):
        scale_map(GridMap.empty(2, 2), 0)


@given(grids(max_side=8), st.integers(1, 4))
def test_scale_free_count(g, k):
    assert scale_map(g, k).free_count() == k * k * g.free_count()


def test_gridmap_rejects_bad_sizes():
    with pytest.raises(ValueError):
        GridMap(0, 1, b"")
    with pytest.raises(ValueError):
        GridMap(2, 2, b"...")


def test_set_cell_returns_new_map():
    g = GridMap.empty(3, 3)
    h = g.set_cell((1, 1), False)
    assert g.traversable((1, 1)) and not h.traversable((1, 1))
    assert math.isclose(h.free_count(), 8)


def test_random_grid_helper_is_deterministic():
    assert random_grid(9, 7, 0.3, 5) == random_grid(9, 7, 0.3, 5)
