import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CONNS, grids
from oracles import apsp, constructive_graph
from rsr.decomposition import ACTIVE, Decomposition, build_rect_info, classify, decompose, paint
from rsr.grid import SQRT2, Connectivity, GridMap, metric_distance
from rsr.macro import (
    EdgeKind,
    build_overlay,
    clique_oracle,
    constructive_edges,
    fan_neighbours,
    fan_neighbours_4,
    insert_endpoint,
    intra_edges,
    is_secondary,
    orthogonal_neighbours,
    same_rectangle_shortcut,
    same_side_neighbours,
    successors,
)
from rsr.rect import BOTTOM, LEFT, TOP, Rectangle
from rsr.search import dijkstra_plain
from test_decomposition import walled_room

R53 = Rectangle(0, 0, 0, 5, 3)


def targets(edges):
    return sorted(e.target for e in edges)


# -- constructive rules ----------------------------------------------------------------


def test_same_side():
    assert [(e.target, e.cost) for e in same_side_neighbours(R53, (2, 0))] == [((1, 0), 1.0), ((3, 0), 1.0)]
    assert targets(same_side_neighbours(R53, (0, 0))) == [(0, 1), (1, 0)]
    assert same_side_neighbours(Rectangle(0, 3, 3, 1, 1), (3, 3)) == []


def test_same_side_requires_perimeter():
    with pytest.raises(ValueError):
        same_side_neighbours(R53, (2, 1))


def test_orthogonal_from_side():
    edges = orthogonal_neighbours(R53, (0, 1))
    assert targets(edges) == [(1, 0), (1, 2)]
    assert all(e.cost == pytest.approx(SQRT2) for e in edges)


def test_orthogonal_from_top():
    edges = orthogonal_neighbours(R53, (2, 0))
    assert targets(edges) == [(0, 2), (4, 2)]
    assert all(e.cost == pytest.approx(2 * SQRT2) for e in edges)


def test_fan_long_side():
    edges = fan_neighbours(R53, (2, 0))
    assert targets(edges) == [(x, 2) for x in range(5)]
    cost = {e.target: e.cost for e in edges}
    assert cost[(2, 2)] == 2.0
    assert cost[(0, 2)] == pytest.approx(2 * SQRT2)


def test_fan_corner():
    assert targets(fan_neighbours(R53, (0, 0), side=TOP)) == [(0, 2), (1, 2), (2, 2)]
    # the corner's other side fans across to the right edge
    assert targets(fan_neighbours(R53, (0, 0), side=LEFT)) == [(4, 0), (4, 1), (4, 2)]


def test_fan_wrong_side():
    with pytest.raises(ValueError):
        fan_neighbours(R53, (2, 0), side=BOTTOM)


def test_fan_four():
    assert [(e.target, e.cost) for e in fan_neighbours_4(R53, (2, 0))] == [((2, 2), 2.0)]
    assert [(e.target, e.cost) for e in fan_neighbours_4(R53, (0, 1))] == [((4, 1), 4.0)]
    assert fan_neighbours_4(Rectangle(0, 0, 0, 5, 1), (2, 0)) == []


@pytest.mark.parametrize("conn", CONNS)
@pytest.mark.parametrize("w", range(1, 9))
@pytest.mark.parametrize("h", range(1, 9))
def test_edges_symmetric_and_metric(conn, w, h):
    r = Rectangle(0, 0, 0, w, h)
    lists = {n: {e.target: e.cost for e in constructive_edges(r, n, conn)} for n in r.perimeter()}
    for n, out in lists.items():
        assert n not in out
        for t, c in out.items():
            assert c == metric_distance(conn, n, t)
            assert lists[t][n] == c


@given(st.integers(1, 10), st.integers(1, 10), st.sampled_from(CONNS))
def test_distance_preservation(w, h, conn):
    r = Rectangle(0, 0, 0, w, h)
    nodes, edges = constructive_graph(r, conn)
    d = apsp(nodes, edges)
    expect = np.array([[metric_distance(conn, a, b) for b in nodes] for a in nodes])
    np.testing.assert_allclose(d, expect, atol=1e-9)


# -- dominance oracle --------------------------------------------------------------------


def test_clique_oracle_three_by_three():
    lab = clique_oracle(Rectangle(0, 0, 0, 3, 3), Connectivity.EIGHT)
    assert lab[((0, 0), (2, 0))] is False
    assert lab[((0, 0), (0, 1))] is True
    # equal-cost two-hop alternative via (0, 1): not strictly non-dominated
    assert lab[((0, 0), (1, 2))] is False


def test_clique_oracle_guard():
    with pytest.raises(ValueError):
        clique_oracle(Rectangle(0, 0, 0, 12, 12), Connectivity.EIGHT)


# -- secondary partition -----------------------------------------------------------------


def test_is_secondary():
    assert is_secondary(R53, (2, 0), (2, 2))
    assert not is_secondary(R53, (2, 0), (0, 2))  # corner target
    assert not is_secondary(R53, (0, 0), (1, 2))  # corner source
    assert not is_secondary(R53, (2, 0), (3, 0))


def test_successors_parent_filter():
    g = GridMap.from_rows(["....@.", "......", "......", "......"])
    d = decompose(g)
    r = d.rect_at((0, 0))
    assert (r.w, r.h) == (4, 4)
    n = (3, 1)  # right side, active through (4, 1)
    assert d.node_class(n) == ACTIVE
    free = successors(d, None, g, n, parent_rect=None, perimeter_reduction=False)
    same = successors(d, None, g, n, parent_rect=r.id, perimeter_reduction=False)
    other = successors(d, None, g, n, parent_rect=r.id + 1, perimeter_reduction=False)
    assert free.secondary and not same.secondary
    assert targets(free.all()) == targets(other.all())
    for e in same.all():
        assert not (e.kind != EdgeKind.GRID and is_secondary(r, n, e.target))


def test_successors_rejects_pruned_without_overlay():
    g = walled_room([(8, 3)])
    d = decompose(g)
    with pytest.raises(ValueError):
        successors(d, None, g, (1, 1))


@given(grids(max_side=12), st.booleans())
def test_intra_edges_match_successors(g, pr):
    d = decompose(g)
    W = g.width
    for r in d.rects.values():
        for n in r.perimeter():
            k = d.class_of[n[1] * W + n[0]]
            if pr and k != ACTIVE:
                continue
            full = successors(d, None, g, n, None, online_pruning=False, perimeter_reduction=pr)
            want_p = {e.target: e.cost for e in full.primary if e.kind != EdgeKind.GRID}
            want_s = {e.target: e.cost for e in full.secondary}
            p, s = intra_edges(d, r, n[0], n[1], pr)
            got_p = {g.cell_of(j): c for j, c in p}
            got_s = {g.cell_of(j): c for j, c in s}
            assert got_p.keys() == want_p.keys() and got_s.keys() == want_s.keys()
            for t in got_p:
                assert got_p[t] == pytest.approx(want_p[t], abs=1e-12)
            for t in got_s:
                assert got_s[t] == pytest.approx(want_s[t], abs=1e-12)


@given(grids(max_side=12))
def test_heuristic_consistent_on_generated_edges(g):
    d = decompose(g)
    goal = next((g.cell_of(i) for i in range(g.size) if g.free[i]), None)
    if goal is None:
        return
    h = lambda c: metric_distance(g.conn, c, goal)  # noqa: E731
    for i in range(g.size):
        if d.class_of[i] != ACTIVE:
            continue
        n = g.cell_of(i)
        for e in successors(d, None, g, n).all():
            assert h(n) <= e.cost + h(e.target) + 1e-9


# -- insertion ---------------------------------------------------------------------


def test_insert_active_is_noop():
    g = walled_room([(8, 3)])
    d = decompose(g)
    assert insert_endpoint(d, g, (7, 3)) == []


def test_insert_interior_unpruned_four_fans():
    # 5x5 room whose whole perimeter touches a surrounding ring of cells
    g = GridMap.empty(7, 7)
    rects = {
        0: Rectangle(0, 1, 1, 5, 5),
        1: Rectangle(1, 0, 0, 7, 1),
        2: Rectangle(2, 0, 6, 7, 1),
        3: Rectangle(3, 0, 1, 1, 5),
        4: Rectangle(4, 6, 1, 1, 5),
    }
    rect_of = [-1] * 49
    paint(rect_of, 7, rects.values())
    cls = classify(g, rects, rect_of)
    info = {k: build_rect_info(r, cls, 7, g.conn) for k, r in rects.items()}
    d = Decomposition(7, 7, g.conn, rect_of, rects, cls, info, 5)
    assert info[0].n_pruned == 0
    edges = insert_endpoint(d, g, (2, 3))
    # fans from (2,3) onto each side: d = 2 up/down (x in 1..4), d = 1 left, d = 3 right
    want = {(x, 1) for x in range(1, 5)} | {(x, 5) for x in range(1, 5)}
    want |= {(1, y) for y in (2, 3, 4)} | {(5, y) for y in range(1, 6)}
    assert {e.target for e in edges} == want
    assert all(e.kind == EdgeKind.INSERTION for e in edges)
    assert all(e.cost == metric_distance(g.conn, (2, 3), e.target) for e in edges)


@pytest.mark.parametrize("conn", CONNS)
def test_insert_into_two_door_room(conn):
    g = walled_room([(0, 3), (8, 5)], conn)
    d = decompose(g)
    m = (4, 4)
    edges = insert_endpoint(d, g, m)
    assert sorted(e.target for e in edges) == [(1, 3), (7, 5)]
    dist = dijkstra_plain(g, m)
    for e in edges:
        assert e.cost == pytest.approx(float(dist[e.target[1], e.target[0]]), abs=1e-9)


def test_insert_blocked_rejected():
    g = walled_room([(8, 3)])
    with pytest.raises(ValueError):
        insert_endpoint(decompose(g), g, (0, 0))


def test_overlay_bidirectional():
    g = walled_room([(0, 3), (8, 5)])
    d = decompose(g)
    ov = build_overlay(d, g, [(4, 4)])
    i = g.cell_id((4, 4))
    assert sorted(ov.forward[i]) == sorted(
        (g.cell_id(t), metric_distance(g.conn, (4, 4), t)) for t in [(1, 3), (7, 5)]
    )
    for j, c in ov.forward[i]:
        assert (i, c) in ov.reverse[j]
    # the decomposition itself is untouched
    assert d.class_of == decompose(g).class_of


@pytest.mark.parametrize("conn", CONNS)
@pytest.mark.parametrize("w, h", [(w, h) for w in range(3, 9) for h in range(3, 9)])
def test_insertion_optimal_unpruned(conn, w, h):
    r = Rectangle(0, 0, 0, w, h)
    nodes, edges = constructive_graph(r, conn)
    g = GridMap.empty(w, h, conn)
    # with perimeter reduction off every endpoint gets the four-fan recipe
    d = decompose(g)
    for m in r.cells():
        if r.on_perimeter(m):
            continue
        ins = insert_endpoint(d, g, m, perimeter_reduction=False)
        e2 = dict(edges)
        for e in ins:
            e2[(m, e.target)] = e.cost
        dist = apsp([m] + nodes, e2)[0, 1:]
        expect = [metric_distance(conn, m, n) for n in nodes]
        np.testing.assert_allclose(dist, expect, atol=1e-9)


# -- shortcut ----------------------------------------------------------------------


def test_shortcut_same_rect():
    d = decompose(GridMap.empty(5, 3))
    p = same_rectangle_shortcut(d, (1, 1), (3, 1))
    assert p.cost == 2.0 and p.stats.expanded == 0


def test_shortcut_same_cell():
    d = decompose(GridMap.empty(5, 3))
    p = same_rectangle_shortcut(d, (2, 2), (2, 2))
    assert p.cost == 0.0 and p.nodes == [(2, 2)]


def test_shortcut_other_rect():
    d = decompose(walled_room([(8, 3)]))
    assert same_rectangle_shortcut(d, (1, 1), (8, 3)) is None

