"""Clopen diagrams, vertices, adjacency, balls, and curvature audits."""

from __future__ import annotations

import random

import pytest

from chambord import braid as br
from chambord import complex as cx
from chambord import diagram as dg
from chambord.complex import (
    Ball,
    OpenDiagram,
    VertexRef,
    audit_cat0,
    ball,
    base_vertex,
    bottom_contractions,
    bottom_expansions,
    distance_to_base,
    from_closed,
    is_closable,
    isocephalese,
    neighbors,
    neighbors_with_moves,
    reduce_open,
    top_contractions,
    top_expansion,
    vertex_of,
)
from chambord.errors import BudgetExceeded
from chambord.grammar import PForest, catalog, eta, parse_presentation

PX = parse_presentation("<x | x = x x>")
WX = ("x",)
PH, WH = catalog("houghton(2)")


def xcaret():
    return eta(PX, WX).expand((0, ()))


def test_closed_diagram_is_closable():
    rng = random.Random(301)
    for _ in range(10):
        d = dg.random_element(PX, WX, rng, atoms=2)
        o = from_closed(d)
        assert cx.validate(o)
        assert is_closable(o)


def test_closability_depends_on_free_slot_order():
    # bottom forest: caret then two isolated roots; every completion keeps
    # the caret's interior leftmost, so only the slot table with both free
    # punctures after the survivor admits a closed extension
    top = xcaret().expand((0, (0,))).expand((0, (1,)))  # i(top) = 3
    bot = PForest(PX, (("x", (("x", ()), ("x", ()))), ("x", ()), ("x", ())))
    braid0 = br.identity(3, 4)
    good = OpenDiagram(top, bot, braid0, (0,))
    bad = OpenDiagram(top, bot, braid0, (1,))
    worse = OpenDiagram(top, bot, braid0, (2,))
    assert cx.validate(good) and cx.validate(bad) and cx.validate(worse)
    assert is_closable(good)
    assert not is_closable(bad)
    assert not is_closable(worse)


def test_closable_after_bottom_contraction_of_closed():
    rng = random.Random(307)
    for _ in range(10):
        d = dg.random_element(PX, WX, rng, atoms=2)
        o = from_closed(d)
        for c in bottom_contractions(o):
            assert is_closable(c)


def test_reduce_open_agrees_with_closed_reduce():
    rng = random.Random(311)
    for _ in range(10):
        d = dg.random_unreduced(PX, WX, rng, atoms=1, extra_dipoles=2)
        open_red = reduce_open(from_closed(d))
        closed_red = dg.reduce(d)
        assert open_red == from_closed(closed_red)


def test_isocephalese_basics():
    o = reduce_open(from_closed(dg.identity(PX, WX)))
    assert isocephalese(o, o)
    # empty sigma identifies any two diagrams over the same forests
    top = xcaret()
    bot = eta(PX, ("x", "x"))
    d1 = OpenDiagram(top, bot, br.identity(1, 2), ())
    d2 = OpenDiagram(top, bot, br.make(1, 2, (), 1), ())
    assert isocephalese(d1, d2)


def test_isocephalese_full_twist_of_occupied_fails():
    top = xcaret().expand((0, (0,))).expand((0, (1,)))
    bot = PForest(PX, (("x", (("x", ()), ("x", ()))), ("x", ()), ("x", ())))
    # close the caret's interior onto some puncture
    base = OpenDiagram(top, bot, br.identity(3, 4), (1,))
    assert cx.validate(base)
    twisted = OpenDiagram(top, bot, br.make(3, 4, (1, 1)), (1,))
    # the twist loops punctures 1 and 2 around each other; puncture 2
    # (0-based slot 1) is occupied, so its arc is dragged
    assert not isocephalese(base, twisted)
    # a braid supported away from the occupied puncture is isocephalese-trivial
    base2 = OpenDiagram(top, bot, br.identity(3, 4), (0,))
    assert isocephalese(base2, OpenDiagram(top, bot, br.make(3, 4, (2,)), (0,)))
    assert isocephalese(base2, OpenDiagram(top, bot, br.make(3, 4, (2, 2)), (0,)))


def test_vertex_of_invariance():
    rng = random.Random(313)
    for _ in range(10):
        d = dg.random_element(PX, WX, rng, atoms=2)
        o = from_closed(d)
        v1 = vertex_of(o)
        noisy = d
        for _ in range(2):
            leaves = noisy.top.leaves()
            noisy = dg.add_dipole(noisy, rng.choice(leaves))
        v2 = vertex_of(from_closed(noisy))
        assert v1 == v2
        assert hash(v1) == hash(v2)


def test_base_vertex_has_one_neighbor():
    v = base_vertex(PX, WX)
    assert v.height == 0
    ns = neighbors_with_moves(v)
    assert len(ns) == 1
    u, kind = ns[0]
    assert kind == cx.TOP and u.height == 1
    assert u.rep.top == xcaret()


def test_neighbors_symmetry_and_heights():
    v = base_vertex(PX, WX)
    seen = [v]
    frontier = [v]
    for _ in range(2):
        nxt = []
        for x in frontier:
            for u in neighbors(x):
                assert abs(u.height - x.height) == 1
                assert any(x == w for w in neighbors(u)), "adjacency must be symmetric"
                if all(u != w for w in seen):
                    seen.append(u)
                    nxt.append(u)
        frontier = nxt


def test_ball_radius_one():
    v = base_vertex(PX, WX)
    b = ball(v, 1)
    assert len(b.vertices) == 2
    assert len(b.edges) == 1
    assert b.dist == [0, 1]


def test_ball_budget():
    v = base_vertex(PX, WX)
    with pytest.raises(BudgetExceeded):
        ball(v, 4, max_vertices=3)


def test_ball_is_simple_and_deterministic():
    v = base_vertex(PX, WX)
    b1 = ball(v, 3)
    b2 = ball(v, 3)
    assert [x.sort_key() for x in b1.vertices] == [x.sort_key() for x in b2.vertices]
    assert b1.edges == b2.edges
    # no duplicated vertices
    for i in range(len(b1.vertices)):
        for j in range(i + 1, len(b1.vertices)):
            assert b1.vertices[i] != b1.vertices[j]


def test_distance_formula_small():
    v = base_vertex(PX, WX)
    b = ball(v, 3)
    for i, u in enumerate(b.vertices):
        assert b.dist[i] == distance_to_base(u)


def test_closed_vertex_distance_is_twice_interior():
    rng = random.Random(317)
    for _ in range(5):
        d = dg.random_element(PX, WX, rng, atoms=2)
        u = vertex_of(from_closed(d))
        assert distance_to_base(u) == u.rep.top.i_count + u.rep.bot.i_count


def test_audit_radius2_passes():
    b = ball(base_vertex(PX, WX), 2)
    report = audit_cat0(b)
    assert report.all_passed, report.to_obj()


def test_audit_detects_planted_k32():
    b = ball(base_vertex(PX, WX), 2)
    # corrupt: plant a K(3,2) by wiring two vertices to three fake common
    # neighbors
    n = len(b.vertices)
    fake = Ball(
        b.root,
        b.radius,
        b.vertices + b.vertices[:5],
        set(b.edges)
        | {(0, n, cx.TOP), (1, n, cx.TOP), (0, n + 1, cx.TOP), (1, n + 1, cx.TOP),
           (0, n + 2, cx.TOP), (1, n + 2, cx.TOP)},
        b.dist + [1] * 5,
    )
    report = audit_cat0(fake)
    assert not report.checks["no_k32"]["passed"]


def test_single_edge_ball_vacuous_audit():
    b = ball(base_vertex(PX, WX), 1)
    report = audit_cat0(b)
    assert report.all_passed


def test_houghton_vertices_and_neighbors():
    v = base_vertex(PH, WH)
    b = ball(v, 2)
    report = audit_cat0(b)
    assert report.all_passed, report.to_obj()
    for i, u in enumerate(b.vertices):
        assert b.dist[i] == distance_to_base(u)


def test_ball_serialisation():
    b = ball(base_vertex(PX, WX), 2)
    obj = b.to_obj()
    assert len(obj["vertices"]) == len(b.vertices)
    assert obj["edges"]
    dot = b.to_dot()
    assert dot.startswith("graph ball {") and dot.endswith("}")


def test_top_expansion_contraction_roundtrip():
    v = base_vertex(PX, WX)
    d = v.rep
    e = top_expansion(d, d.top.leaves()[0])
    assert e is not None
    backs = top_contractions(e)
    assert any(vertex_of(c) == v for c in backs)


def test_open_json_roundtrip():
    v = base_vertex(PH, WH)
    b = ball(v, 1)
    for u in b.vertices:
        assert OpenDiagram.from_obj(u.rep.to_obj()) == u.rep


def test_vertex_invariant_under_trivial_braid_multiplier():
    # multiplying the braid by an element fixing the occupied arcs does not
    # change the vertex
    top = xcaret().expand((0, (0,))).expand((0, (1,)))
    bot = PForest(PX, (("x", (("x", ()), ("x", ()))), ("x", ()), ("x", ())))
    base = OpenDiagram(top, bot, br.identity(3, 4), (0,))
    assert is_closable(base)
    moved = OpenDiagram(top, bot, br.make(3, 4, (2,)), (0,))
    assert vertex_of(base) == vertex_of(moved)
    # a rotation multiplier rewires the marked points: different vertex
    rolled = OpenDiagram(top, bot, br.make(3, 4, (), 1), (0,))
    assert cx.validate(rolled)
    assert vertex_of(base) != vertex_of(rolled)


def test_resting_vertices_distinct_per_forest():
    left = xcaret().expand((0, (0,)))
    right = xcaret().expand((0, (1,)))
    assert cx.resting_vertex(left) != cx.resting_vertex(right)
    assert cx.resting_vertex(left) == cx.resting_vertex(left)
