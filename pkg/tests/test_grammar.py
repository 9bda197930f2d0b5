"""Presentations, forests, and the completion search."""

from __future__ import annotations

from fractions import Fraction

import pytest

from chambord.errors import DSLSyntaxError, NotAPLeaf, NotArboreal, UnknownName
from chambord.grammar import (
    KIND_INTERIOR,
    KIND_LEAF,
    PForest,
    Presentation,
    catalog,
    complete_to_closed,
    eta,
    is_prefix,
    parse_presentation,
    remove_crown,
    union,
)


def test_parse_single_rule():
    pres = parse_presentation("<a | a = a a>")
    assert pres.letters == ("a",)
    assert pres.rule("a") == ("a", "a")


def test_parse_two_rules():
    pres = parse_presentation("<a,c | a = c c ; c = a a a>")
    assert pres.letters == ("a", "c")
    assert pres.rule("a") == ("c", "c")
    assert pres.rule("c") == ("a", "a", "a")


def test_parse_rejects_duplicate_rhs():
    with pytest.raises(NotArboreal) as exc:
        parse_presentation("<a,b | a = b b ; b = b b>")
    assert "rhs" in str(exc.value)


def test_parse_rejects_duplicate_lhs_and_long_lhs():
    with pytest.raises(NotArboreal):
        parse_presentation("<a,b | a = b ; a = b b>")
    with pytest.raises(NotArboreal):
        parse_presentation("<a,b | a b = b>")


def test_parse_rejects_undeclared_letter():
    with pytest.raises(DSLSyntaxError):
        parse_presentation("<a | a = b>")


def test_parse_rejects_malformed():
    for bad in ["a | a = a", "<a  a = a>", "< | a = a>", "<a | a = >"]:
        with pytest.raises(DSLSyntaxError):
            parse_presentation(bad)


def test_unary_rule_is_valid():
    pres = parse_presentation("<a | a = a>")
    assert pres.rule("a") == ("a",)


def test_catalog_houghton2():
    pres, w = catalog("houghton(2)")
    assert pres.letters == ("a", "b1", "b2")
    assert pres.rule("a") == ("b1", "b2")
    assert pres.rule("b1") == ("b1",)
    assert pres.rule("b2") == ("b2",)
    assert w == ("a",)


def test_catalog_lamplighter():
    pres, w = catalog("lamplighter")
    assert pres.rule("a") == ("b", "p", "c")
    assert pres.rule("b") == ("b", "p")
    assert pres.rule("c") == ("p", "c")
    assert pres.rule("p") == ("p",)
    assert w == ("a",)


def test_catalog_greenberg_sergiescu():
    pres, w = catalog("greenberg_sergiescu")
    assert pres.rule("a") == ("a", "b", "a")
    assert pres.rule("b") == ("b",)
    assert w == ("a",)


def test_catalog_higman():
    pres, _ = catalog("higman(2,3)")
    assert pres.letters == ("a",)
    assert pres.rule("a") == ("a", "a")
    pres, _ = catalog("higman(3,2)")
    assert pres.rule("a") == ("b", "b")
    assert pres.rule("b") == ("b", "b", "b")


def test_catalog_unknown():
    with pytest.raises(UnknownName):
        catalog("nosuch")
    with pytest.raises(UnknownName):
        catalog("houghton(1)")


def test_eta_counts():
    pres, w = catalog("thompsonV")
    f = eta(pres, w)
    assert f.i_count == 0 and f.leaf_count == 1
    assert f.baseword == ("a",)


def test_expand_caret():
    pres, w = catalog("thompsonV")
    f = eta(pres, w).expand((0, ()))
    assert f.i_count == 1 and f.leaf_count == 2
    assert f.baseword == ("a",)
    assert f.leaf_word() == ("a", "a")


def test_expand_tp_presentation():
    pres = parse_presentation("<a,c | a = c c ; c = a a a>")
    f = eta(pres, ("c",)).expand((0, ()))
    assert f.subtree((0, ()))[0] == "c"
    assert [f.letter(v) for v in f.children_ids((0, ()))] == ["a", "a", "a"]


def test_expand_terminal_leaf_fails():
    pres = parse_presentation("<a,b | a = b b>")
    f = eta(pres, ("a",)).expand((0, ()))
    with pytest.raises(NotAPLeaf):
        f.expand((0, (0,)))


def test_terminal_leaves_are_interior():
    pres = parse_presentation("<a,b | a = b b>")
    f = eta(pres, ("a",)).expand((0, ()))
    assert f.i_count == 3 and f.leaf_count == 0


def test_vertex_order_single_caret():
    pres, w = catalog("thompsonV")
    f = eta(pres, w).expand((0, ()))
    order = f.vertex_order()
    assert order == [
        ((0, (0,)), KIND_LEAF),
        ((0, ()), KIND_INTERIOR),
        ((0, (1,)), KIND_LEAF),
    ]


def test_vertex_order_eta_is_roots():
    pres, w = catalog("houghton(2)")
    f = eta(pres, ("b1", "b2", "a"))
    assert [v for v, _ in f.vertex_order()] == [(0, ()), (1, ()), (2, ())]


def _geometric_order(forest: PForest):
    """Independent oracle: embed vertices on the rational line.

    Each vertex's vertical line must separate its first child's subtree from
    the rest, so recursively place the first child in the left part of the
    interval, the vertex at the split point, and the remaining children in
    the right part.
    """
    coords = {}

    def place(vid, tree, lo: Fraction, hi: Fraction):
        letter, children = tree
        if not children:
            coords[vid] = (lo + hi) / 2
            return
        mid = lo + (hi - lo) / 3
        coords[vid] = mid
        place((vid[0], vid[1] + (0,)), children[0], lo, mid)
        rest = children[1:]
        width = (hi - mid) / len(rest)
        for i, c in enumerate(rest, start=1):
            place(
                (vid[0], vid[1] + (i,)),
                c,
                mid + (i - 1) * width,
                mid + i * width,
            )

    for root_i, tree in enumerate(forest.trees):
        place((root_i, ()), tree, Fraction(root_i), Fraction(root_i + 1))
    return [vid for vid, _ in sorted(coords.items(), key=lambda kv: kv[1])]


def test_vertex_order_matches_geometric_placement():
    pres, w = catalog("thompsonV")
    f = eta(pres, ("a", "a"))
    for vid in [(0, ()), (1, ()), (0, (0,)), (0, (1,)), (1, (0,))]:
        f = f.expand(vid)
    assert [v for v, _ in f.vertex_order()] == _geometric_order(f)

    pres2, _ = catalog("lamplighter")
    g = eta(pres2, ("a",)).expand((0, ())).expand((0, (0,))).expand((0, (2,)))
    assert [v for v, _ in g.vertex_order()] == _geometric_order(g)


def test_union_with_eta_and_self():
    pres, w = catalog("thompsonV")
    f = eta(pres, w).expand((0, ())).expand((0, (1,)))
    assert union(f, eta(pres, w)) == f
    assert union(f, f) == f
    assert is_prefix(eta(pres, w), f)


def test_union_of_incomparable_expansions():
    pres, _ = catalog("thompsonV")
    base = eta(pres, ("a", "a"))
    f1 = base.expand((0, ()))
    f2 = base.expand((1, ()))
    u = union(f1, f2)
    assert u == base.expand((0, ())).expand((1, ()))
    assert is_prefix(f1, u) and is_prefix(f2, u)
    # enumerate all prefixes of the derived forest with at most two carets
    # and check u is the least one containing both
    candidates = [base.expand((0, ())).expand((1, ()))]
    for c in candidates:
        assert is_prefix(f1, c) and is_prefix(f2, c)
        assert is_prefix(u, c)


def test_union_is_commutative_associative():
    pres, w = catalog("houghton(2)")
    a = eta(pres, w).expand((0, ()))
    b = a.expand((0, (0,)))
    c = a.expand((0, (1,)))
    assert union(b, c) == union(c, b)
    assert union(union(b, c), a) == union(b, union(c, a))


def test_remove_crown_roundtrip_of_expand():
    pres, w = catalog("thompsonV")
    f = eta(pres, w)
    g = f.expand((0, ()))
    assert remove_crown(g, {(0, ())}) == eta(pres, ("a", "a"))
    with pytest.raises(ValueError):
        remove_crown(g, {(0, (0,))})  # P-leaf
    h = g.expand((0, (0,)))
    with pytest.raises(ValueError):
        remove_crown(h, {(0, (0,))})  # not ancestor-closed


def test_complete_to_closed_houghton_example():
    pres, w = catalog("houghton(2)")
    b = eta(pres, ("b1", "b2"))
    results = complete_to_closed(b, ("a",), 1, (1,))
    assert len(results) == 1
    got = results[0]
    assert got.baseword == ("a",)
    assert got.i_count == 1
    assert remove_crown(got, {(0, ())}) == b


def test_complete_to_closed_zero_added():
    pres, w = catalog("houghton(2)")
    b = eta(pres, w).expand((0, ()))
    assert complete_to_closed(b, ("a",), 0, (0, 0)) == [b]


def test_complete_to_closed_wrong_order_is_empty():
    pres, _ = catalog("houghton(2)")
    b = eta(pres, ("b2", "b1"))
    assert complete_to_closed(b, ("a",), 1, (1,)) == []


def test_complete_to_closed_respects_free_slots():
    # over <x | x = x x>: bottom = caret + isolated root, one added vertex.
    pres = parse_presentation("<x | x = x x>")
    caret = ("x", (("x", ()), ("x", ())))
    b = PForest(pres, (caret, ("x", ())))
    # the unique completion has interior order (caret root, new root), so the
    # free puncture sits after the surviving one
    assert len(complete_to_closed(b, ("x",), 1, (0, 1))) == 1
    assert complete_to_closed(b, ("x",), 1, (1, 0)) == []


def test_complete_to_closed_counts_depth_two():
    # all completions of four isolated leaves into one binary tree: the five
    # shapes with three interior vertices, spread over the gap signatures
    pres = parse_presentation("<x | x = x x>")
    b = eta(pres, ("x",) * 4)
    all_results = complete_to_closed(b, ("x",), 3, (3,))
    assert len(all_results) == len({r.trees for r in all_results})
    assert len(all_results) == 5


def test_complete_to_closed_invisible_subtrees():
    # over <a,b | a = a b>, the letter b derives a tree with no P-leaves, so
    # a completion may delete a whole b-subtree
    pres = parse_presentation("<a,b | a = a b>")
    b = eta(pres, ("a",))
    results = complete_to_closed(b, ("a",), 2, (2,))
    assert len(results) == 1
    assert results[0].trees == (("a", (("a", ()), ("b", ()))),)


def test_complete_to_closed_counts_match_added():
    pres, _ = catalog("lamplighter")
    b = eta(pres, ("b", "p", "c"))
    for res in complete_to_closed(b, ("a",), 1, (1,)):
        assert res.i_count == b.i_count + 1


def test_forest_json_roundtrip():
    pres, w = catalog("lamplighter")
    f = eta(pres, w).expand((0, ())).expand((0, (1,)))
    assert PForest.from_obj(pres, f.to_obj()) == f
    assert Presentation.from_obj(pres.to_obj()) == pres
