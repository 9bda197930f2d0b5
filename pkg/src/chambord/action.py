"""The group action on the vertex complex and the strand projection.

Group elements are reduced closed diagrams.  An element acts on a vertex by
splicing its cylinder on top of the vertex representative: both are expanded
until the element's bottom forest matches the representative's top forest,
the braids compose with the later factor on the left, and the result is
reduced back to a vertex.

The projection onto a fixed forest keeps only the strands attached to that
forest's interior vertices, lands in the rotation-free part, and is the
identity there; together with its cocycle property it gives the sampled
quasi-retraction bound checked by the acceptance suite.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import braid as br
from . import complex as cx
from . import diagram as dg
from .errors import BasewordMismatch, PresetUnsupported
from .grammar import PForest, Presentation, Word, catalog, eta, is_prefix, union

GroupElement = dg.ClosedDiagram


def act(g: GroupElement, v: cx.VertexRef) -> cx.VertexRef:
    """Translate a vertex by a group element.

    Vertices are stored as translates of resting vertices, so acting is
    multiplication of the translating element; the clopen representative is
    rebuilt by splicing the product onto the resting form.
    """
    if g.pres != v.rep.pres or g.baseword != v.rep.baseword:
        raise BasewordMismatch("element and vertex live over different basewords")
    return cx.make_vertex(dg.multiply(g, v.elt), v.rest_top)


def canonical_translate(v: cx.VertexRef) -> tuple[GroupElement, cx.VertexRef]:
    """An element sending the vertex to its resting form.

    The inverse of the stored translating element does it: the image has an
    edgeless bottom forest, no occupied punctures, and an immaterial braid.
    """
    g = dg.reduce(dg.inverse(v.elt))
    moved = act(g, v)
    d = moved.rep
    if d.sigma or d.bot.i_count:
        raise AssertionError("canonical translate did not reach the resting form")
    return g, moved


def stabilizes(g: GroupElement, v: cx.VertexRef) -> bool:
    return act(g, v) == v


def braid_diagram(forest: PForest, b: br.CylBraid) -> GroupElement:
    """The element supported on one forest: ``(forest, b, forest)``."""
    d = dg.ClosedDiagram(forest, forest, b)
    if not dg.validate(d):
        raise BasewordMismatch("braid does not respect the forest's leaf labels")
    return dg.reduce(d)


def resting_vertex(forest: PForest) -> cx.VertexRef:
    """The vertex ``[forest, id, empty, leaves]`` stabilised by its braids."""
    return cx.resting_vertex(forest)


def project(g: GroupElement, forest: PForest) -> GroupElement:
    """Keep only the strands attached to the forest's interior vertices.

    The element is expanded until its top forest contains the given forest
    as a prefix; the strands hanging from that prefix's interior vertices
    form the extracted braid, taken with zero rotation.
    """
    if g.pres != forest.pres or g.baseword != forest.baseword:
        raise BasewordMismatch("element and forest live over different basewords")
    target = union(g.top, forest)
    e = dg.expand_top_to(g, target)
    keep = _prefix_ranks(forest, e.top)
    sub = br.subbraid(e.braid, [r + 1 for r in keep])
    hat = br.make(forest.i_count, forest.leaf_count, sub.letters, 0)
    return dg.reduce(dg.ClosedDiagram(forest, forest, hat))


def _prefix_ranks(prefix: PForest, big: PForest) -> list[int]:
    """Ranks in the big forest of the prefix's interior vertices."""
    if not is_prefix(prefix, big):
        raise BasewordMismatch("not a prefix")
    wanted = set(prefix.interiors())
    return [r for r, v in enumerate(big.interiors()) if v in wanted]


def project_cocycle_witness(
    a: GroupElement, b: GroupElement, forest: PForest
) -> GroupElement:
    """The correction factor for the projection of a product.

    Writing ``a`` over a top forest containing the given one and ``b``
    below it, the strands of ``b`` that continue the extracted strands of
    ``a`` form a braid ``w`` with ``project(a*b) == project(a) * (w over the
    forest)``.
    """
    ea = dg.expand_top_to(a, union(a.top, forest))
    mid = union(ea.bot, b.top)
    ea = dg.expand_bottom_to(ea, mid)
    eb = dg.expand_top_to(b, mid)
    keep_a = _prefix_ranks(forest, ea.top)
    perm = ea.braid.core.perm()
    continuation = sorted(perm[r] for r in keep_a)
    sub = br.subbraid(eb.braid, [r + 1 for r in continuation])
    # composing the two cylinders absorbs whole boundary turns as central
    # full twists; their restriction to the kept strands rides the witness
    q = ea.braid.q
    k = (
        (
            br._winding(q, eb.braid.rot)
            + br._winding(q, ea.braid.rot)
            - br._winding(q, (ea.braid.rot + eb.braid.rot) % q)
        )
        // q
        if q
        else 0
    )
    twist = br._twist_power(forest.i_count, k)
    w = br.make(forest.i_count, forest.leaf_count, sub.letters + twist, 0)
    return dg.reduce(dg.ClosedDiagram(forest, forest, w))


# -- sampled generators for audits ---------------------------------------------


def random_vertex(
    pres: Presentation, word: Word, rng: random.Random, moves: int = 3
) -> cx.VertexRef:
    """A random vertex reached by a short walk from the base."""
    v = cx.base_vertex(pres, word)
    for _ in range(moves):
        ns = cx.neighbors(v)
        if not ns:
            break
        v = rng.choice(ns)
    return v


def random_stabilizer_element(
    forest: PForest, rng: random.Random, letters: int = 4
) -> GroupElement:
    """A random element of the braid subgroup supported on a forest."""
    p, q = forest.i_count, forest.leaf_count
    word = []
    for _ in range(letters):
        if p >= 2:
            word.append(rng.choice([1, -1]) * rng.randint(1, p - 1))
    rot = 0
    if q and len(set(forest.leaf_word())) == 1 and rng.random() < 0.4:
        rot = rng.randint(0, q - 1)
    return braid_diagram(forest, br.make(p, q, tuple(word), rot))


# -- the wreath witness ----------------------------------------------------------


@dataclass
class WreathReport:
    preset: str
    depth: int
    commutators_checked: int
    all_commute: bool
    shift_moves_twist: bool

    @property
    def passed(self) -> bool:
        return self.all_commute and self.shift_moves_twist

    def to_obj(self) -> dict:
        return {
            "preset": self.preset,
            "depth": self.depth,
            "commutatorsChecked": self.commutators_checked,
            "allCommute": self.all_commute,
            "shiftMovesTwist": self.shift_moves_twist,
            "passed": self.passed,
        }


def _lamplighter_shift_and_twist() -> tuple[GroupElement, GroupElement]:
    pres, w = catalog("lamplighter")
    base = eta(pres, w).expand((0, ()))  # a -> (b, p, c)
    left = base.expand((0, (0,)))  # expand b -> (b, p)
    right = base.expand((0, (2,)))  # expand c -> (p, c)
    shift = dg.reduce(
        dg.ClosedDiagram(left, right, br.identity(2, 4))
    )
    twist = braid_diagram(left, br.make(2, 4, (1, 1)))
    return shift, twist


def wreath_witness(preset: str, depth: int = 3) -> WreathReport:
    """Conjugates of a twist by powers of a shift commute pairwise.

    The lamplighter preset ships a translation-like element g and a
    two-puncture twist t; the elements ``g^(2k) t g^(-2k)`` have disjoint
    supports for distinct k, so all their commutators reduce to the neutral
    diagram while ``g^2 t g^-2`` itself differs from ``t``.
    """
    if preset != "lamplighter":
        raise PresetUnsupported(f"no shift element declared for {preset!r}")
    pres, w = catalog("lamplighter")
    e = dg.identity(pres, w)
    g, t = _lamplighter_shift_and_twist()
    ginv = dg.inverse(g)

    def conj(k: int) -> GroupElement:
        out = t
        for _ in range(2 * k):
            out = dg.multiply(g, out)
        for _ in range(2 * k):
            out = dg.multiply(out, ginv)
        return out

    lamps = [conj(k) for k in range(depth + 1)]
    checked = 0
    all_commute = True
    for i in range(len(lamps)):
        for j in range(i + 1, len(lamps)):
            lhs = dg.multiply(lamps[i], lamps[j])
            rhs = dg.multiply(lamps[j], lamps[i])
            checked += 1
            if lhs != rhs:
                all_commute = False
    moved = lamps[1] != t if depth >= 1 else conj(1) != t
    return WreathReport(preset, depth, checked, all_commute, moved)
