"""Closed braided strand diagrams and their group law.

A closed diagram is a triple: a top forest, a bottom forest with the same
leaf and interior counts, and a cylinder braid whose strands join the
interior vertices and whose wires join the P-leaves through the boundary
rotation.  Dipoles are cancelling vertex pairs whose connecting bundle of
strands and wires could be retracted into the boundary; reducing them all
yields the unique reduced form, and concatenation of reduced forms is the
group law.

The dipole machinery below is written once for the general, sigma-aware
shape (the bottom forest may miss interior vertices, each surviving one
recording which puncture it holds) so the open-diagram layer can reuse it;
closed diagrams simply carry the full assignment.

Bundles: expanding at a leaf whose rule contains unruled letters adds both
wires (for the ruled children) and extra parallel strands (for the unruled
ones).  The whole bundle travels the boundary collar together, and dipole
detection tests a candidate by deleting its bundle, merging its wires, and
re-inserting along the canonical route: the candidate is a dipole exactly
when the braid comes back equal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import braid as br
from .errors import BasewordMismatch, InvalidDiagram, NotAPLeaf
from .grammar import PForest, Presentation, Word, eta, is_prefix, union

# Flipped by the self-test canary only: re-insertion during dipole detection
# then routes seam passages on the wrong side, which must make the
# confluence suite fail.
DETECT_SEAM_FRONT = False


# -- bundle bookkeeping -------------------------------------------------------


@dataclass(frozen=True)
class _Bundle:
    """The strands created by one expansion: the parent plus unruled children."""

    parent: tuple
    member_vids: tuple  # in vertex order (== rank order)
    rank0: int  # first interior rank of the block
    ruled_child_vids: tuple  # in child order


def _bundle_after_expand(forest: PForest, parent_vid: tuple) -> _Bundle:
    pres = forest.pres
    members = [parent_vid]
    ruled = []
    for child in forest.children_ids(parent_vid):
        if pres.is_terminal(forest.letter(child)):
            members.append(child)
        else:
            ruled.append(child)
    ranks = sorted(forest.interior_rank(v) for v in members)
    if ranks != list(range(ranks[0], ranks[0] + len(ranks))):
        raise AssertionError("bundle ranks are not contiguous")
    order = {v: forest.interior_rank(v) for v in members}
    members.sort(key=order.get)
    return _Bundle(parent_vid, tuple(members), ranks[0], tuple(ruled))


def _solve_rotation(q: int, slot_map: dict) -> int:
    """Shift with slot_map[s] == (s + rot) mod q, asserting uniformity."""
    if q == 0:
        if slot_map:
            raise AssertionError("nonempty wire map with q = 0")
        return 0
    items = sorted(slot_map.items())
    rot = (items[0][1] - items[0][0]) % q
    for s, t in items:
        if (s + rot) % q != t:
            raise InvalidDiagram("wires do not realise a cyclic shift")
    return rot


def _wire_vertex_pairs(top: PForest, bot: PForest, rot: int) -> list[tuple]:
    """The (top leaf, bottom leaf) pairs joined by wires."""
    tl, bl = top.leaves(), bot.leaves()
    q = len(tl)
    return [(tl[s], bl[(s + rot) % q]) for s in range(q)]


def _wire_wrap(slot: int, rot: int, q: int) -> int:
    """Seam passages of the canonical wire path out of a top marked slot.

    In the normalised picture a positive rotation slides the wires leftward,
    so a wire whose endpoint arithmetic does not overflow crosses the seam
    once in the negative direction.  This pairing (rather than rightward
    sliding) is forced by the twist-transport identity
    ``insert(x * twist, wrap - 1) == insert(x, wrap) * twist`` that keeps the
    group law independent of representative choices.
    """
    return -1 if rot > 0 and slot + rot < q else 0


# -- the sigma-aware engine ---------------------------------------------------


@dataclass(frozen=True)
class _Diag:
    """Internal working shape shared by closed and open diagrams."""

    top: PForest
    bot: PForest
    braid: br.CylBraid
    sigma: tuple  # bottom puncture rank of each interior vertex of bot, in order


def _full_sigma(p: int) -> tuple:
    return tuple(range(p))


def _violations(d: _Diag) -> list[str]:
    out = []
    top, bot, b, sigma = d.top, d.bot, d.braid, d.sigma
    if top.pres != bot.pres:
        out.append("presentations differ")
        return out
    if b.p != top.i_count:
        out.append(f"braid has {b.p} strands but top forest has {top.i_count} interior vertices")
    if top.leaf_count != bot.leaf_count:
        out.append("leaf counts differ")
    if b.q != top.leaf_count:
        out.append(f"braid has {b.q} wires but forests have {top.leaf_count} leaves")
    if top.i_count < bot.i_count:
        out.append("top forest has fewer interior vertices than bottom forest")
    if len(sigma) != bot.i_count:
        out.append("sigma length differs from bottom interior count")
    elif any(s2 <= s1 for s1, s2 in zip(sigma, sigma[1:])):
        out.append("sigma is not strictly increasing")
    elif sigma and (sigma[0] < 0 or sigma[-1] >= b.p):
        out.append("sigma value out of range")
    if not out and b.q:
        tl, bl = top.leaves(), bot.leaves()
        for s in range(b.q):
            if top.letter(tl[s]) != bot.letter(bl[(s + b.rot) % b.q]):
                out.append(f"leaf labels differ along the wire at slot {s}")
                break
    return out


def _expand_at(d: _Diag, top_leaf: tuple, seam_front: bool = False) -> _Diag:
    """Add a cancelling pair: expand the top at a P-leaf and the bottom at
    its wire partner, inserting the parallel bundle along the wire's route."""
    top, bot, b = d.top, d.bot, d.braid
    if not top.is_p_leaf(top_leaf):
        raise NotAPLeaf(f"vertex {top_leaf} is not a P-leaf of the top forest")
    q = b.q
    j = top.leaf_slot(top_leaf)
    j2 = (j + b.rot) % q
    wrap = _wire_wrap(j, b.rot, q)
    bot_leaf = bot.leaves()[j2]

    top2 = top.expand(top_leaf)
    bot2 = bot.expand(bot_leaf)
    bt = _bundle_after_expand(top2, top_leaf)
    bb = _bundle_after_expand(bot2, bot_leaf)
    m = len(bt.member_vids)

    # wires of the expanded diagram, solved back into a single rotation
    tslot = {v: s for s, v in enumerate(top2.leaves())}
    bslot = {v: s for s, v in enumerate(bot2.leaves())}
    slot_map = {}
    for x, y in _wire_vertex_pairs(top, bot, b.rot):
        if x != top_leaf:
            slot_map[tslot[x]] = bslot[y]
    for cx, cy in zip(bt.ruled_child_vids, bb.ruled_child_vids):
        slot_map[tslot[cx]] = bslot[cy]
    q2 = top2.leaf_count
    rot2 = _solve_rotation(q2, slot_map)

    inserted = br.insert_bundle(b, m, bt.rank0, bb.rank0, wrap, seam_front)
    braid2 = br.make(inserted.p, q2, inserted.letters, rot2)

    new_ranks = {v: bb.rank0 + t for t, v in enumerate(bb.member_vids)}
    old_rank = dict(zip(d.bot.interiors(), d.sigma))
    sigma2 = []
    for v in bot2.interiors():
        if v in new_ranks:
            sigma2.append(new_ranks[v])
        else:
            s = old_rank[v]
            sigma2.append(s + m if s >= bb.rank0 else s)
    return _Diag(top2, bot2, braid2, tuple(sigma2))


def _contract_subtree(forest: PForest, vid: tuple) -> PForest:
    return forest._replace(vid, (forest.letter(vid), ()))


def _dipole_candidates(d: _Diag):
    """Vertex pairs passing every combinatorial gate, with route data.

    Yields ``(a, b, top_ranks, bot_ranks, wrap)``; the braid test is left to
    the caller.
    """
    top, bot, b, sigma = d.top, d.bot, d.braid, d.sigma
    pres = top.pres
    q, rot = b.q, b.rot
    perm = b.core.perm()
    bot_interiors = bot.interiors()
    rank_of = dict(zip(bot_interiors, sigma))
    vid_of_rank = {s: v for v, s in rank_of.items()}
    bot_leaf_slots = {v: s for s, v in enumerate(bot.leaves())}

    for a, kind in top.vertex_order():
        sub = top.subtree(a)
        if not sub[1] or any(c[1] for c in sub[1]):
            continue  # only internal vertices with all children leaves
        children = top.children_ids(a)
        ruled_a = [c for c in children if not pres.is_terminal(top.letter(c))]
        term_a = [c for c in children if pres.is_terminal(top.letter(c))]

        if ruled_a:
            s0 = top.leaf_slot(ruled_a[0])
            t0 = (s0 + rot) % q
            c0 = bot.leaves()[t0]
            bpar = bot.parent(c0)
            if bpar is None:
                continue
            wrap = _wire_wrap(s0, rot, q)
        else:
            ra = top.interior_rank(a)
            rb = perm[ra]
            bpar = vid_of_rank.get(rb)
            if bpar is None:
                continue
            wrap = 0
        bsub = bot.subtree(bpar)
        if bsub[0] != sub[0] or not bsub[1] or any(c[1] for c in bsub[1]):
            continue
        bchildren = bot.children_ids(bpar)
        ruled_b = [c for c in bchildren if not pres.is_terminal(bot.letter(c))]
        # every ruled child wire must land on the matching child of bpar
        ok = all(
            (top.leaf_slot(ca) + rot) % q == bot_leaf_slots[cb]
            for ca, cb in zip(ruled_a, ruled_b)
        )
        if not ok:
            continue
        term_b = [c for c in bchildren if pres.is_terminal(bot.letter(c))]
        bot_order = {v: i for i, v in enumerate(bot.interiors())}
        members_a = sorted([a] + term_a, key=top.interior_rank)
        members_b = sorted([bpar] + term_b, key=bot_order.get)
        if any(v not in rank_of for v in members_b):
            continue
        top_ranks = [top.interior_rank(v) for v in members_a]
        bot_ranks = [rank_of[v] for v in members_b]
        if top_ranks != list(range(top_ranks[0], top_ranks[0] + len(top_ranks))):
            continue
        if bot_ranks != list(range(bot_ranks[0], bot_ranks[0] + len(bot_ranks))):
            continue
        if any(perm[ta] != tb for ta, tb in zip(top_ranks, bot_ranks)):
            continue
        yield a, bpar, top_ranks, bot_ranks, wrap


def _delete_ranks(b: br.CylBraid, top_ranks) -> br.CylBraid:
    out = b
    for r in sorted(top_ranks, reverse=True):
        out = br.delete_strand(out, r + 1)
    return out


def _dipole_braid_test(b: br.CylBraid, top_ranks, bot_ranks, wrap) -> bool:
    deleted = _delete_ranks(b, top_ranks)
    cand = br.insert_bundle(
        deleted, len(top_ranks), top_ranks[0], bot_ranks[0], wrap, DETECT_SEAM_FRONT
    )
    return br.is_equal(cand, b)


def _find_dipoles(d: _Diag) -> list[tuple]:
    out = []
    for a, bpar, top_ranks, bot_ranks, wrap in _dipole_candidates(d):
        if _dipole_braid_test(d.braid, top_ranks, bot_ranks, wrap):
            out.append((a, bpar, top_ranks, bot_ranks, wrap))
    return out


def _reduce_dipole(d: _Diag, a, bpar, top_ranks, bot_ranks) -> _Diag:
    top, bot, b, sigma = d.top, d.bot, d.braid, d.sigma
    deleted = _delete_ranks(b, top_ranks)
    top2 = _contract_subtree(top, a)
    bot2 = _contract_subtree(bot, bpar)

    tslot = {v: s for s, v in enumerate(top2.leaves())}
    bslot = {v: s for s, v in enumerate(bot2.leaves())}
    a_children = set(top.children_ids(a))
    slot_map = {}
    for x, y in _wire_vertex_pairs(top, bot, b.rot):
        if x not in a_children:
            slot_map[tslot[x]] = bslot[y]
    slot_map[tslot[a]] = bslot[bpar]
    q2 = top2.leaf_count
    rot2 = _solve_rotation(q2, slot_map)
    braid2 = br.make(deleted.p, q2, deleted.letters, rot2)

    removed = set(bot_ranks)
    old_rank = dict(zip(bot.interiors(), sigma))
    sigma2 = []
    for v in bot2.interiors():
        s = old_rank[v]
        sigma2.append(s - sum(1 for r in removed if r < s))
    return _Diag(top2, bot2, braid2, tuple(sigma2))


def _reduce(d: _Diag) -> _Diag:
    while True:
        dips = _find_dipoles(d)
        if not dips:
            return d
        a, bpar, top_ranks, bot_ranks, _ = dips[0]
        d = _reduce_dipole(d, a, bpar, top_ranks, bot_ranks)


# -- closed diagrams ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ClosedDiagram:
    """A closed braided strand diagram.

    Equality is semantic: forests componentwise and braids as group
    elements, so two diagrams compare equal when their words differ by the
    braid relations.
    """

    top: PForest
    bot: PForest
    braid: br.CylBraid

    def _diag(self) -> _Diag:
        return _Diag(self.top, self.bot, self.braid, _full_sigma(self.braid.p))

    @property
    def pres(self) -> Presentation:
        return self.top.pres

    @property
    def baseword(self) -> Word:
        return self.top.baseword

    def key(self):
        return (self.top.trees, self.bot.trees, br.nf_key(self.braid))

    def __eq__(self, other):
        if not isinstance(other, ClosedDiagram):
            return NotImplemented
        return self.pres == other.pres and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_obj(self) -> dict:
        return {
            "presentation": self.pres.to_obj(),
            "top": self.top.to_obj(),
            "bot": self.bot.to_obj(),
            "braid": br.to_obj(self.braid),
        }

    @staticmethod
    def from_obj(obj: dict) -> "ClosedDiagram":
        pres = Presentation.from_obj(obj["presentation"])
        return ClosedDiagram(
            PForest.from_obj(pres, obj["top"]),
            PForest.from_obj(pres, obj["bot"]),
            br.from_obj(obj["braid"]),
        )


def identity(pres: Presentation, word: Word) -> ClosedDiagram:
    """The neutral diagram: two edgeless forests and no strands."""
    f = eta(pres, word)
    return ClosedDiagram(f, f, br.identity(f.i_count, f.leaf_count))


def violations(d: ClosedDiagram) -> list[str]:
    out = _violations(d._diag())
    if not out and d.top.i_count != d.bot.i_count:
        out.append("interior counts differ")
    if not out and d.top.baseword != d.bot.baseword:
        out.append("basewords differ")
    return out


def validate(d: ClosedDiagram) -> bool:
    return not violations(d)


def add_dipole(d: ClosedDiagram, top_leaf: tuple) -> ClosedDiagram:
    """Expand the top at a P-leaf and the bottom at its wire partner."""
    out = _expand_at(d._diag(), top_leaf)
    return ClosedDiagram(out.top, out.bot, out.braid)


def find_dipoles(d: ClosedDiagram) -> list[tuple]:
    """All cancelling vertex pairs ``(top vertex, bottom vertex)``."""
    return [(a, b) for a, b, *_ in _find_dipoles(d._diag())]


def reduce(d: ClosedDiagram) -> ClosedDiagram:
    """The unique reduced form (no dipoles left)."""
    out = _reduce(d._diag())
    return ClosedDiagram(out.top, out.bot, out.braid)


def reduce_once(d: ClosedDiagram, pair: tuple) -> ClosedDiagram:
    """Reduce one named dipole; used by the confluence oracle."""
    for a, b, tr, brk, _ in _find_dipoles(d._diag()):
        if (a, b) == pair:
            out = _reduce_dipole(d._diag(), a, b, tr, brk)
            return ClosedDiagram(out.top, out.bot, out.braid)
    raise InvalidDiagram(f"{pair} is not a dipole of this diagram")


def expand_bottom_to(d: ClosedDiagram, target: PForest) -> ClosedDiagram:
    """Equipotent representative whose bottom forest is ``target``."""
    if not is_prefix(d.bot, target):
        raise BasewordMismatch("target must contain the bottom forest as a prefix")
    while d.bot != target:
        q = d.braid.q
        for s, v in enumerate(d.bot.leaves()):
            if target.subtree(v)[1]:
                top_leaf = d.top.leaves()[(s - d.braid.rot) % q]
                d = add_dipole(d, top_leaf)
                break
    return d


def inverse(d: ClosedDiagram) -> ClosedDiagram:
    """Upside-down diagram; the group inverse after reduction."""
    return ClosedDiagram(d.bot, d.top, br.inverse(d.braid))


def expand_top_to(d: ClosedDiagram, target: PForest) -> ClosedDiagram:
    return inverse(expand_bottom_to(inverse(d), target))


def multiply(d1: ClosedDiagram, d2: ClosedDiagram) -> ClosedDiagram:
    """Concatenation: expand to a common middle forest, stack, reduce."""
    if d1.pres != d2.pres or d1.baseword != d2.baseword:
        raise BasewordMismatch("factors live over different basewords")
    mid = union(d1.bot, d2.top)
    e1 = expand_bottom_to(d1, mid)
    e2 = expand_top_to(d2, mid)
    prod = ClosedDiagram(e1.top, e2.bot, br.multiply(e2.braid, e1.braid))
    return reduce(prod)


def is_pure(d: ClosedDiagram) -> bool:
    return br.is_pure(d.braid)


# -- the annular shadow -------------------------------------------------------


@dataclass(frozen=True)
class AnnularShadow:
    """Image of a diagram after forgetting the braid: forests plus a shift."""

    top: PForest
    bot: PForest
    shift: int
    balanced: bool

    def star(self, other: "AnnularShadow") -> "AnnularShadow":
        return shadow_multiply(self, other)


def _shadow_reduce(top: PForest, bot: PForest, shift: int):
    pres = top.pres
    while True:
        q = top.leaf_count
        bot_leaf_slots = {v: s for s, v in enumerate(bot.leaves())}
        found = None
        for a, _ in top.vertex_order():
            sub = top.subtree(a)
            if not sub[1] or any(c[1] for c in sub[1]):
                continue
            children = top.children_ids(a)
            ruled_a = [c for c in children if not pres.is_terminal(top.letter(c))]
            if ruled_a:
                t0 = (top.leaf_slot(ruled_a[0]) + shift) % q
                bpar = bot.parent(bot.leaves()[t0])
            else:
                # no wires to locate the partner: match same-letter vertices
                cands = [
                    v
                    for v, _k in bot.vertex_order()
                    if bot.subtree(v)[1]
                    and bot.letter(v) == top.letter(a)
                    and not any(c[1] for c in bot.subtree(v)[1])
                ]
                bpar = cands[0] if cands else None
            if bpar is None:
                continue
            bsub = bot.subtree(bpar)
            if bsub[0] != sub[0] or not bsub[1] or any(c[1] for c in bsub[1]):
                continue
            ruled_b = [
                c for c in bot.children_ids(bpar) if not pres.is_terminal(bot.letter(c))
            ]
            if all(
                (top.leaf_slot(ca) + shift) % q == bot_leaf_slots[cb]
                for ca, cb in zip(ruled_a, ruled_b)
            ):
                found = (a, bpar)
                break
        if found is None:
            return top, bot, shift % q if q else 0
        a, bpar = found
        top2 = _contract_subtree(top, a)
        bot2 = _contract_subtree(bot, bpar)
        tslot = {v: s for s, v in enumerate(top2.leaves())}
        bslot = {v: s for s, v in enumerate(bot2.leaves())}
        a_children = set(top.children_ids(a))
        slot_map = {}
        for x, y in _wire_vertex_pairs(top, bot, shift % q):
            if x not in a_children:
                slot_map[tslot[x]] = bslot[y]
        slot_map[tslot[a]] = bslot[bpar]
        top, bot, shift = top2, bot2, _solve_rotation(top2.leaf_count, slot_map)


def forget(d: ClosedDiagram) -> AnnularShadow:
    """The annular shadow: keep the forests and the marked-point shift."""
    top, bot, shift = _shadow_reduce(d.top, d.bot, d.braid.rot)
    return AnnularShadow(top, bot, shift, d.top.size == d.bot.size)


def _shadow_expand_bottom_to(top: PForest, bot: PForest, shift: int, target: PForest):
    while bot != target:
        q = top.leaf_count
        for s, v in enumerate(bot.leaves()):
            if target.subtree(v)[1]:
                j = (s - shift) % q
                top_leaf = top.leaves()[j]
                top2 = top.expand(top_leaf)
                bot2 = bot.expand(v)
                tslot = {x: t for t, x in enumerate(top2.leaves())}
                bslot = {x: t for t, x in enumerate(bot2.leaves())}
                slot_map = {}
                for x, y in _wire_vertex_pairs(top, bot, shift):
                    if x != top_leaf:
                        slot_map[tslot[x]] = bslot[y]
                ra = [
                    c
                    for c in top2.children_ids(top_leaf)
                    if not top.pres.is_terminal(top2.letter(c))
                ]
                rb = [
                    c
                    for c in bot2.children_ids(v)
                    if not top.pres.is_terminal(bot2.letter(c))
                ]
                for cx, cy in zip(ra, rb):
                    slot_map[tslot[cx]] = bslot[cy]
                top, bot = top2, bot2
                shift = _solve_rotation(top2.leaf_count, slot_map)
                break
    return top, bot, shift


def shadow_multiply(s1: AnnularShadow, s2: AnnularShadow) -> AnnularShadow:
    if s1.top.pres != s2.top.pres or s1.top.baseword != s2.top.baseword:
        raise BasewordMismatch("shadows live over different basewords")
    mid = union(s1.bot, s2.top)
    t1, _, sh1 = _shadow_expand_bottom_to(s1.top, s1.bot, s1.shift, mid)
    # expand the second factor upside down so its top reaches the middle
    t2, _, sh2 = _shadow_expand_bottom_to(
        s2.bot, s2.top, (-s2.shift) % max(s2.top.leaf_count, 1), mid
    )
    q = t1.leaf_count
    top, bot, shift = _shadow_reduce(t1, t2, (sh1 - sh2) % q if q else 0)
    return AnnularShadow(top, bot, shift, s1.balanced and s2.balanced)


# -- random elements ----------------------------------------------------------


def random_forest(pres: Presentation, word: Word, rng: random.Random, expansions: int) -> PForest:
    f = eta(pres, word)
    for _ in range(expansions):
        leaves = f.leaves()
        if not leaves:
            break
        f = f.expand(rng.choice(leaves))
    return f


def random_element(
    pres: Presentation,
    word: Word,
    rng: random.Random,
    atoms: int = 3,
    forest_expansions: int = 3,
) -> ClosedDiagram:
    """A random group element, built from atoms that are valid by construction.

    Atoms are single-crossing braid diagrams, boundary rotations when every
    leaf label agrees, and identity-braid pairs of single expansions of the
    same forest at equal-label leaves.
    """
    out = identity(pres, word)
    for _ in range(atoms):
        f = random_forest(pres, word, rng, rng.randint(1, forest_expansions))
        p, q = f.i_count, f.leaf_count
        choices = ["braid", "planar", "rot"]
        rng.shuffle(choices)
        atom = None
        for kind in choices:
            if kind == "braid" and p >= 2:
                k = rng.randint(1, p - 1) * rng.choice([1, -1])
                atom = ClosedDiagram(f, f, br.make(p, q, (k,)))
                break
            if kind == "rot" and q >= 1 and len(set(f.leaf_word())) == 1:
                atom = ClosedDiagram(f, f, br.rho(p, q, rng.choice([1, -1])))
                break
            if kind == "planar" and q >= 2:
                pairs = []
                lw = f.leaf_word()
                for i in range(q):
                    for j in range(i + 1, q):
                        if lw[i] != lw[j]:
                            continue
                        rhs = pres.rule(lw[i])
                        wi = lw[:i] + rhs + lw[i + 1 :]
                        wj = lw[:j] + rhs + lw[j + 1 :]
                        if wi == wj:
                            pairs.append((i, j))
                if pairs:
                    i, j = rng.choice(pairs)
                    x = f.expand(f.leaves()[i])
                    y = f.expand(f.leaves()[j])
                    atom = ClosedDiagram(x, y, br.identity(x.i_count, x.leaf_count))
                    break
        if atom is None:
            continue
        if rng.random() < 0.5:
            atom = inverse(atom)
        out = multiply(out, atom)
    return out


def random_unreduced(
    pres: Presentation,
    word: Word,
    rng: random.Random,
    atoms: int = 2,
    extra_dipoles: int = 2,
    forest_expansions: int = 2,
) -> ClosedDiagram:
    d = random_element(pres, word, rng, atoms, forest_expansions)
    for _ in range(extra_dipoles):
        leaves = d.top.leaves()
        if not leaves:
            break
        d = add_dipole(d, rng.choice(leaves))
    return d


def all_reduced_forms(d: ClosedDiagram, cap: int = 20000) -> set[ClosedDiagram]:
    """Every reduced form reachable by any reduction order (memoised)."""
    memo: dict[ClosedDiagram, frozenset] = {}
    steps = 0

    def go(x: ClosedDiagram) -> frozenset:
        nonlocal steps
        if x in memo:
            return memo[x]
        steps += 1
        if steps > cap:
            raise RuntimeError("reduction graph larger than the cap")
        dips = find_dipoles(x)
        if not dips:
            res = frozenset([x])
        else:
            acc = set()
            for pair in dips:
                acc |= go(reduce_once(x, pair))
            res = frozenset(acc)
        memo[x] = res
        return res

    return set(go(d))
