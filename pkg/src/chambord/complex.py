"""Open diagrams and the local geometry of the vertex cube complex.

An open diagram may omit interior vertices from its bottom forest; each
surviving one records which puncture it holds through an order-preserving
injection ``sigma`` into bottom puncture slots.  The punctures off the image
carry *free* strands, and wires ending at isolated bottom roots are *free*
wires.  A diagram is *closable* (clopen) when some closed diagram collapses
onto it, which the grammar-level completion search decides.

Vertices of the complex are classes of clopen diagrams up to dipole moves
and the *isocephalese* relation: two reduced diagrams with the same forests
and sigma are identified when their braids differ by an element fixing the
straight arcs that hang from the occupied punctures.  Edges add or remove a
bottom root; the four elementary moves below (top/bottom
expansion/contraction) generate them.

Everything here is pure and deterministic: neighbour enumeration follows the
planar orders, and ball construction is breadth-first with stable keys, so
repeated runs produce identical graphs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache

from . import braid as br
from . import diagram as dg
from .errors import BudgetExceeded, InvalidDiagram, NotClosable
from .grammar import (
    PForest,
    Presentation,
    Word,
    complete_to_closed,
    eta,
    is_prefix,
    remove_crown,
    union,
)

DEFAULT_MAX_VERTICES = 20_000

TOP = "top"
BOTTOM = "bottom"


@dataclass(frozen=True, eq=False)
class OpenDiagram:
    """An open braided strand diagram ``(top, braid, sigma, bot)``.

    ``sigma`` lists, for the interior vertices of the bottom forest in
    left-right order, the 0-based bottom puncture slots they occupy; it is
    strictly increasing.  A closed diagram is the special case where sigma
    is the full range.
    """

    top: PForest
    bot: PForest
    braid: br.CylBraid
    sigma: tuple

    def _diag(self) -> dg._Diag:
        return dg._Diag(self.top, self.bot, self.braid, self.sigma)

    @property
    def pres(self) -> Presentation:
        return self.top.pres

    @property
    def baseword(self) -> Word:
        return self.top.baseword

    @property
    def height(self) -> int:
        return self.top.i_count - self.bot.i_count

    def free_punctures(self) -> list[int]:
        occupied = set(self.sigma)
        return [s for s in range(self.braid.p) if s not in occupied]

    def key(self):
        return (self.top.trees, self.bot.trees, self.sigma, br.nf_key(self.braid))

    def __eq__(self, other):
        if not isinstance(other, OpenDiagram):
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
            "sigma": list(self.sigma),
        }

    @staticmethod
    def from_obj(obj: dict) -> "OpenDiagram":
        pres = Presentation.from_obj(obj["presentation"])
        return OpenDiagram(
            PForest.from_obj(pres, obj["top"]),
            PForest.from_obj(pres, obj["bot"]),
            br.from_obj(obj["braid"]),
            tuple(obj["sigma"]),
        )


def from_closed(d: dg.ClosedDiagram) -> OpenDiagram:
    return OpenDiagram(d.top, d.bot, d.braid, tuple(range(d.braid.p)))


def violations(d: OpenDiagram) -> list[str]:
    return dg._violations(d._diag())


def validate(d: OpenDiagram) -> bool:
    return not violations(d)


def free_slot_table(d: OpenDiagram) -> tuple:
    """Free punctures per gap between consecutive occupied slots."""
    out = []
    prev = -1
    for s in d.sigma:
        out.append(s - prev - 1)
        prev = s
    out.append(d.braid.p - 1 - prev)
    return tuple(out)


def is_closable(d: OpenDiagram) -> bool:
    """Whether some closed diagram collapses onto ``d``.

    Decided by the completion search: the bottom forest must complete to the
    baseword by adding exactly the missing interior vertices, interleaved
    with the surviving ones the way the free punctures are.
    """
    added = d.braid.p - d.bot.i_count
    if added < 0:
        return False
    for _ in complete_to_closed(d.bot, d.baseword, added, free_slot_table(d)):
        return True
    return False


def closures(d: OpenDiagram) -> list[dg.ClosedDiagram]:
    """All closed diagrams collapsing onto ``d``."""
    added = d.braid.p - d.bot.i_count
    outs = []
    for bplus in complete_to_closed(d.bot, d.baseword, added, free_slot_table(d)):
        outs.append(dg.ClosedDiagram(d.top, bplus, d.braid))
    return outs


def reduce_open(d: OpenDiagram) -> OpenDiagram:
    out = dg._reduce(d._diag())
    return OpenDiagram(out.top, out.bot, out.braid, out.sigma)


def isocephalese(d1: OpenDiagram, d2: OpenDiagram) -> bool:
    """Whether two reduced diagrams differ by an arc-fixing braid.

    Requires the same forests and sigma; with no occupied punctures any two
    such diagrams are identified.
    """
    if d1.pres != d2.pres:
        return False
    if (d1.top.trees, d1.bot.trees, d1.sigma) != (d2.top.trees, d2.bot.trees, d2.sigma):
        return False
    if not d1.sigma:
        return True
    diff = br.multiply(d2.braid, br.inverse(d1.braid))
    return br.fixes_straight_arcs(diff, [s + 1 for s in d1.sigma])


def _canonical_rep(d: OpenDiagram) -> OpenDiagram:
    """With no occupied punctures the braid is immaterial; normalise it."""
    if d.sigma:
        return d
    q = d.braid.q
    if q == 0:
        return OpenDiagram(d.top, d.bot, br.identity(d.braid.p, 0), d.sigma)
    tw = d.top.leaf_word()
    bw = d.bot.leaf_word()
    for rot in range(q):
        if all(tw[s] == bw[(s + rot) % q] for s in range(q)):
            return OpenDiagram(d.top, d.bot, br.make(d.braid.p, q, (), rot), d.sigma)
    raise InvalidDiagram("no rotation matches the leaf labels")


@dataclass(frozen=True, eq=False)
class VertexRef:
    """A vertex of the complex.

    Every vertex is a group translate of a *resting* vertex — the class of
    ``(rest_top, id, empty, leaves)`` — so it is stored as the translating
    element together with the resting top forest.  Vertex equality then
    reduces to the stabiliser characterisation: two translates of the same
    resting vertex agree exactly when the difference element expands to an
    equal-forest diagram over ``rest_top``.  A reduced clopen representative
    is carried along for geometry (heights, distances, exports).
    """

    elt: "dg.ClosedDiagram"
    rest_top: PForest
    rep: OpenDiagram
    height: int

    def __eq__(self, other):
        if not isinstance(other, VertexRef):
            return NotImplemented
        if self.rep.pres != other.rep.pres or self.height != other.height:
            return False
        mine, theirs = self.rep, other.rep
        if (mine.top.trees, mine.bot.trees, mine.sigma) == (
            theirs.top.trees,
            theirs.bot.trees,
            theirs.sigma,
        ):
            # aligned representatives: the arc-fixing comparison decides
            return isocephalese(mine, theirs)
        # representatives reached through different translates may disagree
        # in how the free punctures sit; fall back to the stabiliser test
        diff = dg.multiply(dg.inverse(other.elt), self.elt)
        if self.rest_top == other.rest_top:
            return _stabilizes_resting(diff, self.rest_top)
        z = _canonical_rep(reduce_open(_splice(diff, resting_rep(self.rest_top))))
        return z.sigma == () and z.top == other.rest_top

    def __hash__(self):
        # only class invariants: the bottom root word, the interior and leaf
        # counts, and the height (the forests themselves may differ between
        # representatives reached through different translates)
        d = self.rep
        return hash((self.height, d.bot.baseword, d.bot.i_count, d.bot.leaf_count))

    def sort_key(self):
        d = self.rep
        return (
            self.height,
            d.top.trees,
            d.bot.trees,
            d.sigma,
            br.nf_key(d.braid) if d.sigma else (),
        )


def _stabilizes_resting(g: "dg.ClosedDiagram", top: PForest) -> bool:
    """Whether an element is supported on the given forest.

    These are exactly the elements equipotent to a braid over ``top``; by
    rigidity that holds iff expanding the reduced form's bottom to ``top``
    brings the top forest to ``top`` as well.
    """
    r = dg.reduce(g)
    if not is_prefix(r.bot, top):
        return False
    return dg.expand_bottom_to(r, top).top == top


def resting_rep(top: PForest) -> OpenDiagram:
    """The canonical representative of the resting vertex over ``top``."""
    m = top.leaf_word()
    bot = eta(top.pres, m) if m else eta(top.pres, top.baseword)
    return OpenDiagram(top, bot, br.identity(top.i_count, top.leaf_count), ())


def _splice(elt: "dg.ClosedDiagram", rep: OpenDiagram) -> OpenDiagram:
    """Glue an element's cylinder on top of a clopen representative.

    Works through a closure: the representative is closed up, forests are
    expanded to a common middle, braids compose with the later factor on the
    left, and the same interior vertices are removed again.
    """
    closed = closures(rep)[0]
    free = set(rep.free_punctures())
    removed = {vid for r, vid in enumerate(closed.bot.interiors()) if r in free}
    mid = union(elt.bot, closed.top)
    ge = dg.expand_bottom_to(elt, mid)
    ce = dg.expand_top_to(closed, mid)
    moved_braid = br.multiply(ce.braid, ge.braid)
    sigma = tuple(
        r for r, vid in enumerate(ce.bot.interiors()) if vid not in removed
    )
    bot_open = remove_crown(ce.bot, removed)
    return OpenDiagram(ge.top, bot_open, moved_braid, sigma)


@lru_cache(maxsize=100_000)
def _make_vertex_cached(elt: "dg.ClosedDiagram", rest_top: PForest) -> VertexRef:
    rep = _canonical_rep(reduce_open(_splice(elt, resting_rep(rest_top))))
    return VertexRef(elt, rest_top, rep, rep.height)


def make_vertex(elt: "dg.ClosedDiagram", rest_top: PForest) -> VertexRef:
    """The translate of the resting vertex over ``rest_top`` by ``elt``."""
    return _make_vertex_cached(dg.reduce(elt), rest_top)


def resting_vertex(rest_top: PForest) -> VertexRef:
    rep = _canonical_rep(resting_rep(rest_top))
    e = dg.identity(rest_top.pres, rest_top.baseword)
    return VertexRef(e, rest_top, rep, rep.height)


def vertex_of(d: OpenDiagram) -> VertexRef:
    """The vertex represented by a clopen diagram.

    Closing the diagram up and undoing the closure translates the class onto
    a resting vertex, whose top forest is read off the reduction; the vertex
    is then the closure element applied to that resting vertex.
    """
    if not is_closable(d):
        raise NotClosable("diagram admits no closed extension")
    red = _canonical_rep(reduce_open(d))
    closed = closures(red)[0]
    translate = OpenDiagram(
        closed.bot,
        red.bot,
        br.identity(closed.braid.p, closed.braid.q),
        red.sigma,
    )
    rest_top = _canonical_rep(reduce_open(translate)).top
    return VertexRef(dg.reduce(closed), rest_top, red, red.height)


def base_vertex(pres: Presentation, word: Word) -> VertexRef:
    return vertex_of(from_closed(dg.identity(pres, word)))


# -- the four elementary moves -------------------------------------------------


def _solve_wires(top2: PForest, bot2: PForest, pairs) -> int:
    tslot = {v: s for s, v in enumerate(top2.leaves())}
    bslot = {v: s for s, v in enumerate(bot2.leaves())}
    return dg._solve_rotation(
        top2.leaf_count, {tslot[x]: bslot[y] for x, y in pairs}
    )


def top_expansion(d: OpenDiagram, top_leaf: tuple) -> OpenDiagram | None:
    """Expand a top P-leaf whose wire is free (ends at an isolated root).

    The isolated partner splits into the rule's letters; ruled ones become
    new marked points, unruled ones catch the new parallel strands, and the
    strand from the expanded vertex itself dangles free.  Returns None when
    the wire is not free.
    """
    top, bot, b, sigma = d.top, d.bot, d.braid, d.sigma
    pres = d.pres
    q = b.q
    j = top.leaf_slot(top_leaf)
    j2 = (j + b.rot) % q
    partner = bot.leaves()[j2]
    if partner[1] or bot.subtree(partner)[1]:
        return None  # not an isolated root
    wrap = dg._wire_wrap(j, b.rot, q)

    top2 = top.expand(top_leaf)
    bundle = dg._bundle_after_expand(top2, top_leaf)
    m = len(bundle.member_vids)
    rhs = pres.rule(top.letter(top_leaf))
    rb = partner[0]
    bot2 = PForest(
        pres, bot.trees[:rb] + tuple((x, ()) for x in rhs) + bot.trees[rb + 1 :]
    )

    # wires: everything except the expanded leaf keeps its partner, read off
    # vertex-wise in the new forests; new ruled children pair in order
    old_pairs = [
        (x, (y[0] + len(rhs) - 1, y[1]) if y[0] > rb else y)
        for x, y in dg._wire_vertex_pairs(top, bot, b.rot)
        if x != top_leaf
    ]
    ruled_bot = [
        (rb + t, ()) for t, letter in enumerate(rhs) if not pres.is_terminal(letter)
    ]
    new_pairs = list(zip(bundle.ruled_child_vids, ruled_bot))
    rot2 = _solve_wires(top2, bot2, old_pairs + new_pairs)

    old_interiors = bot.interiors()
    left_ranks = [s for v, s in zip(old_interiors, sigma) if v[0] < rb]
    right_ranks = [s for v, s in zip(old_interiors, sigma) if v[0] > rb]
    lo = (max(left_ranks) + 1) if left_ranks else 0
    hi = min(right_ranks) if right_ranks else b.p
    offset = {v: t for t, v in enumerate(bundle.member_vids)}
    term_bot = [
        (rb + t, ()) for t, letter in enumerate(rhs) if pres.is_terminal(letter)
    ]
    term_top = [v for v in bundle.member_vids if v != top_leaf]

    def build(r_bot: int) -> OpenDiagram:
        inserted = br.insert_bundle(b, m, bundle.rank0, r_bot, wrap)
        braid2 = br.make(inserted.p, top2.leaf_count, inserted.letters, rot2)
        new_rank = {cb: r_bot + offset[ct] for ct, cb in zip(term_top, term_bot)}
        old_rank = {}
        for v, s in zip(old_interiors, sigma):
            nv = (v[0] + len(rhs) - 1, v[1]) if v[0] > rb else v
            old_rank[nv] = s + m if s >= r_bot else s
        sigma2 = tuple(
            new_rank[v] if v in new_rank else old_rank[v] for v in bot2.interiors()
        )
        return OpenDiagram(top2, bot2, braid2, sigma2)

    if not term_bot:
        # only the free strand enters this slot gap: every position gives
        # the same slot table, so hug the left occupied neighbour
        return build(lo)
    # new occupied punctures split the gap's free punctures; scan for the
    # geometric position, the one that stays closable
    for r_bot in range(lo, hi + 1):
        cand = build(r_bot)
        if is_closable(cand):
            return cand
    return None


def _splice_roots(bot: PForest, start: int, count: int, new_trees: tuple) -> PForest:
    return PForest(bot.pres, bot.trees[:start] + new_trees + bot.trees[start + count :])


def top_contractions(d: OpenDiagram) -> list[OpenDiagram]:
    """Inverses of top expansions, tested up to isocephalese."""
    top, bot, b, sigma = d.top, d.bot, d.braid, d.sigma
    pres = d.pres
    q, rot = b.q, b.rot
    perm = b.core.perm()
    occupied = set(sigma)
    rank_of = dict(zip(bot.interiors(), sigma))
    out = []

    for a, _ in top.vertex_order():
        sub = top.subtree(a)
        if not sub[1] or any(c[1] for c in sub[1]):
            continue
        children = top.children_ids(a)
        # locate the bottom family: one isolated root per child, consecutive
        family = []
        ok = True
        for c in children:
            if pres.is_terminal(top.letter(c)):
                rank = perm[top.interior_rank(c)]
                vid = next((v for v, s in rank_of.items() if s == rank), None)
                if vid is None or vid[1] or bot.subtree(vid)[1]:
                    ok = False
                    break
                family.append(vid)
            else:
                slot = (top.leaf_slot(c) + rot) % q
                vid = bot.leaves()[slot]
                if vid[1] or bot.subtree(vid)[1]:
                    ok = False
                    break
                family.append(vid)
        if not ok or not family:
            continue
        roots = [v[0] for v in family]
        if roots != list(range(roots[0], roots[0] + len(roots))):
            continue
        if tuple(bot.letter(v) for v in family) != tuple(top.letter(c) for c in children):
            continue
        # the strand leaving the contracted vertex must be free
        if perm[top.interior_rank(a)] in occupied:
            continue
        term_top = [c for c in children if pres.is_terminal(top.letter(c))]
        members = sorted([a] + term_top, key=top.interior_rank)
        top_ranks = [top.interior_rank(v) for v in members]
        if top_ranks != list(range(top_ranks[0], top_ranks[0] + len(top_ranks))):
            continue
        bot_ranks = [perm[r] for r in top_ranks]
        if bot_ranks != list(range(bot_ranks[0], bot_ranks[0] + len(bot_ranks))):
            continue
        ruled = [c for c in children if not pres.is_terminal(top.letter(c))]
        wrap = dg._wire_wrap(top.leaf_slot(ruled[0]), rot, q) if ruled else 0

        deleted = dg._delete_ranks(b, top_ranks)
        cand = br.insert_bundle(
            deleted, len(top_ranks), top_ranks[0], bot_ranks[0], wrap,
            dg.DETECT_SEAM_FRONT,
        )
        diff = br.multiply(cand, br.inverse(b))
        if not br.fixes_straight_arcs(diff, [s + 1 for s in sigma]):
            continue

        top2 = dg._contract_subtree(top, a)
        bot2 = _splice_roots(bot, roots[0], len(roots), ((top.letter(a), ()),))
        pairs = []
        fam = set(family)
        a_children = set(children)
        shift = len(roots) - 1
        for x, y in dg._wire_vertex_pairs(top, bot, rot):
            if x in a_children:
                continue
            ny = (y[0] - shift, y[1]) if y[0] > roots[-1] else y
            pairs.append((x, ny))
        pairs.append((a, (roots[0], ())))
        rot2 = _solve_wires(top2, bot2, pairs)
        braid2 = br.make(deleted.p, top2.leaf_count, deleted.letters, rot2)
        removed = set(bot_ranks)
        sigma2 = []
        for v in bot2.interiors():
            ov = (v[0] + shift, v[1]) if v[0] > roots[0] else v
            s = rank_of[ov]
            sigma2.append(s - sum(1 for r in removed if r < s))
        cand_diag = OpenDiagram(top2, bot2, braid2, tuple(sigma2))
        if is_closable(cand_diag):
            out.append(cand_diag)
    return out


def bottom_contractions(d: OpenDiagram) -> list[OpenDiagram]:
    """Remove one interior root of the bottom forest, freeing its strand."""
    out = []
    for ri, tree in enumerate(d.bot.trees):
        vid = (ri, ())
        if d.bot.is_p_leaf(vid):
            continue
        children = tree[1]
        if not children and len(d.bot.trees) == 1:
            continue  # removal would empty the forest
        bot2 = _splice_roots(d.bot, ri, 1, children)
        sigma2 = tuple(
            s for v, s in zip(d.bot.interiors(), d.sigma) if v != vid
        )
        out.append(OpenDiagram(d.top, bot2, d.braid, sigma2))
    return out


def bottom_expansions(d: OpenDiagram) -> list[OpenDiagram]:
    """Add one interior root: a rule instance over consecutive roots, or a
    bare unruled letter, attached to any admissible free puncture."""
    pres = d.pres
    bot = d.bot
    roots = bot.trees

    # each candidate: (new forest, map old interior vid -> new vid, new vid)
    candidates = []
    for letter, rhs in pres.rules:
        k = len(rhs)
        for ri in range(len(roots) - k + 1):
            if tuple(t[0] for t in roots[ri : ri + k]) != rhs:
                continue
            bot2 = _splice_roots(bot, ri, k, ((letter, roots[ri : ri + k]),))

            def vmap(v, ri=ri, k=k):
                if v[0] < ri:
                    return v
                if v[0] < ri + k:
                    return (ri, (v[0] - ri,) + v[1])
                return (v[0] - k + 1, v[1])

            candidates.append((bot2, vmap, (ri, ())))
    for letter in pres.letters:
        if not pres.is_terminal(letter):
            continue
        for gi in range(len(roots) + 1):
            bot2 = PForest(pres, roots[:gi] + ((letter, ()),) + roots[gi:])

            def vmap(v, gi=gi):
                return v if v[0] < gi else (v[0] + 1, v[1])

            candidates.append((bot2, vmap, (gi, ())))

    out = []
    occupied = set(d.sigma)
    for bot2, vmap, new_vid in candidates:
        rank_of = {vmap(v): s for v, s in zip(bot.interiors(), d.sigma)}
        template = [
            None if v == new_vid else rank_of[v] for v in bot2.interiors()
        ]
        pos = template.index(None)
        lo = template[pos - 1] if pos > 0 else -1
        hi = template[pos + 1] if pos + 1 < len(template) else d.braid.p
        for f in range(lo + 1, hi):
            if f in occupied:
                continue
            sigma2 = tuple(f if s is None else s for s in template)
            cand = OpenDiagram(d.top, bot2, d.braid, sigma2)
            if is_closable(cand):
                out.append(cand)
    return out


def _resting_moves(rest_top: PForest) -> list[OpenDiagram]:
    """All one-move diagrams out of the resting vertex over ``rest_top``."""
    d = resting_rep(rest_top)
    out: list[OpenDiagram] = []
    for leaf in d.top.leaves():
        e = top_expansion(d, leaf)
        if e is not None:
            out.append(e)
    out.extend(top_contractions(d))
    out.extend(bottom_contractions(d))
    out.extend(bottom_expansions(d))
    return out


@lru_cache(maxsize=50_000)
def _resting_neighbor_data(pres: Presentation, trees: tuple) -> tuple:
    """Neighbour data ``(elt, rest_top)`` of a resting vertex (cached)."""
    rest_top = PForest(pres, trees)
    d = resting_rep(rest_top)
    found: list[tuple] = []
    verts: list[VertexRef] = []
    for cand in _resting_moves(rest_top):
        u = vertex_of(cand)
        if abs(u.height - d.height) != 1:
            raise InvalidDiagram("adjacent heights must differ by one")
        if any(u == w for w in verts):
            continue
        verts.append(u)
        found.append((u.elt, u.rest_top))
    return tuple(found)


def neighbors_with_moves(v: VertexRef) -> list[tuple[VertexRef, str]]:
    """Deduplicated neighbours of a vertex, each edge tagged top/bottom.

    Neighbours are computed once at the resting vertex and carried across by
    the translating element.  The tag is read off the endpoints' reduced
    representatives: a *top* edge changes the top forest label, a *bottom*
    edge only adds or removes an interior root below.
    """
    out = []
    for elt0, top0 in _resting_neighbor_data(v.rest_top.pres, v.rest_top.trees):
        u = make_vertex(dg.multiply(v.elt, elt0), top0)
        kind = TOP if u.rep.top != v.rep.top else BOTTOM
        out.append((u, kind))
    return out


def neighbors(v: VertexRef) -> list[VertexRef]:
    return [u for u, _ in neighbors_with_moves(v)]


# -- balls and audits -----------------------------------------------------------


@dataclass
class Ball:
    """A combinatorial ball: vertices in discovery order, edges with types."""

    root: VertexRef
    radius: int
    vertices: list
    edges: set  # (i, j, type) with i < j
    dist: list

    def adjacency(self) -> list[set]:
        adj = [set() for _ in self.vertices]
        for i, j, _ in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def edge_type(self) -> dict:
        return {(i, j): t for i, j, t in self.edges}

    def heights(self) -> list[int]:
        return [v.height for v in self.vertices]

    def to_obj(self) -> dict:
        return {
            "radius": self.radius,
            "vertices": [
                {
                    "id": i,
                    "height": v.height,
                    "distance": self.dist[i],
                    "topForest": v.rep.top.to_obj(),
                    "botForest": v.rep.bot.to_obj(),
                    "sigma": list(v.rep.sigma),
                }
                for i, v in enumerate(self.vertices)
            ],
            "edges": [
                {"u": i, "v": j, "type": t} for i, j, t in sorted(self.edges)
            ],
        }

    def to_dot(self) -> str:
        lines = ["graph ball {"]
        for i, v in enumerate(self.vertices):
            lines.append(f'  n{i} [label="{i} h={v.height}"];')
        for i, j, t in sorted(self.edges):
            style = "solid" if t == TOP else "dashed"
            lines.append(f"  n{i} -- n{j} [style={style}];")
        lines.append("}")
        return "\n".join(lines)


def ball(root: VertexRef, radius: int, max_vertices: int | None = None) -> Ball:
    """Breadth-first ball in the adjacency graph, deterministic ordering."""
    if max_vertices is None:
        max_vertices = int(
            os.environ.get("CHAMBORD_MAX_VERTICES", DEFAULT_MAX_VERTICES)
        )
    verts: list[VertexRef] = [root]
    index: dict = {}

    def find(u: VertexRef) -> int | None:
        for i in index.get(hash(u), []):
            if verts[i] == u:
                return i
        return None

    index[hash(root)] = [0]
    dist = [0]
    edges: set = set()
    frontier = [0]
    for layer in range(radius):
        next_frontier = []
        for i in frontier:
            for u, kind in neighbors_with_moves(verts[i]):
                j = find(u)
                if j is None:
                    if len(verts) >= max_vertices:
                        raise BudgetExceeded(
                            f"ball exceeded {max_vertices} vertices"
                        )
                    j = len(verts)
                    verts.append(u)
                    index.setdefault(hash(u), []).append(j)
                    dist.append(layer + 1)
                    next_frontier.append(j)
                edges.add((min(i, j), max(i, j), kind))
        frontier = next_frontier
    # drop edges discovered between frontier vertices beyond the radius is
    # unnecessary: both endpoints are inside by construction
    return Ball(root, radius, verts, edges, dist)


@dataclass
class AuditReport:
    checks: dict = field(default_factory=dict)

    def record(self, name: str, passed: bool, evidence=None):
        self.checks[name] = {"passed": passed, "evidence": evidence}

    @property
    def all_passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())

    def to_obj(self) -> dict:
        return {"passed": self.all_passed, "checks": self.checks}


def _squares(adj: list[set]) -> list[tuple]:
    """All 4-cycles (x, y, z, w), each listed once from its smallest vertex."""
    out = []
    n = len(adj)
    for x in range(n):
        for z in range(x + 1, n):
            common = sorted(c for c in adj[x] & adj[z] if c > x)
            for ai in range(len(common)):
                for bi in range(ai + 1, len(common)):
                    out.append((x, common[ai], z, common[bi]))
    return out


def audit_cat0(b: Ball) -> AuditReport:
    """Local nonpositive-curvature checks on a ball.

    Runs four audits: no complete bipartite K(3,2) subgraph; the square
    orientation law (in any 4-cycle, if one side goes up in height then so
    does the opposite side); opposite square edges share the top/bottom
    type; and every interior corner of three pairwise-sharing squares spans
    a 3-cube.  Cube completion is only demanded where all candidate vertices
    are provably inside the ball, so truncation cannot fake a failure.
    """
    report = AuditReport()
    adj = b.adjacency()
    heights = b.heights()
    etype = b.edge_type()
    n = len(adj)

    k32 = []
    for x in range(n):
        for z in range(x + 1, n):
            common = adj[x] & adj[z]
            if len(common) >= 3:
                k32.append({"pair": [x, z], "commonNeighbors": sorted(common)[:3]})
    report.record("no_k32", not k32, k32[:5] or None)

    squares = _squares(adj)
    bad_orient = []
    bad_type = []
    for (x, y, z, w) in squares:
        cycle = [x, y, z, w]
        for r in range(4):
            p0, q0, r0, s0 = (
                cycle[r],
                cycle[(r + 1) % 4],
                cycle[(r + 2) % 4],
                cycle[(r + 3) % 4],
            )
            if heights[p0] < heights[q0] and not heights[s0] < heights[r0]:
                bad_orient.append([p0, q0, r0, s0])
        e = lambda u, v: etype[(min(u, v), max(u, v))]
        if e(x, y) != e(z, w) or e(y, z) != e(w, x):
            bad_type.append([x, y, z, w])
    report.record("square_orientation", not bad_orient, bad_orient[:5] or None)
    report.record("square_edge_types", not bad_type, bad_type[:5] or None)

    missing = []
    corners = 0
    for x in range(n):
        nb = sorted(adj[x])
        for ia in range(len(nb)):
            for ib in range(ia + 1, len(nb)):
                for ic in range(ib + 1, len(nb)):
                    a, bb, c = nb[ia], nb[ib], nb[ic]
                    for ab in sorted((adj[a] & adj[bb]) - {x}):
                        for bc in sorted((adj[bb] & adj[c]) - {x}):
                            for ac in sorted((adj[a] & adj[c]) - {x}):
                                seven = [x, a, bb, c, ab, bc, ac]
                                if len(set(seven)) != 7:
                                    continue
                                if max(b.dist[v] for v in seven) > b.radius - 1:
                                    continue
                                corners += 1
                                done = (adj[ab] & adj[bc] & adj[ac]) - {x}
                                if not done:
                                    missing.append(seven)
    report.record(
        "three_cube",
        not missing,
        {"failures": missing[:5], "cornersChecked": corners} if missing else {"cornersChecked": corners},
    )
    return report


def distance_to_base(v: VertexRef) -> int:
    """Graph distance to the base vertex: interior counts of both forests."""
    return v.rep.top.i_count + v.rep.bot.i_count
