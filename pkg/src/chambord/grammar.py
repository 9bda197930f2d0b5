"""Arboreal semigroup presentations and their planar labelled forests.

A presentation is *arboreal* when every relation rewrites a single letter and
the letter-to-word rule map is injective in both directions.  Such a
presentation, together with a baseword w, generates an infinite labelled
forest; the finite prefixes of that forest (the P-forests) are the raw
material for strand diagrams.  The infinite forest is never materialised:
everything is answered through prefixes and the rule map.

Conventions used throughout the package:

* a *letter* is a nonempty token, possibly several characters long;
* a *word* is a tuple of letters;
* a tree is a nested pair ``(letter, children)`` with ``children`` a tuple of
  trees, and a forest is a tuple of trees;
* a vertex id is ``(root_index, path)`` where ``path`` is the tuple of child
  indices leading down from the root.  Ids are stable under expansion at
  other vertices.

A leaf whose letter has a rule is a *P-leaf* (it would have children in the
infinite forest); every other vertex, including a leaf with an unruled
letter, is *P-interior*.  P-leaves index wires and marked points, P-interior
vertices index strands and punctures.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from .errors import DSLSyntaxError, NotAPLeaf, NotArboreal, UnknownName

Tree = tuple  # (letter, tuple of child Trees)
VertexId = tuple  # (root_index, tuple of child indices)
Word = tuple  # tuple of letters

KIND_INTERIOR = "interior"
KIND_LEAF = "leaf"

_LETTER_RE = re.compile(r"^[A-Za-z0-9_']+$")


@dataclass(frozen=True)
class Presentation:
    """An arboreal semigroup presentation: an alphabet plus a rule map.

    ``rules`` stores ``(letter, right_hand_side)`` pairs in declaration
    order.  A letter without a rule is *terminal*.
    """

    letters: tuple[str, ...]
    rules: tuple[tuple[str, Word], ...]
    _rule_map: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if len(set(self.letters)) != len(self.letters):
            raise NotArboreal("duplicate letter in alphabet")
        seen_lhs: set[str] = set()
        seen_rhs: set[Word] = set()
        for lhs, rhs in self.rules:
            if lhs not in self.letters:
                raise DSLSyntaxError(f"rule for undeclared letter {lhs!r}")
            if not rhs:
                raise DSLSyntaxError(f"empty right side for letter {lhs!r}")
            for x in rhs:
                if x not in self.letters:
                    raise DSLSyntaxError(f"undeclared letter {x!r} in a rule")
            if lhs in seen_lhs:
                raise NotArboreal(f"duplicate lhs {lhs!r}")
            if rhs in seen_rhs:
                raise NotArboreal(f"duplicate rhs {' '.join(rhs)!r}")
            seen_lhs.add(lhs)
            seen_rhs.add(rhs)
        object.__setattr__(self, "_rule_map", dict(self.rules))

    def rule(self, letter: str) -> Word | None:
        """Right side of the rule for ``letter``, or None if terminal."""
        return self._rule_map.get(letter)

    def is_terminal(self, letter: str) -> bool:
        return letter not in self._rule_map

    def word(self, text: str) -> Word:
        """Parse a whitespace-separated word over this alphabet."""
        parts = tuple(text.split())
        if not parts:
            raise DSLSyntaxError("empty word")
        for x in parts:
            if x not in self.letters:
                raise DSLSyntaxError(f"undeclared letter {x!r} in word")
        return parts

    def to_obj(self) -> dict:
        return {
            "letters": list(self.letters),
            "rules": [[lhs, list(rhs)] for lhs, rhs in self.rules],
        }

    @staticmethod
    def from_obj(obj: dict) -> "Presentation":
        return Presentation(
            tuple(obj["letters"]),
            tuple((lhs, tuple(rhs)) for lhs, rhs in obj["rules"]),
        )


def parse_presentation(text: str) -> Presentation:
    """Parse ``"<" letters "|" rule (";" rule)* ">"`` into a Presentation.

    Letters are comma-separated; words are whitespace-separated letters, so
    multi-character letter names are unambiguous.  Raises DSLSyntaxError on
    malformed input and NotArboreal when the rule map is not injective.
    """
    stripped = text.strip()
    if not stripped.startswith("<") or not stripped.endswith(">"):
        raise DSLSyntaxError("presentation must be enclosed in < >")
    body = stripped[1:-1]
    if "|" not in body:
        raise DSLSyntaxError("missing | between letters and rules")
    letters_part, rules_part = body.split("|", 1)
    letters = tuple(tok.strip() for tok in letters_part.split(",") if tok.strip())
    if not letters:
        raise DSLSyntaxError("empty alphabet")
    for tok in letters:
        if not _LETTER_RE.match(tok):
            raise DSLSyntaxError(f"bad letter name {tok!r}")
    rules: list[tuple[str, Word]] = []
    for chunk in rules_part.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise DSLSyntaxError(f"rule {chunk!r} missing =")
        lhs_text, rhs_text = chunk.split("=", 1)
        lhs_tokens = lhs_text.split()
        if len(lhs_tokens) != 1:
            raise NotArboreal("lhs not a letter")
        rhs = tuple(rhs_text.split())
        if not rhs:
            raise DSLSyntaxError(f"rule for {lhs_tokens[0]!r} has empty rhs")
        rules.append((lhs_tokens[0], rhs))
    return Presentation(letters, tuple(rules))


_CATALOG_RE = re.compile(r"^([A-Za-z_]+)(?:\(([-0-9,\s]*)\))?$")


def catalog(name: str) -> tuple[Presentation, Word]:
    """Return a shipped ``(presentation, baseword)`` pair by name.

    Known names: ``thompsonV``, ``higman(n,m)``, ``houghton(n)``,
    ``greenberg_sergiescu``, ``lamplighter``.
    """
    m = _CATALOG_RE.match(name.strip())
    if not m:
        raise UnknownName(f"bad catalog name {name!r}")
    base, argtext = m.group(1), m.group(2)
    args = [int(a) for a in argtext.split(",")] if argtext else []

    if base == "thompsonV":
        if args:
            raise UnknownName("thompsonV takes no arguments")
        return parse_presentation("<a | a = a a>"), ("a",)
    if base == "higman":
        if len(args) != 2:
            raise UnknownName("higman takes (n, m)")
        n, mm = args
        if n < 2 or mm < 1:
            raise UnknownName("higman requires n >= 2 and m >= 1")
        if mm == n + 1:
            rules = f"a = {' '.join(['a'] * n)}"
            return parse_presentation(f"<a | {rules}>"), ("a",)
        pres = parse_presentation(
            f"<a,b | a = {' '.join(['b'] * mm)} ; b = {' '.join(['b'] * n)}>"
        )
        return pres, ("a",)
    if base == "houghton":
        if len(args) != 1:
            raise UnknownName("houghton takes (n)")
        n = args[0]
        if n < 2:
            raise UnknownName("houghton requires n >= 2")
        bs = [f"b{i}" for i in range(1, n + 1)]
        rules = [f"a = {' '.join(bs)}"] + [f"{b} = {b}" for b in bs]
        pres = parse_presentation(f"<a,{','.join(bs)} | {' ; '.join(rules)}>")
        return pres, ("a",)
    if base == "greenberg_sergiescu":
        if args:
            raise UnknownName("greenberg_sergiescu takes no arguments")
        return parse_presentation("<a,b | a = a b a ; b = b>"), ("a",)
    if base == "lamplighter":
        if args:
            raise UnknownName("lamplighter takes no arguments")
        pres = parse_presentation("<a,b,c,p | a = b p c ; b = b p ; c = p c ; p = p>")
        return pres, ("a",)
    raise UnknownName(f"unknown catalog name {name!r}")


from functools import lru_cache as _lru_cache


@_lru_cache(maxsize=200_000)
def _check_forest_cached(pres: "Presentation", trees: tuple) -> bool:
    for t in trees:
        _check_tree(pres, t)
    return True


def _check_tree(pres: Presentation, tree: Tree) -> None:
    letter, children = tree
    if letter not in pres.letters:
        raise DSLSyntaxError(f"undeclared letter {letter!r} in forest")
    if children:
        rhs = pres.rule(letter)
        if rhs is None:
            raise NotAPLeaf(f"terminal letter {letter!r} cannot have children")
        if tuple(c[0] for c in children) != rhs:
            raise DSLSyntaxError(
                f"children of {letter!r} do not spell its rule right side"
            )
        for c in children:
            _check_tree(pres, c)


@dataclass(frozen=True)
class PForest:
    """A finite prefix of the infinite derived forest.

    The forest is planar: roots and children are ordered.  Left-right order
    of vertices puts each internal vertex after its first child's subtree and
    before its remaining children's subtrees.
    """

    pres: Presentation
    trees: tuple[Tree, ...]

    def __post_init__(self):
        if not self.trees:
            raise DSLSyntaxError("forest must have at least one root")
        _check_forest_cached(self.pres, self.trees)

    # -- basic queries ----------------------------------------------------

    @property
    def baseword(self) -> Word:
        return tuple(t[0] for t in self.trees)

    def subtree(self, vid: VertexId) -> Tree:
        root_i, path = vid
        node = self.trees[root_i]
        for i in path:
            node = node[1][i]
        return node

    def letter(self, vid: VertexId) -> str:
        return self.subtree(vid)[0]

    def is_leaf(self, vid: VertexId) -> bool:
        return not self.subtree(vid)[1]

    def is_p_leaf(self, vid: VertexId) -> bool:
        letter, children = self.subtree(vid)
        return not children and self.pres.rule(letter) is not None

    def is_interior(self, vid: VertexId) -> bool:
        return not self.is_p_leaf(vid)

    def vertex_order(self) -> list[tuple[VertexId, str]]:
        """All vertices in planar left-right order, tagged interior/leaf.

        The tag says P-interior versus P-leaf; a terminal-letter leaf is
        interior (it indexes a puncture, not a marked point).
        """
        return list(_vertex_order_cached(self.pres, self.trees))

    def leaves(self) -> list[VertexId]:
        """P-leaves in left-right order (the marked-point slots)."""
        return [v for v, k in _vertex_order_cached(self.pres, self.trees) if k == KIND_LEAF]

    def interiors(self) -> list[VertexId]:
        """P-interior vertices in left-right order (the puncture slots)."""
        return [
            v for v, k in _vertex_order_cached(self.pres, self.trees) if k == KIND_INTERIOR
        ]

    @property
    def i_count(self) -> int:
        return len(self.interiors())

    @property
    def leaf_count(self) -> int:
        return len(self.leaves())

    @property
    def size(self) -> int:
        return self.i_count + self.leaf_count

    def leaf_word(self) -> Word:
        return tuple(self.letter(v) for v in self.leaves())

    def interior_rank(self, vid: VertexId) -> int:
        return self.interiors().index(vid)

    def leaf_slot(self, vid: VertexId) -> int:
        return self.leaves().index(vid)

    def parent(self, vid: VertexId) -> VertexId | None:
        root_i, path = vid
        if not path:
            return None
        return (root_i, path[:-1])

    def children_ids(self, vid: VertexId) -> list[VertexId]:
        root_i, path = vid
        return [(root_i, path + (i,)) for i in range(len(self.subtree(vid)[1]))]

    # -- surgery ----------------------------------------------------------

    def _replace(self, vid: VertexId, new_subtree: Tree) -> "PForest":
        root_i, path = vid

        def rebuild(tree: Tree, path: tuple) -> Tree:
            if not path:
                return new_subtree
            letter, children = tree
            i = path[0]
            kids = list(children)
            kids[i] = rebuild(kids[i], path[1:])
            return (letter, tuple(kids))

        trees = list(self.trees)
        trees[root_i] = rebuild(trees[root_i], path)
        return PForest(self.pres, tuple(trees))

    def expand(self, vid: VertexId) -> "PForest":
        """Attach the rule-dictated children at a P-leaf."""
        letter, children = self.subtree(vid)
        rhs = self.pres.rule(letter)
        if children or rhs is None:
            raise NotAPLeaf(f"vertex {vid} is not a P-leaf")
        return self._replace(vid, (letter, tuple((x, ()) for x in rhs)))

    def to_obj(self) -> dict:
        def conv(tree: Tree) -> dict:
            return {"letter": tree[0], "children": [conv(c) for c in tree[1]]}

        return {"roots": [conv(t) for t in self.trees]}

    @staticmethod
    def from_obj(pres: Presentation, obj: dict) -> "PForest":
        def conv(node: dict) -> Tree:
            return (node["letter"], tuple(conv(c) for c in node.get("children", [])))

        return PForest(pres, tuple(conv(n) for n in obj["roots"]))


from functools import lru_cache


@lru_cache(maxsize=100_000)
def _vertex_order_cached(pres: Presentation, trees: tuple) -> tuple:
    out: list[tuple[VertexId, str]] = []

    def walk(root_i: int, path: tuple, tree: Tree) -> None:
        letter, children = tree
        if not children:
            kind = KIND_LEAF if pres.rule(letter) is not None else KIND_INTERIOR
            out.append(((root_i, path), kind))
            return
        walk(root_i, path + (0,), children[0])
        out.append(((root_i, path), KIND_INTERIOR))
        for i, c in enumerate(children[1:], start=1):
            walk(root_i, path + (i,), c)

    for root_i, tree in enumerate(trees):
        walk(root_i, (), tree)
    return tuple(out)


def eta(pres: Presentation, word: Word) -> PForest:
    """The edgeless forest on the given root word."""
    return PForest(pres, tuple((x, ()) for x in word))


def _tree_is_prefix(t1: Tree, t2: Tree) -> bool:
    if t1[0] != t2[0]:
        return False
    if not t1[1]:
        return True
    if not t2[1]:
        return False
    return all(_tree_is_prefix(a, b) for a, b in zip(t1[1], t2[1]))


def is_prefix(small: PForest, big: PForest) -> bool:
    """Whether ``big`` can be grown from ``small`` by expanding leaves."""
    if small.pres != big.pres or small.baseword != big.baseword:
        return False
    return all(_tree_is_prefix(a, b) for a, b in zip(small.trees, big.trees))


def _tree_union(t1: Tree, t2: Tree) -> Tree:
    assert t1[0] == t2[0]
    if not t1[1]:
        return t2
    if not t2[1]:
        return t1
    return (t1[0], tuple(_tree_union(a, b) for a, b in zip(t1[1], t2[1])))


def union(f1: PForest, f2: PForest) -> PForest:
    """Least upper bound in the prefix order."""
    if f1.pres != f2.pres or f1.baseword != f2.baseword:
        from .errors import BasewordMismatch

        raise BasewordMismatch("union requires the same presentation and baseword")
    return PForest(f1.pres, tuple(_tree_union(a, b) for a, b in zip(f1.trees, f2.trees)))


def remove_crown(forest: PForest, crown: set[VertexId]) -> PForest:
    """Remove an ancestor-closed set of P-interior vertices.

    The surviving subtrees become the roots of the result, in left-right
    order.  Raises ValueError if the set is not ancestor-closed, touches a
    P-leaf, or empties the forest.
    """
    for vid in crown:
        if forest.is_p_leaf(vid):
            raise ValueError("cannot remove a P-leaf")
        parent = forest.parent(vid)
        if parent is not None and parent not in crown:
            raise ValueError("removal set is not ancestor-closed")

    roots: list[Tree] = []

    def walk(vid: VertexId, tree: Tree) -> None:
        if vid in crown:
            root_i, path = vid
            for i, c in enumerate(tree[1]):
                walk((root_i, path + (i,)), c)
        else:
            roots.append(tree)

    for root_i, tree in enumerate(forest.trees):
        walk((root_i, ()), tree)
    if not roots:
        raise ValueError("removal would empty the forest")
    return PForest(forest.pres, tuple(roots))


# -- completion search ------------------------------------------------------

Sig = tuple  # gap-occupancy vector: counts of added vertices between kept interiors


def _sig_concat(a: Sig, b: Sig) -> Sig:
    return a[:-1] + (a[-1] + b[0],) + b[1:]


def _sig_bump(a: Sig) -> Sig:
    """Add one crown vertex to the current (rightmost) gap."""
    return a[:-1] + (a[-1] + 1,)


def _zero_sig(interior_count: int) -> Sig:
    return (0,) * (interior_count + 1)


def complete_to_closed(
    b: PForest,
    target: Word,
    added_count: int,
    free_slots: Sig,
) -> list[PForest]:
    """All forests with root word ``target`` that collapse onto ``b``.

    A result F satisfies: removing an ancestor-closed set of exactly
    ``added_count`` P-interior vertices from F yields ``b``, and, reading the
    P-interior vertices of F from left to right, the removed ones fill the
    gaps between the surviving ones according to ``free_slots`` (entry 0 is
    the gap before the first survivor, entry k the gap after the k-th).

    The search runs bottom-up over root segments of ``b``: every root of the
    result is either a tree of ``b`` taken verbatim or a new vertex whose
    derivation, bounded in size by the remaining budget, consumes a run of
    ``b``'s trees as its fringe.  Letters whose derivations can avoid
    P-leaves entirely (fully deleted subtrees) are discovered by the same
    bounded recursion.  An empty list is the negative answer.
    """
    pres = b.pres
    if len(free_slots) != b.i_count + 1 or sum(free_slots) != added_count:
        raise ValueError("free_slots must have i(b)+1 entries summing to added_count")

    trees = b.trees
    tree_sigs = [_zero_sig(PForest(pres, (t,)).i_count) for t in trees]

    def crown_options(letter: str, lo: int, budget: int) -> Iterator[tuple[Tree, int, int, Sig]]:
        """Trees rooted at an added vertex labelled ``letter``.

        Yields (tree, next_lo, crown_used, sig).  ``crown_used`` includes the
        root itself; ``sig`` covers the whole subtree.
        """
        if budget < 1:
            return
        rhs = pres.rule(letter)
        if rhs is None:
            # removed terminal leaf: contributes one crown vertex, no fringe
            yield ((letter, ()), lo, 1, (1,))
            return
        for kids, lo2, used, sig in child_seq(rhs, 0, lo, budget - 1):
            yield ((letter, kids), lo2, used + 1, sig)

    def child_seq(
        rhs: Word, idx: int, lo: int, budget: int
    ) -> Iterator[tuple[tuple, int, int, Sig]]:
        """Assignments for children ``rhs[idx:]`` of an added vertex.

        Each child is either the next tree of ``b`` (kept verbatim) or a
        further added vertex.  The parent slots into the signature right
        after its first child's subtree.
        """
        if idx == len(rhs):
            yield ((), lo, 0, (0,))
            return
        letter = rhs[idx]
        options: list[tuple[Tree, int, int, Sig]] = []
        if lo < len(trees) and trees[lo][0] == letter:
            options.append((trees[lo], lo + 1, 0, tree_sigs[lo]))
        options.extend(crown_options(letter, lo, budget))
        for tree, lo2, used, sig in options:
            head_sig = _sig_bump(sig) if idx == 0 else sig
            for rest, lo3, used2, sig2 in child_seq(rhs, idx + 1, lo2, budget - used):
                yield ((tree,) + rest, lo3, used + used2, _sig_concat(head_sig, sig2))

    def roots_seq(idx: int, lo: int, budget: int) -> Iterator[tuple[tuple, int, int, Sig]]:
        if idx == len(target):
            yield ((), lo, 0, (0,))
            return
        letter = target[idx]
        options: list[tuple[Tree, int, int, Sig]] = []
        if lo < len(trees) and trees[lo][0] == letter:
            options.append((trees[lo], lo + 1, 0, tree_sigs[lo]))
        options.extend(crown_options(letter, lo, budget))
        for tree, lo2, used, sig in options:
            for rest, lo3, used2, sig2 in roots_seq(idx + 1, lo2, budget - used):
                yield ((tree,) + rest, lo3, used + used2, _sig_concat(sig, sig2))

    results: list[PForest] = []
    seen: set[tuple] = set()
    for forest_trees, lo, used, sig in roots_seq(0, 0, added_count):
        if lo != len(trees) or used != added_count or sig != tuple(free_slots):
            continue
        if forest_trees not in seen:
            seen.add(forest_trees)
            results.append(PForest(pres, forest_trees))
    return results
