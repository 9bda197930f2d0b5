"""Braid groups of the punctured disk with boundary marked points.

An element of the cylinder group on ``p`` punctures and ``q`` boundary marked
points is stored as a pair: a word in the Artin generators of the ordinary
braid group on ``p`` strands, plus an integer boundary rotation.  The
rotation commutes with every braid supported off the boundary collar, and
``q`` rotation steps equal the full twist of the punctures, so the pair is
normalised to ``0 <= rot < q`` by absorbing whole turns into the word as
full-twist factors.  With no marked points (``q == 0``) the full twist is
trivial and words are compared modulo it.

Conventions, fixed once and used everywhere:

* positions are slots ``1..p`` from left to right; generator ``k`` (written
  ``+k``) crosses the strand in slot ``k`` in front of the strand in slot
  ``k+1``; ``-k`` is its inverse;
* a word is a tuple read as a product left to right, and the rightmost
  letter acts first (it is the topmost slice of the cylinder), so diagram
  concatenation multiplies the later braid on the left;
* permutations are 0-based tuples mapping top slot to bottom slot.

Word equality is decided through the left-greedy Garside normal form
(permutation-braid factors with the half-twist power extracted lazily); a
second, independent decider through the faithful action on the free group is
provided for cross-validation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import DimensionMismatch, IndexOutOfRange

Perm = tuple  # 0-based; perm[i] = image slot of top slot i
FreeWord = tuple  # letters +-j over free generators 1..p, freely reduced


# -- permutations -----------------------------------------------------------


def _identity(p: int) -> Perm:
    return tuple(range(p))


def _w0(p: int) -> Perm:
    return tuple(p - 1 - i for i in range(p))


def _transp(p: int, i: int) -> Perm:
    out = list(range(p))
    out[i], out[i + 1] = out[i + 1], out[i]
    return tuple(out)


def _compose(f: Perm, g: Perm) -> Perm:
    """The permutation of the product f*g (g acts first)."""
    return tuple(f[g[i]] for i in range(len(f)))


def _invert(f: Perm) -> Perm:
    out = [0] * len(f)
    for i, v in enumerate(f):
        out[v] = i
    return tuple(out)


def _descents(f: Perm) -> set[int]:
    return {i for i in range(len(f) - 1) if f[i] > f[i + 1]}


def _conj_w0(f: Perm) -> Perm:
    w0 = _w0(len(f))
    return _compose(_compose(w0, f), w0)


# -- words ------------------------------------------------------------------


def free_reduce_letters(letters) -> tuple[int, ...]:
    out: list[int] = []
    for l in letters:
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def perm_of_letters(p: int, letters) -> Perm:
    """Top-to-bottom strand permutation of a word."""
    slots = list(range(p))  # slots[i] = strand currently in slot i
    for l in reversed(letters):  # rightmost letter is the topmost crossing
        i = abs(l) - 1
        slots[i], slots[i + 1] = slots[i + 1], slots[i]
    out = [0] * p
    for slot, strand in enumerate(slots):
        out[strand] = slot
    return tuple(out)


def delta_letters(p: int) -> tuple[int, ...]:
    """A positive word for the half twist."""
    return tuple(k for j in range(1, p) for k in range(j, 0, -1))


def delta_sq_letters(p: int) -> tuple[int, ...]:
    return delta_letters(p) * 2


# -- Garside normal form ----------------------------------------------------


def _left_weight(a: Perm, b: Perm) -> tuple[Perm, Perm]:
    """Slide head crossings of b into a until the pair is left-weighted."""
    p = len(a)
    while True:
        moves = _descents(_invert(b)) - _descents(a)
        if not moves:
            return a, b
        i = min(moves)
        t = _transp(p, i)
        a = _compose(a, t)
        b = _compose(t, b)


def _normalize_factors(p: int, power: int, factors: list[Perm]) -> tuple[int, tuple[Perm, ...]]:
    id_ = _identity(p)
    w0 = _w0(p)
    factors = [f for f in factors if f != id_]
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(factors) - 1:
            a, b = factors[i], factors[i + 1]
            a2, b2 = _left_weight(a, b)
            if (a2, b2) != (a, b):
                changed = True
                factors[i], factors[i + 1] = a2, b2
                i = max(i - 1, 0)
            else:
                i += 1
        out: list[Perm] = []
        for f in factors:
            if f == id_:
                changed = True
            elif f == w0:
                power += 1
                out = [_conj_w0(x) for x in out]
                changed = True
            else:
                out.append(f)
        factors = out
    return power, tuple(factors)


def _perm_word(perm: Perm) -> tuple[int, ...]:
    """A reduced positive word for a permutation braid (bubble sort)."""
    work = list(perm)
    out = []
    changed = True
    while changed:
        changed = False
        for i in range(len(work) - 1):
            if work[i] > work[i + 1]:
                work[i], work[i + 1] = work[i + 1], work[i]
                out.append(i + 1)
                changed = True
    return tuple(reversed(out))


def canonical_letters(p: int, letters: tuple[int, ...]) -> tuple[int, ...]:
    """A short word for the same element, read off the normal form."""
    power, factors = garside_nf(p, letters)
    if power >= 0:
        head = delta_letters(p) * power
    else:
        head = tuple(-l for l in reversed(delta_letters(p))) * (-power)
    return head + tuple(l for f in factors for l in _perm_word(f))


_COMPRESS_THRESHOLD = 32


@lru_cache(maxsize=200_000)
def garside_nf(p: int, letters: tuple[int, ...]) -> tuple[int, tuple[Perm, ...]]:
    """Left-greedy normal form ``(half-twist power, permutation factors)``."""
    if p <= 1:
        return 0, ()
    w0 = _w0(p)
    power = 0
    factors: list[Perm] = []
    for l in letters:
        t = _transp(p, abs(l) - 1)
        if l > 0:
            factors.append(t)
        else:
            power -= 1
            factors = [_conj_w0(f) for f in factors]
            factors.append(_compose(w0, t))
    return _normalize_factors(p, power, factors)


# -- the Artin action on the free group --------------------------------------


def _free_mul(*words: FreeWord) -> FreeWord:
    out: list[int] = []
    for w in words:
        for l in w:
            if out and out[-1] == -l:
                out.pop()
            else:
                out.append(l)
    return tuple(out)


def _free_inv(w: FreeWord) -> FreeWord:
    return tuple(-l for l in reversed(w))


def _artin_letter_images(p: int, letter: int) -> dict[int, FreeWord]:
    k = abs(letter)
    if letter > 0:
        return {k: (k, k + 1, -k), k + 1: (k,)}
    return {k: (k + 1,), k + 1: (-(k + 1), k, k + 1)}


def _apply_letter(p: int, letter: int, word: FreeWord) -> FreeWord:
    images = _artin_letter_images(p, letter)
    out: list[int] = []
    for l in word:
        img = images.get(abs(l), (abs(l),))
        piece = img if l > 0 else _free_inv(img)
        for x in piece:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class BraidWord:
    """A word in the Artin generators of the braid group on ``p`` strands."""

    p: int
    letters: tuple[int, ...]

    def __post_init__(self):
        if self.p < 0:
            raise IndexOutOfRange("strand count must be nonnegative")
        for l in self.letters:
            if not 1 <= abs(l) <= self.p - 1:
                raise IndexOutOfRange(f"generator {l} out of range for p={self.p}")

    def perm(self) -> Perm:
        return perm_of_letters(self.p, self.letters)


def artin_apply(x: BraidWord, word: FreeWord) -> FreeWord:
    """Image of a free-group word under the braid automorphism.

    Generator ``k`` sends the k-th free generator to ``x_k x_{k+1} x_k^-1``
    and the (k+1)-st to ``x_k``; letters act from the rightmost (topmost)
    inwards so that the map respects word concatenation.
    """
    for l in reversed(x.letters):
        word = _apply_letter(x.p, l, word)
    return word


@lru_cache(maxsize=200_000)
def _artin_key(p: int, letters: tuple[int, ...]) -> tuple[FreeWord, ...]:
    bw = BraidWord(p, letters)
    return tuple(artin_apply(bw, (j,)) for j in range(1, p + 1))


# -- cylinder braids ----------------------------------------------------------


@dataclass(frozen=True)
class CylBraid:
    """An element of the braid group with ``q`` boundary marked points.

    ``core`` moves the punctures; ``rot`` shifts marked point ``i`` to
    ``i + rot (mod q)``.  Instances are normalised: use :func:`make` unless
    the data is already in normal range.
    """

    p: int
    q: int
    core: BraidWord
    rot: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise IndexOutOfRange("p and q must be nonnegative")
        if self.core.p != self.p:
            raise DimensionMismatch("core strand count differs from p")
        if self.q > 0 and not 0 <= self.rot < self.q:
            raise IndexOutOfRange("rot out of normal range")
        if self.q == 0 and self.rot != 0:
            raise IndexOutOfRange("rot must be zero when q = 0")

    @property
    def letters(self) -> tuple[int, ...]:
        return self.core.letters

    def dims(self) -> tuple[int, int]:
        return (self.p, self.q)


def _twist_power(p: int, k: int) -> tuple[int, ...]:
    if k >= 0:
        return delta_sq_letters(p) * k
    return tuple(-l for l in reversed(delta_sq_letters(p))) * (-k)


def _winding(q: int, rot: int) -> int:
    """Boundary winding of the canonical wire picture for a stored rotation.

    Wires slide along the boundary opposite to the marked-point numbering, so
    a rotation ``rot`` in normal range winds ``(q - rot) mod q`` steps; a full
    winding equals the positive full twist of the punctures.
    """
    return (q - rot) % q if q else 0


def make(p: int, q: int, letters, rot: int = 0) -> CylBraid:
    """Build a normalised cylinder braid.

    A rotation outside normal range carries whole boundary turns; each one
    converts to a central full twist in the core.
    """
    letters = free_reduce_letters(letters)
    if q > 0:
        turns, rot = divmod(rot, q)
        if turns:
            letters = free_reduce_letters(letters + _twist_power(p, turns))
    else:
        rot = 0
    if len(letters) > _COMPRESS_THRESHOLD:
        letters = canonical_letters(p, letters)
    return CylBraid(p, q, BraidWord(p, letters), rot)


def identity(p: int, q: int) -> CylBraid:
    return make(p, q, ())


def rho(p: int, q: int, steps: int = 1) -> CylBraid:
    """The boundary rotation by ``steps`` marked points (``rho^q`` = full twist)."""
    if q <= 0:
        return identity(p, q)
    rot = (-steps) % q
    k = (steps - _winding(q, rot)) // q
    return make(p, q, _twist_power(p, k), rot)


def multiply(x: CylBraid, y: CylBraid) -> CylBraid:
    """Product with ``y`` stacked on top (acting first) and ``x`` below.

    Rotations add; the boundary windings of the two canonical pictures may
    exceed one turn together, and each whole turn is converted into a
    central full twist so the result is canonical again.
    """
    if x.dims() != y.dims():
        raise DimensionMismatch(f"cannot multiply {x.dims()} by {y.dims()}")
    q = x.q
    rot = (x.rot + y.rot) % q if q else 0
    k = (_winding(q, x.rot) + _winding(q, y.rot) - _winding(q, rot)) // q if q else 0
    return make(x.p, q, x.letters + y.letters + _twist_power(x.p, k), rot)


def inverse(x: CylBraid) -> CylBraid:
    q = x.q
    rot = (-x.rot) % q if q else 0
    k = (-_winding(q, x.rot) - _winding(q, rot)) // q if q else 0
    word = tuple(-l for l in reversed(x.letters)) + _twist_power(x.p, k)
    return make(x.p, q, word, rot)


def nf_key(x: CylBraid):
    """A complete invariant: rotation plus Garside data (mod full twist if q=0)."""
    power, factors = garside_nf(x.p, x.letters)
    if x.q == 0:
        power %= 2
    return (x.p, x.q, x.rot, power, factors)


def is_equal(x: CylBraid, y: CylBraid) -> bool:
    if x.dims() != y.dims():
        raise DimensionMismatch(f"cannot compare {x.dims()} with {y.dims()}")
    if x.rot != y.rot:
        return False
    if x.letters == y.letters:
        return True
    # cheap invariants before the normal form
    if x.q > 0 and sum(1 if l > 0 else -1 for l in x.letters) != sum(
        1 if l > 0 else -1 for l in y.letters
    ):
        return False
    if x.core.perm() != y.core.perm():
        return False
    return nf_key(x) == nf_key(y)


def is_equal_artin(x: CylBraid, y: CylBraid) -> bool:
    """Independent equality decider through the action on the free group."""
    if x.dims() != y.dims():
        raise DimensionMismatch(f"cannot compare {x.dims()} with {y.dims()}")
    if x.rot != y.rot:
        return False
    kx = _artin_key(x.p, x.letters)
    ky = _artin_key(x.p, y.letters)
    if x.q > 0:
        return kx == ky
    if kx == ky:
        return True
    # q = 0: words are compared modulo the full twist, which acts by
    # conjugation with the boundary word
    boundary = tuple(range(1, x.p + 1))
    bound = 2 + max((len(w) for w in kx + ky), default=0)
    for m in range(-bound, bound + 1):
        pre = _free_word_power(boundary, m)
        post = _free_inv(pre)
        if all(
            _free_mul(pre, ky[j], post) == kx[j] for j in range(x.p)
        ):
            return True
    return False


def _free_word_power(w: FreeWord, m: int) -> FreeWord:
    if m >= 0:
        return w * m
    return _free_inv(w) * (-m)


def permutation(x: CylBraid) -> tuple[Perm, int]:
    """Underlying puncture permutation (0-based slots) and marked shift."""
    return x.core.perm(), x.rot % x.q if x.q else 0


def is_pure(x: CylBraid) -> bool:
    perm, shift = permutation(x)
    return perm == _identity(x.p) and shift == 0


# -- strand surgery -----------------------------------------------------------


def _delete_track(letters, pos0: int):
    """Drop one strand from a word.

    ``pos0`` is the 0-based top slot of the victim.  Returns the remaining
    word (product order, reindexed) and the victim's bottom slot.
    """
    cur = pos0
    out_time: list[int] = []
    for l in reversed(letters):  # walk in time order
        k = abs(l)
        i = k - 1
        if i == cur:
            cur = i + 1
            continue
        if i + 1 == cur:
            cur = i
            continue
        nk = k if k < cur else k - 1
        out_time.append(nk if l > 0 else -nk)
    return tuple(reversed(out_time)), cur


def delete_strand(x: CylBraid, top_position: int) -> CylBraid:
    """Remove the strand entering at ``top_position`` (1-based); rot unchanged."""
    if not 1 <= top_position <= x.p:
        raise IndexOutOfRange(f"no strand at position {top_position}")
    letters, _ = _delete_track(x.letters, top_position - 1)
    return make(x.p - 1, x.q, letters, x.rot)


def subbraid(x: CylBraid, keep) -> CylBraid:
    """Restrict to the strands entering at the given 1-based top positions."""
    keep = sorted(set(keep))
    if not keep:
        raise IndexOutOfRange("keep must be nonempty")
    if keep[0] < 1 or keep[-1] > x.p:
        raise IndexOutOfRange("keep positions out of range")
    out = x
    for pos in range(x.p, 0, -1):
        if pos not in keep:
            out = delete_strand(out, pos)
    return out


def _block_pass(g: int, m: int, direction: int, front: bool) -> tuple[list[int], int]:
    """Crossing letters (time order) for a parked block passing one strand.

    The block of ``m`` parallel strands sits with ``g`` stationary strands to
    its left.  Moving right it passes the strand just right of it; moving
    left the one just left.  ``front`` says whether the block passes in front
    of the stationary strand.
    """
    if direction > 0:
        seq = list(range(g + m, g, -1))
        sign = 1 if front else -1
        return [sign * v for v in seq], g + 1
    seq = list(range(g, g + m))
    sign = -1 if front else 1
    return [sign * v for v in seq], g - 1


def travel_time_letters(
    p_old: int, m: int, g_start: int, g_end: int, wrap: int, seam_front: bool = False
) -> list[int]:
    """Time-ordered crossings for a block travelling along the boundary collar.

    Along the lower boundary the block is in front of every strand it
    passes; a seam passage (one ``wrap``) carries it around the far side of
    the disk, behind all strands.  ``seam_front`` flips that side and exists
    only so the self-test canary can break the convention deliberately.
    """
    letters: list[int] = []
    g = g_start

    def go(to: int, front: bool):
        nonlocal g
        while g < to:
            ls, g = _block_pass(g, m, +1, front)
            letters.extend(ls)
        while g > to:
            ls, g = _block_pass(g, m, -1, front)
            letters.extend(ls)

    if wrap >= 0:
        for _ in range(wrap):
            go(p_old, True)
            go(0, seam_front)
        go(g_end, True)
    else:
        for _ in range(-wrap):
            go(0, True)
            go(p_old, seam_front)
        go(g_end, True)
    return letters


def lift_letters(letters, g: int, m: int) -> tuple[int, ...]:
    """Reindex a word around a block of ``m`` collar strands parked in gap ``g``.

    Crossings that sweep the parked gap pass behind the block, so the
    straddling generator becomes a conjugated crossing.
    """
    out: list[int] = []
    for l in letters:
        k = abs(l)
        s = 1 if l > 0 else -1
        if k < g:
            out.append(l)
        elif k > g:
            out.append(s * (k + m))
        else:
            out.extend(range(g, g + m))
            out.append(s * (g + m))
            out.extend(-v for v in range(g + m - 1, g - 1, -1))
    return tuple(out)


def insert_bundle(
    x: CylBraid,
    m: int,
    g_top: int,
    g_bot: int,
    wrap: int,
    seam_front: bool = False,
) -> CylBraid:
    """Insert ``m`` parallel collar strands into ``x``.

    The bundle enters at puncture gap ``g_top`` (0-based: the number of old
    strands to its left), is parked there while the old crossings happen,
    then travels along the collar to gap ``g_bot`` with ``wrap`` seam
    passages.  The new strands occupy top slots ``g_top+1 .. g_top+m`` and
    bottom slots ``g_bot+1 .. g_bot+m`` (1-based) and never cross each other.
    """
    if not 0 <= g_top <= x.p or not 0 <= g_bot <= x.p:
        raise IndexOutOfRange("bundle gap out of range")
    travel = travel_time_letters(x.p, m, g_top, g_bot, wrap, seam_front)
    word = tuple(reversed(travel)) + lift_letters(x.letters, g_top, m)
    return make(x.p + m, x.q, word, x.rot)


def boundary_parallel_insert(
    x: CylBraid,
    top_position: int,
    bottom_position: int,
    entry_gap: int,
    exit_gap: int,
    winding: int,
) -> CylBraid:
    """Insert one strand that rides the boundary collar.

    The strand dives from its top puncture into ``entry_gap``, travels along
    the collar with ``winding`` seam passages to ``exit_gap``, and rises to
    its bottom puncture.  Gaps are 0-based puncture gaps of the old braid.
    """
    p_old = x.p
    if not 1 <= top_position <= p_old + 1 or not 1 <= bottom_position <= p_old + 1:
        raise IndexOutOfRange("insert position out of range")
    if not 0 <= entry_gap <= p_old or not 0 <= exit_gap <= p_old:
        raise IndexOutOfRange("gap out of range")
    g_top = top_position - 1
    g_bot = bottom_position - 1
    time: list[int] = []
    g = g_top

    def go(to: int, front: bool):
        nonlocal g
        while g < to:
            ls, g = _block_pass(g, 1, +1, front)
            time.extend(ls)
        while g > to:
            ls, g = _block_pass(g, 1, -1, front)
            time.extend(ls)

    go(entry_gap, True)
    if winding >= 0:
        for _ in range(winding):
            go(p_old, True)
            go(0, False)
    else:
        for _ in range(-winding):
            go(0, True)
            go(p_old, False)
    go(exit_gap, True)
    go(g_bot, True)
    word = tuple(reversed(time)) + lift_letters(x.letters, g_top, 1)
    return make(p_old + 1, x.q, word, x.rot)


# -- straight-arc fixing -------------------------------------------------------


def fixes_straight_arcs(
    x: CylBraid, positions, rotation_conjugated: bool = False
) -> bool:
    """Whether the braid fixes the straight arcs at the given punctures.

    The arc at puncture ``j`` (1-based) hangs straight down to the lower
    boundary; it is encoded as the free-group loop approaching from below,
    the standard generator.  With marked points present the whole picture is
    pinned, so the test is exact: the rotation must vanish and the images of
    the chosen generators must come back unchanged (a full twist hidden in
    the word drags every arc and fails too).  With no marked points the full
    twist is a trivial element, and the images are compared up to a global
    winding, i.e. conjugation by a power of the boundary word.

    ``rotation_conjugated`` relaxes the gate to that winding-compensated
    comparison even with marked points, the reading in which the arc system
    is only fixed up to a collar turn.
    """
    positions = sorted(set(positions))
    if not positions:
        return True
    if positions[0] < 1 or positions[-1] > x.p:
        raise IndexOutOfRange("arc position out of range")
    key = _artin_key(x.p, x.letters)
    if x.q > 0 and not rotation_conjugated:
        if x.rot != 0:
            return False
        return all(key[j - 1] == (j,) for j in positions)
    if all(key[j - 1] == (j,) for j in positions):
        return True
    boundary = tuple(range(1, x.p + 1))
    bound = 2 + max((len(key[j - 1]) for j in positions), default=0) // max(1, 2 * x.p - 1)
    for m in range(-bound, bound + 1):
        pre = _free_word_power(boundary, m)
        post = _free_inv(pre)
        if all(_free_mul(pre, (j,), post) == key[j - 1] for j in positions):
            return True
    return False


# -- serialization -------------------------------------------------------------


def to_obj(x: CylBraid) -> dict:
    return {"p": x.p, "q": x.q, "word": list(x.letters), "rot": x.rot}


def from_obj(obj: dict) -> CylBraid:
    return make(obj["p"], obj["q"], tuple(obj["word"]), obj.get("rot", 0))
