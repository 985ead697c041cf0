"""Braid words read off from planar trajectories, and pure-braid word norms.

Words are tuples of signed generator indices: ``k > 0`` is sigma_k and
``-k`` its inverse (so ``(1, 1, -2)`` is s1 s1 s2^-1). Strands are labelled
``0 .. n-1`` by their starting position.

Equality of braids is decided exactly through Artin's faithful action of
B_n on the free group F_n; pure-braid word norms use the band generators
``A_ij`` (1-based ``i < j``)::

    A_ij = s_{j-1} ... s_{i+1} s_i^2 s_{i+1}^-1 ... s_{j-1}^-1
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .configspace import COLLISION_THRESHOLD

Word = tuple  # tuple[int, ...]


class DegenerateProjection(ValueError):
    """Two strands are (nearly) on top of each other where their shadows cross."""


class NotPure(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """The exact word norm was out of reach; ``estimate`` holds the bounds."""

    def __init__(self, estimate: "WordNormEstimate"):
        super().__init__(f"word norm only bracketed: {estimate.lower} <= |g| <= {estimate.upper}")
        self.estimate = estimate


def free_reduce(letters: Sequence[int]) -> Word:
    out: list[int] = []
    for a in letters:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


@dataclass(frozen=True)
class BraidWord:
    n_strands: int
    letters: Word = ()

    def __post_init__(self):
        letters = tuple(int(a) for a in self.letters)
        for a in letters:
            if a == 0 or abs(a) >= self.n_strands:
                raise ValueError(f"generator {a} out of range for {self.n_strands} strands")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def from_pairs(cls, n_strands: int, pairs) -> "BraidWord":
        return cls(n_strands, tuple(i * s for i, s in pairs))

    @property
    def pairs(self) -> list[tuple[int, int]]:
        """Letters as ``(generator index, sign)``."""
        return [(abs(a), 1 if a > 0 else -1) for a in self.letters]

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if other.n_strands != self.n_strands:
            raise ValueError("strand counts differ")
        return BraidWord(self.n_strands, self.letters + other.letters)

    def __pow__(self, k: int) -> "BraidWord":
        base = self if k >= 0 else self.inverse()
        return BraidWord(self.n_strands, base.letters * abs(k))

    def inverse(self) -> "BraidWord":
        return BraidWord(self.n_strands, tuple(-a for a in reversed(self.letters)))

    def reduced(self) -> "BraidWord":
        return BraidWord(self.n_strands, free_reduce(self.letters))

    def to_list(self) -> list[int]:
        return list(self.letters)

    def __str__(self):
        return " ".join(f"s{abs(a)}" + ("" if a > 0 else "^-1") for a in self.letters) or "e"


def permutation(word: BraidWord) -> np.ndarray:
    """``perm[k]`` is the final position of the strand that starts at ``k``."""
    at = list(range(word.n_strands))  # strand currently at each position
    for a in word.letters:
        i = abs(a) - 1
        at[i], at[i + 1] = at[i + 1], at[i]
    perm = np.empty(word.n_strands, dtype=int)
    perm[at] = np.arange(word.n_strands)
    return perm


def is_pure(word: BraidWord) -> bool:
    return bool(np.all(permutation(word) == np.arange(word.n_strands)))


@dataclass(frozen=True)
class PureBraid:
    word: BraidWord

    def __post_init__(self):
        if not is_pure(self.word):
            raise NotPure("braid word does not induce the identity permutation")

    @property
    def n_strands(self) -> int:
        return self.word.n_strands

    @property
    def permutation(self) -> np.ndarray:
        return np.arange(self.n_strands)

    def __mul__(self, other: "PureBraid") -> "PureBraid":
        return PureBraid(self.word * other.word)

    def __pow__(self, k: int) -> "PureBraid":
        return PureBraid(self.word**k)

    def inverse(self) -> "PureBraid":
        return PureBraid(self.word.inverse())


def _as_word(b) -> BraidWord:
    return b.word if isinstance(b, PureBraid) else b


def crossing_counts(word) -> np.ndarray:
    """Signed crossings between every pair of strands (symmetric matrix)."""
    w = _as_word(word)
    n = w.n_strands
    at = list(range(n))
    c = np.zeros((n, n), dtype=int)
    for a in w.letters:
        i = abs(a) - 1
        s, t = at[i], at[i + 1]
        c[s, t] += 1 if a > 0 else -1
        at[i], at[i + 1] = t, s
    return c + c.T


def lk_matrix(pure) -> np.ndarray:
    """Linking numbers of all strand pairs of a pure braid."""
    w = _as_word(pure)
    if not is_pure(w):
        raise NotPure("linking numbers need a pure braid")
    return crossing_counts(w) // 2


def lk(pure, i: int, j: int) -> int:
    """Linking number of strands ``i`` and ``j`` (0-based): half the signed crossings."""
    if i == j:
        raise ValueError("need two distinct strands")
    return int(lk_matrix(pure)[i, j])


# ---------------------------------------------------------------------------
# extraction from trajectories
# ---------------------------------------------------------------------------

def extract_braid(paths, projection_angle: float = 0.1234,
                  collision_threshold: float = COLLISION_THRESHOLD,
                  depth_tolerance: float = 1e-9) -> BraidWord:
    """Braid word traced by ``n`` planar paths sampled on a common grid.

    ``paths`` has shape ``(m, n, 2)`` or ``(..., m, n, 2)`` for a batch (the
    result is then a list). Positions are projected on the direction at
    ``projection_angle``; between samples the paths are linear, every change
    in projected order is one adjacent transposition, and its sign is ``+1``
    when the strand coming from the left has the smaller orthogonal
    coordinate (a counterclockwise exchange is positive).
    """
    p = np.asarray(paths, dtype=float)
    if p.ndim > 3:
        flat = p.reshape((-1,) + p.shape[-3:])
        out = [extract_braid(q, projection_angle, collision_threshold, depth_tolerance) for q in flat]
        return np.array(out, dtype=object).reshape(p.shape[:-3]).tolist()
    m, n, _ = p.shape
    if n < 2:
        return BraidWord(max(n, 1), ())
    e = np.array([np.cos(projection_angle), np.sin(projection_angle)])
    f = np.array([-e[1], e[0]])
    u, w = p @ e, p @ f
    a, b = np.triu_indices(n, 1)
    dist = np.linalg.norm(p[:, a] - p[:, b], axis=-1)
    if dist.min() <= collision_threshold:
        raise ValueError("strands collide along the trajectories")
    du = u[:, a] - u[:, b]
    sgn = du >= 0
    step, pair = np.nonzero(sgn[1:] != sgn[:-1])
    if step.size == 0:
        return BraidWord(n, ())
    d0, d1 = du[step, pair], du[step + 1, pair]
    tau = d0 / (d0 - d1)
    wa = (1 - tau) * w[step, a[pair]] + tau * w[step + 1, a[pair]]
    wb = (1 - tau) * w[step, b[pair]] + tau * w[step + 1, b[pair]]
    scale = np.maximum(np.abs(wa), 1.0)
    if np.any(np.abs(wa - wb) <= depth_tolerance * scale):
        raise DegenerateProjection("strands meet in projection; change projection_angle")
    order = np.lexsort((tau, step))
    when = step + tau
    if np.any(np.diff(when[order]) == 0):
        raise DegenerateProjection("simultaneous crossings; change projection_angle")
    at = list(np.argsort(u[0], kind="stable"))
    pos = {s: k for k, s in enumerate(at)}
    letters = []
    for idx in order:
        sa, sb = int(a[pair[idx]]), int(b[pair[idx]])
        ka, kb = pos[sa], pos[sb]
        if abs(ka - kb) != 1:
            raise DegenerateProjection("non-adjacent crossing; refine the time grid")
        lo = min(ka, kb)
        left = at[lo]
        w_left = wa[idx] if left == sa else wb[idx]
        w_right = wb[idx] if left == sa else wa[idx]
        letters.append((lo + 1) if w_left < w_right else -(lo + 1))
        at[lo], at[lo + 1] = at[lo + 1], at[lo]
        pos[at[lo]], pos[at[lo + 1]] = lo, lo + 1
    word = BraidWord(n, free_reduce(letters))
    # strands are labelled by starting position, which is the convention of the word
    return word


def start_order(paths, projection_angle: float = 0.1234) -> np.ndarray:
    """Strand labels in projected order at the first sample."""
    p = np.asarray(paths, dtype=float)
    e = np.array([np.cos(projection_angle), np.sin(projection_angle)])
    return np.argsort(p[0] @ e, kind="stable")


# ---------------------------------------------------------------------------
# exact word problem: Artin action on the free group
# ---------------------------------------------------------------------------

def _artin_images(n: int, letter: int) -> dict[int, Word]:
    i = abs(letter)  # acts on free generators i, i+1 (1-based)
    if letter > 0:
        return {i: (i, i + 1, -i), i + 1: (i,)}
    return {i: (i + 1,), i + 1: (-(i + 1), i, i + 1)}


def _substitute(word: Word, images: Sequence[Word]) -> Word:
    out: list[int] = []
    for g in word:
        img = images[abs(g) - 1]
        out.extend(img if g > 0 else [-x for x in reversed(img)])
    return free_reduce(out)


def artin_key(word) -> tuple[Word, ...]:
    """Complete invariant of a braid: images of the free generators.

    Two words give the same key iff they represent the same element of B_n.
    """
    w = _as_word(word)
    n = w.n_strands
    images = [(k,) for k in range(1, n + 1)]
    for a in w.letters:
        rule = _artin_images(n, a)
        new = list(images)
        for k, img in rule.items():
            new[k - 1] = _substitute(img, images)
        images = new
    return tuple(images)


def braid_equal(w1, w2) -> bool:
    return artin_key(w1) == artin_key(w2)


# ---------------------------------------------------------------------------
# band generators, Cayley ball and word norms
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def band_generators(n: int) -> tuple[tuple[tuple[int, int], BraidWord], ...]:
    """``((i, j), A_ij)`` for 1-based ``i < j``, in lexicographic order."""
    out = []
    for i, j in itertools.combinations(range(1, n + 1), 2):
        head = tuple(range(j - 1, i, -1))
        out.append(((i, j), BraidWord(n, head + (i, i) + tuple(-k for k in reversed(head)))))
    return tuple(out)


def band_word_to_braid(n: int, band_letters: Sequence[int]) -> BraidWord:
    """Expand a word in band generators (signed 1-based indices into ``band_generators``)."""
    gens = band_generators(n)
    letters: list[int] = []
    for a in band_letters:
        g = gens[abs(a) - 1][1]
        letters.extend(g.letters if a > 0 else g.inverse().letters)
    return BraidWord(n, tuple(letters))


@dataclass(frozen=True)
class WordNormEstimate:
    lower: int
    upper: int
    exact: int | None = None

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")
        if self.exact is not None and not self.lower == self.exact == self.upper:
            raise ValueError("exact value must equal both bounds")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.upper - self.lower)


class CayleyBall:
    """Breadth-first ball in P_n around the identity, generators ``A_ij^{+-1}``.

    Vertices are Artin keys, so identification is exact. The ball is grown
    lazily, one sphere at a time.
    """

    def __init__(self, n: int):
        self.n = n
        self.gens = band_generators(n)
        self.depth = 0
        ident = artin_key(BraidWord(n, ()))
        self.dist: dict = {ident: 0}
        self.spell: dict = {ident: ()}
        self._frontier = [ident]
        self._images = [(ident, ())]

    def _step_images(self, key, letter):
        g = self.gens[abs(letter) - 1][1]
        w = g if letter > 0 else g.inverse()
        # right-multiply: compose the substitution of the generator on the stored images
        images = list(key)
        for a in w.letters:
            rule = _artin_images(self.n, a)
            new = list(images)
            for k, img in rule.items():
                new[k - 1] = _substitute(img, images)
            images = new
        return tuple(images)

    def grow(self, depth: int, max_vertices: int = 2_000_000) -> None:
        letters = [s * (k + 1) for k in range(len(self.gens)) for s in (1, -1)]
        while self.depth < depth:
            nxt = []
            for key in self._frontier:
                sp = self.spell[key]
                for a in letters:
                    if sp and sp[-1] == -a:
                        continue
                    k2 = self._step_images(key, a)
                    if k2 not in self.dist:
                        self.dist[k2] = self.depth + 1
                        self.spell[k2] = sp + (a,)
                        nxt.append(k2)
                if len(self.dist) > max_vertices:
                    raise MemoryError("Cayley ball exceeds the vertex budget")
            self._frontier = nxt
            self.depth += 1

    def lookup(self, word) -> int | None:
        return self.dist.get(artin_key(word))


@lru_cache(maxsize=None)
def cayley_ball(n: int) -> CayleyBall:
    return CayleyBall(n)


def _ball(n: int, depth: int) -> CayleyBall:
    b = cayley_ball(n)
    b.grow(depth)
    return b


@lru_cache(maxsize=None)
def _transversal(n: int) -> dict[tuple, Word]:
    """Shortest positive braid word for every permutation (coset representatives)."""
    start = tuple(range(n))
    rep = {start: ()}
    queue = deque([start])
    while queue:
        at = queue.popleft()
        for i in range(1, n):
            nxt = list(at)
            nxt[i - 1], nxt[i] = nxt[i], nxt[i - 1]
            nxt = tuple(nxt)
            if nxt not in rep:
                rep[nxt] = rep[at] + (i,)
                queue.append(nxt)
    return rep


@lru_cache(maxsize=None)
def _schreier_table(n: int) -> dict[tuple, Word]:
    """Band-word spelling of every Schreier generator ``R(p) s R(p s)^-1``."""
    rep = _transversal(n)
    table = {}
    depth = 1
    pending = {}
    for at, r in rep.items():
        for i in range(1, n):
            for a in (i, -i):
                nxt = list(at)
                nxt[i - 1], nxt[i] = nxt[i], nxt[i - 1]
                r2 = rep[tuple(nxt)]
                pending[(at, a)] = BraidWord(n, r + (a,) + tuple(-x for x in reversed(r2)))
    while pending:
        ball = _ball(n, depth)
        for k, w in list(pending.items()):
            key = artin_key(w)
            if key in ball.spell:
                table[k] = ball.spell[key]
                del pending[k]
        depth += 1
        if depth > 8:
            raise RuntimeError("Schreier generators not found in the Cayley ball")
    return table


def band_rewrite(pure) -> Word:
    """A band-generator word for a pure braid (Reidemeister-Schreier), free-reduced."""
    w = _as_word(pure)
    n = w.n_strands
    if not is_pure(w):
        raise NotPure("rewriting needs a pure braid")
    table = _schreier_table(n)
    at = tuple(range(n))
    out: list[int] = []
    for a in w.letters:
        out.extend(table[(at, a)])
        i = abs(a)
        nxt = list(at)
        nxt[i - 1], nxt[i] = nxt[i], nxt[i - 1]
        at = tuple(nxt)
    return free_reduce(out)


def lk_lower_bound(pure) -> int:
    """Each band generator changes exactly one linking number by one."""
    m = lk_matrix(pure)
    return int(np.abs(np.triu(m, 1)).sum())


def _compress(n: int, band: Word, ball: CayleyBall, window: int = 6) -> Word:
    """Greedily replace windows of a band word by shorter ball spellings."""
    w = list(band)
    changed = True
    while changed:
        changed = False
        for size in range(min(window, len(w)), 1, -1):
            for s in range(0, len(w) - size + 1):
                seg = w[s:s + size]
                d = ball.lookup(band_word_to_braid(n, seg))
                if d is not None and d < size:
                    key = artin_key(band_word_to_braid(n, seg))
                    w[s:s + size] = list(ball.spell[key])
                    w = list(free_reduce(w))
                    changed = True
                    break
            if changed:
                break
    return tuple(w)


def word_norm(pure, max_bfs_depth: int | None = None, compress: bool = True) -> WordNormEstimate:
    """Word norm in the band generators, exact when the bounds can be closed.

    The lower bound is ``sum |lk_ij|``, the upper bound the length of a
    rewritten band word. When they differ, a Cayley ball of radius
    ``max_bfs_depth`` decides: membership gives the exact norm, absence
    raises the lower bound past the radius. If the bounds still differ,
    :class:`BudgetExceeded` is raised carrying them.
    """
    w = _as_word(pure)
    n = w.n_strands
    if n > 4:
        raise ValueError("word norms are implemented for n <= 4")
    lower = lk_lower_bound(w)
    if n == 2:
        return WordNormEstimate(lower, lower, lower)
    if max_bfs_depth is None:
        max_bfs_depth = {3: 6, 4: 4}[n]
    band = band_rewrite(w)
    ball = _ball(n, max_bfs_depth)
    if compress and len(band) > lower:
        band = _compress(n, band, ball)
    upper = len(band)
    if lower == upper:
        return WordNormEstimate(lower, upper, lower)
    d = ball.lookup(w)
    if d is not None:
        return WordNormEstimate(d, d, d)
    lower = max(lower, max_bfs_depth + 1)
    if lower >= upper:
        return WordNormEstimate(upper, upper, upper)
    raise BudgetExceeded(WordNormEstimate(lower, upper))


def bfs_word_norm(pure, max_depth: int = 8) -> int | None:
    """Exact norm by plain breadth-first search, ``None`` beyond ``max_depth``.

    Kept independent of :func:`word_norm`'s bounds for cross-checking.
    """
    w = _as_word(pure)
    if not is_pure(w):
        raise NotPure("word norms are defined on pure braids")
    if w.n_strands == 1:
        return 0
    ball = CayleyBall(w.n_strands) if w.n_strands == 2 else cayley_ball(w.n_strands)
    key = artin_key(w)
    while key not in ball.dist and ball.depth < max_depth:
        ball.grow(ball.depth + 1)
    return ball.dist.get(key)
