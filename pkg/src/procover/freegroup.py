"""Free-group words and finite-index subgroups as permutation actions.

A subgroup of finite index n in the free group on generators x0..x{r-1} is
stored as the action of the group on the n cosets: one permutation of
{0..n-1} per generator, transitive, with the subgroup itself recovered as
the stabilizer of the base coset 0.  Every lattice question (membership,
containment, normality, equality) reduces to running words through the
action, which keeps all answers exact.

Canonical form: relabelling the points in breadth-first discovery order
from 0, scanning moves in the order x0, x0^-1, x1, x1^-1, ..., assigns each
coset action a unique table.  Two actions describe the same subgroup
exactly when their canonical tables agree, and the low-index enumerator
generates precisely the canonical tables, so each subgroup appears once.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Iterable, Sequence

DEFAULT_MAX_WORK = 5_000_000


class ResourceLimitError(RuntimeError):
    """An enumeration was refused because it would exceed its work bound."""


class NotTransitiveError(ValueError):
    """The permutations do not act transitively; ``orbits`` holds the
    partition of the points, so callers can report it."""

    def __init__(self, message, orbits):
        super().__init__(message)
        self.orbits = tuple(tuple(o) for o in orbits)


def _reduce(letters) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for i, s in letters:
        if s not in (1, -1):
            raise ValueError("letter sign must be +1 or -1, got %r" % (s,))
        if not isinstance(i, int) or i < 0:
            raise ValueError("generator index must be a nonnegative int, got %r" % (i,))
        if out and out[-1] == (i, -s):
            out.pop()
        else:
            out.append((i, s))
    return tuple(out)


class FreeWord:
    """A reduced word; letters are (generator index, sign) pairs."""

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[tuple[int, int]] = ()):
        object.__setattr__(self, "letters", _reduce(letters))

    @classmethod
    def generator(cls, i: int, sign: int = 1) -> "FreeWord":
        return cls(((i, sign),))

    @classmethod
    def parse(cls, text: str) -> "FreeWord":
        """Parse ``"x0 x1^-1"`` style words; ``""`` and ``"1"`` are empty."""
        text = text.strip()
        if text in ("", "1"):
            return cls()
        letters = []
        for token in text.split():
            body, sign = token, 1
            if token.endswith("^-1"):
                body, sign = token[:-3], -1
            if not body.startswith("x") or not body[1:].isdigit():
                raise ValueError("cannot parse letter %r" % token)
            letters.append((int(body[1:]), sign))
        return cls(letters)

    def __setattr__(self, *args):
        raise AttributeError("FreeWord is immutable")

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple((i, -s) for i, s in reversed(self.letters)))

    def __pow__(self, n: int) -> "FreeWord":
        if n < 0:
            return self.inverse() ** (-n)
        out = FreeWord()
        for _ in range(n):
            out = out * self
        return out

    def max_index(self) -> int:
        """Largest generator index used; -1 for the empty word."""
        return max((i for i, _ in self.letters), default=-1)

    def __len__(self):
        return len(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __eq__(self, other):
        return isinstance(other, FreeWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join("x%d" % i if s > 0 else "x%d^-1" % i
                        for i, s in self.letters)

    def __repr__(self):
        return "FreeWord(%s)" % self


@dataclass(frozen=True)
class GeneratorImages:
    """A homomorphism of free groups given by the images of the generators."""

    source_rank: int
    target_rank: int
    images: tuple[FreeWord, ...]

    def __post_init__(self):
        if len(self.images) != self.source_rank:
            raise ValueError("expected %d images, got %d"
                             % (self.source_rank, len(self.images)))
        for w in self.images:
            if w.max_index() >= self.target_rank:
                raise ValueError("image %s uses a generator outside rank %d"
                                 % (w, self.target_rank))

    @classmethod
    def identity(cls, rank: int) -> "GeneratorImages":
        return cls(rank, rank, tuple(FreeWord.generator(i) for i in range(rank)))


def substitute(w: FreeWord, images: GeneratorImages) -> FreeWord:
    """Apply the homomorphism to ``w``; the result is reduced."""
    if w.max_index() >= images.source_rank:
        raise ValueError("word %s uses a generator outside rank %d"
                         % (w, images.source_rank))
    letters: list[tuple[int, int]] = []
    for i, s in w.letters:
        piece = images.images[i] if s > 0 else images.images[i].inverse()
        letters.extend(piece.letters)
    return FreeWord(letters)


class PermRep:
    """Transitive action of a free group on {0..degree-1}; Stab(0) is the
    subgroup represented.  Index = degree."""

    def __init__(self, rank: int, degree: int, perms: Sequence[Sequence[int]]):
        if rank < 0:
            raise ValueError("rank must be nonnegative")
        if degree < 1:
            raise ValueError("degree must be at least 1")
        if len(perms) != rank:
            raise ValueError("expected %d permutations, got %d" % (rank, len(perms)))
        self.rank = rank
        self.degree = degree
        self.perms = tuple(tuple(p) for p in perms)
        for p in self.perms:
            if sorted(p) != list(range(degree)):
                raise ValueError("%r is not a permutation of 0..%d" % (p, degree - 1))
        inv = []
        for p in self.perms:
            q = [0] * degree
            for a, b in enumerate(p):
                q[b] = a
            inv.append(tuple(q))
        self._inv = tuple(inv)
        if len(self._orbit_order(0)) != degree:
            orbits = []
            placed: set[int] = set()
            for p in range(degree):
                if p not in placed:
                    orbit = sorted(self._orbit_order(p))
                    placed.update(orbit)
                    orbits.append(orbit)
            raise NotTransitiveError(
                "action is not transitive: %d orbits" % len(orbits), orbits)
        self._schreier: tuple[FreeWord, ...] | None = None
        self._canonical_key: tuple | None = None
        self._normal: bool | None = None

    def _moves(self):
        for i in range(self.rank):
            yield i, 1, self.perms[i]
            yield i, -1, self._inv[i]

    def _orbit_order(self, start: int) -> list[int]:
        seen = {start}
        order = [start]
        qi = 0
        while qi < len(order):
            a = order[qi]
            qi += 1
            for _i, _s, table in self._moves():
                b = table[a]
                if b not in seen:
                    seen.add(b)
                    order.append(b)
        return order

    def act(self, point: int, w: FreeWord) -> int:
        """Right action on cosets: act(p, uv) = act(act(p, u), v)."""
        if not 0 <= point < self.degree:
            raise ValueError("point %r out of range" % (point,))
        for i, s in w.letters:
            if i >= self.rank:
                raise ValueError("word %s uses a generator outside rank %d"
                                 % (w, self.rank))
            point = self.perms[i][point] if s > 0 else self._inv[i][point]
        return point

    def contains(self, w: FreeWord) -> bool:
        """Membership of ``w`` in the represented subgroup."""
        return self.act(0, w) == 0

    def transversal(self) -> tuple[FreeWord, ...]:
        """Coset representative words from the canonical BFS, one per point."""
        words: dict[int, FreeWord] = {0: FreeWord()}
        queue = deque([0])
        while queue:
            a = queue.popleft()
            for i, s, table in self._moves():
                b = table[a]
                if b not in words:
                    words[b] = words[a] * FreeWord.generator(i, s)
                    queue.append(b)
        return tuple(words[p] for p in range(self.degree))

    def schreier_generators(self) -> tuple[FreeWord, ...]:
        """Generators t_p x_i t_{p.x_i}^-1 of Stab(0), trivial ones dropped.

        With the breadth-first transversal these are distinct and freely
        generate the subgroup, so there are exactly
        1 + degree*(rank - 1) of them for rank >= 1.
        """
        if self._schreier is None:
            t = self.transversal()
            gens = []
            for p in range(self.degree):
                for i in range(self.rank):
                    w = t[p] * FreeWord.generator(i) * t[self.perms[i][p]].inverse()
                    if w:
                        gens.append(w)
            self._schreier = tuple(gens)
        return self._schreier

    def canonical(self) -> "PermRep":
        """The same subgroup with points relabelled in canonical BFS order."""
        return self.rebased(0)

    def canonical_key(self) -> tuple:
        if self._canonical_key is None:
            c = self.canonical()
            self._canonical_key = (self.rank, self.degree, c.perms)
        return self._canonical_key

    def rebased(self, point: int) -> "PermRep":
        """The conjugate subgroup Stab(point), canonically labelled."""
        order = self._orbit_order(point)
        label = {p: k for k, p in enumerate(order)}
        perms = []
        for p in self.perms:
            q = [0] * self.degree
            for a in range(self.degree):
                q[label[a]] = label[p[a]]
            perms.append(tuple(q))
        return PermRep(self.rank, self.degree, perms)

    def __eq__(self, other):
        return (isinstance(other, PermRep) and self.rank == other.rank
                and self.degree == other.degree and self.perms == other.perms)

    def __hash__(self):
        return hash((self.rank, self.degree, self.perms))

    def __repr__(self):
        return "PermRep(rank=%d, degree=%d, perms=%r)" % (
            self.rank, self.degree, [list(p) for p in self.perms])


def subgroup_leq(h: PermRep, k: PermRep) -> bool:
    """Whether the subgroup of ``h`` is contained in the subgroup of ``k``.

    Decided by pushing every Schreier generator of ``h`` through the action
    of ``k``: containment holds exactly when they all fix the base coset.
    """
    if h.rank != k.rank:
        raise ValueError("rank mismatch: %d vs %d" % (h.rank, k.rank))
    return all(k.act(0, w) == 0 for w in h.schreier_generators())


def is_normal(rep: PermRep) -> bool:
    """Whether Stab(0) is normal: every Schreier generator fixes every coset."""
    if rep._normal is None:
        rep._normal = all(rep.act(p, w) == p
                          for w in rep.schreier_generators()
                          for p in range(rep.degree))
    return rep._normal


def rep_equivalent(a: PermRep, b: PermRep) -> bool:
    """Whether two actions describe the same subgroup (0-fixing relabelling)."""
    if a.rank != b.rank:
        raise ValueError("rank mismatch: %d vs %d" % (a.rank, b.rank))
    return a.canonical_key() == b.canonical_key()


def pushforward_leq(n_src: PermRep, images: GeneratorImages,
                    n_tgt: PermRep) -> bool:
    """Whether the homomorphism maps the subgroup of ``n_src`` into the
    subgroup of ``n_tgt``."""
    if n_src.rank != images.source_rank:
        raise ValueError("source rank mismatch: %d vs %d"
                         % (n_src.rank, images.source_rank))
    if n_tgt.rank != images.target_rank:
        raise ValueError("target rank mismatch: %d vs %d"
                         % (n_tgt.rank, images.target_rank))
    return all(n_tgt.act(0, substitute(w, images)) == 0
               for w in n_src.schreier_generators())


@lru_cache(maxsize=None)
def subgroup_count(rank: int, index: int) -> int:
    """Number of index-n subgroups of the free group of the given rank.

    Classical recursion: N(n) = n*(n!)^(r-1) - sum_{k<n} ((n-k)!)^(r-1) N(k).
    """
    if rank == 0:
        return 1 if index == 1 else 0
    total = index * factorial(index) ** (rank - 1)
    for k in range(1, index):
        total -= factorial(index - k) ** (rank - 1) * subgroup_count(rank, k)
    return total


def _canonical_tables(rank: int, degree: int):
    """Yield every canonically-labelled transitive table of the given degree.

    The table is filled slot by slot in scan order (point, generator, sign
    with forward before backward), and a fresh point may only receive the
    next unused label.  A completed table is therefore labelled exactly in
    breadth-first discovery order, which makes the output one table per
    subgroup, in a fixed lexicographic order.
    """
    if rank == 0:
        if degree == 1:
            yield ()
        return
    fwd = [[-1] * degree for _ in range(rank)]
    bwd = [[-1] * degree for _ in range(rank)]
    slots = [(p, i, s) for p in range(degree) for i in range(rank) for s in (0, 1)]

    def rec(si: int, used: int):
        if si == len(slots):
            if used == degree:
                yield tuple(tuple(row) for row in fwd)
            return
        p, i, s = slots[si]
        if p >= used:
            # every created point has been fully scanned, so no new point
            # can ever appear: dead branch unless already complete
            return
        table, other = (fwd[i], bwd[i]) if s == 0 else (bwd[i], fwd[i])
        if table[p] != -1:
            yield from rec(si + 1, used)
            return
        for q in range(used):
            if other[q] == -1:
                table[p], other[q] = q, p
                yield from rec(si + 1, used)
                table[p], other[q] = -1, -1
        if used < degree:
            table[p], other[used] = used, p
            yield from rec(si + 1, used + 1)
            table[p], other[used] = -1, -1

    yield from rec(0, 1)


def low_index_reps(rank: int, max_degree: int, normal_only: bool = False,
                   max_work: int = DEFAULT_MAX_WORK) -> list[PermRep]:
    """All subgroups of index <= max_degree, one canonical action each.

    Results are ordered by degree and then lexicographically by table.
    Refuses with ResourceLimitError when the predicted number of subgroups
    exceeds ``max_work`` (the bound counts all subgroups even when only
    normal ones are kept, since the search still visits them).
    """
    if rank < 0 or max_degree < 1:
        raise ValueError("need rank >= 0 and max_degree >= 1")
    predicted = sum(subgroup_count(rank, n) for n in range(1, max_degree + 1))
    if predicted > max_work:
        raise ResourceLimitError(
            "enumeration of rank %d, degree <= %d would visit %d subgroups, "
            "above the work bound %d; raise max_work to proceed"
            % (rank, max_degree, predicted, max_work))
    out = []
    for degree in range(1, max_degree + 1):
        for table in _canonical_tables(rank, degree):
            rep = PermRep(rank, degree, table)
            if normal_only and not is_normal(rep):
                continue
            out.append(rep)
    return out


def translation_kernel_rep(rank: int, modulus: int,
                           max_work: int = DEFAULT_MAX_WORK) -> PermRep:
    """Action of the free group on (Z/modulus)^rank by coordinate shifts.

    Point p encodes the vector (p % m, p//m % m, ...); generator x_i adds 1
    to coordinate i.  The stabilizer of 0 is the kernel of the map onto
    (Z/modulus)^rank, hence normal of index modulus^rank.
    """
    if modulus < 1:
        raise ValueError("modulus must be positive")
    degree = modulus ** rank
    if degree > max_work:
        raise ResourceLimitError(
            "degree %d exceeds the work bound %d" % (degree, max_work))
    perms = []
    for i in range(rank):
        step = modulus ** i
        p = [0] * degree
        for a in range(degree):
            digit = (a // step) % modulus
            p[a] = a - digit * step + ((digit + 1) % modulus) * step
        perms.append(tuple(p))
    return PermRep(rank, degree, perms)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def mod_p_kernel_rep(rank: int, p: int,
                     max_work: int = DEFAULT_MAX_WORK) -> PermRep:
    """Kernel of the reduction onto (Z/p)^rank for a prime p, as an action."""
    if not _is_prime(p):
        raise ValueError("%r is not prime" % (p,))
    return translation_kernel_rep(rank, p, max_work=max_work)
