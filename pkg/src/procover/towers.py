"""Finite chains of covering squares and the universal-tower construction.

A tower is a truncated inverse system: one covering per level plus bonding
morphisms one step down on the cover side and on the base side, every
square commuting.  On top of plain validation this module classifies the
kernel pairs of a tower (good pairs), projects deck groups down the chain,
builds the tower realizing a compatible chain of finite-index normal
subgroups, and runs the finite shadow of the trivial-fundamental-group
criterion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .graphs import (
    Congruence,
    FiniteGraph,
    GraphError,
    GraphMorphism,
    InducedMapError,
    compose,
    induced_quotient_map,
    is_connected,
    kernel_congruence,
    quotient,
)
from .freegroup import (
    DEFAULT_MAX_WORK,
    GeneratorImages,
    PermRep,
    is_normal,
    low_index_reps,
    pushforward_leq,
    substitute,
)
from .covering import (
    Covering,
    NotACoveringError,
    Pi1Data,
    as_covering,
    cover_from_subgroup,
    deck_group,
    is_regular,
    lift,
    path_to_word,
    pi1_data,
)


class TowerError(ValueError):
    """A tower request cannot be satisfied; may carry a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CompatibilityError(ValueError):
    """A subgroup chain is not compatible with its bonding maps.

    ``levels`` is the offending pair (lower, upper) and ``word`` a Schreier
    generator of the upper subgroup whose image escapes the lower one.
    """

    def __init__(self, levels, word):
        super().__init__(
            "subgroup at level %d does not push into level %d (witness %s)"
            % (levels[1], levels[0], word))
        self.levels = levels
        self.word = word


class Tower:
    """Levels 0..k of coverings with one-step bonding morphisms.

    ``cover_steps[i]`` maps the level i+1 cover onto the level i cover and
    ``base_steps[i]`` does the same on the bases.  Shapes are checked at
    construction; the semantic checks (squares commute, surjectivity) are
    the job of :func:`validate_tower`.  An optional basepoint thread gives a
    vertex per cover with each bonding step sending one to the next.
    """

    def __init__(self, coverings: Iterable[Covering],
                 cover_steps: Iterable[GraphMorphism],
                 base_steps: Iterable[GraphMorphism],
                 basepoints: Iterable[str] | None = None):
        self.coverings = tuple(coverings)
        self.cover_steps = tuple(cover_steps)
        self.base_steps = tuple(base_steps)
        self.basepoints = None if basepoints is None else tuple(basepoints)
        if not self.coverings:
            raise TowerError("a tower needs at least one level")
        k = len(self.coverings) - 1
        if len(self.cover_steps) != k or len(self.base_steps) != k:
            raise TowerError("expected %d bonding morphisms per side" % k)
        for i in range(k):
            if self.cover_steps[i].domain != self.coverings[i + 1].domain:
                raise TowerError("cover step %d does not start at level %d" % (i, i + 1))
            if self.cover_steps[i].codomain != self.coverings[i].domain:
                raise TowerError("cover step %d does not end at level %d" % (i, i))
            if self.base_steps[i].domain != self.coverings[i + 1].codomain:
                raise TowerError("base step %d does not start at level %d" % (i, i + 1))
            if self.base_steps[i].codomain != self.coverings[i].codomain:
                raise TowerError("base step %d does not end at level %d" % (i, i))
        if self.basepoints is not None:
            if len(self.basepoints) != k + 1:
                raise TowerError("expected one basepoint per level")
            for i, a in enumerate(self.basepoints):
                if a not in self.coverings[i].domain._vertex_set:
                    raise TowerError("basepoint %r is not in level %d" % (a, i))
            for i in range(k):
                if self.cover_steps[i].vmap[self.basepoints[i + 1]] != self.basepoints[i]:
                    raise TowerError("basepoints are not threaded at step %d" % i)

    @property
    def top(self) -> int:
        return len(self.coverings) - 1

    def cover_graph(self, i: int) -> FiniteGraph:
        return self.coverings[i].domain

    def base_graph(self, i: int) -> FiniteGraph:
        return self.coverings[i].codomain

    def cover_map_to(self, i: int, j: int) -> GraphMorphism:
        """Composite bonding morphism from level j down to level i (j >= i)."""
        if not 0 <= i <= j <= self.top:
            raise TowerError("bad level pair (%d, %d)" % (i, j))
        out = GraphMorphism.identity(self.cover_graph(j))
        for step in range(j - 1, i - 1, -1):
            out = compose(self.cover_steps[step], out)
        return out

    def base_map_to(self, i: int, j: int) -> GraphMorphism:
        if not 0 <= i <= j <= self.top:
            raise TowerError("bad level pair (%d, %d)" % (i, j))
        out = GraphMorphism.identity(self.base_graph(j))
        for step in range(j - 1, i - 1, -1):
            out = compose(self.base_steps[step], out)
        return out

    def require_basepoints(self) -> tuple[str, ...]:
        if self.basepoints is None:
            raise TowerError("this operation needs a basepoint thread")
        return self.basepoints


@dataclass
class TowerReport:
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_tower_pieces(level_maps: list[GraphMorphism],
                          cover_steps: list[GraphMorphism],
                          base_steps: list[GraphMorphism]) -> TowerReport:
    """Report-style validation of tower data given as bare morphisms.

    Checks local bijectivity of every level, pointwise commutativity of
    every square, and (warning level) surjectivity of the bonding maps.
    Lists every violation with a witness element.
    """
    report = TowerReport()
    for i, f in enumerate(level_maps):
        try:
            as_covering(f)
        except NotACoveringError as exc:
            report.violations.append({
                "kind": "not-locally-bijective", "level": i,
                "witness": exc.vertex, "reason": exc.reason})
    for i, (phi, psi) in enumerate(zip(cover_steps, base_steps)):
        left = compose(level_maps[i], phi)
        right = compose(psi, level_maps[i + 1])
        for v in left.domain.vertices:
            if left.vmap[v] != right.vmap[v]:
                report.violations.append({
                    "kind": "square", "step": i, "witness": v,
                    "via-cover": left.vmap[v], "via-base": right.vmap[v]})
                break
        else:
            for d in left.domain.darts:
                if left.dmap[d] != right.dmap[d]:
                    report.violations.append({
                        "kind": "square", "step": i, "witness": d,
                        "via-cover": left.dmap[d], "via-base": right.dmap[d]})
                    break
        for m, side in ((phi, "cover"), (psi, "base")):
            if not m.is_surjective():
                missing = sorted(m.codomain._vertex_set - set(m.vmap.values())
                                 or m.codomain._dart_set - set(m.dmap.values()))
                report.warnings.append({
                    "kind": "bonding-not-surjective", "step": i,
                    "side": side, "witness": missing[0]})
    return report


def validate_tower(t: Tower) -> TowerReport:
    """Full semantic validation of a tower (see validate_tower_pieces)."""
    return validate_tower_pieces([c.map for c in t.coverings],
                                 list(t.cover_steps), list(t.base_steps))


def require_valid_tower(t: Tower) -> Tower:
    report = validate_tower(t)
    if not report.ok:
        first = report.violations[0]
        raise TowerError("invalid tower: %r" % (first,), witness=first)
    return t


@dataclass
class GoodPairRecord:
    """Classification of one congruence pair against a morphism.

    Verdicts, weakest first: ``not_half`` (pair does not transport along the
    map), ``half`` (induced map exists but is not locally bijective),
    ``good`` (induced map is a covering), ``regular_good`` (a regular
    covering of connected graphs).
    """

    cover_congruence: Congruence
    base_congruence: Congruence
    verdict: str
    induced: GraphMorphism | None = None
    witness: tuple | None = None
    level: int | None = None
    top: int | None = None


def classify_pair(f: GraphMorphism, r: Congruence, s: Congruence,
                  level: int | None = None,
                  top: int | None = None) -> GoodPairRecord:
    """Classify the pair (r, s) for the map ``f``."""
    try:
        induced = induced_quotient_map(f, r, s)
    except InducedMapError as exc:
        return GoodPairRecord(r, s, "not_half", witness=exc.witness,
                              level=level, top=top)
    try:
        cov = as_covering(induced)
    except NotACoveringError as exc:
        return GoodPairRecord(r, s, "half", induced=induced,
                              witness=(exc.vertex, exc.reason),
                              level=level, top=top)
    if is_connected(induced.domain) and is_connected(induced.codomain) \
            and is_regular(cov).regular:
        verdict = "regular_good"
    else:
        verdict = "good"
    return GoodPairRecord(r, s, verdict, induced=induced, level=level, top=top)


def kernel_good_pairs(t: Tower, top: int | None = None) -> list[GoodPairRecord]:
    """Classify the kernel pair of every bonding composite into level i <= top.

    For each i the pair is (kernel of the cover-side composite, kernel of
    the base-side composite) taken on the top level's covering.  In a valid
    tower every record is at least ``good``.
    """
    j = t.top if top is None else top
    if not 0 <= j <= t.top:
        raise TowerError("no level %r in this tower" % (top,))
    f_top = t.coverings[j].map
    records = []
    for i in range(j + 1):
        r = kernel_congruence(t.cover_map_to(i, j))
        s = kernel_congruence(t.base_map_to(i, j))
        records.append(classify_pair(f_top, r, s, level=i, top=j))
    return records


@dataclass
class DeckTowerStep:
    """Projection of one deck group a step down the tower."""

    hom: tuple[int, ...]
    surjective: bool


@dataclass
class DeckTowerResult:
    decks: list
    steps: list[DeckTowerStep]

    @property
    def orders(self) -> list[int]:
        return [d.order for d in self.decks]


def deck_tower(t: Tower) -> DeckTowerResult:
    """Deck group of every level plus the connecting homomorphisms.

    Each deck transformation upstairs projects through the cover-side
    bonding morphism to a unique deck transformation downstairs (existence
    uses simple transitivity, so every level must be regular); the
    projection is verified pointwise and as a group homomorphism, and each
    step records whether it is surjective.
    """
    require_valid_tower(t)
    for i, cov in enumerate(t.coverings):
        if not is_connected(cov.domain) or not is_connected(cov.codomain):
            raise TowerError("level %d is not connected" % i)
    decks = []
    for i, cov in enumerate(t.coverings):
        if not is_regular(cov).regular:
            raise TowerError("level %d is not a regular covering" % i)
        decks.append(deck_group(cov))
    steps = []
    for i in range(t.top):
        phi = t.cover_steps[i]
        upper, lower = decks[i + 1], decks[i]
        x0 = phi.domain.vertices[0]
        hom = []
        for a_idx, alpha in enumerate(upper.elements):
            want = phi.vmap[alpha.vmap[x0]]
            start = phi.vmap[x0]
            beta_idx = None
            for b_idx, beta in enumerate(lower.elements):
                if beta.vmap[start] == want:
                    beta_idx = b_idx
                    break
            if beta_idx is None:
                raise TowerError(
                    "deck element %d at level %d does not project" % (a_idx, i + 1),
                    witness=(i + 1, a_idx))
            if compose(lower.elements[beta_idx], phi) != compose(phi, alpha):
                raise TowerError(
                    "deck element %d at level %d projects inconsistently"
                    % (a_idx, i + 1), witness=(i + 1, a_idx))
            hom.append(beta_idx)
        for a in range(upper.order):
            for b in range(upper.order):
                if hom[upper.table[a][b]] != lower.table[hom[a]][hom[b]]:
                    raise TowerError(
                        "deck projection at step %d is not a homomorphism" % i,
                        witness=(i, a, b))
        steps.append(DeckTowerStep(hom=tuple(hom),
                                   surjective=set(hom) == set(range(lower.order))))
    return DeckTowerResult(decks=decks, steps=steps)


@dataclass
class UniversalSpec:
    """Input for the universal-tower construction.

    A connected based graph, a chain of congruences on it from coarsest to
    finest (the last may well be the diagonal), and one normal finite-index
    subgroup per quotient level, given as a coset action in the
    fundamental-group basis of that quotient.
    """

    base: FiniteGraph
    basepoint: str
    quotients: list[Congruence]
    normals: list[PermRep]


def _check_refines(coarse: Congruence, fine: Congruence, i: int):
    for cls in fine.vertex_classes:
        if len({coarse.vertex_rep(x) for x in cls}) > 1:
            raise TowerError(
                "quotient %d does not refine quotient %d (vertex class %r splits)"
                % (i + 1, i, cls[0]), witness=cls)
    for cls in fine.dart_classes:
        if len({coarse.dart_rep(x) for x in cls}) > 1:
            raise TowerError(
                "quotient %d does not refine quotient %d (dart class %r splits)"
                % (i + 1, i, cls[0]), witness=cls)


def universal_tower(spec: UniversalSpec) -> Tower:
    """Realize a compatible chain of normal subgroups as a regular tower.

    Level i is the cover of base/quotients[i] built from normals[i]; the
    base bondings are induced quotient maps and the cover bondings are the
    unique lifts, which the compatibility condition guarantees to exist.
    """
    if len(spec.quotients) != len(spec.normals) or not spec.quotients:
        raise TowerError("need the same positive number of quotients and subgroups")
    if not is_connected(spec.base):
        raise TowerError("base graph is not connected")
    if spec.basepoint not in spec.base._vertex_set:
        raise TowerError("unknown basepoint %r" % spec.basepoint)
    k = len(spec.quotients) - 1
    levels = []
    for i, (cong, rep) in enumerate(zip(spec.quotients, spec.normals)):
        if cong.base != spec.base:
            raise TowerError("quotient %d is not a congruence on the base" % i)
        delta, _ = quotient(spec.base, cong)
        b_i = cong.vertex_rep(spec.basepoint)
        p_i = pi1_data(delta, b_i)
        if rep.rank != p_i.rank:
            raise TowerError(
                "subgroup %d has rank %d but level %d needs rank %d"
                % (i, rep.rank, i, p_i.rank))
        if not is_normal(rep):
            raise TowerError("subgroup %d is not normal" % i)
        cover, a_i, cov = cover_from_subgroup(delta, b_i, rep)
        levels.append((delta, b_i, p_i, cover, a_i, cov))
    base_steps = []
    cover_steps = []
    for i in range(k):
        _check_refines(spec.quotients[i], spec.quotients[i + 1], i)
        psi = induced_quotient_map(GraphMorphism.identity(spec.base),
                                   spec.quotients[i + 1], spec.quotients[i])
        images = induced_hom(psi, levels[i + 1][2], levels[i][2])
        if not pushforward_leq(spec.normals[i + 1], images, spec.normals[i]):
            bad = next(w for w in spec.normals[i + 1].schreier_generators()
                       if spec.normals[i].act(0, substitute(w, images)) != 0)
            raise CompatibilityError((i, i + 1), bad)
        base_steps.append(psi)
        lowered = compose(psi, levels[i + 1][5].map)
        phi = lift(lowered, levels[i][5], levels[i + 1][4], levels[i][4])
        cover_steps.append(phi)
    return Tower([lv[5] for lv in levels], cover_steps, base_steps,
                 basepoints=[lv[4] for lv in levels])


def induced_hom(f: GraphMorphism, p_dom: Pi1Data, p_cod: Pi1Data) -> GeneratorImages:
    """The homomorphism of fundamental groups induced by a based map.

    Each basis loop upstairs is pushed through ``f`` and rewritten through
    the downstairs tree into a reduced word.
    """
    if f.domain != p_dom.graph or f.codomain != p_cod.graph:
        raise GraphError("fundamental-group data does not match the morphism")
    if f.vmap[p_dom.basepoint] != p_cod.basepoint:
        raise ValueError("basepoint mismatch: %r maps to %r, not %r"
                         % (p_dom.basepoint, f.vmap[p_dom.basepoint],
                            p_cod.basepoint))
    words = []
    for key in range(p_dom.rank):
        image_path = [f.dmap[d] for d in p_dom.basis_loop(key)]
        words.append(path_to_word(p_cod, image_path))
    return GeneratorImages(p_dom.rank, p_cod.rank, tuple(words))


@dataclass
class TrivialityRow:
    """One (level, normal subgroup) pair and where it became satisfied."""

    level: int
    rep: PermRep
    index: int
    satisfied_at: int | None


@dataclass
class TrivialityReport:
    """Finite shadow of the trivial-fundamental-group criterion.

    ``trivial`` certifies only the base level within this truncation:
    every normal subgroup of index <= max_index at level 0 absorbs the
    whole image of some deeper level.  Rows for higher levels are reported
    as evidence; a pair at the top level can never be satisfied unless it
    is the full group, and a truncation can never speak for the limit.
    """

    max_index: int
    depth: int
    rows: list[TrivialityRow]
    trivial: bool


def pi1_triviality_check(t: Tower, max_index: int,
                         max_work: int = DEFAULT_MAX_WORK) -> TrivialityReport:
    """For every level i and normal subgroup H of index <= max_index in the
    fundamental group there, find the first level j >= i whose whole image
    lands inside H, if any within the tower."""
    basepoints = t.require_basepoints()
    p = []
    for i in range(t.top + 1):
        if not is_connected(t.cover_graph(i)):
            raise TowerError("level %d is not connected" % i)
        p.append(pi1_data(t.cover_graph(i), basepoints[i]))
    homs: dict[tuple[int, int], GeneratorImages] = {}
    for i in range(t.top + 1):
        for j in range(i, t.top + 1):
            homs[(i, j)] = induced_hom(t.cover_map_to(i, j), p[j], p[i])
    rows = []
    for i in range(t.top + 1):
        for rep in low_index_reps(p[i].rank, max_index, normal_only=True,
                                  max_work=max_work):
            satisfied_at = None
            for j in range(i, t.top + 1):
                images = homs[(i, j)]
                if all(rep.act(0, w) == 0 for w in images.images):
                    satisfied_at = j
                    break
            rows.append(TrivialityRow(level=i, rep=rep, index=rep.degree,
                                      satisfied_at=satisfied_at))
    trivial = all(row.satisfied_at is not None for row in rows if row.level == 0)
    return TrivialityReport(max_index=max_index, depth=t.top, rows=rows,
                            trivial=trivial)


@dataclass
class FiberLevel:
    level: int
    vertex: str
    size: int
    onto: bool | None
    missing: tuple[str, ...]


@dataclass
class FiberReport:
    """Fiber sizes along a vertex thread, with per-step surjectivity."""

    start: str
    levels: list[FiberLevel]
    dead_end_at: int | None

    @property
    def sizes(self) -> list[int]:
        return [lv.size for lv in self.levels]


def limit_fiber_report(t: Tower, v: str) -> FiberReport:
    """Follow a vertex thread over ``v`` upward and check that each bonding
    map carries the deeper fiber onto the shallower one.

    The thread takes the smallest preimage at each step; a step with no
    preimage is reported as a dead end and stops the climb.
    """
    if v not in t.base_graph(0)._vertex_set:
        raise GraphError("unknown vertex %r in the level-0 base" % v)
    levels = []
    dead_end = None
    current = v
    previous_fiber = None
    for i in range(t.top + 1):
        fiber = t.coverings[i].vertex_fibers[current]
        onto = None
        missing = ()
        if i > 0:
            phi = t.cover_steps[i - 1]
            image = {phi.vmap[x] for x in fiber}
            missing = tuple(sorted(set(previous_fiber) - image))
            onto = not missing
        levels.append(FiberLevel(level=i, vertex=current, size=len(fiber),
                                 onto=onto, missing=missing))
        previous_fiber = fiber
        if i < t.top:
            psi = t.base_steps[i]
            preimages = sorted(x for x in psi.domain.vertices
                               if psi.vmap[x] == current)
            if not preimages:
                dead_end = i + 1
                break
            current = preimages[0]
    return FiberReport(start=v, levels=levels, dead_end_at=dead_end)
