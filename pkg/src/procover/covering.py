"""Coverings of finite graphs and everything that lives over them.

A covering is a graph morphism that restricts to a bijection on the star of
darts at every vertex.  This module recognizes coverings, builds them from
subgroups (voltage construction), reads subgroups back off as monodromy,
lifts maps through them, computes deck transformation groups, decides
regularity three independent ways, and forms quotients by free group
actions and by deck subgroups.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from .graphs import (
    Congruence,
    FiniteGraph,
    GraphError,
    GraphMorphism,
    components,
    compose,
    edge_stem,
    is_connected,
    quotient,
    spanning_tree,
)
from .freegroup import FreeWord, PermRep, is_normal


class NotACoveringError(ValueError):
    """Local bijectivity fails; carries the vertex and the reason."""

    def __init__(self, vertex, reason):
        super().__init__("not a covering at vertex %r: %s" % (vertex, reason))
        self.vertex = vertex
        self.reason = reason


class LiftObstruction(ValueError):
    """A lift does not exist; ``path`` is a closed path in the source whose
    image fails to lift to a loop at the chosen basepoint."""

    def __init__(self, path):
        super().__init__("no lift: obstruction path of %d darts" % len(path))
        self.path = tuple(path)


class ActionError(ValueError):
    """A group action request is inconsistent; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class Covering:
    """A verified locally bijective morphism with its fibers cached.

    ``degree`` is the common fiber size; over a disconnected codomain it is
    the shared value of the per-component fiber sizes, or None when the
    components disagree (``component_degrees`` always has the detail).
    """

    def __init__(self, map: GraphMorphism, vertex_fibers, dart_fibers,
                 degree, component_degrees):
        self.map = map
        self.vertex_fibers = vertex_fibers
        self.dart_fibers = dart_fibers
        self.degree = degree
        self.component_degrees = component_degrees

    @property
    def domain(self) -> FiniteGraph:
        return self.map.domain

    @property
    def codomain(self) -> FiniteGraph:
        return self.map.codomain

    def __repr__(self):
        return "Covering(degree=%r, %r -> %r)" % (
            self.degree, self.domain.name, self.codomain.name)


def as_covering(f: GraphMorphism) -> Covering:
    """Verify local bijectivity and wrap ``f`` as a Covering.

    Raises NotACoveringError with the first failing vertex otherwise.
    """
    dom, cod = f.domain, f.codomain
    for v in dom.vertices:
        images = [f.dmap[d] for d in dom.star(v)]
        if len(set(images)) != len(images):
            raise NotACoveringError(v, "two darts at the vertex have the same image")
        if set(images) != set(cod.star(f.vmap[v])):
            raise NotACoveringError(
                v, "star maps onto %d of %d darts at %r"
                % (len(images), len(cod.star(f.vmap[v])), f.vmap[v]))
    vertex_fibers = {u: [] for u in cod.vertices}
    for v in dom.vertices:
        vertex_fibers[f.vmap[v]].append(v)
    vertex_fibers = {u: tuple(sorted(vs)) for u, vs in vertex_fibers.items()}
    dart_fibers = {e: [] for e in cod.darts}
    for d in dom.darts:
        dart_fibers[f.dmap[d]].append(d)
    dart_fibers = {e: tuple(sorted(ds)) for e, ds in dart_fibers.items()}
    component_degrees = []
    for comp in components(cod):
        sizes = {len(vertex_fibers[u]) for u in comp}
        assert len(sizes) == 1, "fiber sizes differ inside one component"
        component_degrees.append((comp[0], sizes.pop()))
    sizes = {n for _, n in component_degrees}
    degree = sizes.pop() if len(sizes) == 1 else None
    return Covering(f, vertex_fibers, dart_fibers, degree,
                    tuple(component_degrees))


def fiber_transport(c: Covering, e: str) -> dict[str, str]:
    """The bijection fiber(src(e)) -> fiber(t(e)) given by following the
    lifts of ``e``; transporting along inv(e) inverts it."""
    if e not in c.codomain._dart_set:
        raise GraphError("unknown dart %r" % e)
    out = {}
    for lifted in c.dart_fibers[e]:
        out[c.domain.src[lifted]] = c.domain.target(lifted)
    assert len(out) == len(c.vertex_fibers[c.codomain.src[e]])
    assert len(set(out.values())) == len(out)
    return out


class Pi1Data:
    """Free-group coordinates on a connected graph.

    A spanning tree plus one chosen orientation of each non-tree edge pair;
    the k-th basis dart stands for the generator ``x_k`` of the fundamental
    group at the basepoint.  rank = edge pairs - vertices + 1.
    """

    def __init__(self, graph, basepoint, tree, basis_darts):
        self.graph = graph
        self.basepoint = basepoint
        self.tree = tree
        self.basis_darts = tuple(basis_darts)
        self.rank = len(self.basis_darts)
        self._letter: dict[str, tuple[int, int]] = {}
        for k, d in enumerate(self.basis_darts):
            self._letter[d] = (k, 1)
            self._letter[graph.inv[d]] = (k, -1)

    def letter(self, d: str) -> tuple[int, int] | None:
        """Generator letter carried by a dart; None on tree darts."""
        if d in self.tree.tree_darts:
            return None
        return self._letter[d]

    def voltage(self, d: str) -> FreeWord:
        lt = self.letter(d)
        return FreeWord() if lt is None else FreeWord((lt,))

    def basis_loop(self, k: int) -> tuple[str, ...]:
        """The closed path at the basepoint representing generator x_k:
        tree path out, the basis dart, tree path back."""
        d = self.basis_darts[k]
        g = self.graph
        out = self.tree.path_from_root(g.src[d])
        back = self.tree.path_from_root(g.target(d))
        return out + (d,) + tuple(g.inv[x] for x in reversed(back))


def pi1_data(g: FiniteGraph, base: str) -> Pi1Data:
    """Spanning tree and non-tree basis at ``base`` (graph must be connected)."""
    tree = spanning_tree(g, base)
    basis = []
    for d, e in g.dart_pairs():
        if d not in tree.tree_darts:
            basis.append(min(d, e))
    basis.sort()
    data = Pi1Data(g, base, tree, basis)
    assert data.rank == g.edge_count() - len(g.vertices) + 1
    return data


def path_to_word(p: Pi1Data, path: Iterable[str]) -> FreeWord:
    """Rewrite a dart path through the tree into a reduced word.

    Tree darts contribute nothing; the word of a closed path at the
    basepoint is its fundamental-group element.  Raises GraphError if the
    darts do not chain head to tail.
    """
    g = p.graph
    letters = []
    prev_end = None
    for d in path:
        if d not in g._dart_set:
            raise GraphError("unknown dart %r in path" % d)
        if prev_end is not None and g.src[d] != prev_end:
            raise GraphError("darts do not form a path at %r" % d)
        prev_end = g.target(d)
        lt = p.letter(d)
        if lt is not None:
            letters.append(lt)
    return FreeWord(letters)


def cover_from_subgroup(base: FiniteGraph, basepoint: str,
                        rep: PermRep) -> tuple[FiniteGraph, str, Covering]:
    """Build the cover of ``base`` whose fundamental-group image is the
    subgroup of ``rep``, by the voltage construction.

    Sheets are the points of the action; tree darts stay in their sheet and
    the k-th basis dart moves sheets by the permutation of x_k.  Returns the
    cover, its basepoint (sheet 0 over ``basepoint``), and the projection.
    """
    p = pi1_data(base, basepoint)
    if rep.rank != p.rank:
        raise ValueError("rep rank %d does not match the base rank %d"
                         % (rep.rank, p.rank))
    n = rep.degree

    def vert(v, s):
        return "%s@%d" % (v, s)

    vertices = [vert(v, s) for v in base.vertices for s in range(n)]
    darts, src, inv = [], {}, {}
    vmap, dmap = {}, {}
    for v in base.vertices:
        for s in range(n):
            vmap[vert(v, s)] = v
    for d, e in base.dart_pairs():
        stem = edge_stem(d, e)
        w = p.voltage(d)
        for s in range(n):
            q = rep.act(s, w)
            pos, neg = "%s@%d+" % (stem, s), "%s@%d-" % (stem, s)
            darts += [pos, neg]
            src[pos] = vert(base.src[d], s)
            src[neg] = vert(base.src[e], q)
            inv[pos], inv[neg] = neg, pos
            dmap[pos], dmap[neg] = d, e
    cover = FiniteGraph(vertices, darts, src, inv, name=None)
    proj = GraphMorphism(cover, base, vmap, dmap)
    cov = as_covering(proj)
    assert is_connected(cover), "transitive action must give a connected cover"
    return cover, vert(basepoint, 0), cov


def image_subgroup(c: Covering, a: str, p: Pi1Data) -> PermRep:
    """Monodromy of the base fundamental group on the fiber through ``a``.

    The fiber point ``a`` is labelled 0, so the stabilizer of 0 is the image
    of the cover's fundamental group at ``a``.  Degree = covering degree.
    """
    if p.graph != c.codomain:
        raise GraphError("fundamental-group data is for a different graph")
    if a not in c.domain._vertex_set:
        raise GraphError("unknown vertex %r" % a)
    if c.map.vmap[a] != p.basepoint:
        raise ValueError("basepoint mismatch: %r lies over %r, not %r"
                         % (a, c.map.vmap[a], p.basepoint))
    if not is_connected(c.domain):
        raise ValueError("cover is not connected")
    fiber = c.vertex_fibers[p.basepoint]
    label = {a: 0}
    for x in fiber:
        if x != a:
            label[x] = len(label)
    perms = []
    for k in range(p.rank):
        transport = {x: x for x in fiber}
        for d in p.basis_loop(k):
            step = fiber_transport(c, d)
            transport = {x: step[y] for x, y in transport.items()}
        perm = [0] * len(fiber)
        for x, y in transport.items():
            perm[label[x]] = label[y]
        perms.append(tuple(perm))
    return PermRep(p.rank, len(fiber), perms)


def lift(g: GraphMorphism, c: Covering, base_c: str, base_a: str,
         dart_order=None) -> GraphMorphism:
    """The unique lift of ``g`` through the covering, sending base_c to base_a.

    Proceeds breadth-first: each dart of the (connected) source has exactly
    one possible image by local bijectivity, so the whole lift is forced
    once the basepoint image is fixed; ``dart_order`` only reorders the
    traversal and never changes the result.  When some closed path blocks
    the lift, raises LiftObstruction carrying that path.
    """
    if g.codomain != c.codomain:
        raise GraphError("map and covering have different codomains")
    if base_c not in g.domain._vertex_set:
        raise GraphError("unknown source basepoint %r" % base_c)
    if base_a not in c.domain._vertex_set:
        raise GraphError("unknown cover basepoint %r" % base_a)
    if g.vmap[base_c] != c.map.vmap[base_a]:
        raise ValueError("basepoint mismatch: %r maps to %r but %r lies over %r"
                         % (base_c, g.vmap[base_c], base_a, c.map.vmap[base_a]))
    if not is_connected(g.domain):
        raise ValueError("source graph is not connected")
    order = dart_order or (lambda darts: darts)
    sigma, gamma = g.domain, c.domain
    star_index: dict[str, dict[str, str]] = {}

    def lifted_dart(u, image):
        if u not in star_index:
            star_index[u] = {c.map.dmap[d]: d for d in gamma.star(u)}
        return star_index[u][image]

    hv = {base_c: base_a}
    hd: dict[str, str] = {}
    path_to: dict[str, tuple[str, ...]] = {base_c: ()}
    queue = deque([base_c])
    while queue:
        x = queue.popleft()
        for d in order(sigma.star(x)):
            up = lifted_dart(hv[x], g.dmap[d])
            hd[d] = up
            hd[sigma.inv[d]] = gamma.inv[up]
            w = sigma.target(d)
            lw = gamma.target(up)
            if w not in hv:
                hv[w] = lw
                path_to[w] = path_to[x] + (d,)
                queue.append(w)
            elif hv[w] != lw:
                back = tuple(sigma.inv[e] for e in reversed(path_to[w]))
                raise LiftObstruction(path_to[x] + (d,) + back)
    h = GraphMorphism(sigma, gamma, hv, hd)
    assert compose(c.map, h) == g
    return h


class DeckGroup:
    """The covering transformations of a covering, with composition table.

    Element 0 is the identity; ``table[i][j]`` is the index of the composite
    that applies element j first and element i second.
    """

    def __init__(self, covering: Covering, elements, table):
        self.covering = covering
        self.elements = tuple(elements)
        self.table = tuple(tuple(row) for row in table)
        self.identity = 0
        inv = [None] * len(self.elements)
        for i, row in enumerate(self.table):
            for j, k in enumerate(row):
                if k == 0:
                    inv[i] = j
        self.inverse = tuple(inv)

    @property
    def order(self) -> int:
        return len(self.elements)

    def closure(self, indices: Iterable[int]) -> frozenset[int]:
        """Smallest subgroup containing the given elements."""
        seen = {0} | set(indices)
        frontier = list(seen)
        while frontier:
            i = frontier.pop()
            for j in list(seen):
                for k in (self.table[i][j], self.table[j][i], self.inverse[i]):
                    if k not in seen:
                        seen.add(k)
                        frontier.append(k)
        return frozenset(seen)

    def is_subgroup(self, indices: Iterable[int]) -> bool:
        s = set(indices)
        if not s:
            return False
        return all(self.table[i][j] in s and self.inverse[i] in s
                   for i in s for j in s)

    def subgroups(self) -> list[frozenset[int]]:
        """All subgroups, as sorted index sets (closure of every subset)."""
        found = {frozenset([0])}
        frontier = [frozenset([0])]
        while frontier:
            s = frontier.pop()
            for i in range(self.order):
                bigger = self.closure(s | {i})
                if bigger not in found:
                    found.add(bigger)
                    frontier.append(bigger)
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    def is_normal_subgroup(self, indices: Iterable[int]) -> bool:
        s = set(indices)
        return self.is_subgroup(s) and all(
            self.table[self.table[g][h]][self.inverse[g]] in s
            for g in range(self.order) for h in s)


def deck_group(c: Covering) -> DeckGroup:
    """All covering transformations, found by attempting one lift per fiber
    point over the basepoint; uniqueness of lifts makes this exhaustive."""
    if not is_connected(c.domain):
        raise ValueError("cover is not connected")
    a0 = c.domain.vertices[0]
    fiber = c.vertex_fibers[c.map.vmap[a0]]
    elements = []
    for a in fiber:
        try:
            h = lift(c.map, c, a0, a)
        except LiftObstruction:
            continue
        elements.append((a, h))
    ordered = [h for a, h in elements if a == a0]
    ordered += [h for a, h in elements if a != a0]
    for h in ordered[1:]:
        fixed = [v for v in c.domain.vertices if h.vmap[v] == v]
        fixed += [d for d in c.domain.darts if h.dmap[d] == d]
        assert not fixed, "deck transformation with a fixed element"
    index = {h: i for i, h in enumerate(ordered)}
    table = []
    for hi in ordered:
        row = []
        for hj in ordered:
            composite = compose(hi, hj)
            if composite not in index:
                raise RuntimeError("deck transformations are not closed "
                                   "under composition (internal error)")
            row.append(index[composite])
        table.append(row)
    assert c.degree % len(ordered) == 0, "deck order must divide the degree"
    return DeckGroup(c, ordered, table)


@dataclass(frozen=True)
class RegularityReport:
    """Three independently computed regularity verdicts; they must agree."""

    regular: bool
    degree: int
    deck_order: int
    image_normal: bool
    fiber_transitive: bool

    def __bool__(self):
        return self.regular


def is_regular(c: Covering) -> RegularityReport:
    """Decide regularity three ways and cross-check.

    (i) deck order equals the degree; (ii) the monodromy image subgroup is
    normal; (iii) the deck group is transitive on every vertex fiber.  Any
    disagreement is an internal error and raises RuntimeError.
    """
    if not is_connected(c.domain) or not is_connected(c.codomain):
        raise ValueError("regularity needs connected cover and base")
    deck = deck_group(c)
    a0 = c.domain.vertices[0]
    p = pi1_data(c.codomain, c.map.vmap[a0])
    rep = image_subgroup(c, a0, p)
    by_order = deck.order == c.degree
    by_normal = is_normal(rep)
    by_transitive = True
    for u in c.codomain.vertices:
        fiber = c.vertex_fibers[u]
        orbit = {h.vmap[fiber[0]] for h in deck.elements}
        if orbit != set(fiber):
            by_transitive = False
            break
    if not (by_order == by_normal == by_transitive):
        raise RuntimeError(
            "regularity verdicts disagree (order=%r normal=%r transitive=%r)"
            % (by_order, by_normal, by_transitive))
    return RegularityReport(regular=by_order, degree=c.degree,
                            deck_order=deck.order, image_normal=by_normal,
                            fiber_transitive=by_transitive)


class GroupAction:
    """A finite group acting on a graph by automorphisms.

    Elements are opaque ids; ``table[(g, h)]`` is the product "h then g",
    matching composition of the morphisms.  Construction verifies the group
    laws, that every element acts by an automorphism, that the action is a
    homomorphism, and that no dart is sent to its own inverse.
    """

    def __init__(self, graph: FiniteGraph, elements: Iterable,
                 identity, table: Mapping, morphisms: Mapping):
        self.graph = graph
        self.elements = tuple(elements)
        self.identity = identity
        self.table = dict(table)
        self.morphisms = dict(morphisms)
        if len(set(self.elements)) != len(self.elements):
            raise ActionError("duplicate element ids")
        if identity not in self.elements:
            raise ActionError("identity %r is not an element" % (identity,))
        if set(self.morphisms) != set(self.elements):
            raise ActionError("every element needs an action morphism")
        for g, m in self.morphisms.items():
            if m.domain != graph or m.codomain != graph:
                raise ActionError("element %r does not act on the graph" % (g,))
            if not m.is_bijective():
                raise ActionError("element %r does not act bijectively" % (g,))
        if self.morphisms[identity] != GraphMorphism.identity(graph):
            raise ActionError("identity element must act as the identity map")
        for g in self.elements:
            for h in self.elements:
                if (g, h) not in self.table:
                    raise ActionError("composition table is missing (%r, %r)" % (g, h))
                gh = self.table[(g, h)]
                if gh not in self.morphisms:
                    raise ActionError("table value %r is not an element" % (gh,))
                if self.morphisms[gh] != compose(self.morphisms[g], self.morphisms[h]):
                    raise ActionError(
                        "action is not a homomorphism at (%r, %r)" % (g, h),
                        witness=(g, h))
        for g in self.elements:
            for h in self.elements:
                for k in self.elements:
                    if self.table[(self.table[(g, h)], k)] != \
                            self.table[(g, self.table[(h, k)])]:
                        raise ActionError("composition table is not associative",
                                          witness=(g, h, k))
        for g in self.elements:
            if not any(self.table[(g, h)] == identity for h in self.elements):
                raise ActionError("element %r has no inverse" % (g,))
        for g in self.elements:
            m = self.morphisms[g]
            for d in graph.darts:
                if m.dmap[d] == graph.inv[d]:
                    raise ActionError("element %r inverts an edge" % (g,),
                                      witness=(g, d))

    @classmethod
    def from_morphisms(cls, graph: FiniteGraph,
                       morphisms: Mapping) -> "GroupAction":
        """Assemble an action from automorphisms; the composition table is
        derived by composing and matching (must be closed)."""
        ident = GraphMorphism.identity(graph)
        lookup = {}
        identity = None
        for g, m in morphisms.items():
            if m in lookup:
                raise ActionError("elements %r and %r act identically"
                                  % (lookup[m], g), witness=(lookup[m], g))
            lookup[m] = g
            if m == ident:
                identity = g
        if identity is None:
            raise ActionError("no element acts as the identity map")
        table = {}
        for g, mg in morphisms.items():
            for h, mh in morphisms.items():
                composite = compose(mg, mh)
                if composite not in lookup:
                    raise ActionError(
                        "morphisms are not closed under composition",
                        witness=(g, h))
                table[(g, h)] = lookup[composite]
        return cls(graph, sorted(morphisms, key=str), identity, table, morphisms)

    def free_violation(self):
        """A pair (g, fixed element) with g not the identity, or None."""
        for g in self.elements:
            if g == self.identity:
                continue
            m = self.morphisms[g]
            for v in self.graph.vertices:
                if m.vmap[v] == v:
                    return (g, v)
            for d in self.graph.darts:
                if m.dmap[d] == d:
                    return (g, d)
        return None


def deck_action(deck: DeckGroup, indices: Iterable[int]) -> GroupAction:
    """The action of a set of deck elements (must be a subgroup) on the cover."""
    chosen = sorted(set(indices))
    if not deck.is_subgroup(chosen):
        raise ActionError("deck elements %r are not a subgroup" % (chosen,),
                          witness=tuple(chosen))
    morphisms = {i: deck.elements[i] for i in chosen}
    table = {(i, j): deck.table[i][j] for i in chosen for j in chosen}
    return GroupAction(deck.covering.domain, chosen, 0, table, morphisms)


def quotient_by_group(act: GroupAction) -> tuple[FiniteGraph, Covering]:
    """Orbit graph and orbit map of a free, inversion-free action.

    The orbit map is a covering of degree equal to the group order, and its
    deck group recovers the acting group (see action_deck_isomorphism).
    """
    if not is_connected(act.graph):
        raise ValueError("the graph being acted on must be connected")
    bad = act.free_violation()
    if bad is not None:
        raise ActionError("action is not free: %r fixes %r" % bad, witness=bad)
    vorbits, seen = [], set()
    for v in act.graph.vertices:
        if v in seen:
            continue
        orbit = sorted({act.morphisms[g].vmap[v] for g in act.elements})
        seen.update(orbit)
        vorbits.append(orbit)
    dorbits, seen = [], set()
    for d in act.graph.darts:
        if d in seen:
            continue
        orbit = sorted({act.morphisms[g].dmap[d] for g in act.elements})
        seen.update(orbit)
        dorbits.append(orbit)
    r = Congruence(act.graph, vorbits, dorbits)
    qg, proj = quotient(act.graph, r)
    cov = as_covering(proj)
    assert cov.degree == len(act.elements)
    return qg, cov


def action_deck_isomorphism(act: GroupAction, deck: DeckGroup) -> dict:
    """Match each group element to the deck transformation it acts by,
    verifying the mapping is a composition-table isomorphism."""
    index = {h: i for i, h in enumerate(deck.elements)}
    mapping = {}
    for g in act.elements:
        m = act.morphisms[g]
        if m not in index:
            raise ActionError("element %r does not act by a deck "
                              "transformation of the orbit map" % (g,))
        mapping[g] = index[m]
    if len(set(mapping.values())) != len(mapping) or len(mapping) != deck.order:
        raise ActionError("action group and deck group have different sizes")
    for g in act.elements:
        for h in act.elements:
            if mapping[act.table[(g, h)]] != deck.table[mapping[g]][mapping[h]]:
                raise ActionError("composition tables do not correspond",
                                  witness=(g, h))
    return mapping


def quotient_by_deck_subgroup(deck: DeckGroup, indices: Iterable[int]
                              ) -> tuple[FiniteGraph, Covering, Covering]:
    """Factor the covering through the orbits of a deck subgroup.

    Returns (intermediate graph, quotient map onto it, induced covering of
    the original base); the two maps compose dart-for-dart to the original.
    """
    c = deck.covering
    act = deck_action(deck, indices)
    qg, h_map = quotient_by_group(act)
    # orbit class ids are member ids of the cover, so the original covering
    # map restricts to them directly (it is constant on orbits)
    vmap = {v: c.map.vmap[v] for v in qg.vertices}
    dmap = {d: c.map.dmap[d] for d in qg.darts}
    down = GraphMorphism(qg, c.codomain, vmap, dmap)
    f_h = as_covering(down)
    assert compose(f_h.map, h_map.map) == c.map
    assert h_map.degree == len(act.elements)
    assert f_h.degree * h_map.degree == c.degree
    return qg, h_map, f_h


def transport_basepoint(rep: PermRep, w: FreeWord) -> PermRep:
    """The image subgroup after moving the basepoint along the path class
    ``w``: the conjugate stabilizer, canonically relabelled."""
    return rep.rebased(rep.act(0, w))
