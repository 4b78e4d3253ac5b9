"""Finite graphs with explicit darts and a fixed-point-free involution.

A graph is a finite set of vertices together with a finite set of darts
(directed half-edges).  Every dart ``e`` has a source vertex ``src(e)`` and
an opposite dart ``inv(e)``; the target of ``e`` is ``src(inv(e))``.  Darts
come in pairs ``{e, inv(e)}`` forming undirected edges, and ``inv(e) != e``
always, so quotients by congruences are again graphs of the same kind.

All values in this module are immutable after construction and every
operation is a pure function; values may be shared freely between threads.
All ids are opaque strings, and every traversal orders by id, so equal
inputs always produce identical outputs.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Mapping


class GraphError(ValueError):
    """Structurally broken graph, morphism, or request (bad ids, bad maps)."""


class CongruenceError(ValueError):
    """A partition that is not a graph congruence.

    Carries the offending pair of elements in ``witness`` when available.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class FiniteGraph:
    """A finite graph given by vertices, darts, ``src`` and ``inv``.

    Construction checks that ``src`` and ``inv`` are total on the declared
    dart set and that ids are unique.  The semantic invariants (``inv`` is a
    fixed-point-free involution, sources are declared vertices) are checked
    by :func:`validate_graph`, so damaged data read from a file can still be
    loaded and reported on instead of crashing the loader.
    """

    def __init__(self, vertices: Iterable[str], darts: Iterable[str],
                 src: Mapping[str, str], inv: Mapping[str, str],
                 name: str | None = None):
        self.vertices = tuple(sorted(vertices))
        self.darts = tuple(sorted(darts))
        self.name = name
        self._vertex_set = frozenset(self.vertices)
        self._dart_set = frozenset(self.darts)
        if len(self.vertices) != len(self._vertex_set):
            raise GraphError("duplicate vertex ids")
        if len(self.darts) != len(self._dart_set):
            raise GraphError("duplicate dart ids")
        if self._vertex_set & self._dart_set:
            raise GraphError("vertex and dart ids overlap: %r"
                             % sorted(self._vertex_set & self._dart_set)[0])
        self.src = dict(src)
        self.inv = dict(inv)
        for label, mapping in (("src", self.src), ("inv", self.inv)):
            missing = self._dart_set - mapping.keys()
            if missing:
                raise GraphError("%s is undefined on dart %r" % (label, sorted(missing)[0]))
            extra = mapping.keys() - self._dart_set
            if extra:
                raise GraphError("%s defined on unknown dart %r" % (label, sorted(extra)[0]))
        star: dict[str, list[str]] = {v: [] for v in self.vertices}
        for d in self.darts:
            v = self.src[d]
            if v in star:
                star[v].append(d)
        self._star = {v: tuple(ds) for v, ds in star.items()}
        self._key = (self.vertices, self.darts,
                     tuple(self.src[d] for d in self.darts),
                     tuple(self.inv[d] for d in self.darts))

    @classmethod
    def from_edges(cls, vertices: Iterable[str],
                   edges: Iterable[tuple[str, str, str]],
                   name: str | None = None) -> "FiniteGraph":
        """Build a graph from undirected edges ``(id, src, dst)``.

        Each edge ``E`` contributes the dart pair ``E+`` (src to dst) and
        ``E-`` (dst to src).
        """
        src = {}
        inv = {}
        darts = []
        seen = set()
        for eid, a, b in edges:
            if eid in seen:
                raise GraphError("duplicate edge id %r" % eid)
            seen.add(eid)
            pos, neg = eid + "+", eid + "-"
            darts += [pos, neg]
            src[pos], src[neg] = a, b
            inv[pos], inv[neg] = neg, pos
        return cls(vertices, darts, src, inv, name=name)

    def target(self, d: str) -> str:
        return self.src[self.inv[d]]

    def star(self, v: str) -> tuple[str, ...]:
        """Darts whose source is ``v``, in id order."""
        try:
            return self._star[v]
        except KeyError:
            raise GraphError("unknown vertex %r" % v) from None

    def dart_pairs(self) -> tuple[tuple[str, str], ...]:
        """Edge pairs ``(d, inv(d))`` with ``d`` the smaller id."""
        return tuple((d, self.inv[d]) for d in self.darts if d < self.inv[d])

    def edge_count(self) -> int:
        return len(self.darts) // 2

    def __eq__(self, other):
        return isinstance(other, FiniteGraph) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        label = self.name or "graph"
        return "FiniteGraph(%s: %d vertices, %d darts)" % (
            label, len(self.vertices), len(self.darts))


def edge_stem(pos: str, neg: str) -> str:
    """Undirected label of a dart pair: the shared stem of ``X+``/``X-``
    ids when the pair has that shape, otherwise the positive dart id."""
    if pos.endswith("+") and neg == pos[:-1] + "-":
        return pos[:-1]
    return pos


def cycle_graph(n: int, name: str | None = None) -> FiniteGraph:
    """Cycle with vertices ``v0..v{n-1}`` and edges ``e{i}: v{i} -> v{i+1}``."""
    if n < 1:
        raise GraphError("cycle needs at least one vertex")
    vertices = ["v%d" % i for i in range(n)]
    edges = [("e%d" % i, "v%d" % i, "v%d" % ((i + 1) % n)) for i in range(n)]
    return FiniteGraph.from_edges(vertices, edges, name=name or "C%d" % n)


def bouquet_graph(r: int, name: str | None = None) -> FiniteGraph:
    """Wedge of ``r`` loops at the single vertex ``v0``."""
    if r < 0:
        raise GraphError("negative loop count")
    edges = [("e%d" % i, "v0", "v0") for i in range(r)]
    return FiniteGraph.from_edges(["v0"], edges, name=name or "B%d" % r)


def path_graph(n: int, name: str | None = None) -> FiniteGraph:
    """Path on ``n`` vertices (``n - 1`` edges)."""
    if n < 1:
        raise GraphError("path needs at least one vertex")
    vertices = ["v%d" % i for i in range(n)]
    edges = [("e%d" % i, "v%d" % i, "v%d" % (i + 1)) for i in range(n - 1)]
    return FiniteGraph.from_edges(vertices, edges, name=name or "P%d" % n)


def validate_graph(g: FiniteGraph) -> list[dict]:
    """All invariant violations of ``g``, each with a witness element.

    An empty list means the graph is valid.  Reported kinds:
    ``dangling-involution`` (inv leaves the dart set), ``involution``
    (inv o inv is not the identity), ``fixed-dart`` (inv(e) = e),
    ``dangling-incidence`` (src leaves the vertex set).
    """
    out = []
    for d in g.darts:
        e = g.inv[d]
        if e not in g._dart_set:
            out.append({"kind": "dangling-involution", "witness": d})
        elif e == d:
            out.append({"kind": "fixed-dart", "witness": d})
        elif g.inv[e] != d:
            out.append({"kind": "involution", "witness": d})
        if g.src[d] not in g._vertex_set:
            out.append({"kind": "dangling-incidence", "witness": d})
    return out


def require_valid(g: FiniteGraph) -> FiniteGraph:
    """Raise GraphError unless ``g`` satisfies all graph invariants."""
    bad = validate_graph(g)
    if bad:
        raise GraphError("invalid graph: %s at %r (%d violations total)"
                         % (bad[0]["kind"], bad[0]["witness"], len(bad)))
    return g


def components(g: FiniteGraph) -> tuple[tuple[str, ...], ...]:
    """Partition of the vertices into connected components (sorted)."""
    seen: set[str] = set()
    comps = []
    for v in g.vertices:
        if v in seen:
            continue
        comp = [v]
        seen.add(v)
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for d in g.star(x):
                w = g.target(d)
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        comps.append(tuple(sorted(comp)))
    return tuple(comps)


def is_connected(g: FiniteGraph) -> bool:
    return len(g.vertices) <= 1 or len(components(g)) == 1


class SpanningTreeData:
    """A spanning tree of a connected graph, rooted and canonically ordered.

    ``tree_darts`` holds both orientations of every tree edge;
    ``parent_dart[v]`` is the dart from ``v`` one step toward the root; and
    ``order`` is the breadth-first discovery order of the vertices.
    """

    def __init__(self, graph, root, tree_darts, parent_dart, order):
        self.graph = graph
        self.root = root
        self.tree_darts = frozenset(tree_darts)
        self.parent_dart = dict(parent_dart)
        self.order = tuple(order)

    def path_from_root(self, v: str) -> tuple[str, ...]:
        """The darts of the unique tree path from the root to ``v``."""
        g = self.graph
        back = []
        x = v
        while x != self.root:
            d = self.parent_dart[x]
            back.append(g.inv[d])
            x = g.target(d)
        return tuple(reversed(back))


def spanning_tree(g: FiniteGraph, root: str) -> SpanningTreeData:
    """Breadth-first spanning tree from ``root``, scanning darts by id.

    Deterministic: equal inputs give identical trees.  Raises GraphError on
    an unknown root or a disconnected graph.
    """
    if root not in g._vertex_set:
        raise GraphError("unknown root vertex %r" % root)
    parent: dict[str, str] = {}
    order = [root]
    seen = {root}
    tree: set[str] = set()
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for d in g.star(x):
            w = g.target(d)
            if w not in seen:
                seen.add(w)
                order.append(w)
                queue.append(w)
                tree.add(d)
                tree.add(g.inv[d])
                parent[w] = g.inv[d]
    if len(seen) != len(g.vertices):
        raise GraphError("graph is not connected: %r unreachable from %r"
                         % (sorted(set(g.vertices) - seen)[0], root))
    return SpanningTreeData(g, root, tree, parent, order)


class GraphMorphism:
    """Map of graphs: commutes with ``src`` and with the involution."""

    def __init__(self, domain: FiniteGraph, codomain: FiniteGraph,
                 vmap: Mapping[str, str], dmap: Mapping[str, str]):
        self.domain = domain
        self.codomain = codomain
        self.vmap = dict(vmap)
        self.dmap = dict(dmap)
        if self.vmap.keys() != domain._vertex_set:
            bad = sorted(self.vmap.keys() ^ domain._vertex_set)[0]
            raise GraphError("vertex map domain mismatch at %r" % bad)
        if self.dmap.keys() != domain._dart_set:
            bad = sorted(self.dmap.keys() ^ domain._dart_set)[0]
            raise GraphError("dart map domain mismatch at %r" % bad)
        for v, w in self.vmap.items():
            if w not in codomain._vertex_set:
                raise GraphError("vertex %r maps outside the codomain (to %r)" % (v, w))
        for d, e in self.dmap.items():
            if e not in codomain._dart_set:
                raise GraphError("dart %r maps outside the codomain (to %r)" % (d, e))
        for d in domain.darts:
            if self.vmap[domain.src[d]] != codomain.src[self.dmap[d]]:
                raise GraphError("morphism breaks incidence at dart %r" % d)
            if self.dmap[domain.inv[d]] != codomain.inv[self.dmap[d]]:
                raise GraphError("morphism breaks the involution at dart %r" % d)
        self._key = (tuple(sorted(self.vmap.items())),
                     tuple(sorted(self.dmap.items())))

    @classmethod
    def identity(cls, g: FiniteGraph) -> "GraphMorphism":
        return cls(g, g, {v: v for v in g.vertices}, {d: d for d in g.darts})

    def is_surjective(self) -> bool:
        return (set(self.vmap.values()) == self.codomain._vertex_set
                and set(self.dmap.values()) == self.codomain._dart_set)

    def is_bijective(self) -> bool:
        return (len(self.domain.vertices) == len(self.codomain.vertices)
                and len(self.domain.darts) == len(self.codomain.darts)
                and self.is_surjective())

    def inverse(self) -> "GraphMorphism":
        if not self.is_bijective():
            raise GraphError("morphism is not invertible")
        return GraphMorphism(self.codomain, self.domain,
                             {w: v for v, w in self.vmap.items()},
                             {e: d for d, e in self.dmap.items()})

    def __eq__(self, other):
        return (isinstance(other, GraphMorphism)
                and self.domain == other.domain
                and self.codomain == other.codomain
                and self._key == other._key)

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return "GraphMorphism(%r -> %r)" % (self.domain.name, self.codomain.name)


def compose(outer: GraphMorphism, inner: GraphMorphism) -> GraphMorphism:
    """The composite ``outer o inner`` (apply ``inner`` first)."""
    if inner.codomain != outer.domain:
        raise GraphError("morphisms do not compose: codomain/domain mismatch")
    return GraphMorphism(inner.domain, outer.codomain,
                         {v: outer.vmap[w] for v, w in inner.vmap.items()},
                         {d: outer.dmap[e] for d, e in inner.dmap.items()})


def _normalize_classes(universe, given, what):
    """Complete a partial list of classes to a partition of ``universe``."""
    assigned: dict[str, int] = {}
    classes: list[tuple[str, ...]] = []
    for cls in given:
        members = tuple(sorted(set(cls)))
        if not members:
            continue
        for x in members:
            if x not in universe:
                raise CongruenceError("unknown %s %r in a class" % (what, x))
            if x in assigned:
                raise CongruenceError("%s %r appears in two classes" % (what, x),
                                      witness=x)
            assigned[x] = len(classes)
        classes.append(members)
    for x in universe:
        if x not in assigned:
            assigned[x] = len(classes)
            classes.append((x,))
    classes.sort(key=lambda c: c[0])
    return classes


class Congruence:
    """A partition of vertices and darts compatible with the graph structure.

    Compatibility: related darts have related sources and related inverses.
    No class may contain a dart together with its inverse, so the quotient
    involution stays fixed-point-free.  Unlisted elements form singleton
    classes.
    """

    def __init__(self, base: FiniteGraph,
                 vertex_classes: Iterable[Iterable[str]] = (),
                 dart_classes: Iterable[Iterable[str]] = ()):
        self.base = base
        self.vertex_classes = tuple(_normalize_classes(base._vertex_set,
                                                       vertex_classes, "vertex"))
        self.dart_classes = tuple(_normalize_classes(base._dart_set,
                                                     dart_classes, "dart"))
        self._vrep = {x: c[0] for c in self.vertex_classes for x in c}
        self._drep = {x: c[0] for c in self.dart_classes for x in c}
        for cls in self.dart_classes:
            srcs = {self._vrep[base.src[d]] for d in cls}
            if len(srcs) > 1:
                a, b = cls[0], next(d for d in cls
                                    if self._vrep[base.src[d]] != self._vrep[base.src[cls[0]]])
                raise CongruenceError(
                    "incompatible dart class: %r and %r have unrelated sources" % (a, b),
                    witness=(a, b))
            invs = {self._drep[base.inv[d]] for d in cls}
            if len(invs) > 1:
                a, b = cls[0], next(d for d in cls
                                    if self._drep[base.inv[d]] != self._drep[base.inv[cls[0]]])
                raise CongruenceError(
                    "incompatible dart class: %r and %r have unrelated inverses" % (a, b),
                    witness=(a, b))
            for d in cls:
                if self._drep[base.inv[d]] == self._drep[d]:
                    raise CongruenceError(
                        "dart %r is merged with its inverse" % d,
                        witness=(d, base.inv[d]))

    @classmethod
    def diagonal(cls, base: FiniteGraph) -> "Congruence":
        """The identity congruence (all classes singletons)."""
        return cls(base)

    def vertex_rep(self, v: str) -> str:
        return self._vrep[v]

    def dart_rep(self, d: str) -> str:
        return self._drep[d]

    def same_vertex(self, a: str, b: str) -> bool:
        return self._vrep[a] == self._vrep[b]

    def same_dart(self, a: str, b: str) -> bool:
        return self._drep[a] == self._drep[b]

    def is_diagonal(self) -> bool:
        return all(len(c) == 1 for c in self.vertex_classes) and \
            all(len(c) == 1 for c in self.dart_classes)

    def __eq__(self, other):
        return (isinstance(other, Congruence)
                and self.base == other.base
                and self.vertex_classes == other.vertex_classes
                and self.dart_classes == other.dart_classes)

    def __hash__(self):
        return hash((self.base, self.vertex_classes, self.dart_classes))

    def __repr__(self):
        return "Congruence(%d vertex classes, %d dart classes)" % (
            len(self.vertex_classes), len(self.dart_classes))


def quotient(g: FiniteGraph, r: Congruence) -> tuple[FiniteGraph, GraphMorphism]:
    """Quotient graph ``g / r`` and the projection morphism onto it.

    Class ids are the smallest member ids, so quotienting by the diagonal
    congruence returns a graph equal to ``g``.
    """
    if r.base != g:
        raise GraphError("congruence belongs to a different graph")
    qsrc = {c[0]: r.vertex_rep(g.src[c[0]]) for c in r.dart_classes}
    qinv = {c[0]: r.dart_rep(g.inv[c[0]]) for c in r.dart_classes}
    qg = FiniteGraph([c[0] for c in r.vertex_classes],
                     [c[0] for c in r.dart_classes],
                     qsrc, qinv, name=g.name)
    proj = GraphMorphism(g, qg, dict(r._vrep), dict(r._drep))
    return qg, proj


def kernel_congruence(f: GraphMorphism) -> Congruence:
    """The congruence on the domain whose classes are the fibers of ``f``."""
    vfib: dict[str, list[str]] = {}
    for v in f.domain.vertices:
        vfib.setdefault(f.vmap[v], []).append(v)
    dfib: dict[str, list[str]] = {}
    for d in f.domain.darts:
        dfib.setdefault(f.dmap[d], []).append(d)
    return Congruence(f.domain, vfib.values(), dfib.values())


class InducedMapError(ValueError):
    """The congruence pair does not transport along the morphism.

    ``witness`` is a related pair whose images are unrelated; ``sort`` says
    whether the pair consists of vertices or darts.
    """

    def __init__(self, message, witness, sort):
        super().__init__(message)
        self.witness = witness
        self.sort = sort


def induced_quotient_map(f: GraphMorphism, r: Congruence,
                         s: Congruence) -> GraphMorphism:
    """The map ``domain/r -> codomain/s`` induced by ``f``.

    Requires related elements to have related images; otherwise raises
    InducedMapError carrying a witness pair.
    """
    if r.base != f.domain:
        raise GraphError("domain congruence belongs to a different graph")
    if s.base != f.codomain:
        raise GraphError("codomain congruence belongs to a different graph")
    vmap = {}
    for cls in r.vertex_classes:
        images = {s.vertex_rep(f.vmap[x]) for x in cls}
        if len(images) > 1:
            first = cls[0]
            other = next(x for x in cls
                         if s.vertex_rep(f.vmap[x]) != s.vertex_rep(f.vmap[first]))
            raise InducedMapError(
                "vertices %r and %r are identified but their images are not"
                % (first, other), witness=(first, other), sort="vertex")
        vmap[cls[0]] = images.pop()
    dmap = {}
    for cls in r.dart_classes:
        images = {s.dart_rep(f.dmap[x]) for x in cls}
        if len(images) > 1:
            first = cls[0]
            other = next(x for x in cls
                         if s.dart_rep(f.dmap[x]) != s.dart_rep(f.dmap[first]))
            raise InducedMapError(
                "darts %r and %r are identified but their images are not"
                % (first, other), witness=(first, other), sort="dart")
        dmap[cls[0]] = images.pop()
    qdom, _ = quotient(f.domain, r)
    qcod, _ = quotient(f.codomain, s)
    return GraphMorphism(qdom, qcod, vmap, dmap)
