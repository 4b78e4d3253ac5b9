"""Shared builders for the test suite: small graphs, wraps, actions, reps."""

from __future__ import annotations

import itertools

import procover as pc


def wrap_morphism(n: int, m: int) -> pc.GraphMorphism:
    """The m-periodic wrap of the n-cycle onto the m-cycle (m divides n)."""
    assert n % m == 0
    big, small = pc.cycle_graph(n), pc.cycle_graph(m)
    vmap = {"v%d" % i: "v%d" % (i % m) for i in range(n)}
    dmap = {}
    for i in range(n):
        dmap["e%d+" % i] = "e%d+" % (i % m)
        dmap["e%d-" % i] = "e%d-" % (i % m)
    return pc.GraphMorphism(big, small, vmap, dmap)


def rotation(n: int, k: int) -> pc.GraphMorphism:
    """Rotation of the n-cycle by k steps."""
    g = pc.cycle_graph(n)
    vmap = {"v%d" % i: "v%d" % ((i + k) % n) for i in range(n)}
    dmap = {}
    for i in range(n):
        dmap["e%d+" % i] = "e%d+" % ((i + k) % n)
        dmap["e%d-" % i] = "e%d-" % ((i + k) % n)
    return pc.GraphMorphism(g, g, vmap, dmap)


def rotation_action(n: int, step: int) -> pc.GroupAction:
    """Cyclic group of order n//step acting on the n-cycle by step-rotations."""
    assert n % step == 0
    order = n // step
    morphisms = {"r%d" % j: rotation(n, j * step) for j in range(order)}
    return pc.GroupAction.from_morphisms(pc.cycle_graph(n), morphisms)


def theta_graph() -> pc.FiniteGraph:
    """Two vertices joined by three parallel edges (rank 2)."""
    return pc.FiniteGraph.from_edges(
        ["v0", "v1"],
        [("e0", "v0", "v1"), ("e1", "v0", "v1"), ("e2", "v0", "v1")],
        name="theta")


def cycle_with_loop() -> pc.FiniteGraph:
    """3-cycle with an extra loop at v0 (rank 2)."""
    return pc.FiniteGraph.from_edges(
        ["v0", "v1", "v2"],
        [("e0", "v0", "v1"), ("e1", "v1", "v2"), ("e2", "v2", "v0"),
         ("l0", "v0", "v0")],
        name="C3+loop")


def cycle_with_parallel() -> pc.FiniteGraph:
    """3-cycle with a doubled edge (rank 2)."""
    return pc.FiniteGraph.from_edges(
        ["v0", "v1", "v2"],
        [("e0", "v0", "v1"), ("e1", "v1", "v2"), ("e2", "v2", "v0"),
         ("p0", "v0", "v1")],
        name="C3+parallel")


def two_cycles(n: int) -> pc.FiniteGraph:
    """Disjoint union of two n-cycles (vertices a*/b*)."""
    vertices = ["a%d" % i for i in range(n)] + ["b%d" % i for i in range(n)]
    edges = [("ea%d" % i, "a%d" % i, "a%d" % ((i + 1) % n)) for i in range(n)]
    edges += [("eb%d" % i, "b%d" % i, "b%d" % ((i + 1) % n)) for i in range(n)]
    return pc.FiniteGraph.from_edges(vertices, edges, name="2C%d" % n)


def cyclic_rep(n: int) -> pc.PermRep:
    """The index-n subgroup of the rank-1 free group (an n-cycle)."""
    return pc.PermRep(1, n, [tuple((i + 1) % n for i in range(n))])


def trivial_rep(rank: int) -> pc.PermRep:
    return pc.PermRep(rank, 1, [(0,)] * rank)


def s3_regular_rep() -> pc.PermRep:
    """Kernel of the surjection of the rank-2 free group onto the symmetric
    group on three letters, as the regular coset action (degree 6)."""
    elems = sorted(itertools.permutations(range(3)))

    def mult(a, b):
        return tuple(b[a[i]] for i in range(3))

    index = {g: i for i, g in enumerate(elems)}
    s, t = (1, 0, 2), (1, 2, 0)
    perms = []
    for gen in (s, t):
        perms.append(tuple(index[mult(elems[i], gen)] for i in range(6)))
    return pc.PermRep(2, 6, perms)


def brute_force_canonical_keys(rank: int, degree: int) -> set:
    """Oracle enumeration of index-``degree`` subgroups: all permutation
    tuples, an independent transitivity filter, canonical-form dedup."""
    keys = set()
    for tables in itertools.product(itertools.permutations(range(degree)),
                                    repeat=rank):
        seen = {0}
        frontier = [0]
        while frontier:
            a = frontier.pop()
            for p in tables:
                for b in (p[a], p.index(a)):
                    if b not in seen:
                        seen.add(b)
                        frontier.append(b)
        if len(seen) != degree:
            continue
        keys.add(pc.PermRep(rank, degree, tables).canonical_key())
    return keys


def pro2_tower(k: int) -> pc.Tower:
    """Levels C(3*2^i) wrapping onto C3, bondings the 2-fold wraps."""
    coverings = [pc.as_covering(wrap_morphism(3 * 2 ** i, 3)) for i in range(k + 1)]
    phis = [wrap_morphism(3 * 2 ** (i + 1), 3 * 2 ** i) for i in range(k)]
    psis = [pc.GraphMorphism.identity(pc.cycle_graph(3)) for _ in range(k)]
    return pc.Tower(coverings, phis, psis, basepoints=["v0"] * (k + 1))


def constant_tower(k: int) -> pc.Tower:
    """Every level the same C6 over C3 with identity bondings."""
    cov = pc.as_covering(wrap_morphism(6, 3))
    coverings = [cov] * (k + 1)
    phis = [pc.GraphMorphism.identity(pc.cycle_graph(6))] * k
    psis = [pc.GraphMorphism.identity(pc.cycle_graph(3))] * k
    return pc.Tower(coverings, phis, psis, basepoints=["v0"] * (k + 1))


def factorial_spec() -> pc.UniversalSpec:
    import math
    c3 = pc.cycle_graph(3)
    return pc.UniversalSpec(
        base=c3, basepoint="v0",
        quotients=[pc.Congruence.diagonal(c3)] * 4,
        normals=[cyclic_rep(math.factorial(i + 1)) for i in range(4)])


def b2_homology_spec() -> pc.UniversalSpec:
    b2 = pc.bouquet_graph(2)
    return pc.UniversalSpec(
        base=b2, basepoint="v0",
        quotients=[pc.Congruence.diagonal(b2)] * 3,
        normals=[trivial_rep(2), pc.translation_kernel_rep(2, 2),
                 pc.translation_kernel_rep(2, 4)])
