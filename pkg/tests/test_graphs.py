import pytest

import procover as pc
from procover import (
    Congruence,
    CongruenceError,
    FiniteGraph,
    GraphError,
    GraphMorphism,
    InducedMapError,
    compose,
    induced_quotient_map,
    kernel_congruence,
    quotient,
    validate_graph,
)
from helpers import two_cycles, wrap_morphism


def antipodal_congruence(c6):
    vcls = [["v%d" % i, "v%d" % (i + 3)] for i in range(3)]
    dcls = [["e%d%s" % (i, s), "e%d%s" % (i + 3, s)]
            for i in range(3) for s in "+-"]
    return Congruence(c6, vcls, dcls)


class TestValidate:
    def test_cycle_is_valid(self):
        assert validate_graph(pc.cycle_graph(3)) == []

    def test_fixed_dart(self):
        g = FiniteGraph(["v"], ["d"], {"d": "v"}, {"d": "d"})
        kinds = [v["kind"] for v in validate_graph(g)]
        assert "fixed-dart" in kinds

    def test_broken_involution(self):
        g = FiniteGraph(["v"], ["a", "b", "c", "d"], dict.fromkeys("abcd", "v"),
                        {"a": "b", "b": "c", "c": "d", "d": "a"})
        kinds = {v["kind"] for v in validate_graph(g)}
        assert kinds == {"involution"}

    def test_dangling_incidence(self):
        g = FiniteGraph(["v"], ["a", "b"], {"a": "v", "b": "w"},
                        {"a": "b", "b": "a"})
        assert [v["kind"] for v in validate_graph(g)] == ["dangling-incidence"]

    def test_totality_enforced_at_construction(self):
        with pytest.raises(GraphError):
            FiniteGraph(["v"], ["a", "b"], {"a": "v"}, {"a": "b", "b": "a"})


class TestConnectivity:
    def test_cycle(self):
        assert pc.is_connected(pc.cycle_graph(3))

    def test_disjoint_union(self):
        g = two_cycles(3)
        assert not pc.is_connected(g)
        assert len(pc.components(g)) == 2

    def test_single_vertex(self):
        g = FiniteGraph(["v"], [], {}, {})
        assert pc.is_connected(g)


class TestSpanningTree:
    def test_cycle(self):
        t = pc.spanning_tree(pc.cycle_graph(3), "v0")
        assert len(t.tree_darts) // 2 == 2

    def test_bouquet(self):
        t = pc.spanning_tree(pc.bouquet_graph(2), "v0")
        assert not t.tree_darts

    def test_path_all_tree(self):
        g = pc.path_graph(3)
        t = pc.spanning_tree(g, "v0")
        assert t.tree_darts == frozenset(g.darts)

    def test_deterministic(self):
        g = pc.cycle_graph(6)
        t1 = pc.spanning_tree(g, "v0")
        t2 = pc.spanning_tree(g, "v0")
        assert t1.tree_darts == t2.tree_darts
        assert t1.order == t2.order
        assert t1.parent_dart == t2.parent_dart

    def test_errors(self):
        with pytest.raises(GraphError):
            pc.spanning_tree(pc.cycle_graph(3), "nope")
        with pytest.raises(GraphError):
            pc.spanning_tree(two_cycles(3), "a0")

    def test_path_from_root(self):
        g = pc.cycle_graph(6)
        t = pc.spanning_tree(g, "v0")
        path = t.path_from_root("v3")
        assert g.src[path[0]] == "v0"
        assert g.target(path[-1]) == "v3"
        for a, b in zip(path, path[1:]):
            assert g.target(a) == g.src[b]


class TestQuotient:
    def test_c6_antipodal_gives_c3(self):
        c6 = pc.cycle_graph(6)
        qg, proj = quotient(c6, antipodal_congruence(c6))
        assert len(qg.vertices) == 3
        assert len(qg.darts) == 6
        assert pc.is_connected(qg)
        assert all(len(qg.star(v)) == 2 for v in qg.vertices)
        assert proj.is_surjective()
        assert kernel_congruence(proj) == antipodal_congruence(c6)

    def test_diagonal_is_identity(self):
        c3 = pc.cycle_graph(3)
        qg, proj = quotient(c3, Congruence.diagonal(c3))
        assert qg == c3
        assert proj == GraphMorphism.identity(c3)

    def test_bouquet_loops_identified(self):
        b2 = pc.bouquet_graph(2)
        r = Congruence(b2, dart_classes=[["e0+", "e1+"], ["e0-", "e1-"]])
        qg, proj = quotient(b2, r)
        assert len(qg.vertices) == 1
        assert qg.edge_count() == 1

    def test_wrong_graph(self):
        with pytest.raises(GraphError):
            quotient(pc.cycle_graph(3), Congruence.diagonal(pc.cycle_graph(4)))


class TestCongruenceValidation:
    def test_incompatible_sources(self):
        c6 = pc.cycle_graph(6)
        with pytest.raises(CongruenceError):
            Congruence(c6, dart_classes=[["e0+", "e1+"]])

    def test_dart_merged_with_inverse(self):
        b1 = pc.bouquet_graph(1)
        with pytest.raises(CongruenceError) as err:
            Congruence(b1, dart_classes=[["e0+", "e0-"]])
        assert err.value.witness is not None

    def test_overlapping_classes(self):
        c3 = pc.cycle_graph(3)
        with pytest.raises(CongruenceError):
            Congruence(c3, vertex_classes=[["v0", "v1"], ["v1", "v2"]])


class TestKernel:
    def test_wrap_kernel_is_antipodal(self):
        f = wrap_morphism(6, 3)
        assert kernel_congruence(f) == antipodal_congruence(f.domain)

    def test_identity_kernel_is_diagonal(self):
        c3 = pc.cycle_graph(3)
        assert kernel_congruence(GraphMorphism.identity(c3)) == \
            Congruence.diagonal(c3)

    def test_component_collapse(self):
        g = two_cycles(3)
        c3 = pc.cycle_graph(3)
        vmap = {}
        dmap = {}
        for i in range(3):
            vmap["a%d" % i] = vmap["b%d" % i] = "v%d" % i
            for s in "+-":
                dmap["ea%d%s" % (i, s)] = dmap["eb%d%s" % (i, s)] = "e%d%s" % (i, s)
        f = GraphMorphism(g, c3, vmap, dmap)
        r = kernel_congruence(f)
        assert all(len(c) == 2 for c in r.vertex_classes)
        assert all(len(c) == 2 for c in r.dart_classes)


class TestInducedMap:
    def test_wrap_with_antipodal_kernel_is_iso(self):
        f = wrap_morphism(6, 3)
        r = antipodal_congruence(f.domain)
        s = Congruence.diagonal(f.codomain)
        induced = induced_quotient_map(f, r, s)
        assert induced.is_bijective()

    def test_diagonal_pairs_reproduce_f(self):
        f = wrap_morphism(6, 3)
        induced = induced_quotient_map(f, Congruence.diagonal(f.domain),
                                       Congruence.diagonal(f.codomain))
        assert induced == f

    def test_witness_on_failure(self):
        f = wrap_morphism(6, 3)
        mod2 = kernel_congruence(wrap_morphism(6, 2))
        with pytest.raises(InducedMapError) as err:
            induced_quotient_map(f, mod2, Congruence.diagonal(f.codomain))
        assert err.value.witness == ("v0", "v2")
        assert err.value.sort == "vertex"


class TestMorphismAlgebra:
    def test_identity_units(self):
        f = wrap_morphism(6, 3)
        assert compose(f, GraphMorphism.identity(f.domain)) == f
        assert compose(GraphMorphism.identity(f.codomain), f) == f

    def test_associativity(self):
        f = wrap_morphism(12, 6)
        g = wrap_morphism(6, 3)
        h = GraphMorphism.identity(pc.cycle_graph(3))
        assert compose(h, compose(g, f)) == compose(compose(h, g), f)

    def test_quotient_by_kernel_matches_image(self):
        # surjective wrap: quotient by its kernel is isomorphic to the image
        for f in (wrap_morphism(6, 3), wrap_morphism(12, 4)):
            induced = induced_quotient_map(
                f, kernel_congruence(f), Congruence.diagonal(f.codomain))
            assert induced.is_bijective()

    def test_morphism_validation(self):
        c3 = pc.cycle_graph(3)
        vmap = {v: v for v in c3.vertices}
        dmap = {d: d for d in c3.darts}
        dmap["e0+"] = "e1+"
        with pytest.raises(GraphError):
            GraphMorphism(c3, c3, vmap, dmap)
