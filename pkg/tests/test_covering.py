import random

import pytest

import procover as pc
from procover import (
    ActionError,
    FreeWord,
    GraphError,
    GraphMorphism,
    LiftObstruction,
    NotACoveringError,
    PermRep,
    action_deck_isomorphism,
    as_covering,
    compose,
    cover_from_subgroup,
    deck_action,
    deck_group,
    fiber_transport,
    image_subgroup,
    is_regular,
    lift,
    low_index_reps,
    path_to_word,
    pi1_data,
    quotient_by_deck_subgroup,
    quotient_by_group,
    rep_equivalent,
    subgroup_leq,
    transport_basepoint,
)
from helpers import (
    cycle_with_loop,
    cycle_with_parallel,
    cyclic_rep,
    rotation,
    rotation_action,
    s3_regular_rep,
    theta_graph,
    trivial_rep,
    wrap_morphism,
)

X = FreeWord.generator(0)


class TestAsCovering:
    def test_wrap_is_degree_two(self):
        cov = as_covering(wrap_morphism(6, 3))
        assert cov.degree == 2
        assert all(len(f) == 2 for f in cov.vertex_fibers.values())

    def test_identity_is_degree_one(self):
        cov = as_covering(GraphMorphism.identity(pc.cycle_graph(3)))
        assert cov.degree == 1

    def test_path_into_cycle_fails_at_endpoint(self):
        p2, c3 = pc.path_graph(2), pc.cycle_graph(3)
        f = GraphMorphism(p2, c3, {"v0": "v0", "v1": "v1"},
                          {"e0+": "e0+", "e0-": "e0-"})
        with pytest.raises(NotACoveringError) as err:
            as_covering(f)
        assert err.value.vertex in ("v0", "v1")

    def test_collapse_fails_injectivity(self):
        b2, b1 = pc.bouquet_graph(2), pc.bouquet_graph(1)
        f = GraphMorphism(b2, b1, {"v0": "v0"},
                          {"e0+": "e0+", "e0-": "e0-", "e1+": "e0+", "e1-": "e0-"})
        with pytest.raises(NotACoveringError):
            as_covering(f)


class TestFiberTransport:
    def test_wrap_transport(self):
        cov = as_covering(wrap_morphism(6, 3))
        tr = fiber_transport(cov, "e0+")
        assert tr == {"v0": "v1", "v3": "v4"}
        assert all(a != b for a, b in tr.items())

    def test_degree_one(self):
        cov = as_covering(GraphMorphism.identity(pc.cycle_graph(3)))
        assert fiber_transport(cov, "e0+") == {"v0": "v1"}

    def test_inverse_dart_inverts(self):
        cov = as_covering(wrap_morphism(6, 3))
        fwd = fiber_transport(cov, "e1+")
        back = fiber_transport(cov, "e1-")
        for a, b in fwd.items():
            assert back[b] == a


class TestPi1:
    def test_bouquet(self):
        p = pi1_data(pc.bouquet_graph(2), "v0")
        assert p.rank == 2
        assert p.letter("e0+") != p.letter("e1+")
        assert path_to_word(p, ["e0+"]) != path_to_word(p, ["e1+"])

    def test_cycle(self):
        p = pi1_data(pc.cycle_graph(3), "v0")
        assert p.rank == 1
        w = path_to_word(p, ["e0+", "e1+", "e2+"])
        assert w in (X, X.inverse())

    def test_c6_cycle_word(self):
        p = pi1_data(pc.cycle_graph(6), "v0")
        assert p.rank == 1
        loop = ["e%d+" % i for i in range(6)]
        assert path_to_word(p, loop) in (X, X.inverse())

    def test_non_path_rejected(self):
        p = pi1_data(pc.cycle_graph(3), "v0")
        with pytest.raises(GraphError):
            path_to_word(p, ["e0+", "e0+"])

    def test_homomorphic_on_loops(self):
        p = pi1_data(pc.bouquet_graph(2), "v0")
        l1, l2 = ["e0+"], ["e1+", "e1+"]
        assert path_to_word(p, l1 + l2) == \
            path_to_word(p, l1) * path_to_word(p, l2)


class TestCoverFromSubgroup:
    def test_mod2_cover_of_b2(self):
        cover, base, cov = cover_from_subgroup(
            pc.bouquet_graph(2), "v0", pc.mod_p_kernel_rep(2, 2))
        assert len(cover.vertices) == 4
        assert cover.edge_count() == 8
        assert cover.edge_count() - len(cover.vertices) + 1 == 5

    def test_c3_double_cover_is_hexagon(self):
        cover, base, cov = cover_from_subgroup(
            pc.cycle_graph(3), "v0", cyclic_rep(2))
        assert len(cover.vertices) == 6
        assert cover.edge_count() == 6
        assert pc.is_connected(cover)
        assert all(len(cover.star(v)) == 2 for v in cover.vertices)

    def test_trivial_rep_gives_isomorphic_copy(self):
        g = theta_graph()
        cover, base, cov = cover_from_subgroup(g, "v0", trivial_rep(2))
        assert cov.degree == 1
        assert cov.map.is_bijective()

    def test_rank_mismatch(self):
        with pytest.raises(ValueError):
            cover_from_subgroup(pc.bouquet_graph(2), "v0", cyclic_rep(2))


class TestImageSubgroup:
    def test_wrap(self):
        cov = as_covering(wrap_morphism(6, 3))
        p = pi1_data(pc.cycle_graph(3), "v0")
        rep = image_subgroup(cov, "v0", p)
        assert rep == PermRep(1, 2, [(1, 0)])

    def test_identity(self):
        c3 = pc.cycle_graph(3)
        cov = as_covering(GraphMorphism.identity(c3))
        assert image_subgroup(cov, "v0", pi1_data(c3, "v0")).degree == 1

    def test_round_trip_small(self):
        b2 = pc.bouquet_graph(2)
        p = pi1_data(b2, "v0")
        for h in low_index_reps(2, 3):
            cover, base, cov = cover_from_subgroup(b2, "v0", h)
            assert rep_equivalent(image_subgroup(cov, base, p), h)

    def test_monodromy_matches_transport(self):
        cov = as_covering(wrap_morphism(6, 3))
        p = pi1_data(pc.cycle_graph(3), "v0")
        rep = image_subgroup(cov, "v0", p)
        transport = {x: x for x in cov.vertex_fibers["v0"]}
        for d in p.basis_loop(0):
            step = fiber_transport(cov, d)
            transport = {x: step[y] for x, y in transport.items()}
        label = {"v0": 0, "v3": 1}
        for x, y in transport.items():
            assert rep.perms[0][label[x]] == label[y]

    def test_basepoint_mismatch(self):
        cov = as_covering(wrap_morphism(6, 3))
        p = pi1_data(pc.cycle_graph(3), "v0")
        with pytest.raises(ValueError):
            image_subgroup(cov, "v1", p)


class TestLift:
    def test_lift_between_equal_covers(self):
        f = as_covering(wrap_morphism(6, 3))
        h = lift(wrap_morphism(6, 3), f, "v0", "v0")
        assert h.is_bijective()
        assert compose(f.map, h) == wrap_morphism(6, 3)

    def test_obstruction_for_identity(self):
        f = as_covering(wrap_morphism(6, 3))
        g = GraphMorphism.identity(pc.cycle_graph(3))
        with pytest.raises(LiftObstruction) as err:
            lift(g, f, "v0", "v0")
        path = err.value.path
        sigma = g.domain
        assert sigma.src[path[0]] == "v0"
        assert sigma.target(path[-1]) == "v0"
        for a, b in zip(path, path[1:]):
            assert sigma.target(a) == sigma.src[b]

    def test_single_vertex_always_lifts(self):
        c3 = pc.cycle_graph(3)
        dot = pc.FiniteGraph(["p"], [], {}, {})
        g = GraphMorphism(dot, c3, {"p": "v0"}, {})
        f = as_covering(wrap_morphism(6, 3))
        h = lift(g, f, "p", "v3")
        assert h.vmap == {"p": "v3"}

    def test_traversal_order_irrelevant(self):
        f = as_covering(wrap_morphism(12, 3))
        g = wrap_morphism(12, 3)
        h1 = lift(g, f, "v0", "v0")
        h2 = lift(g, f, "v0", "v0",
                  dart_order=lambda darts: tuple(reversed(darts)))
        assert h1 == h2

    def test_matches_containment_criterion(self):
        rng = random.Random(11)
        bases = [pc.bouquet_graph(1), pc.bouquet_graph(2), pc.cycle_graph(3),
                 theta_graph()]
        trials = 0
        for base in bases:
            p = pi1_data(base, "v0")
            reps = low_index_reps(p.rank, 3)
            for _ in range(20):
                h_up = rng.choice(reps)
                h_down = rng.choice(reps)
                up, up_base, up_cov = cover_from_subgroup(base, "v0", h_up)
                down, down_base, down_cov = cover_from_subgroup(base, "v0", h_down)
                expected = subgroup_leq(
                    image_subgroup(up_cov, up_base, p),
                    image_subgroup(down_cov, down_base, p))
                try:
                    lift(up_cov.map, down_cov, up_base, down_base)
                    got = True
                except LiftObstruction:
                    got = False
                assert got == expected
                trials += 1
        assert trials == 80


class TestDeckGroup:
    def test_wrap_deck_is_antipodal(self):
        deck = deck_group(as_covering(wrap_morphism(6, 3)))
        assert deck.order == 2
        other = deck.elements[1]
        assert other.vmap["v0"] == "v3"

    def test_nonnormal_cover_has_trivial_deck(self):
        _, _, cov = cover_from_subgroup(
            pc.bouquet_graph(2), "v0", PermRep(2, 3, [(1, 0, 2), (0, 2, 1)]))
        assert deck_group(cov).order == 1

    def test_identity_covering(self):
        deck = deck_group(as_covering(GraphMorphism.identity(pc.cycle_graph(3))))
        assert deck.order == 1

    def test_freeness(self):
        for n in (6, 9, 12):
            deck = deck_group(as_covering(wrap_morphism(n, 3)))
            for h in deck.elements[1:]:
                assert all(h.vmap[v] != v for v in h.domain.vertices)
                assert all(h.dmap[d] != d for d in h.domain.darts)

    def test_subgroup_helpers(self):
        deck = deck_group(as_covering(wrap_morphism(12, 3)))
        assert deck.order == 4
        sizes = sorted(len(s) for s in deck.subgroups())
        assert sizes == [1, 2, 4]
        assert deck.is_subgroup([0, 2])
        assert not deck.is_subgroup([0, 1])


class TestRegularity:
    def test_wrap_regular(self):
        report = is_regular(as_covering(wrap_morphism(6, 3)))
        assert report.regular
        assert report.deck_order == report.degree == 2
        assert report.image_normal and report.fiber_transitive

    def test_degree_three_not_regular(self):
        _, _, cov = cover_from_subgroup(
            pc.bouquet_graph(2), "v0", PermRep(2, 3, [(1, 0, 2), (0, 2, 1)]))
        report = is_regular(cov)
        assert not report.regular
        assert report.deck_order == 1
        assert not report.image_normal and not report.fiber_transitive

    def test_degree_one_regular(self):
        assert is_regular(as_covering(GraphMorphism.identity(theta_graph()))).regular

    def test_cyclic_family(self):
        for m in range(1, 9):
            report = is_regular(as_covering(wrap_morphism(3 * m, 3)))
            assert report.regular and report.degree == m


class TestGroupActions:
    def test_antipodal_quotient(self):
        act = rotation_action(6, 3)
        qg, cov = quotient_by_group(act)
        assert len(qg.vertices) == 3
        assert cov.degree == 2
        assert is_regular(cov).regular
        mapping = action_deck_isomorphism(act, deck_group(cov))
        assert len(mapping) == 2

    def test_trivial_action(self):
        act = rotation_action(6, 6)
        qg, cov = quotient_by_group(act)
        assert cov.degree == 1
        assert qg == pc.cycle_graph(6)

    def test_klein_four_on_mod2_cover(self):
        cover, base, cov = cover_from_subgroup(
            pc.bouquet_graph(2), "v0", pc.mod_p_kernel_rep(2, 2))
        deck = deck_group(cov)
        act = deck_action(deck, range(deck.order))
        qg, qcov = quotient_by_group(act)
        assert qcov.degree == 4
        assert len(qg.vertices) == 1 and qg.edge_count() == 2
        mapping = action_deck_isomorphism(act, deck_group(qcov))
        assert len(mapping) == 4

    def test_reflection_is_not_free(self):
        c6 = pc.cycle_graph(6)
        vmap = {"v%d" % i: "v%d" % ((6 - i) % 6) for i in range(6)}
        dmap = {}
        for i in range(6):
            dmap["e%d+" % i] = "e%d-" % ((5 - i) % 6)
            dmap["e%d-" % i] = "e%d+" % ((5 - i) % 6)
        refl = GraphMorphism(c6, c6, vmap, dmap)
        act = pc.GroupAction.from_morphisms(
            c6, {"id": GraphMorphism.identity(c6), "r": refl})
        with pytest.raises(ActionError) as err:
            quotient_by_group(act)
        assert err.value.witness is not None

    def test_edge_inversion_rejected(self):
        c2 = pc.cycle_graph(2)
        vmap = {"v0": "v1", "v1": "v0"}
        dmap = {"e0+": "e0-", "e0-": "e0+", "e1+": "e1-", "e1-": "e1+"}
        swap = GraphMorphism(c2, c2, vmap, dmap)
        with pytest.raises(ActionError):
            pc.GroupAction.from_morphisms(
                c2, {"id": GraphMorphism.identity(c2), "s": swap})

    def test_non_action_table_rejected(self):
        c6 = pc.cycle_graph(6)
        morphs = {"id": GraphMorphism.identity(c6), "r": rotation(6, 2)}
        with pytest.raises(ActionError):
            pc.GroupAction.from_morphisms(c6, morphs)


class TestDeckQuotient:
    def test_intermediate_cover_of_c12(self):
        cov = as_covering(wrap_morphism(12, 3))
        deck = deck_group(cov)
        half = next(s for s in deck.subgroups() if len(s) == 2)
        qg, h_map, f_h = quotient_by_deck_subgroup(deck, half)
        assert len(qg.vertices) == 6
        assert h_map.degree == 2 and f_h.degree == 2
        assert is_regular(f_h).regular
        assert compose(f_h.map, h_map.map) == cov.map

    def test_trivial_subgroup(self):
        cov = as_covering(wrap_morphism(6, 3))
        deck = deck_group(cov)
        qg, h_map, f_h = quotient_by_deck_subgroup(deck, [0])
        assert h_map.degree == 1
        assert f_h.degree == cov.degree

    def test_full_deck_of_regular_cover(self):
        cov = as_covering(wrap_morphism(6, 3))
        deck = deck_group(cov)
        qg, h_map, f_h = quotient_by_deck_subgroup(deck, range(deck.order))
        assert f_h.degree == 1
        assert f_h.map.is_bijective()

    def test_not_a_subgroup(self):
        cov = as_covering(wrap_morphism(12, 3))
        deck = deck_group(cov)
        with pytest.raises(ActionError):
            quotient_by_deck_subgroup(deck, [1])

    def test_s3_cover_nonnormal_subgroup_gives_irregular_intermediate(self):
        _, _, cov = cover_from_subgroup(pc.bouquet_graph(2), "v0", s3_regular_rep())
        deck = deck_group(cov)
        assert deck.order == 6
        small = [s for s in deck.subgroups()
                 if len(s) == 2 and not deck.is_normal_subgroup(s)]
        assert small
        _, _, f_h = quotient_by_deck_subgroup(deck, small[0])
        assert not is_regular(f_h).regular


class TestTransportBasepoint:
    def test_empty_word(self):
        rep = PermRep(2, 3, [(1, 0, 2), (0, 2, 1)])
        assert rep_equivalent(transport_basepoint(rep, FreeWord()), rep)

    def test_normal_invariant(self):
        rep = pc.mod_p_kernel_rep(2, 2)
        for w in (X, X * FreeWord.generator(1)):
            assert rep_equivalent(transport_basepoint(rep, w), rep)

    def test_nonnormal_moves(self):
        rep = PermRep(2, 3, [(1, 0, 2), (0, 2, 1)])
        assert not rep_equivalent(transport_basepoint(rep, X), rep)

    def test_transport_is_conjugation(self):
        rep = PermRep(2, 3, [(1, 0, 2), (0, 2, 1)])
        for w in (X, X * FreeWord.generator(1), FreeWord.generator(1).inverse()):
            moved = transport_basepoint(rep, w)
            assert moved.degree == rep.degree
            for u in rep.schreier_generators():
                assert moved.contains(w.inverse() * u * w)


class TestEulerMultiplicativity:
    def test_across_covers(self):
        cases = []
        for base in (pc.bouquet_graph(2), pc.cycle_graph(3), theta_graph(),
                     cycle_with_loop(), cycle_with_parallel()):
            p = pi1_data(base, "v0")
            for h in low_index_reps(p.rank, 3)[:8]:
                cases.append((base, p, h))
        for base, p, h in cases:
            cover, _, cov = cover_from_subgroup(base, "v0", h)
            cover_rank = cover.edge_count() - len(cover.vertices) + 1
            assert cover_rank - 1 == cov.degree * (p.rank - 1)
