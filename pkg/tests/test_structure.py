import random
from fractions import Fraction

import pytest

import oracles
from conftest import (directed_cycle_profile, profile_from_edges,
                      random_connected_graph_edges)
from ncg.errors import AssignmentAmbiguous, Disconnected, PreconditionUnmet
from ncg.game import GameConfig, StrategyProfile, build_graph
from ncg.equilibrium import is_nash
from ncg.structure import (audit_equilibrium_structure, biconnected_components,
                           closest_assignment, component_is_cycle,
                           component_subgraph, girth, is_directed_cycle,
                           is_min_cycle, lemma_crucial_deviation,
                           min_cycle_through_edge, shopping_vertices,
                           shortest_cycle, shortest_path_tree, two_degree_paths)


def graph_from_edges(n, edges):
    return build_graph(profile_from_edges(n, edges))


class TestBiconnectedComponents:
    def test_tree_has_none(self):
        g = build_graph(StrategyProfile.from_sets([{1}, {2}, {3}, set()]))
        assert biconnected_components(g) == []

    def test_cycle_with_pendant(self):
        g = graph_from_edges(5, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4)])
        comps = biconnected_components(g)
        assert len(comps) == 1
        assert comps[0].vertices == frozenset({0, 1, 2, 3})
        assert comps[0].average_degree == 2

    def test_two_triangles_sharing_a_vertex(self):
        g = graph_from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
        comps = biconnected_components(g)
        assert [sorted(c.vertices) for c in comps] == [[0, 1, 2], [2, 3, 4]]

    def test_agrees_with_cycle_space_oracle_random(self):
        rng = random.Random(20)
        for _ in range(150):
            n = rng.randint(3, 7)
            edges = random_connected_graph_edges(rng, n)
            g = graph_from_edges(n, edges)
            got = sorted((frozenset(c.vertices), frozenset(c.edges))
                         for c in biconnected_components(g))
            want = sorted((v, e) for v, e in oracles.biconnected_components(
                n, oracles.adjacency(n, profile_from_edges(n, edges).buys)))
            assert got == want

    def test_removing_any_component_vertex_keeps_it_connected(self):
        rng = random.Random(21)
        for _ in range(100):
            n = rng.randint(3, 7)
            edges = random_connected_graph_edges(rng, n)
            g = graph_from_edges(n, edges)
            for comp in biconnected_components(g):
                for skip in comp.vertices:
                    rest = sorted(comp.vertices - {skip})
                    adj = {v: set() for v in rest}
                    for u, v in comp.edges:
                        if skip not in (u, v):
                            adj[u].add(v)
                            adj[v].add(u)
                    reach = oracles.bfs_distances(adj, rest[0])
                    assert set(reach) == set(rest)

    def test_articulation_vertices_match_removal_oracle(self):
        rng = random.Random(22)
        for _ in range(100):
            n = rng.randint(3, 7)
            edges = random_connected_graph_edges(rng, n)
            g = graph_from_edges(n, edges)
            comps = biconnected_components(g)
            # vertices appearing in >= 2 blocks (component or bridge) are cut
            blocks = [frozenset(c.vertices) for c in comps]
            in_comp = set().union(*blocks) if blocks else set()
            bridge_like = [frozenset(e) for e in g.edges
                           if not any(set(e) <= b for b in blocks)]
            counts = {}
            for b in blocks + bridge_like:
                for v in b:
                    counts[v] = counts.get(v, 0) + 1
            cut = {v for v, c in counts.items() if c >= 2}
            adj = oracles.adjacency(n, profile_from_edges(n, edges).buys)
            assert cut == oracles.cut_vertices(n, adj)


class TestShortestPathTree:
    def test_star_rooted_at_center(self):
        g = build_graph(StrategyProfile.from_sets([{4}, {4}, {4}, {4}, set()]))
        spt = shortest_path_tree(g, 4)
        assert spt.depth == (1, 1, 1, 1, 0)

    def test_c4_tie_breaks_to_smaller_parent(self):
        g = build_graph(directed_cycle_profile(4))
        spt = shortest_path_tree(g, 0)
        assert spt.depth[2] == 2 and spt.parent[2] == 1

    def test_path_rooted_at_end(self):
        g = build_graph(StrategyProfile.from_sets([{1}, {2}, {3}, set()]))
        spt = shortest_path_tree(g, 0)
        assert spt.parent == (None, 0, 1, 2)
        assert spt.depth == (0, 1, 2, 3)

    def test_disconnected_raises(self):
        g = build_graph(StrategyProfile.from_sets([{1}, set(), set()]))
        with pytest.raises(Disconnected):
            shortest_path_tree(g, 0)

    def test_depth_equals_distance_random(self):
        rng = random.Random(23)
        for _ in range(50):
            n = rng.randint(2, 7)
            edges = random_connected_graph_edges(rng, n)
            g = graph_from_edges(n, edges)
            root = rng.randrange(n)
            spt = shortest_path_tree(g, root)
            adj = oracles.adjacency(n, profile_from_edges(n, edges).buys)
            dist = oracles.bfs_distances(adj, root)
            for v in range(n):
                assert spt.depth[v] == dist[v]
                if v != root:
                    assert g.has_edge(v, spt.parent[v])
                    assert spt.depth[spt.parent[v]] == spt.depth[v] - 1


class TestMinCycles:
    def test_bridge_has_no_cycle(self):
        g = build_graph(StrategyProfile.from_sets([{1}, {2}, set()]))
        assert min_cycle_through_edge(g, (0, 1)) is None

    def test_chordless_five_cycle(self):
        g = build_graph(directed_cycle_profile(5))
        mc = min_cycle_through_edge(g, (0, 1))
        assert mc.length == 5
        assert set(mc.vertices) == {0, 1, 2, 3, 4}
        assert mc.directed

    def test_k4_gives_triangle(self):
        g = graph_from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
        mc = min_cycle_through_edge(g, (0, 1))
        assert mc.length == 3 and {0, 1} <= set(mc.vertices)

    def test_min_cycle_property_examples(self):
        k4 = graph_from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
        assert is_min_cycle(k4, (0, 1, 2))
        assert not is_min_cycle(k4, (0, 1, 2, 3))  # chords shortcut the 4-cycle
        c5 = build_graph(directed_cycle_profile(5))
        assert is_min_cycle(c5, (0, 1, 2, 3, 4))

    def test_non_cycle_input_rejected(self):
        g = build_graph(directed_cycle_profile(5))
        with pytest.raises(ValueError):
            is_min_cycle(g, (0, 1, 3))

    def test_output_always_min_random(self):
        rng = random.Random(24)
        for _ in range(80):
            n = rng.randint(3, 7)
            edges = random_connected_graph_edges(rng, n)
            g = graph_from_edges(n, edges)
            for e in sorted(g.edges):
                mc = min_cycle_through_edge(g, e)
                if mc is not None:
                    assert is_min_cycle(g, mc.vertices)
                    assert e[0] in mc.vertices and e[1] in mc.vertices


class TestDirectedCycles:
    def test_directed_triangle(self):
        assert is_directed_cycle(directed_cycle_profile(3), (0, 1, 2))

    def test_vertex_buying_both_incident_edges(self):
        profile = StrategyProfile.from_sets([{1, 2}, {2}, set()])
        assert not is_directed_cycle(profile, (0, 1, 2))

    def test_directed_c4(self):
        assert is_directed_cycle(directed_cycle_profile(4), (0, 1, 2, 3))

    def test_reversed_orientation_counts(self):
        profile = StrategyProfile.from_sets([{2}, {0}, {1}])
        assert is_directed_cycle(profile, (0, 1, 2))


class TestGirth:
    def test_examples(self):
        tree = build_graph(StrategyProfile.from_sets([{1}, {2}, {3}, set()]))
        assert girth(tree) is None
        assert girth(build_graph(directed_cycle_profile(5))) == 5
        k4 = graph_from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
        assert girth(k4) == 3

    def test_agrees_with_cycle_enumeration_oracle(self):
        rng = random.Random(25)
        for _ in range(150):
            n = rng.randint(2, 7)
            edges = random_connected_graph_edges(rng, n)
            g = graph_from_edges(n, edges)
            adj = oracles.adjacency(n, profile_from_edges(n, edges).buys)
            assert girth(g) == oracles.girth(n, adj)
            cyc = shortest_cycle(g)
            if cyc is not None:
                assert is_min_cycle(g, cyc)


class TestTwoDegreePaths:
    def test_pure_cycle_is_degenerate(self):
        comp = biconnected_components(build_graph(directed_cycle_profile(6)))[0]
        assert component_is_cycle(comp)
        assert two_degree_paths(comp) == []

    def test_theta_graph(self):
        # hubs 0 and 5 joined by three paths with 2, 2 and 3 interior vertices
        edges = [(0, 1), (1, 2), (2, 5), (0, 3), (3, 4), (4, 5),
                 (0, 6), (6, 7), (7, 8), (8, 5)]
        comp = biconnected_components(graph_from_edges(9, edges))[0]
        paths = two_degree_paths(comp)
        assert sorted(p.k for p in paths) == [2, 2, 3]
        assert all({p.start, p.end} == {0, 5} for p in paths)

    def test_k4_has_none(self):
        k4 = graph_from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
        comp = biconnected_components(k4)[0]
        assert not component_is_cycle(comp)
        assert two_degree_paths(comp) == []

    def test_interiors_have_degree_two(self):
        rng = random.Random(26)
        for _ in range(60):
            n = rng.randint(4, 7)
            g = graph_from_edges(n, random_connected_graph_edges(rng, n))
            for comp in biconnected_components(g):
                if component_is_cycle(comp):
                    continue
                for p in two_degree_paths(comp):
                    assert p.k >= 1
                    assert all(comp.degree_of(x) == 2 for x in p.interior)
                    assert comp.degree_of(p.start) != 2
                    assert comp.degree_of(p.end) != 2


class TestClosestAssignment:
    def test_pendant_path_assigned_to_attachment(self):
        # C4 on 0..3 with a path 0-4-5 hanging off vertex 0
        g = graph_from_edges(6, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (4, 5)])
        comp = biconnected_components(g)[0]
        ca = closest_assignment(g, comp)
        assert ca.s_of(0) == frozenset({0, 4, 5})

    def test_component_vertices_map_to_themselves(self):
        g = graph_from_edges(6, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (4, 5)])
        comp = biconnected_components(g)[0]
        ca = closest_assignment(g, comp)
        for v in comp.vertices:
            assert ca.assignment[v] == v
            assert ca.s_of(v) & comp.vertices == {v}

    def test_graph_equal_to_component(self):
        g = build_graph(directed_cycle_profile(5))
        comp = biconnected_components(g)[0]
        ca = closest_assignment(g, comp)
        assert all(ca.s_of(v) == {v} for v in range(5))

    def test_partition_properties_random(self):
        rng = random.Random(27)
        checked = 0
        for _ in range(80):
            n = rng.randint(4, 7)
            g = graph_from_edges(n, random_connected_graph_edges(rng, n))
            for comp in biconnected_components(g):
                ca = closest_assignment(g, comp)
                union = set()
                for v in comp.vertices:
                    s = ca.s_of(v)
                    assert not union & s
                    union |= s
                assert union == set(range(n))
                checked += 1
        assert checked > 20

    def test_disconnected_rejected(self):
        g = build_graph(StrategyProfile.from_sets([{1}, {2}, {0}, set()]))
        comp = biconnected_components(g)[0]
        with pytest.raises(Disconnected):
            closest_assignment(g, comp)


class TestShoppingVertices:
    def test_directed_c4_single_shopping_vertex(self):
        profile = directed_cycle_profile(4)
        comp = biconnected_components(build_graph(profile))[0]
        sv = shopping_vertices(profile, comp, 0)
        # With root 0 the tree keeps (0,1), (0,3), (1,2); vertex 2 bought the
        # leftover edge (2,3).
        assert sv.members == frozenset({2})
        assert sv.nontree_edges(2) == ((2, 3),)

    def test_every_member_recomputable(self):
        rng = random.Random(28)
        for _ in range(40):
            n = rng.randint(4, 7)
            edges = random_connected_graph_edges(rng, n)
            profile = profile_from_edges(n, edges, rng)
            graph = build_graph(profile)
            comps = biconnected_components(graph)
            if not comps:
                continue
            root = rng.randrange(n)
            spt = shortest_path_tree(graph, root)
            for comp in comps:
                sv = shopping_vertices(profile, comp, root)
                t_edges = spt.edges()
                expected = set()
                for u, v in comp.edges - t_edges:
                    if v in profile.buys[u]:
                        expected.add(u)
                    if u in profile.buys[v]:
                        expected.add(v)
                assert sv.members == expected

    def test_double_purchase_lists_both_buyers(self):
        # 4-cycle whose non-tree edge (2,3) is paid from both sides
        profile = StrategyProfile.from_sets([{1}, {2}, {3}, {0, 2}])
        comp = biconnected_components(build_graph(profile))[0]
        sv = shopping_vertices(profile, comp, 0)
        assert sv.members == frozenset({2, 3})


class TestAudit:
    def test_tree_equilibrium_fully_passes(self):
        cfg = GameConfig(3, Fraction(5))
        star = StrategyProfile.from_sets([{1}, set(), {1}])
        report = audit_equilibrium_structure(cfg, star)
        assert report.all_applicable_pass()
        girth_checks = [report.record("girth_alpha_plus_2"),
                        report.record("girth_2alpha_minus_1")]
        assert all(r.passed and r.vacuous for r in girth_checks)
        assert not report.record("min_cycles_directed").applicable

    def test_directed_c4_alpha5_flags_girth(self):
        cfg = GameConfig(4, Fraction(5))
        report = audit_equilibrium_structure(cfg, directed_cycle_profile(4))
        rec = report.record("girth_alpha_plus_2")
        assert rec.applicable and rec.passed is False
        cycle = rec.witnesses[0].payload
        assert len(cycle) == 4 and Fraction(len(cycle)) < cfg.alpha + 2
        assert not report.all_applicable_pass()

    def test_directed_c3_alpha5_flags_girth(self):
        cfg = GameConfig(3, Fraction(5))
        report = audit_equilibrium_structure(cfg, directed_cycle_profile(3))
        assert report.record("girth_alpha_plus_2").passed is False
        assert report.record("girth_2alpha_minus_1").passed is False

    def test_alpha_gates(self):
        profile = directed_cycle_profile(5)
        tiny = audit_equilibrium_structure(GameConfig(5, Fraction(1, 2)), profile)
        assert not tiny.record("shopping_single_nontree").applicable
        low = audit_equilibrium_structure(GameConfig(5, Fraction(3, 2)), profile)
        assert low.record("shopping_single_nontree").applicable
        for check_id in ("min_cycles_directed", "component_members_buy",
                         "attachment_distance", "avg_degree_upper",
                         "two_degree_path_limit", "avg_degree_lower"):
            assert not low.record(check_id).applicable
        mid = audit_equilibrium_structure(GameConfig(5, Fraction(3)), profile)
        assert mid.record("min_cycles_directed").applicable
        assert not mid.record("avg_degree_lower").applicable

    def test_long_cycle_alpha_above_five_fails_degree_checks(self):
        profile = directed_cycle_profile(12)
        report = audit_equilibrium_structure(GameConfig(12, Fraction(11, 2)), profile)
        assert report.record("girth_alpha_plus_2").passed
        assert report.record("girth_2alpha_minus_1").passed
        assert report.record("min_cycles_directed").passed
        assert report.record("component_members_buy").passed
        assert report.record("two_degree_path_limit").passed is False
        assert report.record("neighborhood_degree").passed is False
        assert report.record("avg_degree_lower").passed is False
        assert report.record("avg_degree_upper").passed  # 2 < 2 + 2/3

    def test_undirected_min_cycle_detected(self):
        # vertex 0 buys both its incident cycle edges
        profile = StrategyProfile.from_sets([{1, 4}, {2}, {3}, {4}, set()])
        report = audit_equilibrium_structure(GameConfig(5, Fraction(5, 2)), profile)
        rec = report.record("min_cycles_directed")
        assert rec.applicable and rec.passed is False

    def test_multi_nontree_buyer_detected(self):
        # K4 where vertex 1 buys two chords of the tree rooted at center 0
        profile = StrategyProfile.from_sets([{1, 2, 3}, {2, 3}, set(), set()])
        report = audit_equilibrium_structure(GameConfig(4, Fraction(3, 2)), profile)
        rec = report.record("shopping_single_nontree")
        assert rec.applicable and rec.passed is False
        assert any(w.payload[0] == 1 for w in rec.witnesses)

    def test_witnesses_reverify(self):
        cfg = GameConfig(4, Fraction(5))
        report = audit_equilibrium_structure(cfg, directed_cycle_profile(4))
        graph = build_graph(directed_cycle_profile(4))
        for rec in report.failures():
            assert rec.witnesses
            for w in rec.witnesses:
                if w.kind == "cycle":
                    assert is_min_cycle(graph, w.payload) or len(w.payload) >= 3


class TestCrucialDeviation:
    def test_directed_c5_antipodal_pair(self):
        cfg = GameConfig(5, Fraction(3))
        profile = directed_cycle_profile(5)
        dev = lemma_crucial_deviation(cfg, profile, a=0, b=2)
        assert dev.usage_after <= dev.anchor_usage + 1
        assert dev.swapped_edge_to == 1
        assert 2 in dev.new_strategy

    def test_two_qualifying_edges_removes_the_extra(self):
        # K4 with 0 buying two same-level chords under the tree rooted at 1
        cfg = GameConfig(4, Fraction(2))
        profile = StrategyProfile.from_sets([{2, 3}, {0, 2, 3}, set(), {2}])
        dev = lemma_crucial_deviation(cfg, profile, a=0, b=1)
        assert dev.extra_removed == 1
        assert dev.usage_after <= dev.anchor_usage + 1
        # cost accounting of the swap-and-prune change
        alpha = cfg.alpha
        assert dev.new_cost <= alpha * len(dev.old_strategy) \
            - alpha * dev.extra_removed + dev.anchor_usage + 1

    def test_unqualified_agent_rejected(self):
        cfg = GameConfig(3, Fraction(5))
        star = StrategyProfile.from_sets([{1}, set(), {1}])
        with pytest.raises(PreconditionUnmet):
            lemma_crucial_deviation(cfg, star, a=1, b=0)

    def test_never_degrades_anchor_bound_random(self):
        rng = random.Random(29)
        for _ in range(60):
            n = rng.randint(3, 7)
            edges = random_connected_graph_edges(rng, n)
            profile = profile_from_edges(n, edges, rng)
            cfg = GameConfig(n, Fraction(2))
            a, b = rng.sample(range(n), 2)
            try:
                dev = lemma_crucial_deviation(cfg, profile, a, b)
            except PreconditionUnmet:
                continue
            assert dev.usage_after <= dev.anchor_usage + 1
