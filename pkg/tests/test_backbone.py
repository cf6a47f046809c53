import json
import math
import random

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from overlap_backbone.backbone import (
    ALPHA_RESOLUTION,
    HALT_ON_BRIDGE,
    SKIP_BRIDGES,
    EmptyOverlapError,
    ExtractionError,
    TuningError,
    disparity_filter,
    disparity_significance,
    ego_backbone,
    enforce_size,
    hubs_backbone,
    prune_low_weight_edges,
    select_hubs,
    tune_alpha,
)
from overlap_backbone.community import CommunityCover, detect_communities, overlap_neighborhood, overlapping_nodes
from overlap_backbone.graph import WeightedGraph, induced_subgraph, number_connected_components

from oracles import count_components, is_cut_vertex, kruskal_max_forest, null_model_pvalue, random_graph


def cover(**members):
    return CommunityCover({k: frozenset(v) for k, v in members.items()}, {"seed": 0})


def edge_set(g):
    return {frozenset((u, v)) for u, v, _ in g.edges()}


@pytest.fixture(scope="module")
def bowtie():
    # triangles v-a-b and v-c-d sharing the overlapping node v
    g = WeightedGraph.from_edges([("v", "a", 3), ("v", "b", 2), ("a", "b", 1),
                                  ("v", "c", 5), ("v", "d", 4), ("c", "d", 6)])
    return g, cover(v={0, 1}, a={0}, b={0}, c={1}, d={1})


@pytest.fixture(scope="module")
def karate_covers(karate):
    out = []
    for seed in range(10):
        c = detect_communities(karate, 100, 0.3, seed)
        if overlapping_nodes(c):
            out.append(c)
    return out


def naive_enforce(sub, target):
    """Greedy size control re-derived with brute-force cut-vertex checks."""
    g = sub
    while g.number_of_nodes() > target:
        st_ = {v: sum(g.weight(v, u) for u in g.neighbors(v)) for v in g.labels}
        order = sorted(g.labels, key=lambda v: (st_[v], -sub.index(v)))
        for v in order:
            if not is_cut_vertex(g, v):
                g = induced_subgraph(g, [x for x in g.labels if x != v])
                break
        else:
            break
    return g


class TestEgo:
    def test_bowtie_skip_bridges(self, bowtie):
        g, c = bowtie
        bb = ego_backbone(g, c, s=1.0, policy=SKIP_BRIDGES)
        assert set(bb.nodes) == {"v", "a", "b", "c", "d"}
        assert edge_set(bb.graph) == {frozenset(e) for e in [("v", "a"), ("v", "b"), ("v", "c"), ("c", "d")]}

    def test_bowtie_halt_on_bridge(self, bowtie):
        g, c = bowtie
        bb = ego_backbone(g, c, s=1.0, policy=HALT_ON_BRIDGE)
        # a-b goes, then v-b is a bridge and pruning stops
        assert edge_set(bb.graph) == edge_set(g) - {frozenset(("a", "b"))}

    def test_karate_size_bound(self, karate, karate_covers):
        assert karate_covers
        for c in karate_covers:
            assert ego_backbone(karate, c, 0.3).graph.number_of_nodes() <= math.floor(0.3 * 34)

    def test_empty_overlap(self, karate):
        c = CommunityCover({v: frozenset({0}) for v in karate.labels})
        with pytest.raises(EmptyOverlapError, match="empty overlap"):
            ego_backbone(karate, c)
        with pytest.raises(EmptyOverlapError):
            hubs_backbone(karate, c)

    def test_incomplete_cover(self, karate):
        with pytest.raises(ExtractionError):
            ego_backbone(karate, cover(**{"1": {0, 1}}))

    def test_provenance(self, bowtie, tmp_path):
        g, c = bowtie
        bb = ego_backbone(g, c, s=1.0)
        bb.write(tmp_path / "bb.txt", tmp_path / "bb.json")
        prov = json.loads((tmp_path / "bb.json").read_text())
        assert prov == {"method": "ego", "s": 1.0, "alpha": None, "policy": "skip-bridges", "seed": 0,
                        "source": "", "nodes": 5, "edges": 4, "components": 1}


class TestHubs:
    def test_star_hubs_are_leaves(self):
        g = WeightedGraph.from_edges([("c", f"l{i}", 1.0) for i in range(5)])
        cv = cover(c={0, 1}, **{f"l{i}": {i % 2} for i in range(5)})
        sets = overlap_neighborhood(g, overlapping_nodes(cv))
        assert sets.k == 5
        assert set(select_hubs(g, sets.k, exclude=sets.overlapping)) == {f"l{i}" for i in range(5)}
        bb = hubs_backbone(g, cv, s=1.0)
        assert set(bb.nodes) == set(g.labels)
        assert bb.info["t"] == 5

    def test_same_nodes_when_neighbours_are_hubs(self):
        # o's neighbours x, y are the two strongest non-overlapping nodes
        g = WeightedGraph.from_edges([("o", "x", 5), ("o", "y", 4), ("x", "y", 3), ("x", "p", 1), ("y", "q", 1),
                                      ("p", "q", 1)])
        cv = cover(o={0, 1}, x={0}, y={1}, p={0}, q={1})
        assert set(ego_backbone(g, cv, 1.0).nodes) == set(hubs_backbone(g, cv, 1.0).nodes) == {"o", "x", "y"}

    def test_hub_tie_break(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("c", "d", 1), ("e", "f", 2)])
        assert select_hubs(g, 3) == ["e", "f", "a"]

    def test_scale_invariance(self, karate, karate_covers):
        scaled = WeightedGraph.from_edges([(u, v, 4.0 * w) for u, v, w in karate.edges()], nodes=karate.labels)
        for c in karate_covers[:4]:
            for fn in (ego_backbone, hubs_backbone):
                a, b = fn(karate, c, 0.3), fn(scaled, c, 0.3)
                assert set(a.nodes) == set(b.nodes)
                assert edge_set(a.graph) == edge_set(b.graph)


class TestPrune:
    @pytest.mark.parametrize("policy", [SKIP_BRIDGES, HALT_ON_BRIDGE])
    def test_triangle(self, policy):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 2), ("a", "c", 3)])
        out = prune_low_weight_edges(g, policy)
        assert sorted(w for _, _, w in out.edges()) == [2, 3]

    @pytest.mark.parametrize("policy", [SKIP_BRIDGES, HALT_ON_BRIDGE])
    def test_tree_unchanged(self, policy):
        g = random_graph(12, 11, random.Random(5), connected=True)
        assert prune_low_weight_edges(g, policy) == g

    def test_unknown_policy(self):
        with pytest.raises(ValueError):
            prune_low_weight_edges(WeightedGraph.from_edges([]), "greedy")

    def test_random_equals_kruskal(self):
        rng = random.Random(11)
        for _ in range(25):
            g = random_graph(rng.randint(2, 20), rng.randint(1, 60), rng, connected=True)
            assert edge_set(prune_low_weight_edges(g)) == kruskal_max_forest(g)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 25), st.integers(0, 100), st.booleans())
    def test_forest_property(self, seed, n, m, distinct):
        rng = random.Random(seed)
        g = random_graph(n, m, rng, distinct=distinct)
        assume(g.number_of_edges() <= 100)
        pruned = prune_low_weight_edges(g)
        assert edge_set(pruned) == kruskal_max_forest(g)
        assert number_connected_components(pruned) == number_connected_components(g)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10**6))
    def test_halt_preserves_components(self, seed):
        rng = random.Random(seed)
        g = random_graph(rng.randint(1, 20), rng.randint(0, 50), rng)
        pruned = prune_low_weight_edges(g, HALT_ON_BRIDGE)
        assert number_connected_components(pruned) == number_connected_components(g)
        assert edge_set(prune_low_weight_edges(g)) <= edge_set(pruned)


class TestEnforceSize:
    def test_s_one(self, karate):
        assert enforce_size(karate, 1.0, 34) == karate

    def test_path_keeps_middle(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1)])
        out = enforce_size(g, 1.0, 2)
        assert out.labels == ("a", "b")

    def test_zero_target(self, karate):
        with pytest.raises(ValueError):
            enforce_size(karate, 0.01, 34)

    def test_only_cut_vertices_left(self):
        # target 1 on a path: leaves go until two nodes remain, then either is removable
        g = WeightedGraph.from_edges([("a", "b", 2), ("b", "c", 1)])
        assert enforce_size(g, 0.34, 3).number_of_nodes() == 1

    def test_karate_ego_subnetwork(self, karate, karate_covers):
        checked = 0
        for c in karate_covers:
            sets = overlap_neighborhood(karate, overlapping_nodes(c))
            sub = prune_low_weight_edges(induced_subgraph(karate, sets.overlapping | sets.neighbors))
            out = enforce_size(sub, 0.3, 34)
            ref = naive_enforce(sub, 10)
            assert set(out.labels) == set(ref.labels)
            if sub.number_of_nodes() >= 10:
                assert out.number_of_nodes() == 10
                checked += 1
        assert checked

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6), st.floats(0.05, 1.0))
    def test_matches_naive_greedy(self, seed, s):
        rng = random.Random(seed)
        n = rng.randint(1, 14)
        g = random_graph(n, rng.randint(0, 25), rng)
        target = math.floor(s * n)
        assume(target >= 1)
        out = enforce_size(g, s, n)
        ref = naive_enforce(g, target)
        assert set(out.labels) == set(ref.labels)
        assert number_connected_components(out) <= number_connected_components(g)

    def test_source_degree_ranking(self, karate):
        sub = induced_subgraph(karate, ["1", "2", "3", "34"])
        sub = WeightedGraph.from_edges([("1", "2", 9), ("2", "3", 9), ("3", "34", 1)])
        # inside the sub-network 34 is weakest; in karate it is the strongest
        assert "34" not in enforce_size(sub, 0.09, 34).labels
        assert "34" in enforce_size(sub, 0.09, 34, reference=karate).labels


class TestDisparity:
    def test_star_closed_form(self):
        g = WeightedGraph.from_edges([("c", f"l{i}", 2.0) for i in range(5)])
        sig = disparity_significance(g)
        for (i, j), (a_i, a_j) in sig.items():
            assert a_i == (1 - 1 / 5) ** 4 == pytest.approx(0.4096, abs=1e-15)
            assert a_j == 1.0
        assert null_model_pvalue(1 / 5, 5) == pytest.approx(0.4096, abs=1e-9)

    def test_alpha_near_one_keeps_all(self, karate):
        bb = disparity_filter(karate, 1 - 1e-12)
        assert edge_set(bb.graph) == edge_set(karate)

    def test_single_edge_is_dropped(self):
        g = WeightedGraph.from_edges([("a", "b", 3)])
        for alpha in (0.01, 0.5, 0.999):
            assert disparity_filter(g, alpha).graph.number_of_nodes() == 0

    def test_alpha_range(self, karate):
        with pytest.raises(ValueError):
            disparity_filter(karate, 1.0)

    def test_matches_null_model_integral(self):
        rng = random.Random(2)
        for _ in range(30):
            g = random_graph(rng.randint(3, 12), rng.randint(3, 30), rng, weights=lambda r: r.uniform(0.1, 10))
            st_ = {v: sum(g.weight(v, u) for u in g.neighbors(v)) for v in g.labels}
            for (i, j), (a_i, a_j) in disparity_significance(g).items():
                u, v = g.labels[i], g.labels[j]
                w = g.weight(u, v)
                for node, a in ((u, a_i), (v, a_j)):
                    k = len(g.neighbors(node))
                    ref = null_model_pvalue(w / st_[node], k) if k > 1 else 1.0
                    assert a == pytest.approx(ref, abs=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
    def test_monotone_in_alpha(self, seed, a1, a2):
        rng = random.Random(seed)
        g = random_graph(rng.randint(2, 15), rng.randint(1, 40), rng)
        lo, hi = sorted((a1, a2))
        assert edge_set(disparity_filter(g, lo).graph) <= edge_set(disparity_filter(g, hi).graph)

    def test_scale_free_significance(self, karate):
        scaled = WeightedGraph.from_edges([(u, v, 0.25 * w) for u, v, w in karate.edges()], nodes=karate.labels)
        a, b = disparity_significance(karate), disparity_significance(scaled)
        for key in a:
            assert a[key] == pytest.approx(b[key], rel=1e-12)

    def test_weight_preservation(self, karate):
        bb = disparity_filter(karate, 0.3)
        for u, v, w in bb.graph.edges():
            assert karate.weight(u, v) == w


def sweep_sizes(g):
    """Backbone size just above every distinct significance value."""
    sig = disparity_significance(g)
    values = sorted({a for pair in sig.values() for a in pair if a < 1.0})
    out = []
    for a in values:
        thr = float(np.nextafter(a, 2.0))
        nodes = {v for (i, j), (x, y) in sig.items() if x < thr or y < thr for v in (i, j)}
        out.append((thr, len(nodes)))
    return out


class TestTuneAlpha:
    def test_full_target(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 2), ("c", "a", 3), ("c", "d", 1), ("d", "a", 1)])
        alpha, bb = tune_alpha(g, g.number_of_nodes())
        assert bb.graph.number_of_nodes() == g.number_of_nodes()
        assert 0 < alpha < 1

    def test_karate_target_ten(self, karate):
        alpha, bb = tune_alpha(karate, 10)
        size = bb.graph.number_of_nodes()
        assert 10 <= size <= 12
        best = min(sz for _, sz in sweep_sizes(karate) if sz >= 10)
        assert size == best
        assert bb.info["gap"] == size - 10

    def test_resolution_invariant(self, karate, lesmis):
        for g in (karate, lesmis):
            for target in (3, 10, 20):
                alpha, bb = tune_alpha(g, target)
                assert bb.graph.number_of_nodes() >= target
                below = disparity_filter(g, alpha - ALPHA_RESOLUTION).graph.number_of_nodes()
                assert below < target

    def test_unreachable(self):
        # pendant edges only: at most the three nodes around the degree-2 centre
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1), ("x", "y", 1)])
        with pytest.raises(TuningError) as exc:
            tune_alpha(g, 4)
        assert exc.value.reachable == 3

    def test_bad_target(self, karate):
        with pytest.raises(ValueError):
            tune_alpha(karate, 35)


class TestInvariants:
    @pytest.mark.parametrize("policy", [SKIP_BRIDGES, HALT_ON_BRIDGE])
    def test_components_and_weights(self, karate, lesmis, policy):
        for g in (karate, lesmis):
            for seed in range(6):
                c = detect_communities(g, 60, 0.3, seed)
                if not overlapping_nodes(c):
                    continue
                for fn in (ego_backbone, hubs_backbone):
                    bb = fn(g, c, 0.3, policy)
                    assert number_connected_components(bb.graph) <= bb.info["subnetwork_components"]
                    assert bb.graph.number_of_nodes() <= math.floor(0.3 * g.number_of_nodes())
                    for u, v, w in bb.graph.edges():
                        assert g.weight(u, v) == w

    def test_step3_keeps_component_count(self, karate, karate_covers):
        for c in karate_covers:
            sets = overlap_neighborhood(karate, overlapping_nodes(c))
            sub = induced_subgraph(karate, sets.overlapping | sets.neighbors)
            for policy in (SKIP_BRIDGES, HALT_ON_BRIDGE):
                pruned = prune_low_weight_edges(sub, policy)
                assert count_components(pruned.labels, [(u, v) for u, v, _ in pruned.edges()]) == \
                    count_components(sub.labels, [(u, v) for u, v, _ in sub.edges()])
