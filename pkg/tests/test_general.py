import random

import pytest

from _util import assert_matches_match
from hinquery.general import (
    CandidateLists,
    GeneralStats,
    candidate_selection,
    decompose,
    general_topk,
)
from hinquery.generate import GenConfig, generate, sample_general_query
from hinquery.model import DataGraph, QueryGraph, Schema
from hinquery.oracle import exact_general_topk
from hinquery.scoring import ScoringParams
from hinquery.star import star_topk

P = ScoringParams(alpha=0.5, beta=0.2)

SCHEMA = Schema.make(["A", "I"], ["A"], ["I"], [("A", "I")])


class TestDecompose:
    def test_one_star_per_query_node(self):
        q = QueryGraph(
            specific_nodes=[("v1", "A", "a"), ("v2", "A", "b"), ("w", "A", "c")],
            query_nodes=[("q1", "I"), ("q2", "I")],
            edges=[("v1", "q1"), ("v2", "q1"), ("w", "q2"), ("q1", "q2")])
        dec = decompose(q, SCHEMA)
        assert [s.center for s in dec.stars] == ["q1", "q2"]
        assert dec.stars[0].query.specific_ids() == ("v1", "v2")
        assert dec.stars[1].query.specific_ids() == ("w",)
        assert dec.deferred_edges == [("q1", "q2")]
        assert dec.anchor_edges == []
        assert dec.anchorless == ()

    def test_star_queries_are_wellformed_stars(self):
        q = QueryGraph(
            specific_nodes=[("v1", "A", "a"), ("v2", "A", "b")],
            query_nodes=[("q1", "I"), ("q2", "I")],
            edges=[("v1", "q1"), ("v2", "q2"), ("q1", "q2")])
        dec = decompose(q, SCHEMA)
        star = dec.stars[0].query
        assert star.query_nodes == (("q1", "I"),)
        assert star.edges == (("q1", "v1"),)

    def test_anchorless_center_flagged(self):
        q = QueryGraph(
            specific_nodes=[("v1", "A", "a")],
            query_nodes=[("q1", "I"), ("q2", "I")],
            edges=[("v1", "q1"), ("q1", "q2")])
        dec = decompose(q, SCHEMA)
        assert dec.anchorless == ("q2",)
        assert dec.stars[1].query.specific_nodes == ()

    def test_anchor_edges_split_out(self):
        q = QueryGraph(
            specific_nodes=[("v1", "A", "a"), ("v2", "A", "b")],
            query_nodes=[("q1", "I")],
            edges=[("v1", "q1"), ("v1", "v2"), ("v2", "q1")])
        dec = decompose(q, SCHEMA)
        assert dec.anchor_edges == [("v1", "v2")]
        assert dec.deferred_edges == []


def stub_query():
    return QueryGraph(
        specific_nodes=[("s", "A", "x")],
        query_nodes=[("a", "I"), ("b", "I")],
        edges=[("s", "a"), ("a", "b")])


def tiny_graph():
    return DataGraph(
        nodes=[(1, "A", "x"), (10, "I", "i10"), (11, "I", "i11"),
               (20, "I", "i20"), (21, "I", "i21")],
        normal_edges=[(1, 10)], hierarchy_edges=[])


class TestCandidateSelection:
    def test_dominant_pair_short_circuits(self):
        lists = CandidateLists(lists={
            "a": [(10, 0.9), (11, 0.1)],
            "b": [(20, 0.85), (21, 0.2)],
        })
        stats = GeneralStats()
        matches = candidate_selection(
            lists, [("a", "b")], tiny_graph(), SCHEMA, P, k=1,
            query=stub_query(), stats=stats,
            edge_closeness=lambda x, y, dk: 0.5,
            discover=lambda *args: [])
        assert len(matches) == 1
        assert dict(matches[0].assignment) == {"a": 10, "b": 20}
        assert matches[0].score == pytest.approx(0.9 + 0.85 + 0.5, abs=1e-12)
        # both level tails fall to the optimistic bound
        assert stats.bnb_expanded == 2
        assert stats.bnb_pruned == 2

    def test_shared_top_candidate_forces_injective_choice(self):
        lists = CandidateLists(lists={
            "a": [(10, 0.9), (11, 0.8)],
            "b": [(10, 0.85), (11, 0.1)],
        })
        matches = candidate_selection(
            lists, [], tiny_graph(), SCHEMA, P, k=1,
            query=stub_query(), edge_closeness=lambda x, y, dk: 0.0,
            discover=lambda *args: [])
        assert dict(matches[0].assignment) == {"a": 11, "b": 10}
        assert matches[0].score == pytest.approx(0.8 + 0.85, abs=1e-12)
        vals = [n for _, n in matches[0].assignment]
        assert len(set(vals)) == len(vals)

    def test_discovery_fills_anchorless_level(self):
        lists = CandidateLists(lists={"a": [(10, 0.9)]})
        pair = {(10, 30): 0.5, (10, 31): 0.7}
        matches = candidate_selection(
            lists, [("a", "b")], tiny_graph(), SCHEMA, P, k=2,
            query=stub_query(), anchorless=("b",), k_s=2,
            edge_closeness=lambda x, y, dk: pair.get((x, y), 0.0),
            discover=lambda x, dk, t, cap, bar: [(30, 0.5), (31, 0.7)])
        assert [dict(m.assignment) for m in matches] == [
            {"a": 10, "b": 31}, {"a": 10, "b": 30}]
        assert matches[0].score == pytest.approx(1.6, abs=1e-12)
        assert matches[1].score == pytest.approx(1.4, abs=1e-12)

    def test_discovery_padded_with_undiscovered_nodes(self):
        # discovery sees nothing; the level still offers typed nodes
        lists = CandidateLists(lists={"a": [(10, 0.9)]})
        matches = candidate_selection(
            lists, [("a", "b")], tiny_graph(), SCHEMA, P, k=1,
            query=stub_query(), anchorless=("b",), k_s=4,
            edge_closeness=lambda x, y, dk: 0.0,
            discover=lambda *args: [])
        assert len(matches) == 1
        a_node = dict(matches[0].assignment)["a"]
        b_node = dict(matches[0].assignment)["b"]
        assert a_node == 10 and b_node in {11, 20, 21}

    def test_results_ordered_score_then_assignment(self):
        lists = CandidateLists(lists={
            "a": [(10, 0.5), (11, 0.5)],
            "b": [(20, 0.5), (21, 0.5)],
        })
        matches = candidate_selection(
            lists, [], tiny_graph(), SCHEMA, P, k=4,
            query=stub_query(), edge_closeness=lambda x, y, dk: 0.0,
            discover=lambda *args: [])
        assert [dict(m.assignment) for m in matches] == [
            {"a": 10, "b": 20}, {"a": 10, "b": 21},
            {"a": 11, "b": 20}, {"a": 11, "b": 21}]


class TestStarDegeneration:
    def test_single_query_node_delegates_to_star_engine(self, running_example, running_query):
        res = general_topk(running_example.graph, running_example.schema,
                           running_query, k=5, params=P)
        want = star_topk(running_example.graph, running_example.schema,
                         running_query, k=5, params=P)
        assert [(dict(m.assignment)["q"], m.score) for m in res.matches] == want.ranking


def general_instance(seed, n=120, n_spec=2, n_qnodes=2):
    graph, schema = generate(GenConfig(n=n, avg_degree=5.0, seed=seed))
    rng = random.Random(seed * 6151 + 7)
    query = sample_general_query(graph, schema, rng, n_spec=n_spec,
                                 n_qnodes=n_qnodes)
    return graph, schema, query


class TestAgainstOracle:
    @pytest.mark.parametrize("seed", range(1, 13))
    def test_exhaustive_lists_match_enumeration(self, seed):
        n_spec = [1, 2, 3][seed % 3]  # n_spec < n_qnodes leaves a node anchorless
        graph, schema, query = general_instance(seed, n_spec=n_spec)
        k = [1, 3, 5][seed % 3]
        res = general_topk(graph, schema, query, k=k, k_s="all", params=P)
        want = exact_general_topk(graph, schema, query, k=k, params=P)
        assert_matches_match(res.matches, want)

    def test_three_query_nodes(self):
        graph, schema, query = general_instance(31, n=80, n_spec=3, n_qnodes=3)
        res = general_topk(graph, schema, query, k=3, k_s="all", params=P)
        want = exact_general_topk(graph, schema, query, k=3, params=P)
        assert_matches_match(res.matches, want)

    def test_all_matches_injective(self):
        graph, schema, query = general_instance(5)
        res = general_topk(graph, schema, query, k=5, k_s="all", params=P)
        for m in res.matches:
            vals = [n for _, n in m.assignment]
            assert len(set(vals)) == len(vals)


class TestListDepth:
    def test_default_doubles_k(self):
        graph, schema, query = general_instance(3)
        res = general_topk(graph, schema, query, k=4, params=P)
        assert res.k_s == 8

    def test_best_score_monotone_in_depth(self):
        for seed in (2, 6, 9):
            graph, schema, query = general_instance(seed)
            scores = []
            for k_s in (3, 6, "all"):
                res = general_topk(graph, schema, query, k=3, k_s=k_s, params=P)
                scores.append(res.matches[0].score if res.matches else 0.0)
            assert scores[0] <= scores[1] + 1e-12
            assert scores[1] <= scores[2] + 1e-12

    def test_depth_below_k_rejected(self):
        graph, schema, query = general_instance(3)
        with pytest.raises(ValueError):
            general_topk(graph, schema, query, k=5, k_s=3, params=P)

    def test_k_must_be_positive(self):
        graph, schema, query = general_instance(3)
        with pytest.raises(ValueError):
            general_topk(graph, schema, query, k=0, params=P)


class TestDeterminism:
    def test_identical_reruns(self):
        graph, schema, query = general_instance(8)
        a = general_topk(graph, schema, query, k=4, params=P)
        b = general_topk(graph, schema, query, k=4, params=P)
        assert [(m.assignment, m.score) for m in a.matches] == \
            [(m.assignment, m.score) for m in b.matches]
        assert a.stats.bnb_expanded == b.stats.bnb_expanded
        assert a.stats.bnb_pruned == b.stats.bnb_pruned

    def test_stats_dict_shape(self):
        graph, schema, query = general_instance(8)
        d = general_topk(graph, schema, query, k=4, params=P).stats.as_dict()
        assert {"decomposeSeconds", "starSeconds", "selectSeconds",
                "bnbExpanded", "bnbPruned", "starStats"} <= set(d)
