import random

import pytest

from hinquery.generate import GenConfig, generate, sample_general_query
from hinquery.model import DataGraph, QueryGraph, Schema
from hinquery.oracle import (
    OracleCapacityError,
    bfs_closeness,
    dijkstra_costs,
    exact_closeness,
    exact_general_topk,
    exact_match_score,
    exact_star_topk,
)
from hinquery.scoring import ScoringParams

P = ScoringParams(alpha=0.5, beta=0.2)

CHAIN_SCHEMA = Schema.make(["A", "I", "S"], ["A"], ["I"], [("A", "I")])


def chain_graph():
    # a - i1 -> i2 - s, plus an isolated node
    return DataGraph(
        nodes=[(0, "A", "a"), (1, "I", "i1"), (2, "I", "i2"),
               (3, "S", "s"), (4, "S", "lonely")],
        normal_edges=[(0, 1), (2, 3)],
        hierarchy_edges=[(1, 2)])


class TestExactCloseness:
    def test_neighbor_costs_one_hop(self):
        got = exact_closeness(chain_graph(), CHAIN_SCHEMA, 0, P)
        assert got[1] == (pytest.approx(1.0), pytest.approx(0.5))

    def test_source_scores_one(self):
        got = exact_closeness(chain_graph(), CHAIN_SCHEMA, 0, P)
        assert got[0] == (0.0, 1.0)

    def test_discounted_hop_on_paired_hierarchy(self):
        got = exact_closeness(chain_graph(), CHAIN_SCHEMA, 0, P)
        cost, r = got[2]
        assert cost == pytest.approx(1.8, abs=1e-12)
        assert r == pytest.approx(0.2871745887492587, abs=1e-12)

    def test_mixed_path(self):
        got = exact_closeness(chain_graph(), CHAIN_SCHEMA, 0, P)
        cost, r = got[3]
        assert cost == pytest.approx(2.8, abs=1e-12)
        assert r == pytest.approx(0.14359, abs=1e-5)
        assert r == pytest.approx(0.1435872943746294, abs=1e-12)

    def test_unreachable_absent(self):
        got = exact_closeness(chain_graph(), CHAIN_SCHEMA, 0, P)
        assert 4 not in got

    def test_source_type_decides_discount(self):
        # from the plain S node nothing is discounted
        got = exact_closeness(chain_graph(), CHAIN_SCHEMA, 3, P)
        assert got[0][0] == pytest.approx(3.0, abs=1e-12)

    def test_relabeling_nodes_relabels_scores(self):
        graph, schema = generate(GenConfig(n=120, avg_degree=5.0, seed=3))
        ids = [i for i, _, _ in graph.nodes]
        rng = random.Random(9)
        shuffled = list(ids)
        rng.shuffle(shuffled)
        perm = dict(zip(ids, shuffled))
        permuted = DataGraph(
            nodes=[(perm[i], t, l) for i, t, l in graph.nodes],
            normal_edges=[(perm[u], perm[v]) for u, v in graph.normal_edges],
            hierarchy_edges=[(perm[u], perm[v]) for u, v in graph.hierarchy_edges])
        src = ids[0]
        base = exact_closeness(graph, schema, src, P)
        moved = exact_closeness(permuted, schema, perm[src], P)
        assert set(moved) == {perm[n] for n in base}
        for n, (cost, r) in base.items():
            assert moved[perm[n]][1] == pytest.approx(r, abs=1e-12)


class TestBfsCloseness:
    def test_matches_dijkstra_when_discount_off(self):
        graph, schema = generate(GenConfig(n=200, avg_degree=6.0, seed=5))
        src = graph.nodes[0][0]
        hops = bfs_closeness(graph, src, 0.5)
        costs = dijkstra_costs(graph, src, schema.inherited_types, beta=0.0)
        assert set(hops) == set(costs)
        for n, r in hops.items():
            assert r == pytest.approx(0.5 ** costs[n], abs=1e-15)


class TestExactStar:
    def test_running_example_top(self, running_example, running_query):
        res = exact_star_topk(running_example.graph, running_example.schema,
                              running_query, k=3, params=P)
        assert [n for n, _ in res.ranking] == [2, 4, 5]
        assert res.ranking[0][1] == pytest.approx(0.05440941020600775, abs=1e-12)

    def test_anchors_never_rank(self, running_example, running_query):
        res = exact_star_topk(running_example.graph, running_example.schema,
                              running_query, k=10, params=P)
        assert 0 not in dict(res.ranking) and 1 not in dict(res.ranking)

    def test_exclude(self, running_example, running_query):
        res = exact_star_topk(running_example.graph, running_example.schema,
                              running_query, k=1, params=P, exclude=(2,))
        assert res.ranking[0][0] == 4


GEN_SCHEMA = Schema.make(["A", "I"], ["A"], ["I"], [("A", "I")])


def triangle_graph():
    # anchor a next to i1; i1, i2, i3 mutually connected
    return DataGraph(
        nodes=[(0, "A", "a"), (1, "I", "i1"), (2, "I", "i2"), (3, "I", "i3")],
        normal_edges=[(0, 1), (1, 2), (2, 3), (1, 3)],
        hierarchy_edges=[])


PAIR_QUERY = QueryGraph(
    specific_nodes=[("v", "A", "a")],
    query_nodes=[("x", "I"), ("y", "I")],
    edges=[("v", "x"), ("x", "y")])


class TestExactGeneral:
    def test_enumerates_all_injective_pairs(self):
        matches = exact_general_topk(triangle_graph(), GEN_SCHEMA, PAIR_QUERY,
                                     k=10, params=P)
        assert len(matches) == 6
        pairs = {tuple(dict(m.assignment)[q] for q in ("x", "y")) for m in matches}
        assert pairs == {(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)}
        for m in matches:
            vals = [n for _, n in m.assignment]
            assert len(set(vals)) == len(vals)

    def test_scores_sorted_desc_then_assignment(self):
        matches = exact_general_topk(triangle_graph(), GEN_SCHEMA, PAIR_QUERY,
                                     k=10, params=P)
        keys = [(-m.score, tuple(n for _, n in m.assignment)) for m in matches]
        assert keys == sorted(keys)

    def test_best_pair(self):
        matches = exact_general_topk(triangle_graph(), GEN_SCHEMA, PAIR_QUERY,
                                     k=1, params=P)
        # x=i1 touches the anchor; ties between y=i2 / y=i3 break to i2
        assert dict(matches[0].assignment) == {"x": 1, "y": 2}
        assert matches[0].score == pytest.approx(0.5 + 0.5, abs=1e-12)

    def test_capacity_guard(self):
        with pytest.raises(OracleCapacityError, match="too large"):
            exact_general_topk(triangle_graph(), GEN_SCHEMA, PAIR_QUERY,
                               k=1, params=P, cap=5)


class TestExactMatchScore:
    def test_rescores_enumerated_matches(self):
        matches = exact_general_topk(triangle_graph(), GEN_SCHEMA, PAIR_QUERY,
                                     k=10, params=P)
        for m in matches:
            got = exact_match_score(triangle_graph(), GEN_SCHEMA, PAIR_QUERY,
                                    dict(m.assignment), params=P)
            assert got == pytest.approx(m.score, abs=1e-12)

    def test_unreachable_edge_contributes_nothing(self):
        graph = DataGraph(
            nodes=[(0, "A", "a"), (1, "I", "i1"), (2, "I", "island")],
            normal_edges=[(0, 1)],
            hierarchy_edges=[])
        got = exact_match_score(graph, GEN_SCHEMA, PAIR_QUERY,
                                {"x": 1, "y": 2}, params=P)
        assert got == pytest.approx(0.5, abs=1e-12)

    def test_rescores_generated_matches(self):
        graph, schema = generate(GenConfig(n=80, avg_degree=4.0, seed=11))
        query = sample_general_query(graph, schema, rng=random.Random(11),
                                     n_spec=2, n_qnodes=2)
        for m in exact_general_topk(graph, schema, query, k=5, params=P):
            got = exact_match_score(graph, schema, query,
                                    dict(m.assignment), params=P)
            assert got == pytest.approx(m.score, abs=1e-12)
