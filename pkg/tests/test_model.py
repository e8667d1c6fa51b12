import pytest

from hinquery.model import (
    AnchorError,
    Arity,
    DataGraph,
    Inheritance,
    QueryError,
    QueryGraph,
    Schema,
    SchemaError,
    classify_query,
    resolve_anchors,
    validate_graph,
)

SEC = Schema.make(
    ["Vulnerability", "Technology", "Product", "Family", "Site", "Workgroup"],
    ["Vulnerability", "Technology"],
    ["Product", "Family"],
    [("Vulnerability", "Product"), ("Vulnerability", "Family"),
     ("Technology", "Product"), ("Technology", "Family")],
)


def graph(nodes, normal=(), hierarchy=()):
    return DataGraph(nodes=tuple(nodes), normal_edges=tuple(normal),
                     hierarchy_edges=tuple(hierarchy))


class TestSchema:
    def test_membership_helpers(self):
        assert SEC.is_pair("Vulnerability", "Product")
        assert not SEC.is_pair("Vulnerability", "Site")
        assert SEC.inherited_for("Technology") == {"Product", "Family"}
        assert SEC.inherited_for("Site") == frozenset()

    def test_discounts_between_unions_endpoint_pairs(self):
        assert SEC.discounts_between("Vulnerability", "Site") == {"Product", "Family"}
        assert SEC.discounts_between("Site", "Workgroup") == frozenset()

    def test_subset_must_be_declared(self):
        with pytest.raises(SchemaError):
            Schema.make(["A"], ["A"], ["B"], [])

    def test_attaching_inherited_disjoint(self):
        with pytest.raises(SchemaError):
            Schema.make(["A", "B"], ["A", "B"], ["B"], [])

    def test_pair_direction_enforced(self):
        with pytest.raises(SchemaError):
            Schema.make(["A", "B"], ["A"], ["B"], [("B", "A")])

    def test_empty_pairs_allowed(self):
        s = Schema.make(["A", "B"], ["A"], ["B"], [])
        assert s.inherited_for("A") == frozenset()

    def test_dict_round_trip(self):
        again = Schema.from_dict(SEC.to_dict())
        assert again == SEC

    def test_from_dict_rejects_garbage(self):
        with pytest.raises(SchemaError):
            Schema.from_dict({"nodeTypes": ["A"]})


class TestDataGraph:
    def test_indexing(self):
        g = graph([(3, "Site", "S"), (1, "Site", "T"), (2, "Product", "P")])
        assert g.type_of(3) == "Site"
        assert g.label_of(2) == "P"
        assert g.nodes_of_type("Site") == (1, 3)
        assert g.nodes_of_type("Family") == ()
        assert g.find_nodes("Site", "T") == (1,)
        assert len(g) == 3

    def test_hierarchy_types(self):
        g = graph([(0, "Product", "a"), (1, "Product", "b"), (2, "Site", "s")],
                  hierarchy=[(0, 1)])
        assert g.hierarchy_types() == {"Product"}


class TestValidateGraph:
    def test_clean_running_example(self, running_example):
        assert validate_graph(running_example.graph, running_example.schema) == []

    def test_duplicate_node(self):
        g = graph([(1, "Site", "a"), (1, "Site", "b")])
        codes = [v.code for v in validate_graph(g, SEC)]
        assert "duplicate-node" in codes

    def test_unknown_type(self):
        g = graph([(1, "Quasar", "a")])
        v = validate_graph(g, SEC)
        assert [x.code for x in v] == ["unknown-type"]
        assert v[0].subjects == (1,)

    def test_dangling_edge(self):
        g = graph([(1, "Site", "a")], normal=[(1, 9)])
        assert [x.code for x in validate_graph(g, SEC)] == ["dangling-edge"]

    def test_self_loop(self):
        g = graph([(1, "Site", "a")], normal=[(1, 1)])
        assert [x.code for x in validate_graph(g, SEC)] == ["self-loop"]

    def test_duplicate_edge_across_kinds(self):
        g = graph([(1, "Product", "a"), (2, "Product", "b")],
                  normal=[(1, 2)], hierarchy=[(1, 2)])
        assert "duplicate-edge" in [x.code for x in validate_graph(g, SEC)]

    def test_hierarchy_edge_between_types_flagged(self):
        g = graph([(1, "Product", "a"), (2, "Site", "b")], hierarchy=[(1, 2)])
        v = validate_graph(g, SEC)
        assert [x.code for x in v] == ["hierarchy-cross-type"]
        assert "Product" in v[0].message and "Site" in v[0].message

    def test_hierarchy_on_non_inherited_type(self):
        g = graph([(1, "Site", "a"), (2, "Site", "b")], hierarchy=[(1, 2)])
        assert [x.code for x in validate_graph(g, SEC)] == ["hierarchy-not-inherited"]

    def test_hierarchy_cycle(self):
        g = graph([(1, "Product", "a"), (2, "Product", "b"), (3, "Product", "c")],
                  hierarchy=[(1, 2), (2, 3), (3, 1)])
        v = [x for x in validate_graph(g, SEC) if x.code == "hierarchy-cycle"]
        assert len(v) == 1
        assert set(v[0].subjects) == {1, 2, 3}

    def test_multiple_violations_reported_together(self):
        g = graph([(1, "Quasar", "a"), (1, "Site", "b")], normal=[(1, 1), (2, 9)])
        codes = {x.code for x in validate_graph(g, SEC)}
        assert {"unknown-type", "duplicate-node", "self-loop", "dangling-edge"} <= codes


class TestClassifyQuery:
    def test_star_hierarchical(self, running_example, running_query):
        cls = classify_query(running_query, running_example.schema)
        assert cls.arity is Arity.STAR
        assert cls.inheritance is Inheritance.HIERARCHICAL

    def test_star_mixed_when_one_pair_missing(self, running_query):
        # drop (Technology, Product): the technology anchor loses its pair
        schema = Schema.make(
            SEC.node_types, SEC.attaching_types, SEC.inherited_types,
            SEC.inheritance_pairs - {("Technology", "Product")})
        cls = classify_query(running_query, schema)
        assert cls.inheritance is Inheritance.MIXED

    def test_star_non_hierarchical(self, running_query):
        schema = Schema.make(SEC.node_types, SEC.attaching_types,
                             SEC.inherited_types, [])
        cls = classify_query(running_query, schema)
        assert cls.inheritance is Inheritance.NON_HIERARCHICAL

    def test_general_arity(self):
        q = QueryGraph(
            specific_nodes=[("v", "Vulnerability", "V1")],
            query_nodes=[("p", "Product"), ("f", "Family")],
            edges=[("v", "p"), ("p", "f")])
        assert classify_query(q, SEC).arity is Arity.GENERAL

    def test_pairing_is_per_adjacent_query_node(self):
        # anchor adjacent only to an unpaired query node type
        q = QueryGraph(
            specific_nodes=[("v", "Vulnerability", "V1")],
            query_nodes=[("s", "Site")],
            edges=[("v", "s")])
        assert classify_query(q, SEC).inheritance is Inheritance.NON_HIERARCHICAL

    def test_duplicate_ids_rejected(self):
        q = QueryGraph(specific_nodes=[("x", "Vulnerability", "V1")],
                       query_nodes=[("x", "Product")], edges=[])
        with pytest.raises(QueryError):
            classify_query(q, SEC)

    def test_specifics_required(self):
        q = QueryGraph(specific_nodes=[], query_nodes=[("p", "Product")], edges=[])
        with pytest.raises(QueryError):
            classify_query(q, SEC)

    def test_query_nodes_required(self):
        q = QueryGraph(specific_nodes=[("v", "Vulnerability", "V1")],
                       query_nodes=[], edges=[])
        with pytest.raises(QueryError):
            classify_query(q, SEC)

    def test_unknown_edge_endpoint(self):
        q = QueryGraph(specific_nodes=[("v", "Vulnerability", "V1")],
                       query_nodes=[("p", "Product")], edges=[("v", "zz")])
        with pytest.raises(QueryError):
            classify_query(q, SEC)

    def test_disconnected_query(self):
        q = QueryGraph(
            specific_nodes=[("v", "Vulnerability", "V1")],
            query_nodes=[("p", "Product"), ("f", "Family")],
            edges=[("v", "p")])
        with pytest.raises(QueryError, match="connected"):
            classify_query(q, SEC)

    def test_self_loop_edge(self):
        q = QueryGraph(specific_nodes=[("v", "Vulnerability", "V1")],
                       query_nodes=[("p", "Product")], edges=[("p", "p")])
        with pytest.raises(QueryError):
            classify_query(q, SEC)


class TestResolveAnchors:
    def test_running_example(self, running_example, running_query):
        got = resolve_anchors(running_query, running_example.graph)
        assert got == {"v": 0, "t": 1}

    def test_missing_label(self, running_example):
        q = QueryGraph(specific_nodes=[("v", "Vulnerability", "NOPE")],
                       query_nodes=[("p", "Product")], edges=[("v", "p")])
        with pytest.raises(AnchorError) as exc:
            resolve_anchors(q, running_example.graph)
        assert exc.value.query_id == "v"

    def test_ambiguous_label(self):
        g = graph([(1, "Site", "dup"), (2, "Site", "dup")])
        q = QueryGraph(specific_nodes=[("s", "Site", "dup")],
                       query_nodes=[("p", "Product")], edges=[("s", "p")])
        with pytest.raises(AnchorError) as exc:
            resolve_anchors(q, g)
        assert set(exc.value.candidates) == {1, 2}


class TestQueryGraph:
    def test_dict_round_trip(self, running_query):
        again = QueryGraph.from_dict(running_query.to_dict())
        assert again.specific_nodes == running_query.specific_nodes
        assert again.query_nodes == running_query.query_nodes
        assert again.edges == running_query.edges

    def test_neighbors(self, running_query):
        assert set(running_query.neighbors("q")) == {"v", "t"}

    def test_type_of_unknown_id(self, running_query):
        with pytest.raises(QueryError):
            running_query.type_of("nope")
