"""Graph and query data model.

A data graph mixes two edge kinds: normal (undirected) edges and hierarchy
(directed, parent to child) edges. Hierarchy edges only connect nodes of the
same type, and that type must be declared inherited in the schema. Queries
are small graphs of specific nodes (pinned to concrete data nodes by type and
label) and query nodes (typed unknowns to solve for).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum


class HinQueryError(Exception):
    """Base class for errors raised by this package."""


class SchemaError(HinQueryError):
    pass


class QueryError(HinQueryError):
    pass


class AnchorError(QueryError):
    """A specific node could not be pinned to exactly one data node."""

    def __init__(self, message, query_id=None, candidates=()):
        super().__init__(message)
        self.query_id = query_id
        self.candidates = tuple(candidates)


@dataclass(frozen=True)
class Schema:
    """Node type declarations plus the property inheritance pairs.

    A pair (a, i) declares that nodes of attaching type ``a`` (say, a
    vulnerability) are inherited along the hierarchy of inherited type ``i``
    (say, a product version tree).
    """

    node_types: frozenset
    attaching_types: frozenset
    inherited_types: frozenset
    inheritance_pairs: frozenset  # of (attaching_type, inherited_type)

    def __post_init__(self):
        for name, sub in (("attachingTypes", self.attaching_types),
                          ("inheritedTypes", self.inherited_types)):
            unknown = sub - self.node_types
            if unknown:
                raise SchemaError(f"{name} not declared in nodeTypes: {sorted(unknown)}")
        overlap = self.attaching_types & self.inherited_types
        if overlap:
            raise SchemaError(f"types both attaching and inherited: {sorted(overlap)}")
        for pair in self.inheritance_pairs:
            if len(pair) != 2:
                raise SchemaError(f"malformed inheritance pair: {pair!r}")
            a, i = pair
            if a not in self.attaching_types or i not in self.inherited_types:
                raise SchemaError(f"inheritance pair ({a}, {i}) is not attaching x inherited")

    @staticmethod
    def make(node_types, attaching_types, inherited_types, inheritance_pairs):
        return Schema(
            node_types=frozenset(node_types),
            attaching_types=frozenset(attaching_types),
            inherited_types=frozenset(inherited_types),
            inheritance_pairs=frozenset(tuple(p) for p in inheritance_pairs),
        )

    def is_pair(self, attaching_type, inherited_type):
        return (attaching_type, inherited_type) in self.inheritance_pairs

    def inherited_for(self, attaching_type):
        """Inherited types paired with the given attaching type."""
        return frozenset(i for a, i in self.inheritance_pairs if a == attaching_type)

    def discounts_between(self, type_a, type_b):
        """Hierarchy types discounted on a path between nodes of the two
        given types: those forming a pair with either endpoint type."""
        return self.inherited_for(type_a) | self.inherited_for(type_b)

    def to_dict(self):
        return {
            "nodeTypes": sorted(self.node_types),
            "attachingTypes": sorted(self.attaching_types),
            "inheritedTypes": sorted(self.inherited_types),
            "inheritancePairs": sorted(list(p) for p in self.inheritance_pairs),
        }

    @staticmethod
    def from_dict(doc):
        try:
            return Schema.make(
                doc["nodeTypes"],
                doc["attachingTypes"],
                doc["inheritedTypes"],
                doc["inheritancePairs"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad schema document: {exc}") from exc


@dataclass
class DataGraph:
    """Node and edge lists. Construction is permissive; use validate_graph to
    get a violation report before handing the graph to an engine.

    nodes: (id, type, label) triples, ids are ints.
    normal_edges: undirected pairs.
    hierarchy_edges: directed (parent, child) pairs.
    """

    nodes: tuple
    normal_edges: tuple
    hierarchy_edges: tuple

    def __post_init__(self):
        self.nodes = tuple((int(i), t, l) for i, t, l in self.nodes)
        self.normal_edges = tuple((int(u), int(v)) for u, v in self.normal_edges)
        self.hierarchy_edges = tuple((int(u), int(v)) for u, v in self.hierarchy_edges)
        self._by_id = None
        self._by_type = None

    def __len__(self):
        return len(self.nodes)

    def _index(self):
        if self._by_id is None:
            self._by_id = {i: (t, l) for i, t, l in self.nodes}
        return self._by_id

    def has_node(self, node_id):
        return node_id in self._index()

    def type_of(self, node_id):
        return self._index()[node_id][0]

    def label_of(self, node_id):
        return self._index()[node_id][1]

    def nodes_of_type(self, node_type):
        """Ids of all nodes of the given type, ascending."""
        if self._by_type is None:
            by_type = {}
            for i, t, _ in self.nodes:
                by_type.setdefault(t, []).append(i)
            self._by_type = {t: tuple(sorted(ids)) for t, ids in by_type.items()}
        return self._by_type.get(node_type, ())

    def find_nodes(self, node_type, label):
        return tuple(i for i, t, l in self.nodes if t == node_type and l == label)

    def hierarchy_types(self):
        """Node types that actually carry at least one hierarchy edge."""
        idx = self._index()
        return frozenset(idx[u][0] for u, _ in self.hierarchy_edges if u in idx)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    subjects: tuple = ()


def validate_graph(graph, schema):
    """Check graph well-formedness against the schema.

    Returns a list of Violation records; an empty list means the graph is
    clean. Violations are data, not exceptions, so callers can report several
    problems at once.
    """
    out = []
    seen_ids = set()
    for i, t, _ in graph.nodes:
        if i in seen_ids:
            out.append(Violation("duplicate-node", f"node id {i} declared more than once", (i,)))
        seen_ids.add(i)
        if t not in schema.node_types:
            out.append(Violation("unknown-type", f"node {i} has type {t!r} not in schema", (i,)))

    idx = {i: t for i, t, _ in graph.nodes}
    seen_pairs = {}
    for kind, edges in (("normal", graph.normal_edges), ("hierarchy", graph.hierarchy_edges)):
        for u, v in edges:
            missing = [w for w in (u, v) if w not in idx]
            if missing:
                out.append(Violation("dangling-edge",
                                     f"{kind} edge ({u}, {v}) references unknown node(s) {missing}",
                                     (u, v)))
                continue
            if u == v:
                out.append(Violation("self-loop", f"{kind} edge ({u}, {v}) is a self loop", (u, v)))
                continue
            key = (min(u, v), max(u, v))
            if key in seen_pairs:
                out.append(Violation("duplicate-edge",
                                     f"more than one edge between nodes {key[0]} and {key[1]}",
                                     key))
            seen_pairs[key] = kind

    for u, v in graph.hierarchy_edges:
        if u not in idx or v not in idx or u == v:
            continue
        if idx[u] != idx[v]:
            out.append(Violation("hierarchy-cross-type",
                                 f"hierarchy edge ({u}, {v}) connects types {idx[u]!r} and {idx[v]!r}",
                                 (u, v)))
        elif idx[u] not in schema.inherited_types:
            out.append(Violation("hierarchy-not-inherited",
                                 f"hierarchy edge ({u}, {v}) on non-inherited type {idx[u]!r}",
                                 (u, v)))

    out.extend(_hierarchy_cycles(graph, idx))
    return out


def _hierarchy_cycles(graph, idx):
    # Kahn peel per type; whatever survives sits on a cycle.
    children = {}
    indeg = {}
    for u, v in graph.hierarchy_edges:
        if u not in idx or v not in idx or u == v or idx[u] != idx[v]:
            continue
        children.setdefault(u, []).append(v)
        indeg[v] = indeg.get(v, 0) + 1
        indeg.setdefault(u, 0)
    ready = deque(sorted(n for n, d in indeg.items() if d == 0))
    remaining = dict(indeg)
    while ready:
        n = ready.popleft()
        for c in children.get(n, ()):
            remaining[c] -= 1
            if remaining[c] == 0:
                ready.append(c)
    cyclic = sorted(n for n, d in remaining.items() if d > 0)
    if not cyclic:
        return []
    return [Violation("hierarchy-cycle",
                      f"hierarchy edges form a cycle through nodes {cyclic}",
                      tuple(cyclic))]


@dataclass
class QueryGraph:
    """specific_nodes: (query_id, type, label) triples pinned to data nodes.
    query_nodes: (query_id, type) pairs to solve for.
    edges: pairs of query ids."""

    specific_nodes: tuple
    query_nodes: tuple
    edges: tuple

    def __post_init__(self):
        self.specific_nodes = tuple((q, t, l) for q, t, l in self.specific_nodes)
        self.query_nodes = tuple((q, t) for q, t in self.query_nodes)
        self.edges = tuple((a, b) for a, b in self.edges)

    def specific_ids(self):
        return tuple(q for q, _, _ in self.specific_nodes)

    def query_ids(self):
        return tuple(q for q, _ in self.query_nodes)

    def type_of(self, query_id):
        for q, t, _ in self.specific_nodes:
            if q == query_id:
                return t
        for q, t in self.query_nodes:
            if q == query_id:
                return t
        raise QueryError(f"unknown query id {query_id!r}")

    def neighbors(self, query_id):
        out = []
        for a, b in self.edges:
            if a == query_id:
                out.append(b)
            elif b == query_id:
                out.append(a)
        return tuple(out)

    def to_dict(self):
        return {
            "specificNodes": [{"id": q, "type": t, "label": l} for q, t, l in self.specific_nodes],
            "queryNodes": [{"id": q, "type": t} for q, t in self.query_nodes],
            "edges": [[a, b] for a, b in self.edges],
        }

    @staticmethod
    def from_dict(doc):
        try:
            return QueryGraph(
                specific_nodes=tuple((n["id"], n["type"], n["label"]) for n in doc["specificNodes"]),
                query_nodes=tuple((n["id"], n["type"]) for n in doc["queryNodes"]),
                edges=tuple((a, b) for a, b in doc["edges"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise QueryError(f"bad query document: {exc}") from exc


class Arity(Enum):
    STAR = "star"
    GENERAL = "general"


class Inheritance(Enum):
    HIERARCHICAL = "hierarchical"
    MIXED = "mixed"
    NON_HIERARCHICAL = "non-hierarchical"


@dataclass(frozen=True)
class QueryClass:
    arity: Arity
    inheritance: Inheritance


def classify_query(query, schema):
    """Classify a query along two axes and validate its shape.

    Arity is star when there is exactly one query node. Inheritance is
    hierarchical when every specific node forms an inheritance pair with some
    adjacent query node, mixed when only some do, non-hierarchical when none
    do. Raises QueryError for malformed or disconnected queries.
    """
    ids = list(query.specific_ids()) + list(query.query_ids())
    if len(set(ids)) != len(ids):
        raise QueryError("query ids must be unique across specific and query nodes")
    if not query.specific_nodes:
        raise QueryError("query must contain at least one specific node")
    if not query.query_nodes:
        raise QueryError("query must contain at least one query node")
    known = set(ids)
    for a, b in query.edges:
        if a not in known or b not in known:
            raise QueryError(f"query edge ({a!r}, {b!r}) references unknown query id")
        if a == b:
            raise QueryError(f"query edge ({a!r}, {b!r}) is a self loop")
    if not _query_connected(query, known):
        raise QueryError("query graph must be connected")

    query_types = dict(query.query_nodes)
    paired = 0
    for q, t, _ in query.specific_nodes:
        hit = any(
            n in query_types and schema.is_pair(t, query_types[n])
            for n in query.neighbors(q)
        )
        paired += bool(hit)
    if paired == len(query.specific_nodes):
        inh = Inheritance.HIERARCHICAL
    elif paired:
        inh = Inheritance.MIXED
    else:
        inh = Inheritance.NON_HIERARCHICAL
    arity = Arity.STAR if len(query.query_nodes) == 1 else Arity.GENERAL
    return QueryClass(arity=arity, inheritance=inh)


def _query_connected(query, known):
    if len(known) == 1:
        return True
    adj = {q: set() for q in known}
    for a, b in query.edges:
        adj[a].add(b)
        adj[b].add(a)
    start = next(iter(known))
    seen = {start}
    todo = deque([start])
    while todo:
        for n in adj[todo.popleft()]:
            if n not in seen:
                seen.add(n)
                todo.append(n)
    return seen == known


def resolve_anchors(query, graph):
    """Pin each specific node to its data node by (type, label).

    Returns {query_id: node_id}. Raises AnchorError when a specific node
    matches no data node or more than one.
    """
    out = {}
    for q, t, l in query.specific_nodes:
        hits = graph.find_nodes(t, l)
        if not hits:
            raise AnchorError(f"specific node {q!r}: no data node of type {t!r} with label {l!r}",
                              query_id=q)
        if len(hits) > 1:
            raise AnchorError(
                f"specific node {q!r}: label {l!r} is ambiguous for type {t!r} (nodes {list(hits)})",
                query_id=q, candidates=hits)
        out[q] = hits[0]
    return out


@dataclass(frozen=True)
class Match:
    """One result row: assignment of query ids to data node ids plus score."""

    assignment: tuple  # of (query_id, node_id), in query node order
    score: float

    def as_dict(self):
        return dict(self.assignment)
