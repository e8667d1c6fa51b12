"""Synthetic graph generation and query sampling.

Graphs are connected, with a configurable type mix (attaching + inherited +
other, e.g. "2+2+3" for seven types), a target average degree, and one or
more hierarchy forests per inherited type shaped by depth and fanout. All
randomness flows through a seeded random.Random, so a (config, seed) pair
always produces the identical graph, byte for byte once saved.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from .model import DataGraph, Schema


@dataclass(frozen=True)
class GenConfig:
    n: int = 1000
    type_mix: str = "2+2+3"     # attaching + inherited + other type counts
    avg_degree: float = 8.0
    hier_depth: int = 4         # max hops root to leaf in a hierarchy tree
    hier_fanout: int = 3
    seed: int = 0

    def type_counts(self):
        parts = self.type_mix.split("+")
        if len(parts) != 3:
            raise ValueError(f"type mix must look like '2+2+3', got {self.type_mix!r}")
        a, i, o = (int(p) for p in parts)
        if a < 1 or i < 1 or o < 0:
            raise ValueError("need at least one attaching and one inherited type")
        return a, i, o


def generate(config):
    """Build (graph, schema) for the config. Deterministic per seed."""
    rng = random.Random(config.seed)
    n_att, n_inh, n_other = config.type_counts()
    attaching = [f"A{j + 1}" for j in range(n_att)]
    inherited = [f"I{j + 1}" for j in range(n_inh)]
    other = [f"O{j + 1}" for j in range(n_other)]
    all_types = attaching + inherited + other

    schema = Schema.make(
        node_types=all_types,
        attaching_types=attaching,
        inherited_types=inherited,
        inheritance_pairs=[(a, i) for a in attaching for i in inherited],
    )

    assigned = rng.choices(all_types, k=config.n)
    counters = {t: 0 for t in all_types}
    nodes = []
    for i, t in enumerate(assigned):
        nodes.append((i, t, f"{t}-{counters[t]}"))
        counters[t] += 1

    hierarchy = []
    for t in inherited:
        members = [i for i, tt in enumerate(assigned) if tt == t]
        rng.shuffle(members)
        hierarchy.extend(_forest(members, config.hier_depth, config.hier_fanout))

    edge_set = {(min(u, v), max(u, v)) for u, v in hierarchy}
    normal = []

    # stitch components together so every query can reach every candidate
    parent = list(range(config.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            return True
        return False

    for u, v in hierarchy:
        union(u, v)
    components = {}
    for i in range(config.n):
        components.setdefault(find(i), []).append(i)
    groups = [components[r] for r in sorted(components)]
    for prev, nxt in zip(groups, groups[1:]):
        u = rng.choice(prev)
        v = rng.choice(nxt)
        normal.append((u, v))
        edge_set.add((min(u, v), max(u, v)))
        union(u, v)

    target = max(int(round(config.n * config.avg_degree / 2)), len(edge_set))
    attempts = 0
    while len(edge_set) < target and attempts < 30 * target:
        attempts += 1
        u = rng.randrange(config.n)
        v = rng.randrange(config.n)
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in edge_set:
            continue
        edge_set.add(key)
        normal.append((u, v))

    graph = DataGraph(nodes=tuple(nodes), normal_edges=tuple(normal),
                      hierarchy_edges=tuple(hierarchy))
    return graph, schema


def _forest(members, depth, fanout):
    """Breadth-first forest over members in the given order: each parent
    takes up to fanout children, no node deeper than depth hops."""
    edges = []
    if not members or depth < 1 or fanout < 1:
        return edges
    slots = deque()
    for node in members:
        while slots and (slots[0][2] >= fanout or slots[0][1] >= depth):
            slots.popleft()
        if slots:
            p, d, used = slots.popleft()
            edges.append((p, node))
            slots.appendleft((p, d, used + 1))
            slots.append((node, d + 1, 0))
        else:
            slots.append((node, 0, 0))
    return edges


def _hop_adjacency(graph):
    adj = getattr(graph, "_sampling_adj", None)
    if adj is None:
        adj = {i: [] for i, _, _ in graph.nodes}
        for u, v in graph.normal_edges:
            adj[u].append(v)
            adj[v].append(u)
        for u, v in graph.hierarchy_edges:
            adj[u].append(v)
            adj[v].append(u)
        graph._sampling_adj = adj
    return adj


def _near(graph, start, radius):
    """Nodes within radius hops of start, ascending id."""
    adj = _hop_adjacency(graph)
    seen = {start: 0}
    todo = deque([start])
    while todo:
        u = todo.popleft()
        if seen[u] == radius:
            continue
        for v in adj[u]:
            if v not in seen:
                seen[v] = seen[u] + 1
                todo.append(v)
    return sorted(seen)


def _pick_specs(graph, rng, pool_types, count, focal, radius=4):
    """Choose count distinct nodes whose types are in pool_types, preferring
    the focal node's neighborhood so scores are not all near zero."""
    want = set(pool_types)
    local = [i for i in _near(graph, focal, radius) if graph.type_of(i) in want]
    if len(local) < count:
        local = [i for i, t, _ in graph.nodes if t in want]
    if len(local) < count:
        return None
    return rng.sample(sorted(local), count)


def sample_star_query(graph, schema, rng, n_spec=2, kind="hierarchical"):
    """A star query around a random focal candidate.

    kind "hierarchical": all specifics of types paired with the target type;
    "mixed": at least one paired and one unpaired specific.
    """
    from .model import QueryGraph

    inh_types = [t for t in sorted(schema.inherited_types) if graph.nodes_of_type(t)]
    if not inh_types:
        raise ValueError("graph has no nodes of any inherited type")
    target = rng.choice(inh_types)
    focal = rng.choice(graph.nodes_of_type(target))

    paired = sorted(a for a in schema.attaching_types if schema.is_pair(a, target))
    unpaired = sorted(set(schema.node_types) - set(paired) - schema.inherited_types)

    if kind == "hierarchical":
        picks = _pick_specs(graph, rng, paired, n_spec, focal)
    elif kind == "mixed":
        if n_spec < 2:
            raise ValueError("mixed star query needs at least two specifics")
        first = _pick_specs(graph, rng, paired, 1, focal)
        rest = _pick_specs(graph, rng, unpaired, n_spec - 1, focal)
        picks = None if first is None or rest is None else first + rest
    else:
        raise ValueError(f"unknown star query kind {kind!r}")
    if picks is None:
        raise ValueError("graph too small to sample the requested query")

    specs = tuple((f"s{j}", graph.type_of(node), graph.label_of(node))
                  for j, node in enumerate(picks))
    return QueryGraph(
        specific_nodes=specs,
        query_nodes=(("q", target),),
        edges=tuple(("q", f"s{j}") for j in range(len(specs))),
    )


def sample_general_query(graph, schema, rng, n_spec=4, n_qnodes=2):
    """A chain of query nodes with specifics attached round-robin.

    Query node types are sampled from inherited and other types with enough
    nodes for an injective assignment; specifics are drawn from attaching
    types near a focal node.
    """
    from .model import QueryGraph

    if n_qnodes < 2:
        return sample_star_query(graph, schema, rng, n_spec=max(n_spec, 1))
    eligible = [t for t in sorted(schema.inherited_types)
                if len(graph.nodes_of_type(t)) >= n_qnodes + 1]
    if not eligible:
        raise ValueError("graph too small for a general query of this shape")
    qtypes = [rng.choice(eligible) for _ in range(n_qnodes)]
    focal_type = qtypes[0]
    focal = rng.choice(graph.nodes_of_type(focal_type))

    paired = sorted({a for a in schema.attaching_types
                     if any(schema.is_pair(a, t) for t in qtypes)})
    picks = _pick_specs(graph, rng, paired, n_spec, focal, radius=5)
    if picks is None:
        raise ValueError("graph too small to sample the requested query")

    qids = [f"q{j}" for j in range(n_qnodes)]
    edges = [(qids[j], qids[j + 1]) for j in range(n_qnodes - 1)]
    specs = []
    for j, node in enumerate(picks):
        sid = f"s{j}"
        specs.append((sid, graph.type_of(node), graph.label_of(node)))
        edges.append((qids[j % n_qnodes], sid))
    return QueryGraph(
        specific_nodes=tuple(specs),
        query_nodes=tuple((q, t) for q, t in zip(qids, qtypes)),
        edges=tuple(edges),
    )
