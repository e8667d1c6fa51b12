"""Brute-force reference implementations.

Everything here recomputes scores from first principles: plain Dijkstra over
a dict adjacency for closeness, full scans for star rankings, and injective
tuple enumeration for general queries. No code is shared with the engines'
propagation path on purpose; when the two sides agree it actually means
something.
"""

from __future__ import annotations

import heapq
import math
from bisect import insort
from collections import defaultdict, deque
from dataclasses import dataclass

from .model import HinQueryError, Match, resolve_anchors
from .scoring import ScoringParams


class OracleCapacityError(HinQueryError):
    pass


def _adjacency(graph):
    node_type = {i: t for i, t, _ in graph.nodes}
    adj = defaultdict(list)
    for u, v in graph.normal_edges:
        adj[u].append((v, None))
        adj[v].append((u, None))
    for u, v in graph.hierarchy_edges:
        t = node_type[u]
        adj[u].append((v, t))
        adj[v].append((u, t))
    return adj


def dijkstra_costs(graph, source, discount_types, beta):
    """Cheapest path cost from source to every reachable node. Normal edges
    cost 1, hierarchy edges of a discounted type cost 1 - beta."""
    adj = _adjacency(graph)
    dist = {source: 0.0}
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, htype in adj[u]:
            w = 1.0 - beta if (htype is not None and htype in discount_types) else 1.0
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def exact_closeness(graph, schema, source, params):
    """Closeness of every reachable node to the given source node, where the
    source's own type decides which hierarchy types are discounted.

    Returns {node_id: (cost, closeness)}; unreachable nodes are absent.
    """
    discount = schema.inherited_for(graph.type_of(source))
    dist = dijkstra_costs(graph, source, discount, params.beta)
    return {node: (cost, params.alpha ** cost) for node, cost in dist.items()}


@dataclass
class OracleStarResult:
    table: dict    # candidate node id -> exact score (all candidates, zeros included)
    ranking: list  # top-k (node_id, score), positive scores only


def exact_star_topk(graph, schema, query, k, params=None, exclude=()):
    """Score every candidate of the star's target type by full per-anchor
    Dijkstra runs, then rank."""
    params = params or ScoringParams()
    anchors = resolve_anchors(query, graph)
    _, target_type = query.query_nodes[0]
    anchor_nodes = [anchors[q] for q, _, _ in query.specific_nodes]
    barred = set(anchor_nodes) | set(exclude)

    per_anchor = [exact_closeness(graph, schema, a, params) for a in anchor_nodes]
    table = {}
    for node in graph.nodes_of_type(target_type):
        if node in barred:
            continue
        table[node] = math.fsum(m[node][1] for m in per_anchor if node in m)
    ranked = sorted(((n, s) for n, s in table.items() if s > 0.0),
                    key=lambda t: (-t[1], t[0]))
    return OracleStarResult(table=table, ranking=ranked[:k])


def exact_general_topk(graph, schema, query, k, params=None, cap=10_000_000):
    """Top-k general matches by scoring every injective assignment of data
    nodes to query nodes. Star terms and query-edge terms both come from
    dedicated Dijkstra runs. Refuses instances whose raw tuple count
    exceeds cap."""
    params = params or ScoringParams()
    anchors = resolve_anchors(query, graph)
    barred = set(anchors.values())
    qnodes = list(query.query_nodes)

    lists = {}
    total = 1
    for qid, qtype in qnodes:
        cands = [n for n in graph.nodes_of_type(qtype) if n not in barred]
        lists[qid] = cands
        total *= max(len(cands), 1)
        if total > cap:
            raise OracleCapacityError(
                f"oracle instance too large: more than {cap} candidate tuples")

    anchor_maps = {q: exact_closeness(graph, schema, anchors[q], params)
                   for q in query.specific_ids()}
    spec_ids = set(query.specific_ids())
    star_anchors = {qid: [q for q in query.neighbors(qid) if q in spec_ids]
                    for qid, _ in qnodes}
    deferred = [(a, b) for a, b in query.edges
                if a not in spec_ids and b not in spec_ids]

    qtype_of = dict(qnodes)
    pair_maps = {}

    def edge_closeness(x, qid_a, qid_b):
        disc = schema.discounts_between(qtype_of[qid_a], qtype_of[qid_b])
        key = (x, disc)
        if key not in pair_maps:
            pair_maps[key] = dijkstra_costs(graph, x, disc, params.beta)
        return pair_maps[key]

    best = []  # sorted (-score, id vector, match)
    order = [qid for qid, _ in qnodes]

    def recurse(i, used, partial_star):
        if i == len(order):
            ids = tuple(used[q] for q in order)
            edge_sum = 0.0
            for a, b in deferred:
                costs = edge_closeness(used[a], a, b)
                c = costs.get(used[b])
                edge_sum += params.alpha ** c if c is not None else 0.0
            score = partial_star + edge_sum
            key = (-score, ids)
            if len(best) < k:
                insort(best, (key, dict(used)))
            elif key < best[-1][0]:
                insort(best, (key, dict(used)))
                best.pop()
            return
        qid = order[i]
        for node in lists[qid]:
            if node in used.values():
                continue
            star = math.fsum(
                anchor_maps[a].get(node, (0.0, 0.0))[1] for a in star_anchors[qid])
            used[qid] = node
            recurse(i + 1, used, partial_star + star)
            del used[qid]

    recurse(0, {}, 0.0)
    out = []
    for (neg_score, ids), assign in best:
        out.append(Match(assignment=tuple((q, assign[q]) for q in order),
                         score=-neg_score))
    return out


def exact_match_score(graph, schema, query, assignment, params=None):
    """Score one concrete assignment of data nodes to query nodes.

    assignment maps query id -> data node id. Star terms and query-edge
    terms follow the same rules as exact_general_topk, each from its own
    Dijkstra run, summed with fsum. Lets a caller check any claimed match
    against this route without trusting the claimant's arithmetic.
    """
    params = params or ScoringParams()
    assign = dict(assignment)
    anchors = resolve_anchors(query, graph)
    spec_ids = set(query.specific_ids())
    qtype_of = dict(query.query_nodes)
    terms = []
    for qid, node in assign.items():
        for a in query.neighbors(qid):
            if a in spec_ids:
                m = exact_closeness(graph, schema, anchors[a], params)
                terms.append(m.get(node, (0.0, 0.0))[1])
    for a, b in query.edges:
        if a in spec_ids or b in spec_ids:
            continue
        disc = schema.discounts_between(qtype_of[a], qtype_of[b])
        costs = dijkstra_costs(graph, assign[a], disc, params.beta)
        c = costs.get(assign[b])
        terms.append(params.alpha ** c if c is not None else 0.0)
    return math.fsum(terms)


def bfs_closeness(graph, source, alpha):
    """Pure hop-count closeness, alpha^hops, ignoring hierarchy semantics.
    Cross-check for runs where the discount is turned off."""
    adj = _adjacency(graph)
    hops = {source: 0}
    todo = deque([source])
    while todo:
        u = todo.popleft()
        for v, _ in adj[u]:
            if v not in hops:
                hops[v] = hops[u] + 1
                todo.append(v)
    return {node: alpha ** h for node, h in hops.items()}
